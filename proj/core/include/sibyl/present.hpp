#pragma once

#include <cstddef>
#include <optional>
#include <set>
#include <string>
#include <string_view>
#include <unordered_map>
#include <utility>
#include <vector>

#include "sibyl/explain.hpp"
#include "sibyl/model.hpp"

namespace sibyl {

enum class FactorKind { kBinary, kNumeric, kOneHotMember };

std::string_view to_string(FactorKind kind);
std::optional<FactorKind> parse_factor_kind(std::string_view text);

// Screener-facing metadata for one model factor.
struct FactorMeta {
  std::string name;
  std::string description;
  std::optional<std::string> negated_description;
  std::string category_code;
  std::string category_name;
  FactorKind kind = FactorKind::kNumeric;
  std::optional<std::string> group;         // one-hot members only
  std::optional<std::string> member_label;  // one-hot members only
  std::optional<double> min_value;          // numeric what-if bounds
  std::optional<double> max_value;
};

enum class PresentedKind { kBinary, kNumeric, kCategorical };

std::string_view to_string(PresentedKind kind);

// A factor as the screener sees it. Standalone metas map 1:1; every one-hot
// group collapses into a single categorical factor keyed by the group name.
struct PresentedFactor {
  std::string key;
  std::string display_name;
  PresentedKind kind = PresentedKind::kNumeric;
  std::string category_code;
  std::string category_name;
  std::vector<std::string> sources;  // model factor names
  std::vector<std::string> labels;   // categorical: parallel to sources
};

class PresentationSchema {
 public:
  explicit PresentationSchema(std::vector<FactorMeta> metas);

  std::span<const PresentedFactor> factors() const noexcept { return factors_; }
  std::span<const FactorMeta> metas() const noexcept { return metas_; }

  const PresentedFactor* find(std::string_view key) const;
  const FactorMeta* meta(std::string_view model_factor) const;
  // Index into factors() of the presented factor owning a model factor.
  std::optional<std::size_t> owner_of(std::string_view model_factor) const;

  // Throws kSchemaError unless every layout factor has exactly one meta and
  // every meta names a layout factor.
  void require_covers(const FactorLayout& layout) const;

  // Metadata-level domain checks: binary cells hold 0/1, each one-hot group
  // has exactly one active member. Returns one message per violation.
  std::vector<std::string> validate_case(const CaseRecord& record) const;

 private:
  std::vector<FactorMeta> metas_;
  std::vector<PresentedFactor> factors_;
  std::unordered_map<std::string, std::size_t> meta_index_;
  std::unordered_map<std::string, std::size_t> factor_index_;
  std::unordered_map<std::string, std::size_t> owner_index_;
};

PresentationSchema build_schema(std::vector<FactorMeta> metas);

enum class ContributionLabel { kRisk, kProtective, kNeutral };

std::string_view to_string(ContributionLabel label);
ContributionLabel label_for(double contribution);

struct PresentedContribution {
  std::string key;
  std::string display_name;
  std::string displayed_value;
  double contribution = 0.0;
  ContributionLabel label = ContributionLabel::kNeutral;
  std::string category_code;
  PresentedKind kind = PresentedKind::kNumeric;
};

// Rolls model-space contributions up to presented factors (one-hot groups are
// summed) in schema order.
std::vector<PresentedContribution> merge_contributions(
    const PresentationSchema& schema, const ContributionSet& contributions,
    const CaseRecord& record);

// Whole numbers without decimals, everything else with two.
std::string format_number(double value);

// Text shown for a factor value. Binary factors always render as a true
// statement about the case: the description when set, otherwise its negation.
std::string render_value(const FactorMeta& meta, double value);

// Negation used when metadata carries no negated_description.
std::string auto_negate(std::string_view description);

// Value text for a presented factor of `record` (categoricals show the active
// member label).
std::string presented_value(const PresentationSchema& schema,
                            const PresentedFactor& factor,
                            const CaseRecord& record);

inline constexpr std::size_t kDefaultTopK = 10;

std::vector<PresentedContribution> top_k(
    std::vector<PresentedContribution> presented, std::size_t k = kDefaultTopK);

struct SplitView {
  std::vector<PresentedContribution> risk;
  std::vector<PresentedContribution> protective;
};

SplitView split_view(const std::vector<PresentedContribution>& presented);

std::vector<PresentedContribution> search_filter(
    const std::vector<PresentedContribution>& presented, std::string_view query,
    const std::set<std::string>& categories);

}  // namespace sibyl
