#pragma once

#include <array>
#include <cstddef>
#include <map>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <utility>
#include <vector>

namespace sibyl {

// Ordered, duplicate-free list of model factor names. Shared (immutable) by
// the model and every case built against it, so value vectors can be indexed
// positionally.
class FactorLayout {
 public:
  explicit FactorLayout(std::vector<std::string> names);

  std::size_t size() const noexcept { return names_.size(); }
  std::span<const std::string> names() const noexcept { return names_; }
  const std::string& name(std::size_t i) const { return names_.at(i); }

  std::optional<std::size_t> find(std::string_view name) const;
  // Throws Error(kSchemaMismatch) naming the factor when absent.
  std::size_t index_of(std::string_view name) const;

  bool operator==(const FactorLayout& other) const noexcept {
    return names_ == other.names_;
  }

 private:
  std::vector<std::string> names_;
  std::unordered_map<std::string, std::size_t> index_;
};

using LayoutPtr = std::shared_ptr<const FactorLayout>;

LayoutPtr make_layout(std::vector<std::string> names);

// Additive risk model: raw = intercept + sum_i weight_i * x_i.
class Model {
 public:
  Model(double intercept, std::vector<std::pair<std::string, double>> weights,
        std::string outcome_name);

  double intercept() const noexcept { return intercept_; }
  std::span<const double> weights() const noexcept { return weights_; }
  double weight(std::string_view factor) const;
  const LayoutPtr& layout() const noexcept { return layout_; }
  std::size_t factor_count() const noexcept { return weights_.size(); }
  const std::string& outcome_name() const noexcept { return outcome_name_; }

 private:
  double intercept_;
  LayoutPtr layout_;
  std::vector<double> weights_;
  std::string outcome_name_;
};

// One referral. Values are positional against layout(); binary factors are
// 0/1 and categorical attributes arrive as one-hot member columns. Metadata
// level checks (binary domain, one-hot exclusivity) live in PresentationSchema.
class CaseRecord {
 public:
  CaseRecord(std::string id, LayoutPtr layout, std::vector<double> values,
             std::string narrative = {});

  // Builds a record from a name -> value mapping; any missing or extra factor
  // raises kSchemaMismatch naming it.
  static CaseRecord from_map(std::string id, LayoutPtr layout,
                             const std::map<std::string, double>& values,
                             std::string narrative = {});

  const std::string& id() const noexcept { return id_; }
  const LayoutPtr& layout() const noexcept { return layout_; }
  std::span<const double> values() const noexcept { return values_; }
  double value(std::size_t i) const { return values_.at(i); }
  double value(std::string_view factor) const;
  const std::string& narrative() const noexcept { return narrative_; }

  std::map<std::string, double> to_map() const;

  CaseRecord with_value(std::size_t i, double v) const;
  CaseRecord with_values(std::vector<double> values) const;

 private:
  std::string id_;
  LayoutPtr layout_;
  std::vector<double> values_;
  std::string narrative_;
};

// Case values re-ordered to match `expected`. Zero-copy when the layouts are
// already identical; throws kSchemaMismatch naming the first missing or extra
// factor otherwise.
class AlignedValues {
 public:
  AlignedValues(const FactorLayout& expected, const CaseRecord& record);
  std::span<const double> get() const noexcept { return view_; }

 private:
  std::vector<double> storage_;
  std::span<const double> view_;
};

inline constexpr int kMinRiskScore = 1;
inline constexpr int kMaxRiskScore = 20;
inline constexpr std::size_t kCutpointCount = kMaxRiskScore - 1;

class RiskScore {
 public:
  explicit RiskScore(int value);
  int value() const noexcept { return value_; }
  auto operator<=>(const RiskScore&) const = default;

 private:
  int value_;
};

class ScoreBins {
 public:
  explicit ScoreBins(std::array<double, kCutpointCount> cutpoints);
  // Accepts any container; the size must be exactly 19.
  static ScoreBins from_vector(std::span<const double> cutpoints);

  const std::array<double, kCutpointCount>& cutpoints() const noexcept {
    return cutpoints_;
  }

 private:
  std::array<double, kCutpointCount> cutpoints_;
};

class ReferenceDataset;

double predict_raw(const Model& model, const CaseRecord& record);

// Raw predictions for every reference case, in dataset order.
std::vector<double> predict_all(const Model& model,
                                const ReferenceDataset& reference);

// Ventile cutpoints of the reference raw outputs (linear-interpolation
// quantiles at j/20, j = 1..19). Needs at least 20 cases.
ScoreBins fit_score_bins(const Model& model, const ReferenceDataset& reference);
ScoreBins fit_score_bins(std::span<const double> raw_outputs);

// 1 + number of cutpoints strictly below raw. Ties at a cutpoint land in the
// lower score.
RiskScore to_risk_score(double raw, const ScoreBins& bins);

RiskScore predict_score(const Model& model, const ScoreBins& bins,
                        const CaseRecord& record);

}  // namespace sibyl
