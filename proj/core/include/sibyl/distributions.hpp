#pragma once

#include <array>
#include <cstddef>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "sibyl/dataset.hpp"
#include "sibyl/model.hpp"
#include "sibyl/present.hpp"

namespace sibyl {

struct ScoreSlice {
  RiskScore score{kMinRiskScore};
  std::size_t case_count = 0;
  std::optional<double> removal_rate_pct;  // unset for an empty slice
};

struct BoxStats {
  double global_min = 0.0;
  double global_max = 0.0;
  double slice_min = 0.0;
  double q1 = 0.0;
  double median = 0.0;
  double q3 = 0.0;
  double slice_max = 0.0;
};

struct Segment {
  std::string label;
  double pct = 0.0;
};

struct SegmentStats {
  std::vector<Segment> segments;
};

// Risk score of every reference case, computed once.
class SliceIndex {
 public:
  SliceIndex(const Model& model, const ScoreBins& bins,
             const ReferenceDataset& reference);

  std::span<const std::size_t> members(RiskScore score) const {
    return members_[static_cast<std::size_t>(score.value() - kMinRiskScore)];
  }
  RiskScore score_of(std::size_t case_index) const {
    return scores_.at(case_index);
  }
  std::size_t case_count() const noexcept { return scores_.size(); }

 private:
  std::vector<RiskScore> scores_;
  std::array<std::vector<std::size_t>, kMaxRiskScore> members_;
};

ScoreSlice score_slice(const SliceIndex& index,
                       const ReferenceDataset& reference,
                       const OutcomeTable& outcomes, RiskScore score);

ScoreSlice score_slice(const ReferenceDataset& reference,
                       const OutcomeTable& outcomes, const ScoreBins& bins,
                       const Model& model, RiskScore score);

// Percentage of slice cases with the binary factor set; unset when empty.
std::optional<double> binary_distribution(const ReferenceDataset& reference,
                                          std::span<const std::size_t> slice,
                                          std::size_t factor);

// Global bounds over the whole reference plus five-number slice summary.
std::optional<BoxStats> numeric_distribution(const ReferenceDataset& reference,
                                             std::span<const std::size_t> slice,
                                             std::size_t factor);

// One segment per member label, in metadata order.
std::optional<SegmentStats> categorical_distribution(
    const ReferenceDataset& reference, std::span<const std::size_t> slice,
    const PresentedFactor& factor);

struct FactorDistribution {
  std::string key;
  std::string display_name;
  PresentedKind kind = PresentedKind::kNumeric;
  std::optional<double> binary_pct;
  std::optional<BoxStats> box;
  std::optional<SegmentStats> segments;
};

struct DistributionBundle {
  ScoreSlice slice;
  std::vector<FactorDistribution> factors;
};

// Slice summary plus one widget payload per requested presented factor (all
// of them when `keys` is empty). Unknown keys raise kNotFound.
DistributionBundle distribution_bundle(const SliceIndex& index,
                                       const ReferenceDataset& reference,
                                       const OutcomeTable& outcomes,
                                       const PresentationSchema& schema,
                                       RiskScore score,
                                       std::span<const std::string> keys = {});

}  // namespace sibyl
