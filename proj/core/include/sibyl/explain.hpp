#pragma once

#include <cstddef>
#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

#include "sibyl/dataset.hpp"
#include "sibyl/model.hpp"

namespace sibyl {

// Per-factor mean and population standard deviation of a reference set.
struct ReferenceStats {
  LayoutPtr layout;
  std::vector<double> means;
  std::vector<double> stds;
  std::size_t count = 0;

  double mean(std::string_view factor) const;
  double std_dev(std::string_view factor) const;
};

ReferenceStats compute_reference_stats(const ReferenceDataset& reference);
// Same, after checking that the reference matches the model's factors.
ReferenceStats compute_reference_stats(const Model& model,
                                       const ReferenceDataset& reference);

// Signed per-factor attributions for one case. base_value + sum(contributions)
// reproduces raw_output.
struct ContributionSet {
  LayoutPtr layout;
  double base_value = 0.0;
  std::vector<double> contributions;
  double raw_output = 0.0;

  double contribution(std::string_view factor) const;
  double total() const;
};

// Exact Shapley values of an additive model under an independent background
// at the reference means: phi_i = w_i * (x_i - mean_i).
ContributionSet local_contributions(const Model& model,
                                    const ReferenceStats& stats,
                                    const CaseRecord& record);

inline constexpr std::size_t kMaxOracleFactors = 20;

// Shapley values by enumerating all 2^n coalitions; absent factors take the
// reference mean. Exponential, intended only as a cross-check of
// local_contributions. Throws kTooLargeForOracle above 20 factors.
ContributionSet shapley_bruteforce(const Model& model,
                                   const ReferenceStats& stats,
                                   const CaseRecord& record);

struct ImportanceEntry {
  std::string factor;
  double raw_importance = 0.0;
  double relative_importance = 0.0;
};

struct ImportanceReport {
  std::vector<ImportanceEntry> entries;
  std::string metric_name;
  int repeats = 0;
  std::uint64_t seed = 0;
};

inline constexpr int kDefaultImportanceRepeats = 10;
inline constexpr std::uint64_t kDefaultImportanceSeed = 42;
inline constexpr std::string_view kImportanceMetric = "mse_increase";

double mean_squared_error(std::span<const double> predictions,
                          std::span<const double> labels);

// Row order used for permuting `factor` on repeat `repeat`. Depends only on
// (seed, factor, repeat, n), so any factor can be recomputed in isolation.
std::vector<std::size_t> permutation_indices(std::uint64_t seed,
                                             std::size_t factor, int repeat,
                                             std::size_t n);

// Permutation importance: mean over `repeats` shuffles of the increase in
// MSE between raw predictions and the 0/1 outcome labels. Negative values are
// kept; relative_importance is floored at 0.
ImportanceReport global_importance(const Model& model,
                                   const ReferenceDataset& reference,
                                   const OutcomeTable& outcomes,
                                   int repeats = kDefaultImportanceRepeats,
                                   std::uint64_t seed = kDefaultImportanceSeed);

}  // namespace sibyl
