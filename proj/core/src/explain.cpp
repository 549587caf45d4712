#include "sibyl/explain.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <numeric>
#include <random>

#include "sibyl/error.hpp"

namespace sibyl {

namespace {

void require_same_layout(const FactorLayout& expected, const FactorLayout& got,
                         std::string_view what) {
  if (&expected == &got || expected == got) return;
  for (const auto& name : expected.names()) {
    if (!got.find(name)) {
      throw Error(ErrorCode::kSchemaMismatch, std::string(what) +
                                                  " is missing factor '" +
                                                  name + "'");
    }
  }
  for (const auto& name : got.names()) {
    if (!expected.find(name)) {
      throw Error(ErrorCode::kSchemaMismatch,
                  std::string(what) + " has unknown factor '" + name + "'");
    }
  }
  throw Error(ErrorCode::kSchemaMismatch,
              std::string(what) + " orders factors differently from the model");
}

}  // namespace

double ReferenceStats::mean(std::string_view factor) const {
  return means[layout->index_of(factor)];
}

double ReferenceStats::std_dev(std::string_view factor) const {
  return stds[layout->index_of(factor)];
}

ReferenceStats compute_reference_stats(const ReferenceDataset& reference) {
  if (reference.empty()) {
    throw Error(ErrorCode::kInsufficientReference,
                "reference statistics need at least one case");
  }
  const std::size_t n = reference.size();
  const std::size_t m = reference.layout()->size();
  ReferenceStats stats{reference.layout(), std::vector<double>(m, 0.0),
                       std::vector<double>(m, 0.0), n};
  for (const auto& record : reference.cases()) {
    const auto v = record.values();
    for (std::size_t j = 0; j < m; ++j) stats.means[j] += v[j];
  }
  for (auto& mu : stats.means) mu /= static_cast<double>(n);
  for (const auto& record : reference.cases()) {
    const auto v = record.values();
    for (std::size_t j = 0; j < m; ++j) {
      const double d = v[j] - stats.means[j];
      stats.stds[j] += d * d;
    }
  }
  for (auto& s : stats.stds) s = std::sqrt(s / static_cast<double>(n));
  return stats;
}

ReferenceStats compute_reference_stats(const Model& model,
                                       const ReferenceDataset& reference) {
  require_same_layout(*model.layout(), *reference.layout(), "reference");
  return compute_reference_stats(reference);
}

double ContributionSet::contribution(std::string_view factor) const {
  return contributions[layout->index_of(factor)];
}

double ContributionSet::total() const {
  return std::accumulate(contributions.begin(), contributions.end(), 0.0);
}

ContributionSet local_contributions(const Model& model,
                                    const ReferenceStats& stats,
                                    const CaseRecord& record) {
  require_same_layout(*model.layout(), *stats.layout, "reference statistics");
  AlignedValues aligned(*model.layout(), record);
  const auto x = aligned.get();
  const auto w = model.weights();

  ContributionSet out{model.layout(), model.intercept(),
                      std::vector<double>(w.size()), 0.0};
  for (std::size_t i = 0; i < w.size(); ++i) {
    out.base_value += w[i] * stats.means[i];
    out.contributions[i] = w[i] * (x[i] - stats.means[i]);
  }
  out.raw_output = predict_raw(model, record);
  return out;
}

ContributionSet shapley_bruteforce(const Model& model,
                                   const ReferenceStats& stats,
                                   const CaseRecord& record) {
  const std::size_t n = model.factor_count();
  if (n > kMaxOracleFactors) {
    throw Error(ErrorCode::kTooLargeForOracle,
                "exhaustive Shapley supports at most 20 factors, model has " +
                    std::to_string(n));
  }
  require_same_layout(*model.layout(), *stats.layout, "reference statistics");
  AlignedValues aligned(*model.layout(), record);
  const auto x = aligned.get();

  // Value of every coalition: present factors keep the case value, absent
  // ones take the reference mean.
  const std::size_t masks = std::size_t{1} << n;
  std::vector<double> value(masks);
  std::vector<double> hybrid(n);
  for (std::size_t mask = 0; mask < masks; ++mask) {
    for (std::size_t i = 0; i < n; ++i) {
      hybrid[i] = (mask >> i) & 1U ? x[i] : stats.means[i];
    }
    value[mask] = predict_raw(model, CaseRecord("coalition", model.layout(), hybrid));
  }

  // |S|! (n - |S| - 1)! / n!  ==  1 / (n * C(n - 1, |S|))
  std::vector<double> coalition_weight(n, 0.0);
  for (std::size_t s = 0; s < n; ++s) {
    double binom = 1.0;
    for (std::size_t k = 1; k <= s; ++k) {
      binom = binom * static_cast<double>(n - 1 - s + k) / static_cast<double>(k);
    }
    coalition_weight[s] = 1.0 / (static_cast<double>(n) * binom);
  }

  ContributionSet out{model.layout(), value[0], std::vector<double>(n, 0.0),
                      value[masks - 1]};
  for (std::size_t i = 0; i < n; ++i) {
    const std::size_t bit = std::size_t{1} << i;
    double phi = 0.0;
    for (std::size_t mask = 0; mask < masks; ++mask) {
      if (mask & bit) continue;
      phi += coalition_weight[std::popcount(mask)] * (value[mask | bit] - value[mask]);
    }
    out.contributions[i] = phi;
  }
  return out;
}

double mean_squared_error(std::span<const double> predictions,
                          std::span<const double> labels) {
  if (predictions.size() != labels.size() || predictions.empty()) {
    throw Error(ErrorCode::kAlignment,
                "predictions and labels must be non-empty and equally sized");
  }
  double sum = 0.0;
  for (std::size_t i = 0; i < predictions.size(); ++i) {
    const double d = predictions[i] - labels[i];
    sum += d * d;
  }
  return sum / static_cast<double>(predictions.size());
}

std::vector<std::size_t> permutation_indices(std::uint64_t seed,
                                             std::size_t factor, int repeat,
                                             std::size_t n) {
  std::seed_seq seq{static_cast<std::uint32_t>(seed),
                    static_cast<std::uint32_t>(seed >> 32),
                    static_cast<std::uint32_t>(factor),
                    static_cast<std::uint32_t>(static_cast<std::uint64_t>(factor) >> 32),
                    static_cast<std::uint32_t>(repeat)};
  std::mt19937_64 rng(seq);
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::shuffle(order.begin(), order.end(), rng);
  return order;
}

ImportanceReport global_importance(const Model& model,
                                   const ReferenceDataset& reference,
                                   const OutcomeTable& outcomes, int repeats,
                                   std::uint64_t seed) {
  if (repeats < 1) {
    throw Error(ErrorCode::kInvalidInput, "importance repeats must be >= 1");
  }
  if (reference.empty()) {
    throw Error(ErrorCode::kInsufficientReference,
                "importance needs a non-empty reference");
  }
  require_same_layout(*model.layout(), *reference.layout(), "reference");
  const std::vector<double> labels = outcomes.aligned_labels(reference);
  const std::vector<double> base_pred = predict_all(model, reference);
  const double baseline = mean_squared_error(base_pred, labels);

  const std::size_t n = reference.size();
  const auto w = model.weights();
  ImportanceReport report;
  report.metric_name = std::string(kImportanceMetric);
  report.repeats = repeats;
  report.seed = seed;
  report.entries.reserve(w.size());

  std::vector<double> permuted(n);
  for (std::size_t j = 0; j < w.size(); ++j) {
    const std::vector<double> col = reference.column(j);
    double total = 0.0;
    for (int r = 0; r < repeats; ++r) {
      const auto order = permutation_indices(seed, j, r, n);
      // Additive model: swapping one column shifts each prediction by
      // w_j * (new - old) and leaves the other terms alone.
      for (std::size_t i = 0; i < n; ++i) {
        permuted[i] = base_pred[i] + w[j] * (col[order[i]] - col[i]);
      }
      total += mean_squared_error(permuted, labels) - baseline;
    }
    report.entries.push_back(
        {model.layout()->name(j), total / static_cast<double>(repeats), 0.0});
  }

  double max_raw = 0.0;
  for (const auto& e : report.entries) max_raw = std::max(max_raw, e.raw_importance);
  for (auto& e : report.entries) {
    e.relative_importance =
        max_raw > 0.0 ? std::max(0.0, e.raw_importance / max_raw) : 0.0;
  }
  std::sort(report.entries.begin(), report.entries.end(),
            [](const ImportanceEntry& a, const ImportanceEntry& b) {
              if (a.raw_importance != b.raw_importance) {
                return a.raw_importance > b.raw_importance;
              }
              return a.factor < b.factor;
            });
  return report;
}

}  // namespace sibyl
