#include "sibyl/distributions.hpp"

#include <algorithm>

#include "sibyl/error.hpp"
#include "sibyl/quantile.hpp"

namespace sibyl {

SliceIndex::SliceIndex(const Model& model, const ScoreBins& bins,
                       const ReferenceDataset& reference) {
  scores_.reserve(reference.size());
  for (std::size_t i = 0; i < reference.size(); ++i) {
    const RiskScore s = predict_score(model, bins, reference.at(i));
    scores_.push_back(s);
    members_[static_cast<std::size_t>(s.value() - kMinRiskScore)].push_back(i);
  }
}

ScoreSlice score_slice(const SliceIndex& index,
                       const ReferenceDataset& reference,
                       const OutcomeTable& outcomes, RiskScore score) {
  const auto members = index.members(score);
  ScoreSlice slice{score, members.size(), std::nullopt};
  if (members.empty()) return slice;
  std::size_t removed = 0;
  for (auto i : members) {
    const Outcome* outcome = outcomes.find(reference.at(i).id());
    if (!outcome) {
      throw Error(ErrorCode::kAlignment,
                  "no outcome for reference case '" + reference.at(i).id() + "'");
    }
    removed += static_cast<std::size_t>(outcome->removed);
  }
  slice.removal_rate_pct =
      100.0 * static_cast<double>(removed) / static_cast<double>(members.size());
  return slice;
}

ScoreSlice score_slice(const ReferenceDataset& reference,
                       const OutcomeTable& outcomes, const ScoreBins& bins,
                       const Model& model, RiskScore score) {
  return score_slice(SliceIndex(model, bins, reference), reference, outcomes, score);
}

std::optional<double> binary_distribution(const ReferenceDataset& reference,
                                          std::span<const std::size_t> slice,
                                          std::size_t factor) {
  if (slice.empty()) return std::nullopt;
  std::size_t ones = 0;
  for (auto i : slice) {
    if (reference.at(i).value(factor) == 1.0) ++ones;
  }
  return 100.0 * static_cast<double>(ones) / static_cast<double>(slice.size());
}

std::optional<BoxStats> numeric_distribution(const ReferenceDataset& reference,
                                             std::span<const std::size_t> slice,
                                             std::size_t factor) {
  if (slice.empty()) return std::nullopt;
  const std::vector<double> all = reference.column(factor);
  std::vector<double> values;
  values.reserve(slice.size());
  for (auto i : slice) values.push_back(reference.at(i).value(factor));
  std::sort(values.begin(), values.end());
  const auto [gmin, gmax] = std::minmax_element(all.begin(), all.end());
  return BoxStats{*gmin,
                  *gmax,
                  values.front(),
                  quantile_sorted(values, 0.25),
                  quantile_sorted(values, 0.5),
                  quantile_sorted(values, 0.75),
                  values.back()};
}

std::optional<SegmentStats> categorical_distribution(
    const ReferenceDataset& reference, std::span<const std::size_t> slice,
    const PresentedFactor& factor) {
  if (slice.empty()) return std::nullopt;
  if (factor.kind != PresentedKind::kCategorical) {
    throw Error(ErrorCode::kInvalidInput,
                "'" + factor.key + "' is not a categorical factor");
  }
  const FactorLayout& layout = *reference.layout();
  std::vector<std::size_t> columns;
  for (const auto& src : factor.sources) columns.push_back(layout.index_of(src));
  std::vector<std::size_t> counts(columns.size(), 0);
  for (auto i : slice) {
    const auto& record = reference.at(i);
    for (std::size_t m = 0; m < columns.size(); ++m) {
      if (record.value(columns[m]) == 1.0) {
        ++counts[m];
        break;
      }
    }
  }
  SegmentStats out;
  for (std::size_t m = 0; m < columns.size(); ++m) {
    out.segments.push_back({factor.labels[m], 100.0 * static_cast<double>(counts[m]) /
                                                  static_cast<double>(slice.size())});
  }
  return out;
}

DistributionBundle distribution_bundle(const SliceIndex& index,
                                       const ReferenceDataset& reference,
                                       const OutcomeTable& outcomes,
                                       const PresentationSchema& schema,
                                       RiskScore score,
                                       std::span<const std::string> keys) {
  DistributionBundle bundle{score_slice(index, reference, outcomes, score), {}};
  std::vector<const PresentedFactor*> chosen;
  if (keys.empty()) {
    for (const auto& pf : schema.factors()) chosen.push_back(&pf);
  } else {
    for (const auto& key : keys) {
      const PresentedFactor* pf = schema.find(key);
      if (!pf) throw Error(ErrorCode::kNotFound, "unknown factor '" + key + "'");
      chosen.push_back(pf);
    }
  }
  const auto members = index.members(score);
  const FactorLayout& layout = *reference.layout();
  for (const PresentedFactor* pf : chosen) {
    FactorDistribution fd{pf->key, pf->display_name, pf->kind, {}, {}, {}};
    switch (pf->kind) {
      case PresentedKind::kBinary:
        fd.binary_pct = binary_distribution(reference, members,
                                            layout.index_of(pf->sources.front()));
        break;
      case PresentedKind::kNumeric:
        fd.box = numeric_distribution(reference, members,
                                      layout.index_of(pf->sources.front()));
        break;
      case PresentedKind::kCategorical:
        fd.segments = categorical_distribution(reference, members, *pf);
        break;
    }
    bundle.factors.push_back(std::move(fd));
  }
  return bundle;
}

}  // namespace sibyl
