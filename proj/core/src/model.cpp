#include "sibyl/model.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "sibyl/dataset.hpp"
#include "sibyl/error.hpp"
#include "sibyl/quantile.hpp"

namespace sibyl {

FactorLayout::FactorLayout(std::vector<std::string> names)
    : names_(std::move(names)) {
  index_.reserve(names_.size());
  for (std::size_t i = 0; i < names_.size(); ++i) {
    if (names_[i].empty()) {
      throw Error(ErrorCode::kSchemaError, "factor name must be non-empty");
    }
    if (!index_.emplace(names_[i], i).second) {
      throw Error(ErrorCode::kSchemaError,
                  "duplicate factor name '" + names_[i] + "'");
    }
  }
}

std::optional<std::size_t> FactorLayout::find(std::string_view name) const {
  auto it = index_.find(std::string(name));
  if (it == index_.end()) return std::nullopt;
  return it->second;
}

std::size_t FactorLayout::index_of(std::string_view name) const {
  if (auto i = find(name)) return *i;
  throw Error(ErrorCode::kSchemaMismatch,
              "unknown factor '" + std::string(name) + "'");
}

LayoutPtr make_layout(std::vector<std::string> names) {
  return std::make_shared<const FactorLayout>(std::move(names));
}

namespace {

std::vector<std::string> names_of(
    const std::vector<std::pair<std::string, double>>& weights) {
  std::vector<std::string> names;
  names.reserve(weights.size());
  for (const auto& [name, _] : weights) names.push_back(name);
  return names;
}

}  // namespace

Model::Model(double intercept,
             std::vector<std::pair<std::string, double>> weights,
             std::string outcome_name)
    : intercept_(intercept),
      layout_(make_layout(names_of(weights))),
      outcome_name_(std::move(outcome_name)) {
  if (!std::isfinite(intercept_)) {
    throw Error(ErrorCode::kInvalidInput, "intercept must be finite");
  }
  weights_.reserve(weights.size());
  for (const auto& [name, w] : weights) {
    if (!std::isfinite(w)) {
      throw Error(ErrorCode::kInvalidInput,
                  "weight for '" + name + "' must be finite");
    }
    weights_.push_back(w);
  }
}

double Model::weight(std::string_view factor) const {
  return weights_[layout_->index_of(factor)];
}

CaseRecord::CaseRecord(std::string id, LayoutPtr layout,
                       std::vector<double> values, std::string narrative)
    : id_(std::move(id)),
      layout_(std::move(layout)),
      values_(std::move(values)),
      narrative_(std::move(narrative)) {
  if (!layout_) throw Error(ErrorCode::kInvalidInput, "case without layout");
  if (values_.size() != layout_->size()) {
    throw Error(ErrorCode::kSchemaMismatch,
                "case '" + id_ + "' has " + std::to_string(values_.size()) +
                    " values for " + std::to_string(layout_->size()) +
                    " factors");
  }
  for (std::size_t i = 0; i < values_.size(); ++i) {
    if (!std::isfinite(values_[i])) {
      throw Error(ErrorCode::kInvalidInput, "case '" + id_ + "' factor '" +
                                                layout_->name(i) +
                                                "' is not finite");
    }
  }
}

CaseRecord CaseRecord::from_map(std::string id, LayoutPtr layout,
                                const std::map<std::string, double>& values,
                                std::string narrative) {
  std::vector<double> ordered(layout->size());
  for (std::size_t i = 0; i < layout->size(); ++i) {
    auto it = values.find(layout->name(i));
    if (it == values.end()) {
      throw Error(ErrorCode::kSchemaMismatch, "case '" + id +
                                                  "' is missing factor '" +
                                                  layout->name(i) + "'");
    }
    ordered[i] = it->second;
  }
  for (const auto& [name, _] : values) {
    if (!layout->find(name)) {
      throw Error(ErrorCode::kSchemaMismatch,
                  "case '" + id + "' has unknown factor '" + name + "'");
    }
  }
  return CaseRecord(std::move(id), std::move(layout), std::move(ordered),
                    std::move(narrative));
}

double CaseRecord::value(std::string_view factor) const {
  return values_[layout_->index_of(factor)];
}

std::map<std::string, double> CaseRecord::to_map() const {
  std::map<std::string, double> out;
  for (std::size_t i = 0; i < values_.size(); ++i) {
    out.emplace(layout_->name(i), values_[i]);
  }
  return out;
}

CaseRecord CaseRecord::with_value(std::size_t i, double v) const {
  std::vector<double> copy = values_;
  copy.at(i) = v;
  return CaseRecord(id_, layout_, std::move(copy), narrative_);
}

CaseRecord CaseRecord::with_values(std::vector<double> values) const {
  return CaseRecord(id_, layout_, std::move(values), narrative_);
}

AlignedValues::AlignedValues(const FactorLayout& expected,
                             const CaseRecord& record) {
  const FactorLayout& actual = *record.layout();
  if (&actual == &expected || actual == expected) {
    view_ = record.values();
    return;
  }
  storage_.resize(expected.size());
  for (std::size_t i = 0; i < expected.size(); ++i) {
    auto j = actual.find(expected.name(i));
    if (!j) {
      throw Error(ErrorCode::kSchemaMismatch, "case '" + record.id() +
                                                  "' is missing factor '" +
                                                  expected.name(i) + "'");
    }
    storage_[i] = record.value(*j);
  }
  if (actual.size() != expected.size()) {
    for (const auto& name : actual.names()) {
      if (!expected.find(name)) {
        throw Error(ErrorCode::kSchemaMismatch,
                    "case '" + record.id() + "' has unknown factor '" + name +
                        "'");
      }
    }
  }
  view_ = storage_;
}

RiskScore::RiskScore(int value) : value_(value) {
  if (value < kMinRiskScore || value > kMaxRiskScore) {
    throw Error(ErrorCode::kInvalidInput,
                "risk score " + std::to_string(value) + " outside 1-20");
  }
}

ScoreBins::ScoreBins(std::array<double, kCutpointCount> cutpoints)
    : cutpoints_(cutpoints) {
  for (std::size_t j = 0; j < cutpoints_.size(); ++j) {
    if (!std::isfinite(cutpoints_[j])) {
      throw Error(ErrorCode::kInvalidInput, "score cutpoints must be finite");
    }
    if (j > 0 && cutpoints_[j] < cutpoints_[j - 1]) {
      throw Error(ErrorCode::kInvalidInput,
                  "score cutpoints must be non-decreasing");
    }
  }
}

ScoreBins ScoreBins::from_vector(std::span<const double> cutpoints) {
  if (cutpoints.size() != kCutpointCount) {
    throw Error(ErrorCode::kInvalidInput,
                "expected 19 score cutpoints, got " +
                    std::to_string(cutpoints.size()));
  }
  std::array<double, kCutpointCount> a{};
  std::copy(cutpoints.begin(), cutpoints.end(), a.begin());
  return ScoreBins(a);
}

double quantile_sorted(std::span<const double> sorted, double q) {
  if (sorted.empty()) {
    throw Error(ErrorCode::kInsufficientReference, "quantile of empty sample");
  }
  const double h = static_cast<double>(sorted.size() - 1) * q;
  const auto lo = static_cast<std::size_t>(std::floor(h));
  if (lo + 1 >= sorted.size()) return sorted[sorted.size() - 1];
  const double frac = h - static_cast<double>(lo);
  return sorted[lo] + frac * (sorted[lo + 1] - sorted[lo]);
}

double predict_raw(const Model& model, const CaseRecord& record) {
  AlignedValues x(*model.layout(), record);
  const auto w = model.weights();
  const auto v = x.get();
  double raw = model.intercept();
  for (std::size_t i = 0; i < w.size(); ++i) raw += w[i] * v[i];
  return raw;
}

std::vector<double> predict_all(const Model& model,
                                const ReferenceDataset& reference) {
  std::vector<double> out;
  out.reserve(reference.size());
  for (const auto& record : reference.cases()) {
    out.push_back(predict_raw(model, record));
  }
  return out;
}

ScoreBins fit_score_bins(std::span<const double> raw_outputs) {
  if (raw_outputs.size() < static_cast<std::size_t>(kMaxRiskScore)) {
    throw Error(ErrorCode::kInsufficientReference,
                "score bins need at least 20 reference cases, got " +
                    std::to_string(raw_outputs.size()));
  }
  std::vector<double> sorted(raw_outputs.begin(), raw_outputs.end());
  std::sort(sorted.begin(), sorted.end());
  std::array<double, kCutpointCount> cut{};
  for (std::size_t j = 1; j <= kCutpointCount; ++j) {
    cut[j - 1] = quantile_sorted(
        sorted, static_cast<double>(j) / static_cast<double>(kMaxRiskScore));
  }
  return ScoreBins(cut);
}

ScoreBins fit_score_bins(const Model& model, const ReferenceDataset& reference) {
  return fit_score_bins(predict_all(model, reference));
}

RiskScore to_risk_score(double raw, const ScoreBins& bins) {
  if (!std::isfinite(raw)) {
    throw Error(ErrorCode::kInvalidInput, "raw output must be finite");
  }
  const auto& cut = bins.cutpoints();
  // Cutpoints are sorted, so the count of t_j < raw is a lower_bound offset.
  const auto below = std::lower_bound(cut.begin(), cut.end(), raw) - cut.begin();
  return RiskScore(kMinRiskScore + static_cast<int>(below));
}

RiskScore predict_score(const Model& model, const ScoreBins& bins,
                        const CaseRecord& record) {
  return to_risk_score(predict_raw(model, record), bins);
}

}  // namespace sibyl
