#include "sibyl/whatif.hpp"

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <set>

#include "sibyl/error.hpp"

namespace sibyl {

std::string_view to_string(Direction direction) {
  switch (direction) {
    case Direction::kUp: return "up";
    case Direction::kDown: return "down";
    case Direction::kUnchanged: return "unchanged";
  }
  return "unchanged";
}

Direction direction_between(RiskScore before, RiskScore after) {
  if (after > before) return Direction::kUp;
  if (after < before) return Direction::kDown;
  return Direction::kUnchanged;
}

namespace {

[[noreturn]] void invalid(const std::string& msg) {
  throw Error(ErrorCode::kInvalidChange, msg);
}

void apply_one(const PresentationSchema& schema, const FactorChange& change,
               const FactorLayout& layout, std::vector<double>& values) {
  const PresentedFactor* pf = schema.find(change.factor);
  if (!pf) invalid("unknown factor '" + change.factor + "'");

  if (pf->kind == PresentedKind::kCategorical) {
    const auto* label = std::get_if<std::string>(&change.value);
    if (!label) invalid("factor '" + pf->key + "' expects a category label");
    auto it = std::find(pf->labels.begin(), pf->labels.end(), *label);
    if (it == pf->labels.end()) {
      invalid("'" + *label + "' is not a category of '" + pf->key + "'");
    }
    const auto chosen = static_cast<std::size_t>(it - pf->labels.begin());
    for (std::size_t i = 0; i < pf->sources.size(); ++i) {
      values[layout.index_of(pf->sources[i])] = i == chosen ? 1.0 : 0.0;
    }
    return;
  }

  const auto* number = std::get_if<double>(&change.value);
  if (!number) invalid("factor '" + pf->key + "' expects a number");
  const double v = *number;
  if (!std::isfinite(v)) invalid("value for '" + pf->key + "' is not finite");
  if (pf->kind == PresentedKind::kBinary && v != 0.0 && v != 1.0) {
    invalid("binary factor '" + pf->key + "' accepts only 0 or 1");
  }
  if (pf->kind == PresentedKind::kNumeric) {
    const FactorMeta* meta = schema.meta(pf->sources.front());
    if (meta->min_value && v < *meta->min_value) {
      invalid("value for '" + pf->key + "' is below its minimum");
    }
    if (meta->max_value && v > *meta->max_value) {
      invalid("value for '" + pf->key + "' is above its maximum");
    }
  }
  values[layout.index_of(pf->sources.front())] = v;
}

}  // namespace

CaseRecord apply_changes(const PresentationSchema& schema,
                         const CaseRecord& record,
                         std::span<const FactorChange> changes) {
  if (changes.size() > kMaxChanges) {
    throw Error(ErrorCode::kLimitExceeded,
                "at most 4 factor changes are allowed, got " +
                    std::to_string(changes.size()));
  }
  if (changes.empty()) invalid("no factor changes given");
  std::set<std::string_view> seen;
  for (const auto& c : changes) {
    if (!seen.insert(c.factor).second) {
      invalid("factor '" + c.factor + "' changed more than once");
    }
  }
  std::vector<double> values(record.values().begin(), record.values().end());
  for (const auto& c : changes) apply_one(schema, c, *record.layout(), values);
  return record.with_values(std::move(values));
}

WhatIfResult whatif_score(const Model& model, const ScoreBins& bins,
                          const PresentationSchema& schema,
                          const CaseRecord& record,
                          std::span<const FactorChange> changes) {
  const CaseRecord changed = apply_changes(schema, record, changes);
  WhatIfResult out;
  out.old_raw = predict_raw(model, record);
  out.new_raw = predict_raw(model, changed);
  out.old_score = to_risk_score(out.old_raw, bins);
  out.new_score = to_risk_score(out.new_raw, bins);
  out.direction = direction_between(out.old_score, out.new_score);
  return out;
}

FlipTable flip_all_booleans(const Model& model, const ScoreBins& bins,
                            const PresentationSchema& schema,
                            const CaseRecord& record) {
  FlipTable table;
  table.old_raw = predict_raw(model, record);
  table.old_score = to_risk_score(table.old_raw, bins);
  for (const auto& pf : schema.factors()) {
    if (pf.kind != PresentedKind::kBinary) continue;
    const std::string& src = pf.sources.front();
    const double current = record.value(src);
    const double flipped = current == 1.0 ? 0.0 : 1.0;
    const FactorChange change{pf.key, flipped};
    const CaseRecord changed = apply_changes(schema, record, {&change, 1});

    FlipRow row;
    row.factor = pf.key;
    row.display_name = pf.display_name;
    row.statement = render_value(*schema.meta(src), flipped);
    row.new_value = flipped;
    row.new_raw = predict_raw(model, changed);
    row.new_score = to_risk_score(row.new_raw, bins);
    row.direction = direction_between(table.old_score, row.new_score);
    table.rows.push_back(std::move(row));
  }
  const int old = table.old_score.value();
  std::stable_sort(table.rows.begin(), table.rows.end(),
                   [old](const FlipRow& a, const FlipRow& b) {
                     const int da = std::abs(a.new_score.value() - old);
                     const int db = std::abs(b.new_score.value() - old);
                     if (da != db) return da > db;
                     return a.factor < b.factor;
                   });
  return table;
}

}  // namespace sibyl
