#include "sibyl/present.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <cstdio>
#include <map>

#include "sibyl/error.hpp"

namespace sibyl {

std::string_view to_string(FactorKind kind) {
  switch (kind) {
    case FactorKind::kBinary: return "binary";
    case FactorKind::kNumeric: return "numeric";
    case FactorKind::kOneHotMember: return "onehot_member";
  }
  return "numeric";
}

std::optional<FactorKind> parse_factor_kind(std::string_view text) {
  if (text == "binary") return FactorKind::kBinary;
  if (text == "numeric") return FactorKind::kNumeric;
  if (text == "onehot_member") return FactorKind::kOneHotMember;
  return std::nullopt;
}

std::string_view to_string(PresentedKind kind) {
  switch (kind) {
    case PresentedKind::kBinary: return "binary";
    case PresentedKind::kNumeric: return "numeric";
    case PresentedKind::kCategorical: return "categorical";
  }
  return "numeric";
}

std::string_view to_string(ContributionLabel label) {
  switch (label) {
    case ContributionLabel::kRisk: return "risk";
    case ContributionLabel::kProtective: return "protective";
    case ContributionLabel::kNeutral: return "neutral";
  }
  return "neutral";
}

ContributionLabel label_for(double contribution) {
  if (contribution > 0.0) return ContributionLabel::kRisk;
  if (contribution < 0.0) return ContributionLabel::kProtective;
  return ContributionLabel::kNeutral;
}

PresentationSchema::PresentationSchema(std::vector<FactorMeta> metas)
    : metas_(std::move(metas)) {
  auto fail = [](const std::string& msg) {
    throw Error(ErrorCode::kSchemaError, msg);
  };

  // Group name -> member meta indices, in metadata order.
  std::map<std::string, std::vector<std::size_t>> groups;
  for (std::size_t i = 0; i < metas_.size(); ++i) {
    const FactorMeta& m = metas_[i];
    if (m.name.empty()) fail("factor metadata entry " + std::to_string(i) + " has no name");
    if (!meta_index_.emplace(m.name, i).second) {
      fail("duplicate metadata for factor '" + m.name + "'");
    }
    if (m.kind == FactorKind::kOneHotMember) {
      if (!m.group || m.group->empty()) {
        fail("one-hot member '" + m.name + "' has no group");
      }
      if (!m.member_label || m.member_label->empty()) {
        fail("one-hot member '" + m.name + "' has no member_label");
      }
      groups[*m.group].push_back(i);
    } else if (m.group || m.member_label) {
      fail("factor '" + m.name + "' is not a one-hot member but carries group fields");
    }
    if (m.min_value && m.max_value && *m.min_value > *m.max_value) {
      fail("factor '" + m.name + "' has min_value above max_value");
    }
  }
  for (const auto& [group, members] : groups) {
    if (members.size() < 2) {
      fail("one-hot group '" + group + "' has a single member");
    }
    std::vector<std::string> labels;
    for (auto i : members) labels.push_back(*metas_[i].member_label);
    std::sort(labels.begin(), labels.end());
    if (std::adjacent_find(labels.begin(), labels.end()) != labels.end()) {
      fail("one-hot group '" + group + "' repeats a member label");
    }
  }

  std::map<std::string, bool> emitted_groups;
  for (const FactorMeta& m : metas_) {
    PresentedFactor pf;
    if (m.kind == FactorKind::kOneHotMember) {
      if (emitted_groups[*m.group]) continue;
      emitted_groups[*m.group] = true;
      pf.key = *m.group;
      pf.display_name = *m.group;
      pf.kind = PresentedKind::kCategorical;
      pf.category_code = m.category_code;
      pf.category_name = m.category_name;
      for (auto i : groups[*m.group]) {
        pf.sources.push_back(metas_[i].name);
        pf.labels.push_back(*metas_[i].member_label);
      }
    } else {
      pf.key = m.name;
      pf.display_name = m.description.empty() ? m.name : m.description;
      pf.kind = m.kind == FactorKind::kBinary ? PresentedKind::kBinary
                                              : PresentedKind::kNumeric;
      pf.category_code = m.category_code;
      pf.category_name = m.category_name;
      pf.sources = {m.name};
    }
    factors_.push_back(std::move(pf));
  }

  std::map<std::string, std::size_t> display_names;
  for (std::size_t i = 0; i < factors_.size(); ++i) {
    const auto& pf = factors_[i];
    if (!factor_index_.emplace(pf.key, i).second) {
      fail("presented factor key '" + pf.key + "' is not unique");
    }
    if (!display_names.emplace(pf.display_name, i).second) {
      fail("duplicate display name '" + pf.display_name + "'");
    }
    for (const auto& src : pf.sources) owner_index_.emplace(src, i);
  }
}

const PresentedFactor* PresentationSchema::find(std::string_view key) const {
  auto it = factor_index_.find(std::string(key));
  return it == factor_index_.end() ? nullptr : &factors_[it->second];
}

const FactorMeta* PresentationSchema::meta(std::string_view model_factor) const {
  auto it = meta_index_.find(std::string(model_factor));
  return it == meta_index_.end() ? nullptr : &metas_[it->second];
}

std::optional<std::size_t> PresentationSchema::owner_of(
    std::string_view model_factor) const {
  auto it = owner_index_.find(std::string(model_factor));
  if (it == owner_index_.end()) return std::nullopt;
  return it->second;
}

void PresentationSchema::require_covers(const FactorLayout& layout) const {
  for (const auto& name : layout.names()) {
    if (!meta(name)) {
      throw Error(ErrorCode::kSchemaError,
                  "model factor '" + name + "' has no metadata");
    }
  }
  for (const auto& m : metas_) {
    if (!layout.find(m.name)) {
      throw Error(ErrorCode::kSchemaError,
                  "metadata names unknown model factor '" + m.name + "'");
    }
  }
}

std::vector<std::string> PresentationSchema::validate_case(
    const CaseRecord& record) const {
  std::vector<std::string> problems;
  const FactorLayout& layout = *record.layout();
  for (const auto& pf : factors_) {
    if (pf.kind == PresentedKind::kNumeric) continue;
    if (pf.kind == PresentedKind::kBinary) {
      auto idx = layout.find(pf.sources.front());
      if (!idx) continue;
      const double v = record.value(*idx);
      if (v != 0.0 && v != 1.0) {
        problems.push_back("binary factor '" + pf.key + "' holds " +
                           format_number(v) + ", expected 0 or 1");
      }
      continue;
    }
    int active = 0;
    bool domain_ok = true;
    for (const auto& src : pf.sources) {
      auto idx = layout.find(src);
      if (!idx) continue;
      const double v = record.value(*idx);
      if (v == 1.0) {
        ++active;
      } else if (v != 0.0) {
        domain_ok = false;
        problems.push_back("one-hot member '" + src + "' holds " +
                           format_number(v) + ", expected 0 or 1");
      }
    }
    if (domain_ok && active != 1) {
      problems.push_back("one-hot group '" + pf.key + "' has " +
                         std::to_string(active) +
                         " active members, expected exactly 1");
    }
  }
  return problems;
}

PresentationSchema build_schema(std::vector<FactorMeta> metas) {
  return PresentationSchema(std::move(metas));
}

std::string format_number(double value) {
  char buf[64];
  if (std::isfinite(value) && value == std::trunc(value) && std::fabs(value) < 1e15) {
    std::snprintf(buf, sizeof buf, "%.0f", value == 0.0 ? 0.0 : value);
  } else {
    std::snprintf(buf, sizeof buf, "%.2f", value);
  }
  return buf;
}

std::string auto_negate(std::string_view description) {
  struct Rule {
    std::string_view from;
    std::string_view to;
  };
  static constexpr Rule kRules[] = {{"HAS ", "DOES NOT HAVE "}, {"IS ", "IS NOT "}};

  std::size_t best_pos = std::string_view::npos;
  const Rule* best = nullptr;
  for (const auto& rule : kRules) {
    for (std::size_t pos = description.find(rule.from);
         pos != std::string_view::npos; pos = description.find(rule.from, pos + 1)) {
      // Whole words only, so "THIS " does not match "IS ".
      if (pos == 0 || description[pos - 1] == ' ') {
        if (pos < best_pos) {
          best_pos = pos;
          best = &rule;
        }
        break;
      }
    }
  }
  if (!best) return "NOT: " + std::string(description);
  std::string out(description.substr(0, best_pos));
  out += best->to;
  out += description.substr(best_pos + best->from.size());
  return out;
}

std::string render_value(const FactorMeta& meta, double value) {
  if (!std::isfinite(value)) {
    throw Error(ErrorCode::kInvalidValue,
                "value for '" + meta.name + "' is not finite");
  }
  if (meta.kind == FactorKind::kNumeric) return format_number(value);
  if (value == 1.0) return meta.description;
  if (value == 0.0) {
    if (meta.negated_description && !meta.negated_description->empty()) {
      return *meta.negated_description;
    }
    return auto_negate(meta.description);
  }
  throw Error(ErrorCode::kInvalidValue, "binary factor '" + meta.name +
                                            "' cannot take value " +
                                            format_number(value));
}

std::string presented_value(const PresentationSchema& schema,
                            const PresentedFactor& factor,
                            const CaseRecord& record) {
  switch (factor.kind) {
    case PresentedKind::kCategorical:
      for (std::size_t i = 0; i < factor.sources.size(); ++i) {
        if (record.value(factor.sources[i]) == 1.0) return factor.labels[i];
      }
      return {};
    case PresentedKind::kBinary:
    case PresentedKind::kNumeric: {
      const FactorMeta* meta = schema.meta(factor.sources.front());
      return render_value(*meta, record.value(factor.sources.front()));
    }
  }
  return {};
}

std::vector<PresentedContribution> merge_contributions(
    const PresentationSchema& schema, const ContributionSet& contributions,
    const CaseRecord& record) {
  std::vector<PresentedContribution> out;
  out.reserve(schema.factors().size());
  for (const auto& pf : schema.factors()) {
    double sum = 0.0;
    for (const auto& src : pf.sources) sum += contributions.contribution(src);
    PresentedContribution row;
    row.key = pf.key;
    row.display_name = pf.display_name;
    row.displayed_value = presented_value(schema, pf, record);
    row.contribution = sum;
    row.label = label_for(sum);
    row.category_code = pf.category_code;
    row.kind = pf.kind;
    out.push_back(std::move(row));
  }
  return out;
}

namespace {

bool by_magnitude(const PresentedContribution& a, const PresentedContribution& b) {
  const double ma = std::fabs(a.contribution);
  const double mb = std::fabs(b.contribution);
  if (ma != mb) return ma > mb;
  return a.display_name < b.display_name;
}

std::string lower(std::string_view s) {
  std::string out(s);
  std::transform(out.begin(), out.end(), out.begin(),
                 [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
  return out;
}

}  // namespace

std::vector<PresentedContribution> top_k(
    std::vector<PresentedContribution> presented, std::size_t k) {
  if (k < 1) throw Error(ErrorCode::kInvalidInput, "top_k needs k >= 1");
  std::stable_sort(presented.begin(), presented.end(), by_magnitude);
  if (presented.size() > k) presented.resize(k);
  return presented;
}

SplitView split_view(const std::vector<PresentedContribution>& presented) {
  SplitView view;
  for (const auto& row : presented) {
    if (row.contribution > 0.0) view.risk.push_back(row);
    else if (row.contribution < 0.0) view.protective.push_back(row);
  }
  std::stable_sort(view.risk.begin(), view.risk.end(), by_magnitude);
  std::stable_sort(view.protective.begin(), view.protective.end(), by_magnitude);
  return view;
}

std::vector<PresentedContribution> search_filter(
    const std::vector<PresentedContribution>& presented, std::string_view query,
    const std::set<std::string>& categories) {
  const std::string needle = lower(query);
  std::vector<PresentedContribution> out;
  for (const auto& row : presented) {
    if (!needle.empty() && lower(row.display_name).find(needle) == std::string::npos) {
      continue;
    }
    if (!categories.empty() && !categories.contains(row.category_code)) continue;
    out.push_back(row);
  }
  return out;
}

}  // namespace sibyl
