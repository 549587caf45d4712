#include "sibyl/serialize.hpp"

namespace sibyl {

using nlohmann::json;

namespace {

json optional_number(const std::optional<double>& v) {
  return v ? json(*v) : json(nullptr);
}

json optional_date(const std::optional<Date>& d) {
  return d ? json(format_iso_date(*d)) : json(nullptr);
}

}  // namespace

json to_json(const ContributionSet& contributions) {
  json factors = json::array();
  for (std::size_t i = 0; i < contributions.contributions.size(); ++i) {
    factors.push_back({{"factor", contributions.layout->name(i)},
                       {"contribution", contributions.contributions[i]}});
  }
  return {{"base_value", contributions.base_value},
          {"raw_output", contributions.raw_output},
          {"contributions", std::move(factors)}};
}

json to_json(const PresentedContribution& row) {
  return {{"key", row.key},
          {"display_name", row.display_name},
          {"displayed_value", row.displayed_value},
          {"contribution", row.contribution},
          {"label", to_string(row.label)},
          {"category_code", row.category_code},
          {"kind", to_string(row.kind)}};
}

json to_json(const std::vector<PresentedContribution>& rows) {
  json out = json::array();
  for (const auto& row : rows) out.push_back(to_json(row));
  return out;
}

json to_json(const ImportanceReport& report) {
  json entries = json::array();
  for (const auto& e : report.entries) {
    entries.push_back({{"factor", e.factor},
                       {"raw_importance", e.raw_importance},
                       {"relative_importance", e.relative_importance}});
  }
  return {{"metric_name", report.metric_name},
          {"repeats", report.repeats},
          {"seed", report.seed},
          {"entries", std::move(entries)}};
}

json to_json(const WhatIfResult& result) {
  return {{"old_score", result.old_score.value()},
          {"new_score", result.new_score.value()},
          {"old_raw", result.old_raw},
          {"new_raw", result.new_raw},
          {"direction", to_string(result.direction)}};
}

json to_json(const FlipTable& table) {
  json rows = json::array();
  for (const auto& r : table.rows) {
    rows.push_back({{"factor", r.factor},
                    {"display_name", r.display_name},
                    {"statement", r.statement},
                    {"new_value", r.new_value},
                    {"new_score", r.new_score.value()},
                    {"new_raw", r.new_raw},
                    {"direction", to_string(r.direction)}});
  }
  return {{"old_score", table.old_score.value()},
          {"old_raw", table.old_raw},
          {"rows", std::move(rows)}};
}

json to_json(const ScoreSlice& slice) {
  return {{"score", slice.score.value()},
          {"case_count", slice.case_count},
          {"has_data", slice.case_count > 0},
          {"removal_rate_pct", optional_number(slice.removal_rate_pct)}};
}

json to_json(const BoxStats& box) {
  return {{"global_min", box.global_min}, {"global_max", box.global_max},
          {"slice_min", box.slice_min},   {"q1", box.q1},
          {"median", box.median},         {"q3", box.q3},
          {"slice_max", box.slice_max}};
}

json to_json(const SegmentStats& segments) {
  json out = json::array();
  for (const auto& s : segments.segments) {
    out.push_back({{"label", s.label}, {"pct", s.pct}});
  }
  return out;
}

json to_json(const DistributionBundle& bundle) {
  json factors = json::array();
  for (const auto& f : bundle.factors) {
    json entry = {{"key", f.key},
                  {"display_name", f.display_name},
                  {"kind", to_string(f.kind)}};
    switch (f.kind) {
      case PresentedKind::kBinary:
        entry["pct_true"] = optional_number(f.binary_pct);
        break;
      case PresentedKind::kNumeric:
        entry["box"] = f.box ? to_json(*f.box) : json(nullptr);
        break;
      case PresentedKind::kCategorical:
        entry["segments"] = f.segments ? to_json(*f.segments) : json(nullptr);
        break;
    }
    factors.push_back(std::move(entry));
  }
  return {{"slice", to_json(bundle.slice)}, {"factors", std::move(factors)}};
}

json to_json(const CaseEvent& event) {
  return {{"date", format_iso_date(event.date)},
          {"kind", to_string(event.kind)},
          {"note", event.note}};
}

json to_json(const Timeline& timeline) {
  json events = json::array();
  for (const auto& e : timeline.events) events.push_back(to_json(e));
  return {{"case_id", timeline.case_id}, {"events", std::move(events)}};
}

json to_json(const NeighborResult& result) {
  json neighbors = json::array();
  for (const auto& n : result.neighbors) {
    neighbors.push_back({{"case_id", n.case_id}, {"distance", n.distance}});
  }
  json rows = json::array();
  for (const auto& row : result.timelines.rows) rows.push_back(to_json(row));
  return {{"neighbors", std::move(neighbors)},
          {"truncated", result.truncated},
          {"axis_start", optional_date(result.timelines.start)},
          {"axis_end", optional_date(result.timelines.end)},
          {"timeline_empty", result.timelines.empty()},
          {"rows", std::move(rows)}};
}

json to_json(const ValidationReport& report) {
  json findings = json::array();
  for (const auto& f : report.findings) {
    findings.push_back({{"severity", to_string(f.severity)},
                        {"location", f.location},
                        {"message", f.message}});
  }
  return {{"ok", report.ok()},
          {"error_count", report.error_count()},
          {"findings", std::move(findings)}};
}

}  // namespace sibyl
