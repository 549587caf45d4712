#include "sibyl/neighbors.hpp"

#include <algorithm>
#include <cmath>

#include "sibyl/error.hpp"

namespace sibyl {

std::string_view to_string(EventKind kind) {
  switch (kind) {
    case EventKind::kReferral: return "referral";
    case EventKind::kInvestigation: return "investigation";
    case EventKind::kRemoval: return "removal";
    case EventKind::kServices: return "services";
  }
  return "referral";
}

std::optional<EventKind> parse_event_kind(std::string_view text) {
  if (text == "referral") return EventKind::kReferral;
  if (text == "investigation") return EventKind::kInvestigation;
  if (text == "removal") return EventKind::kRemoval;
  if (text == "services") return EventKind::kServices;
  return std::nullopt;
}

EventLog::EventLog(std::vector<CaseEvent> events) : count_(events.size()) {
  for (auto& e : events) {
    auto& tl = timelines_[e.case_id];
    tl.case_id = e.case_id;
    tl.events.push_back(std::move(e));
  }
  for (auto& [_, tl] : timelines_) {
    std::stable_sort(tl.events.begin(), tl.events.end(),
                     [](const CaseEvent& a, const CaseEvent& b) { return a.date < b.date; });
  }
}

Timeline EventLog::timeline_for(std::string_view case_id) const {
  auto it = timelines_.find(case_id);
  if (it == timelines_.end()) return Timeline{std::string(case_id), {}};
  return it->second;
}

ReferenceStats build_standardizer(const ReferenceDataset& reference) {
  return compute_reference_stats(reference);
}

double distance(const CaseRecord& a, const CaseRecord& b,
                const ReferenceStats& stats) {
  AlignedValues va(*stats.layout, a);
  AlignedValues vb(*stats.layout, b);
  const auto x = va.get();
  const auto y = vb.get();
  double sum = 0.0;
  for (std::size_t j = 0; j < x.size(); ++j) {
    if (stats.stds[j] == 0.0) continue;
    const double z = (x[j] - y[j]) / stats.stds[j];
    sum += z * z;
  }
  return std::sqrt(sum);
}

NeighborResult find_similar(const CaseRecord& query,
                            const ReferenceDataset& reference,
                            const ReferenceStats& stats, std::size_t k) {
  if (k < 1) throw Error(ErrorCode::kInvalidInput, "k must be >= 1");
  if (reference.empty()) {
    throw Error(ErrorCode::kInsufficientReference, "reference set is empty");
  }
  std::vector<Neighbor> candidates;
  candidates.reserve(reference.size());
  for (const auto& record : reference.cases()) {
    if (record.id() == query.id()) continue;
    candidates.push_back({record.id(), distance(query, record, stats)});
  }
  auto closer = [](const Neighbor& a, const Neighbor& b) {
    if (a.distance != b.distance) return a.distance < b.distance;
    return a.case_id < b.case_id;
  };
  NeighborResult out;
  out.truncated = candidates.size() < k;
  const std::size_t take = std::min(k, candidates.size());
  std::partial_sort(candidates.begin(), candidates.begin() + static_cast<std::ptrdiff_t>(take),
                    candidates.end(), closer);
  candidates.resize(take);
  out.neighbors = std::move(candidates);
  return out;
}

TimelineAxis assemble_timelines(const Timeline& current,
                                std::span<const Timeline> neighbor_timelines) {
  TimelineAxis axis;
  axis.rows.reserve(neighbor_timelines.size() + 1);
  axis.rows.push_back(current);
  axis.rows.insert(axis.rows.end(), neighbor_timelines.begin(), neighbor_timelines.end());
  for (const auto& row : axis.rows) {
    for (const auto& e : row.events) {
      if (!axis.start || e.date < *axis.start) axis.start = e.date;
      if (!axis.end || e.date > *axis.end) axis.end = e.date;
    }
  }
  return axis;
}

}  // namespace sibyl
