#pragma once

#include <cstddef>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "sibyl/dataset.hpp"
#include "sibyl/explain.hpp"

namespace sibyl {

inline constexpr std::size_t kDefaultNeighbors = 3;
inline constexpr std::size_t kMaxNeighbors = 10;

enum class EventKind { kReferral, kInvestigation, kRemoval, kServices };

std::string_view to_string(EventKind kind);
std::optional<EventKind> parse_event_kind(std::string_view text);

struct CaseEvent {
  std::string case_id;
  Date date;
  EventKind kind = EventKind::kReferral;
  std::string note;
};

struct Timeline {
  std::string case_id;
  std::vector<CaseEvent> events;  // ascending by date
};

// Events grouped per case, each timeline sorted by date (stable for equal
// dates, so file order breaks ties).
class EventLog {
 public:
  EventLog() = default;
  explicit EventLog(std::vector<CaseEvent> events);

  Timeline timeline_for(std::string_view case_id) const;
  std::size_t event_count() const noexcept { return count_; }
  const std::map<std::string, Timeline, std::less<>>& timelines() const noexcept {
    return timelines_;
  }

 private:
  std::map<std::string, Timeline, std::less<>> timelines_;
  std::size_t count_ = 0;
};

// Standardization statistics for the distance; identical to the explain
// reference statistics.
ReferenceStats build_standardizer(const ReferenceDataset& reference);

// Euclidean distance over z-scored columns, every factor weighted equally.
// Columns with zero spread contribute nothing.
double distance(const CaseRecord& a, const CaseRecord& b,
                const ReferenceStats& stats);

struct Neighbor {
  std::string case_id;
  double distance = 0.0;
};

struct TimelineAxis {
  std::optional<Date> start;  // unset when no row has any event
  std::optional<Date> end;
  std::vector<Timeline> rows;  // current case first, then neighbors by rank

  bool empty() const noexcept { return !start.has_value(); }
};

struct NeighborResult {
  std::vector<Neighbor> neighbors;  // non-decreasing distance, ties by id
  bool truncated = false;           // fewer than k candidates were available
  TimelineAxis timelines;
};

// k nearest reference cases by exhaustive scan, skipping any case sharing the
// query id.
NeighborResult find_similar(const CaseRecord& query,
                            const ReferenceDataset& reference,
                            const ReferenceStats& stats, std::size_t k);

TimelineAxis assemble_timelines(const Timeline& current,
                                std::span<const Timeline> neighbor_timelines);

}  // namespace sibyl
