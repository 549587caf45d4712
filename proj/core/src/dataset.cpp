#include "sibyl/dataset.hpp"

#include <charconv>
#include <cstdio>

#include "sibyl/error.hpp"

namespace sibyl {

std::optional<Date> parse_iso_date(std::string_view text) {
  if (text.size() != 10 || text[4] != '-' || text[7] != '-') return std::nullopt;
  auto field = [&](std::size_t pos, std::size_t len) -> std::optional<int> {
    int v = 0;
    for (std::size_t i = pos; i < pos + len; ++i) {
      if (text[i] < '0' || text[i] > '9') return std::nullopt;
    }
    std::from_chars(text.data() + pos, text.data() + pos + len, v);
    return v;
  };
  auto y = field(0, 4);
  auto m = field(5, 2);
  auto d = field(8, 2);
  if (!y || !m || !d) return std::nullopt;
  Date date{std::chrono::year{*y}, std::chrono::month{static_cast<unsigned>(*m)},
            std::chrono::day{static_cast<unsigned>(*d)}};
  if (!date.ok()) return std::nullopt;
  return date;
}

std::string format_iso_date(const Date& date) {
  char buf[16];
  std::snprintf(buf, sizeof buf, "%04d-%02u-%02u", static_cast<int>(date.year()),
                static_cast<unsigned>(date.month()),
                static_cast<unsigned>(date.day()));
  return buf;
}

ReferenceDataset::ReferenceDataset(LayoutPtr layout,
                                   std::vector<CaseRecord> cases)
    : layout_(std::move(layout)), cases_(std::move(cases)) {
  by_id_.reserve(cases_.size());
  for (std::size_t i = 0; i < cases_.size(); ++i) {
    const auto& record = cases_[i];
    if (record.layout() != layout_ && !(*record.layout() == *layout_)) {
      throw Error(ErrorCode::kSchemaMismatch,
                  "case '" + record.id() + "' does not match dataset factors");
    }
    if (!by_id_.emplace(record.id(), i).second) {
      throw Error(ErrorCode::kInvalidInput,
                  "duplicate case id '" + record.id() + "'");
    }
  }
}

std::optional<std::size_t> ReferenceDataset::index_of(std::string_view id) const {
  auto it = by_id_.find(std::string(id));
  if (it == by_id_.end()) return std::nullopt;
  return it->second;
}

const CaseRecord* ReferenceDataset::find(std::string_view id) const {
  auto i = index_of(id);
  return i ? &cases_[*i] : nullptr;
}

std::vector<double> ReferenceDataset::column(std::size_t factor) const {
  std::vector<double> out;
  out.reserve(cases_.size());
  for (const auto& record : cases_) out.push_back(record.value(factor));
  return out;
}

OutcomeTable::OutcomeTable(std::map<std::string, Outcome> rows) {
  for (auto& [id, outcome] : rows) {
    if (outcome.removed != 0 && outcome.removed != 1) {
      throw Error(ErrorCode::kInvalidInput,
                  "outcome for '" + id + "' must be 0 or 1");
    }
    rows_.emplace(id, outcome);
  }
}

const Outcome* OutcomeTable::find(std::string_view id) const {
  auto it = rows_.find(id);
  return it == rows_.end() ? nullptr : &it->second;
}

std::vector<double> OutcomeTable::aligned_labels(
    const ReferenceDataset& reference) const {
  std::vector<double> labels;
  labels.reserve(reference.size());
  for (const auto& record : reference.cases()) {
    const Outcome* outcome = find(record.id());
    if (!outcome) {
      throw Error(ErrorCode::kAlignment,
                  "no outcome for reference case '" + record.id() + "'");
    }
    labels.push_back(static_cast<double>(outcome->removed));
  }
  if (rows_.size() != reference.size()) {
    for (const auto& [id, _] : rows_) {
      if (!reference.index_of(id)) {
        throw Error(ErrorCode::kAlignment,
                    "outcome for unknown case '" + id + "'");
      }
    }
  }
  return labels;
}

}  // namespace sibyl
