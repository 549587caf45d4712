#pragma once

#include <chrono>
#include <cstddef>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "sibyl/model.hpp"

namespace sibyl {

using Date = std::chrono::year_month_day;

// Strict YYYY-MM-DD; nullopt for anything else, including impossible dates.
std::optional<Date> parse_iso_date(std::string_view text);
std::string format_iso_date(const Date& date);

// Background population of past cases. All records share one layout.
class ReferenceDataset {
 public:
  ReferenceDataset(LayoutPtr layout, std::vector<CaseRecord> cases);

  const LayoutPtr& layout() const noexcept { return layout_; }
  std::size_t size() const noexcept { return cases_.size(); }
  bool empty() const noexcept { return cases_.empty(); }
  std::span<const CaseRecord> cases() const noexcept { return cases_; }
  const CaseRecord& at(std::size_t i) const { return cases_.at(i); }

  std::optional<std::size_t> index_of(std::string_view id) const;
  const CaseRecord* find(std::string_view id) const;

  std::vector<double> column(std::size_t factor) const;

 private:
  LayoutPtr layout_;
  std::vector<CaseRecord> cases_;
  std::unordered_map<std::string, std::size_t> by_id_;
};

struct Outcome {
  int removed = 0;
  std::optional<Date> removal_date;
};

class OutcomeTable {
 public:
  OutcomeTable() = default;
  explicit OutcomeTable(std::map<std::string, Outcome> rows);

  std::size_t size() const noexcept { return rows_.size(); }
  const Outcome* find(std::string_view id) const;
  const std::map<std::string, Outcome, std::less<>>& rows() const noexcept {
    return rows_;
  }

  // Labels in reference order. Throws kAlignment when a reference case has no
  // outcome or an outcome names a case outside the reference.
  std::vector<double> aligned_labels(const ReferenceDataset& reference) const;

 private:
  std::map<std::string, Outcome, std::less<>> rows_;
};

}  // namespace sibyl
