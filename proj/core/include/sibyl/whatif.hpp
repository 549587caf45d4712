#pragma once

#include <cstddef>
#include <span>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include "sibyl/model.hpp"
#include "sibyl/present.hpp"

namespace sibyl {

inline constexpr std::size_t kMaxChanges = 4;

// Numbers for binary/numeric factors, member labels for categorical ones.
using ChangeValue = std::variant<double, std::string>;

struct FactorChange {
  std::string factor;  // presented factor key
  ChangeValue value;
};

enum class Direction { kUp, kDown, kUnchanged };

std::string_view to_string(Direction direction);
Direction direction_between(RiskScore before, RiskScore after);

struct WhatIfResult {
  RiskScore old_score{kMinRiskScore};
  RiskScore new_score{kMinRiskScore};
  double old_raw = 0.0;
  double new_raw = 0.0;
  Direction direction = Direction::kUnchanged;
};

struct FlipRow {
  std::string factor;
  std::string display_name;
  std::string statement;  // rendered text of the flipped value
  double new_value = 0.0;
  RiskScore new_score{kMinRiskScore};
  double new_raw = 0.0;
  Direction direction = Direction::kUnchanged;
};

struct FlipTable {
  RiskScore old_score{kMinRiskScore};
  double old_raw = 0.0;
  std::vector<FlipRow> rows;
};

// New record with the changes applied; `record` is left untouched. A
// categorical change activates the chosen member and clears its siblings.
// Throws kLimitExceeded above four changes and kInvalidChange for empty,
// duplicate, unknown or out-of-domain changes.
CaseRecord apply_changes(const PresentationSchema& schema,
                         const CaseRecord& record,
                         std::span<const FactorChange> changes);

WhatIfResult whatif_score(const Model& model, const ScoreBins& bins,
                          const PresentationSchema& schema,
                          const CaseRecord& record,
                          std::span<const FactorChange> changes);

// Score after reversing each standalone binary factor on its own. One-hot
// members are never flipped individually.
FlipTable flip_all_booleans(const Model& model, const ScoreBins& bins,
                            const PresentationSchema& schema,
                            const CaseRecord& record);

}  // namespace sibyl
