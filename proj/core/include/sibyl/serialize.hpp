#pragma once

#include <nlohmann/json.hpp>

#include "sibyl/dataio.hpp"
#include "sibyl/distributions.hpp"
#include "sibyl/explain.hpp"
#include "sibyl/neighbors.hpp"
#include "sibyl/present.hpp"
#include "sibyl/whatif.hpp"

// JSON shapes shared by the HTTP service and the CLI's --format json output.
// Field names are lower_snake_case and stable.
namespace sibyl {

nlohmann::json to_json(const ContributionSet& contributions);
nlohmann::json to_json(const PresentedContribution& row);
nlohmann::json to_json(const std::vector<PresentedContribution>& rows);
nlohmann::json to_json(const ImportanceReport& report);
nlohmann::json to_json(const WhatIfResult& result);
nlohmann::json to_json(const FlipTable& table);
nlohmann::json to_json(const ScoreSlice& slice);
nlohmann::json to_json(const BoxStats& box);
nlohmann::json to_json(const SegmentStats& segments);
nlohmann::json to_json(const DistributionBundle& bundle);
nlohmann::json to_json(const CaseEvent& event);
nlohmann::json to_json(const Timeline& timeline);
nlohmann::json to_json(const NeighborResult& result);
nlohmann::json to_json(const ValidationReport& report);

}  // namespace sibyl
