#include <chrono>
#include <cmath>
#include <random>

#include "doctest.h"
#include "fixtures.hpp"
#include "oracles.hpp"
#include "sibyl/error.hpp"
#include "sibyl/neighbors.hpp"

using namespace sibyl;
using namespace std::chrono;

namespace {

Date d(int y, unsigned m, unsigned dd) { return year{y} / month{m} / std::chrono::day{dd}; }

}  // namespace

TEST_CASE("distance basics") {
  const Model model(0.0, {{"a", 1.0}, {"b", 1.0}, {"k", 1.0}}, "y");
  ReferenceStats stats = fixture::stats_with_means(model, {0, 0, 0});
  stats.stds = {2.0, 0.5, 0.0};
  const auto a = fixture::make_case(model, "a", {1, 2, 3});
  const auto b = fixture::make_case(model, "b", {3, 2, 3});
  const auto c = fixture::make_case(model, "c", {1, 2.5, 99});
  CHECK(distance(a, a, stats) == 0.0);
  CHECK(distance(a, b, stats) == distance(b, a, stats));
  // One sigma apart in a single column.
  CHECK(distance(a, b, stats) == doctest::Approx(1.0).epsilon(1e-15));
  // The constant column (sigma 0) is ignored.
  CHECK(distance(a, c, stats) == doctest::Approx(1.0).epsilon(1e-15));
}

TEST_CASE("property: distance is a metric on random cases") {
  std::mt19937_64 rng(61);
  const Model model = fixture::random_model(6, rng);
  const auto ref = fixture::random_reference(model, 60, rng);
  const auto stats = build_standardizer(ref);
  for (std::size_t i = 0; i + 2 < ref.size(); ++i) {
    const auto& x = ref.at(i);
    const auto& y = ref.at(i + 1);
    const auto& z = ref.at(i + 2);
    CHECK(distance(x, y, stats) >= 0.0);
    CHECK(distance(x, y, stats) == distance(y, x, stats));
    CHECK(distance(x, z, stats) <= distance(x, y, stats) + distance(y, z, stats) + 1e-12);
  }
}

TEST_CASE("find_similar ranks an exact duplicate first and honours k") {
  std::mt19937_64 rng(3);
  const Model model = fixture::random_model(4, rng);
  auto ref_rows = fixture::random_reference(model, 20, rng);
  std::vector<CaseRecord> cases(ref_rows.cases().begin(), ref_rows.cases().end());
  const auto query = fixture::make_case(model, "query", {cases[7].values().begin(), cases[7].values().end()});
  cases.push_back(query);
  const ReferenceDataset ref(model.layout(), cases);
  const auto stats = build_standardizer(ref);
  const auto result = find_similar(query, ref, stats, 3);
  REQUIRE(result.neighbors.size() == 3);
  CHECK(result.neighbors[0].case_id == cases[7].id());
  CHECK(result.neighbors[0].distance == 0.0);
  CHECK(!result.truncated);
  for (const auto& n : result.neighbors) CHECK(n.case_id != "query");
}

TEST_CASE("find_similar flags truncation on a small reference") {
  const Model model(0.0, {{"a", 1.0}}, "y");
  std::vector<CaseRecord> cases;
  for (int i = 0; i < 3; ++i) cases.emplace_back("c" + std::to_string(i), model.layout(), std::vector<double>{double(i)});
  const ReferenceDataset ref(model.layout(), cases);
  const auto stats = build_standardizer(ref);
  const auto result = find_similar(ref.at(0), ref, stats, 5);
  CHECK(result.neighbors.size() == 2);
  CHECK(result.truncated);
  CHECK_THROWS_AS(find_similar(ref.at(0), ref, stats, 0), Error);
}

TEST_CASE("property: find_similar agrees with the exhaustive oracle") {
  std::mt19937_64 rng(1234);
  const Model model = fixture::random_model(8, rng);
  const auto ref = fixture::random_reference(model, 300, rng);
  const auto stats = build_standardizer(ref);
  std::vector<std::string> ids;
  std::vector<std::vector<double>> rows;
  for (const auto& c : ref.cases()) {
    ids.push_back(c.id());
    rows.emplace_back(c.values().begin(), c.values().end());
  }
  for (int q = 0; q < 30; ++q) {
    const std::size_t k = 1 + q % kMaxNeighbors;
    const auto& query = ref.at(static_cast<std::size_t>(q) * 7);
    const auto got = find_similar(query, ref, stats, k);
    const auto want = oracle::exhaustive_knn(ids, rows, rows[q * 7], query.id(), stats.stds, k);
    REQUIRE(got.neighbors.size() == want.size());
    for (std::size_t i = 0; i < want.size(); ++i) {
      CHECK(got.neighbors[i].case_id == want[i].first);
      CHECK(std::fabs(got.neighbors[i].distance - want[i].second) < 1e-9);
    }
  }
}

TEST_CASE("event log orders events per case") {
  const EventLog log({{"A", d(2015, 3, 1), EventKind::kRemoval, ""},
                      {"A", d(2013, 1, 5), EventKind::kReferral, "first"},
                      {"B", d(2014, 6, 1), EventKind::kServices, ""}});
  CHECK(log.event_count() == 3);
  const auto a = log.timeline_for("A");
  REQUIRE(a.events.size() == 2);
  CHECK(a.events[0].date == d(2013, 1, 5));
  CHECK(log.timeline_for("Z").events.empty());
}

TEST_CASE("assemble_timelines spans all rows; empty histories are flagged") {
  const Timeline current{"cur", {{"cur", d(2016, 1, 1), EventKind::kReferral, ""}}};
  const std::vector<Timeline> others{{"n1", {{"n1", d(2012, 2, 2), EventKind::kReferral, ""},
                                             {"n1", d(2019, 9, 9), EventKind::kRemoval, ""}}},
                                     {"n2", {}}};
  const auto axis = assemble_timelines(current, others);
  REQUIRE(axis.rows.size() == 3);
  CHECK(axis.rows[0].case_id == "cur");
  CHECK(axis.start == d(2012, 2, 2));
  CHECK(axis.end == d(2019, 9, 9));
  CHECK(!axis.empty());
  for (const auto& row : axis.rows) {
    for (const auto& e : row.events) {
      CHECK(*axis.start <= e.date);
      CHECK(e.date <= *axis.end);
    }
  }
  const auto none = assemble_timelines(Timeline{"cur", {}}, std::vector<Timeline>{{"n", {}}});
  CHECK(none.empty());
  CHECK(none.rows.size() == 2);
}

TEST_CASE("event kinds round-trip through text") {
  for (auto k : {EventKind::kReferral, EventKind::kInvestigation, EventKind::kRemoval, EventKind::kServices}) {
    CHECK(parse_event_kind(to_string(k)) == k);
  }
  CHECK(!parse_event_kind("party"));
}
