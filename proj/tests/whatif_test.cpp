#include <cmath>
#include <random>

#include "doctest.h"
#include "fixtures.hpp"
#include "oracles.hpp"
#include "sibyl/error.hpp"
#include "sibyl/whatif.hpp"

using namespace sibyl;

namespace {

ErrorCode code_of(auto&& fn) {
  try {
    fn();
  } catch (const Error& e) {
    return e.code();
  }
  FAIL("expected sibyl::Error");
  return ErrorCode::kNotFound;
}

// Model with three standalone booleans, one numeric and a four-member group.
struct World {
  Model model;
  PresentationSchema schema;
  ScoreBins bins;
};

World make_world(std::vector<double> weights) {
  const std::vector<std::string> names{"A", "B", "C", "N", "G1", "G2", "G3", "G4"};
  std::vector<std::pair<std::string, double>> w;
  for (std::size_t i = 0; i < names.size(); ++i) w.emplace_back(names[i], weights[i]);
  Model model(0.1, w, "y");
  auto n = fixture::numeric_meta("N", "PAST REFERRAL COUNT");
  n.min_value = 0;
  n.max_value = 10;
  auto schema = build_schema({fixture::binary_meta("A", "CHILD HAS SIBLINGS"),
                              fixture::binary_meta("B", "PARENT IS EMPLOYED"),
                              fixture::binary_meta("C", "LAW ENFORCEMENT REPORTER"), n,
                              fixture::member_meta("G1", "AGE GROUP", "0"),
                              fixture::member_meta("G2", "AGE GROUP", "1-3"),
                              fixture::member_meta("G3", "AGE GROUP", "4-10"),
                              fixture::member_meta("G4", "AGE GROUP", "11-17")});
  std::vector<double> cut(19);
  for (int i = 0; i < 19; ++i) cut[i] = -1.0 + 0.15 * i;
  return {std::move(model), std::move(schema), ScoreBins::from_vector(cut)};
}

std::vector<double> weights_of(const Model& m) { return {m.weights().begin(), m.weights().end()}; }

}  // namespace

TEST_CASE("apply_changes edits a single binary cell") {
  const auto w = make_world({0.5, -0.2, 0.3, 0.05, 0, 0.1, 0.2, 0.3});
  const auto record = fixture::make_case(w.model, "x", {1, 1, 1, 3, 1, 0, 0, 0});
  const FactorChange change{"C", 0.0};
  const auto edited = apply_changes(w.schema, record, std::span(&change, 1));
  CHECK(edited.value("C") == 0.0);
  for (const char* other : {"A", "B", "N", "G1", "G2", "G3", "G4"}) {
    CHECK(edited.value(other) == record.value(other));
  }
  CHECK(edited.id() == record.id());
}

TEST_CASE("apply_changes sets a categorical one-hot") {
  const auto w = make_world({0, 0, 0, 0, 0, 0, 0, 0});
  const auto record = fixture::make_case(w.model, "x", {0, 0, 0, 0, 1, 0, 0, 0});
  const FactorChange change{"AGE GROUP", std::string("4-10")};
  const auto edited = apply_changes(w.schema, record, std::span(&change, 1));
  CHECK(edited.value("G1") == 0.0);
  CHECK(edited.value("G2") == 0.0);
  CHECK(edited.value("G3") == 1.0);
  CHECK(edited.value("G4") == 0.0);
}

TEST_CASE("apply_changes limits and validation") {
  const auto w = make_world({0, 0, 0, 0, 0, 0, 0, 0});
  const auto record = fixture::make_case(w.model, "x", {0, 0, 0, 0, 1, 0, 0, 0});
  const std::vector<FactorChange> four{{"A", 1.0}, {"B", 1.0}, {"C", 1.0}, {"N", 2.0}};
  CHECK_NOTHROW(apply_changes(w.schema, record, four));
  auto five = four;
  five.push_back({"AGE GROUP", std::string("1-3")});
  CHECK(code_of([&] { apply_changes(w.schema, record, five); }) == ErrorCode::kLimitExceeded);

  auto bad = [&](FactorChange c) {
    return code_of([&] { apply_changes(w.schema, record, std::span(&c, 1)); });
  };
  CHECK(code_of([&] { apply_changes(w.schema, record, {}); }) == ErrorCode::kInvalidChange);
  CHECK(bad({"NOPE", 1.0}) == ErrorCode::kInvalidChange);
  CHECK(bad({"A", 0.5}) == ErrorCode::kInvalidChange);
  CHECK(bad({"A", std::string("yes")}) == ErrorCode::kInvalidChange);
  CHECK(bad({"N", 11.0}) == ErrorCode::kInvalidChange);
  CHECK(bad({"N", -1.0}) == ErrorCode::kInvalidChange);
  CHECK(bad({"AGE GROUP", std::string("99")}) == ErrorCode::kInvalidChange);
  const std::vector<FactorChange> dup{{"A", 1.0}, {"A", 0.0}};
  CHECK(code_of([&] { apply_changes(w.schema, record, dup); }) == ErrorCode::kInvalidChange);
}

TEST_CASE("whatif on a zero-weight factor leaves the score unchanged") {
  const auto w = make_world({0, 0.4, 0.3, 0.05, 0, 0.1, 0.2, 0.3});
  const auto record = fixture::make_case(w.model, "x", {0, 1, 1, 3, 1, 0, 0, 0});
  const FactorChange change{"A", 1.0};
  const auto r = whatif_score(w.model, w.bins, w.schema, record, std::span(&change, 1));
  CHECK(r.new_raw == r.old_raw);
  CHECK(r.new_score == r.old_score);
  CHECK(r.direction == Direction::kUnchanged);
}

TEST_CASE("whatif worked example: turning off the third factor") {
  const Model model = fixture::three_factor_model();
  auto schema = build_schema({fixture::numeric_meta("a", "A"), fixture::numeric_meta("b", "B"),
                              fixture::binary_meta("c", "C IS SET")});
  std::vector<double> cut(19);
  for (int i = 0; i < 19; ++i) cut[i] = 0.1 * i;
  const auto bins = ScoreBins::from_vector(cut);
  const auto record = fixture::make_case(model, "x", {3, 1, 1});
  const FactorChange change{"c", 0.0};
  const auto r = whatif_score(model, bins, schema, record, std::span(&change, 1));
  CHECK(r.old_raw == doctest::Approx(1.7).epsilon(1e-12));
  CHECK(r.new_raw == doctest::Approx(1.4).epsilon(1e-12));
  CHECK(std::fabs(r.new_raw - oracle::dot_predict(0.1, {0.5, -0.2, 0.3}, {3, 1, 0})) < 1e-12);
  CHECK(r.new_score == to_risk_score(1.4, bins));
  CHECK(r.direction == direction_between(r.old_score, r.new_score));
}

TEST_CASE("flip table covers standalone booleans only") {
  const auto w = make_world({0.5, 0.0, -0.3, 0.05, 0, 0.1, 0.2, 0.3});
  const auto record = fixture::make_case(w.model, "x", {1, 0, 0, 3, 0, 1, 0, 0});
  const auto table = flip_all_booleans(w.model, w.bins, w.schema, record);
  REQUIRE(table.rows.size() == 3);
  for (const auto& row : table.rows) {
    CHECK((row.factor == "A" || row.factor == "B" || row.factor == "C"));
    const FactorChange change{row.factor, row.new_value};
    const auto r = whatif_score(w.model, w.bins, w.schema, record, std::span(&change, 1));
    CHECK(r.new_score == row.new_score);
    CHECK(r.new_raw == row.new_raw);
    CHECK(row.new_value == 1.0 - record.value(row.factor));
    CHECK(row.statement.find("True") == std::string::npos);
    CHECK(row.statement.find("False") == std::string::npos);
    if (row.factor == "B") {
      CHECK(row.new_score == table.old_score);
      CHECK(row.direction == Direction::kUnchanged);
    }
  }
  // Largest score change first.
  for (std::size_t i = 1; i < table.rows.size(); ++i) {
    const int prev = std::abs(table.rows[i - 1].new_score.value() - table.old_score.value());
    const int cur = std::abs(table.rows[i].new_score.value() - table.old_score.value());
    CHECK(prev >= cur);
  }
}

TEST_CASE("property: whatif raw change equals the sum of weight times delta") {
  std::mt19937_64 rng(17);
  std::normal_distribution<double> g;
  std::bernoulli_distribution coin(0.5);
  for (int trial = 0; trial < 200; ++trial) {
    std::vector<double> weights(8);
    for (auto& v : weights) v = g(rng);
    const auto w = make_world(weights);
    std::vector<double> x{double(coin(rng)), double(coin(rng)), double(coin(rng)), 4.0, 0, 0, 0, 0};
    x[4 + trial % 4] = 1.0;
    const auto record = fixture::make_case(w.model, "x", x);
    const std::vector<FactorChange> changes{{"A", 1.0 - x[0]}, {"N", 7.0}, {"AGE GROUP", std::string("11-17")}};
    const auto r = whatif_score(w.model, w.bins, w.schema, record, changes);
    auto y = x;
    y[0] = 1.0 - x[0];
    y[3] = 7.0;
    for (int k = 4; k < 8; ++k) y[k] = k == 7 ? 1.0 : 0.0;
    const auto wv = weights_of(w.model);
    double delta = 0.0;
    for (std::size_t i = 0; i < 8; ++i) delta += wv[i] * (y[i] - x[i]);
    CHECK(std::fabs((r.new_raw - r.old_raw) - delta) < 1e-9);
    CHECK(r.direction == direction_between(r.old_score, r.new_score));
  }
}

TEST_CASE("direction_between") {
  CHECK(direction_between(RiskScore(3), RiskScore(5)) == Direction::kUp);
  CHECK(direction_between(RiskScore(5), RiskScore(3)) == Direction::kDown);
  CHECK(direction_between(RiskScore(4), RiskScore(4)) == Direction::kUnchanged);
}
