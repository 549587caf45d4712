#include <algorithm>
#include <cmath>
#include <random>
#include <set>

#include "doctest.h"
#include "fixtures.hpp"
#include "sibyl/error.hpp"
#include "sibyl/present.hpp"

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

std::vector<FactorMeta> age_group_metas() {
  return {fixture::member_meta("AGE_LT_1", "AGE OF CHILD GROUP", "LESS THAN 1"),
          fixture::member_meta("AGE_1_3", "AGE OF CHILD GROUP", "1-3"),
          fixture::member_meta("AGE_4_10", "AGE OF CHILD GROUP", "4-10"),
          fixture::member_meta("AGE_11_17", "AGE OF CHILD GROUP", "11-17")};
}

PresentedContribution row(std::string name, double c, std::string code = "DG") {
  PresentedContribution r;
  r.key = name;
  r.display_name = std::move(name);
  r.contribution = c;
  r.label = label_for(c);
  r.category_code = std::move(code);
  return r;
}

}  // namespace

TEST_CASE("build_schema collapses one-hot members into one categorical factor") {
  const auto schema = build_schema(age_group_metas());
  REQUIRE(schema.factors().size() == 1);
  const auto& f = schema.factors()[0];
  CHECK(f.kind == PresentedKind::kCategorical);
  CHECK(f.display_name == "AGE OF CHILD GROUP");
  CHECK(f.labels == std::vector<std::string>{"LESS THAN 1", "1-3", "4-10", "11-17"});
  CHECK(f.sources.size() == 4);
  CHECK(schema.owner_of("AGE_4_10") == std::optional<std::size_t>{0});
}

TEST_CASE("build_schema keeps standalone factors and places groups at their first member") {
  auto metas = age_group_metas();
  metas.insert(metas.begin(), fixture::binary_meta("SIB", "CHILD HAS SIBLINGS"));
  metas.push_back(fixture::numeric_meta("REFS", "PAST REFERRAL COUNT"));
  const auto schema = build_schema(metas);
  REQUIRE(schema.factors().size() == 3);
  CHECK(schema.factors()[0].key == "SIB");
  CHECK(schema.factors()[0].display_name == "CHILD HAS SIBLINGS");
  CHECK(schema.factors()[1].kind == PresentedKind::kCategorical);
  CHECK(schema.factors()[2].kind == PresentedKind::kNumeric);
  CHECK(schema.find("REFS") != nullptr);
  CHECK(schema.find("nope") == nullptr);
}

TEST_CASE("build_schema rejects malformed metadata") {
  auto missing_group = age_group_metas();
  missing_group[2].group.reset();
  CHECK(code_of([&] { build_schema(missing_group); }) == ErrorCode::kSchemaError);

  auto dup = age_group_metas();
  dup.push_back(dup[0]);
  CHECK(code_of([&] { build_schema(dup); }) == ErrorCode::kSchemaError);

  std::vector<FactorMeta> lonely{fixture::member_meta("ONLY", "G", "x")};
  CHECK(code_of([&] { build_schema(lonely); }) == ErrorCode::kSchemaError);

  auto dup_labels = age_group_metas();
  dup_labels[1].member_label = "1-3";
  dup_labels[2].member_label = "1-3";
  CHECK(code_of([&] { build_schema(dup_labels); }) == ErrorCode::kSchemaError);

  auto stray = fixture::binary_meta("B", "IS STRAY");
  stray.group = "G";
  CHECK(code_of([&] { build_schema({stray}); }) == ErrorCode::kSchemaError);

  auto bounds = fixture::numeric_meta("N", "N");
  bounds.min_value = 3;
  bounds.max_value = 1;
  CHECK(code_of([&] { build_schema({bounds}); }) == ErrorCode::kSchemaError);
}

TEST_CASE("require_covers and validate_case") {
  auto metas = age_group_metas();
  metas.push_back(fixture::binary_meta("SIB", "CHILD HAS SIBLINGS"));
  const auto schema = build_schema(metas);
  const auto layout = make_layout({"AGE_LT_1", "AGE_1_3", "AGE_4_10", "AGE_11_17", "SIB"});
  schema.require_covers(*layout);
  CHECK(code_of([&] { schema.require_covers(*make_layout({"AGE_LT_1", "SIB"})); }) ==
        ErrorCode::kSchemaError);
  CHECK(code_of([&] { schema.require_covers(*make_layout({"AGE_LT_1", "AGE_1_3", "AGE_4_10", "AGE_11_17", "SIB", "X"})); }) ==
        ErrorCode::kSchemaError);

  CHECK(schema.validate_case(CaseRecord("ok", layout, {0, 1, 0, 0, 1})).empty());
  CHECK(!schema.validate_case(CaseRecord("two", layout, {0, 1, 1, 0, 1})).empty());
  CHECK(!schema.validate_case(CaseRecord("half", layout, {0, 1, 0, 0, 0.5})).empty());
}

TEST_CASE("merge sums a group's contributions and reports the active label") {
  const Model model(0.0, {{"AGE_LT_1", 1.0}, {"AGE_1_3", 1.0}, {"AGE_4_10", 1.0}, {"AGE_11_17", 1.0}}, "y");
  const auto schema = build_schema(age_group_metas());
  ContributionSet set;
  set.layout = model.layout();
  set.contributions = {0.2, -0.05, 0.0, 0.0};
  const auto record = fixture::make_case(model, "x", {0, 1, 0, 0});
  const auto merged = merge_contributions(schema, set, record);
  REQUIRE(merged.size() == 1);
  CHECK(merged[0].contribution == doctest::Approx(0.15).epsilon(1e-12));
  CHECK(merged[0].displayed_value == "1-3");
  CHECK(merged[0].label == ContributionLabel::kRisk);
}

TEST_CASE("property: merging conserves the total contribution") {
  std::mt19937_64 rng(31);
  auto metas = age_group_metas();
  metas.push_back(fixture::member_meta("R_A", "REGION", "A", "RH"));
  metas.push_back(fixture::member_meta("R_B", "REGION", "B", "RH"));
  metas.push_back(fixture::binary_meta("SIB", "CHILD HAS SIBLINGS"));
  metas.push_back(fixture::numeric_meta("N", "PAST REFERRAL COUNT"));
  const auto schema = build_schema(metas);
  std::vector<std::string> names;
  for (const auto& m : metas) names.push_back(m.name);
  const auto layout = make_layout(names);
  std::normal_distribution<double> g;
  for (int trial = 0; trial < 200; ++trial) {
    ContributionSet set;
    set.layout = layout;
    for (std::size_t i = 0; i < names.size(); ++i) set.contributions.push_back(g(rng));
    std::vector<double> x(names.size(), 0.0);
    x[static_cast<std::size_t>(trial % 4)] = 1.0;
    x[4 + static_cast<std::size_t>(trial % 2)] = 1.0;
    x[6] = trial % 3 == 0 ? 1.0 : 0.0;
    x[7] = trial;
    const auto merged = merge_contributions(schema, set, CaseRecord("c", layout, x));
    double sum_merged = 0.0;
    for (const auto& r : merged) sum_merged += r.contribution;
    CHECK(std::fabs(sum_merged - set.total()) < 1e-9);
    CHECK(merged.size() == 4);
  }
}

TEST_CASE("render_value on binary and numeric factors") {
  const auto sib = fixture::binary_meta("SIB", "CHILD HAS SIBLINGS");
  CHECK(render_value(sib, 1) == "CHILD HAS SIBLINGS");
  CHECK(render_value(sib, 0) == "CHILD DOES NOT HAVE SIBLINGS");
  CHECK(code_of([&] { render_value(sib, 0.5); }) == ErrorCode::kInvalidValue);

  auto explicit_neg = fixture::binary_meta("DOB", "PARENT DOB MISSING");
  explicit_neg.negated_description = "PARENT DOB RECORDED";
  CHECK(render_value(explicit_neg, 0) == "PARENT DOB RECORDED");

  const auto n = fixture::numeric_meta("N", "PAST REFERRAL COUNT");
  CHECK(render_value(n, 3) == "3");
  CHECK(render_value(n, 2.5) == "2.50");
}

TEST_CASE("auto_negate rules") {
  CHECK(auto_negate("CHILD IS DISABLED") == "CHILD IS NOT DISABLED");
  CHECK(auto_negate("LAW ENFORCEMENT REPORTER") == "NOT: LAW ENFORCEMENT REPORTER");
  // "THIS" must not match the "IS " rule.
  CHECK(auto_negate("THIS ONE") == "NOT: THIS ONE");
  // The earliest whole-word verb wins.
  CHECK(auto_negate("PARENT IS SINGLE AND HAS JOB") == "PARENT IS NOT SINGLE AND HAS JOB");
}

TEST_CASE("property: rendered booleans never contain True/False") {
  const std::vector<std::string> descriptions{"CHILD HAS SIBLINGS", "PARENT IS EMPLOYED",
                                              "LAW ENFORCEMENT REPORTER", "HAS PRIOR CASE"};
  for (const auto& d : descriptions) {
    const auto m = fixture::binary_meta("X", d);
    for (double v : {0.0, 1.0}) {
      const auto s = render_value(m, v);
      CHECK(s.find("True") == std::string::npos);
      CHECK(s.find("False") == std::string::npos);
      CHECK(s.find("true") == std::string::npos);
      CHECK(s.find("false") == std::string::npos);
    }
  }
}

TEST_CASE("top_k sizes and tie order") {
  std::vector<PresentedContribution> many;
  for (int i = 0; i < 400; ++i) many.push_back(row("F" + std::to_string(1000 + i), (i % 7) - 3.0));
  CHECK(top_k(many).size() == 10);
  std::vector<PresentedContribution> six(many.begin(), many.begin() + 6);
  CHECK(top_k(six).size() == 6);

  const auto tied = top_k({row("ZETA", 0.5), row("ALPHA", -0.5), row("MID", 0.1)}, 2);
  REQUIRE(tied.size() == 2);
  CHECK(tied[0].display_name == "ALPHA");
  CHECK(tied[1].display_name == "ZETA");
  CHECK(code_of([&] { top_k(six, 0); }) == ErrorCode::kInvalidInput);
}

TEST_CASE("property: top_k returns the k largest magnitudes") {
  std::mt19937_64 rng(4);
  std::normal_distribution<double> g;
  for (int trial = 0; trial < 50; ++trial) {
    std::vector<PresentedContribution> rows;
    for (int i = 0; i < 30; ++i) rows.push_back(row("F" + std::to_string(i), g(rng)));
    const auto top = top_k(rows, 10);
    REQUIRE(top.size() == 10);
    std::vector<double> mags;
    for (const auto& r : rows) mags.push_back(std::fabs(r.contribution));
    std::sort(mags.rbegin(), mags.rend());
    for (std::size_t i = 0; i < 10; ++i) CHECK(std::fabs(top[i].contribution) == mags[i]);
  }
}

TEST_CASE("split_view separates signs and drops zeros") {
  const auto split = split_view({row("A", 0.5), row("B", -0.2), row("C", 0.0)});
  REQUIRE(split.risk.size() == 1);
  REQUIRE(split.protective.size() == 1);
  CHECK(split.risk[0].display_name == "A");
  CHECK(split.protective[0].display_name == "B");
}

TEST_CASE("search_filter by text and category") {
  const std::vector<PresentedContribution> rows{row("PAST REFERRAL COUNT", 0.1, "RH"),
                                                row("CHILD HAS SIBLINGS", 0.2, "DG"),
                                                row("AGE OF CHILD GROUP", 0.3, "DG")};
  const auto by_text = search_filter(rows, "referral", {});
  REQUIRE(by_text.size() == 1);
  CHECK(by_text[0].display_name == "PAST REFERRAL COUNT");
  CHECK(search_filter(rows, "", {"DG"}).size() == 2);
  CHECK(search_filter(rows, "child", {"RH"}).empty());
  const auto all = search_filter(rows, "", {});
  REQUIRE(all.size() == rows.size());
  for (std::size_t i = 0; i < rows.size(); ++i) CHECK(all[i].display_name == rows[i].display_name);
}

TEST_CASE("label_for thresholds") {
  CHECK(label_for(0.01) == ContributionLabel::kRisk);
  CHECK(label_for(-0.01) == ContributionLabel::kProtective);
  CHECK(label_for(0.0) == ContributionLabel::kNeutral);
}
