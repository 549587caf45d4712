#include <filesystem>
#include <fstream>
#include <sstream>

#include "cli.hpp"
#include "doctest.h"
#include "sibyl/api.hpp"
#include "sibyl/dataio.hpp"

using nlohmann::json;
namespace fs = std::filesystem;

namespace {

struct Run {
  int code = -1;
  std::string out;
  std::string err;
};

Run run(std::vector<std::string> args) {
  std::ostringstream out;
  std::ostringstream err;
  Run r;
  r.code = sibyl::cli::run_cli(args, out, err);
  r.out = out.str();
  r.err = err.str();
  return r;
}

// Demo corpus shared by the tests in this file.
const fs::path& data_dir() {
  static const fs::path dir = [] {
    const auto d = fs::temp_directory_path() / "sibyl_cli_test_data";
    fs::remove_all(d);
    const auto r = run({"demo", "--n-cases", "100", "--n-factors", "12", "--seed", "7", "--out", d.string()});
    REQUIRE(r.code == 0);
    return d;
  }();
  return dir;
}

std::string dir() { return data_dir().string(); }

}  // namespace

TEST_CASE("demo then validate succeeds") {
  const auto r = run({"validate", "--data-dir", dir()});
  CHECK(r.code == 0);
  const auto j = run({"validate", "--data-dir", dir(), "--format", "json"});
  CHECK(j.code == 0);
  CHECK(json::parse(j.out)["ok"] == true);
}

TEST_CASE("validate reports broken inputs with exit code 1") {
  const auto broken = fs::temp_directory_path() / "sibyl_cli_test_broken";
  fs::remove_all(broken);
  fs::copy(data_dir(), broken);
  {
    std::ofstream(broken / "outcomes.csv") << "case_id,removed,removal_date\nC0001,0,\n";
  }
  const auto r = run({"validate", "--data-dir", broken.string(), "--format", "json"});
  CHECK(r.code == 1);
  const auto body = json::parse(r.out);
  CHECK(body["ok"] == false);
  CHECK(body["error_count"].get<int>() > 0);
  fs::remove_all(broken);
}

TEST_CASE("explain: unknown case exits 1 with CASE_NOT_FOUND") {
  const auto r = run({"explain", "--data-dir", dir(), "--case-id", "MISSING"});
  CHECK(r.code == 1);
  CHECK(r.err.find("CASE_NOT_FOUND") != std::string::npos);
}

TEST_CASE("distributions: out-of-range score is a usage error") {
  CHECK(run({"distributions", "--data-dir", dir(), "--score", "21"}).code == 2);
  CHECK(run({"distributions", "--data-dir", dir(), "--score", "0"}).code == 2);
  CHECK(run({"distributions", "--data-dir", dir(), "--score", "5", "--factor-keys", "NOPE"}).code == 2);
  CHECK(run({"distributions", "--data-dir", dir(), "--score", "5"}).code == 0);
}

TEST_CASE("usage errors") {
  CHECK(run({}).code == 2);
  CHECK(run({"bogus"}).code == 2);
  CHECK(run({"explain", "--data-dir", dir()}).code == 2);
  CHECK(run({"demo", "--n-cases", "19", "--out", "x"}).code == 2);
  CHECK(run({"demo", "--n-factors", "5", "--out", "x"}).code == 2);
  CHECK(run({"similar", "--data-dir", dir(), "--case-id", "C0001", "--k", "11", "--review-mode"}).code == 2);
  CHECK(run({"--help"}).code == 0);
}

TEST_CASE("similar needs the review-mode acknowledgement") {
  const auto off = run({"similar", "--data-dir", dir(), "--case-id", "C0001"});
  CHECK(off.code != 0);
  const auto on = run({"similar", "--data-dir", dir(), "--case-id", "C0001", "--review-mode", "--format", "json"});
  CHECK(on.code == 0);
  CHECK(json::parse(on.out)["neighbors"].size() == 3);
}

TEST_CASE("JSON output matches the service payloads") {
  const auto load = sibyl::load_all(sibyl::DataPaths::in_directory(data_dir()));
  REQUIRE(load.data);
  const auto state = sibyl::AppState::build(*load.data);

  const auto explain = run({"explain", "--data-dir", dir(), "--case-id", "C0003", "--format", "json"});
  REQUIRE(explain.code == 0);
  CHECK(json::parse(explain.out) == sibyl::contributions_payload(*state, "C0003", {}));

  sibyl::ContributionQuery split;
  split.view = sibyl::ContributionView::kSplit;
  const auto s = run({"explain", "--data-dir", dir(), "--case-id", "C0003", "--split", "--format", "json"});
  CHECK(json::parse(s.out) == sibyl::contributions_payload(*state, "C0003", split));

  const auto imp = run({"importance", "--data-dir", dir(), "--format", "json"});
  REQUIRE(imp.code == 0);
  CHECK(json::parse(imp.out) == sibyl::importance_payload(*state));

  const auto dist = run({"distributions", "--data-dir", dir(), "--score", "12", "--format", "json"});
  REQUIRE(dist.code == 0);
  CHECK(json::parse(dist.out) == sibyl::distributions_payload(*state, 12, {}));
}

TEST_CASE("table output is reproducible") {
  const auto a = run({"importance", "--data-dir", dir(), "--seed", "3", "--repeats", "4"});
  const auto b = run({"importance", "--data-dir", dir(), "--seed", "3", "--repeats", "4"});
  CHECK(a.code == 0);
  CHECK(a.out == b.out);
  const auto e = run({"explain", "--data-dir", dir(), "--case-id", "C0010"});
  CHECK(e.code == 0);
  CHECK(e.out.find("True") == std::string::npos);
  CHECK(e.out.find("False") == std::string::npos);
}
