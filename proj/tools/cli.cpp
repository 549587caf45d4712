#include "cli.hpp"

#include <algorithm>
#include <cstdlib>
#include <iomanip>
#include <ostream>
#include <set>
#include <sstream>

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include "sibyl/api.hpp"
#include "sibyl/dataio.hpp"
#include "sibyl/error.hpp"
#include "sibyl/serialize.hpp"
#include "sibyl/server.hpp"

namespace sibyl::cli {

namespace {

using nlohmann::json;

constexpr std::size_t kDescriptionWidth = 60;

struct Options {
  std::string data_dir;
  std::string model, factors, cases, outcomes, events;
  std::string format = "table";

  std::string case_id;
  std::size_t top = kDefaultTopK;
  bool split = false;
  bool all = false;
  std::string query;
  std::vector<std::string> categories;

  int repeats = kDefaultImportanceRepeats;
  std::uint64_t seed = kDefaultImportanceSeed;
  int score = 0;
  std::vector<std::string> factor_filter;
  std::size_t k = kDefaultNeighbors;
  bool review_mode = false;

  std::string host = "0.0.0.0";
  int port = kDefaultPort;
  std::string cors_origin = "*";
  std::string ui_dir;

  std::size_t n_cases = 100;
  std::size_t n_factors = 12;
  std::uint64_t demo_seed = 42;
  std::string out_dir;
};

std::string truncate(const std::string& s) {
  if (s.size() <= kDescriptionWidth) return s;
  return s.substr(0, kDescriptionWidth - 3) + "...";
}

std::string fixed(double v, int digits = 4) {
  std::ostringstream ss;
  ss << std::fixed << std::setprecision(digits) << v;
  return ss.str();
}

DataPaths resolve_paths(const Options& o) {
  DataPaths paths;
  if (!o.data_dir.empty()) paths = DataPaths::in_directory(o.data_dir);
  if (!o.model.empty()) paths.model = o.model;
  if (!o.factors.empty()) paths.factors = o.factors;
  if (!o.cases.empty()) paths.cases = o.cases;
  if (!o.outcomes.empty()) paths.outcomes = o.outcomes;
  if (!o.events.empty()) paths.events = o.events;
  paths.fill_from_environment();
  return paths;
}

void print_report(const ValidationReport& report, std::string_view format, std::ostream& out) {
  if (format == "json") {
    out << to_json(report).dump(2) << "\n";
    return;
  }
  for (const auto& f : report.findings) {
    out << to_string(f.severity) << "  " << f.location << "  " << f.message << "\n";
  }
  out << (report.ok() ? "OK" : "FAILED") << ": " << report.error_count() << " error(s), "
      << report.findings.size() - report.error_count() << " warning(s)\n";
}

// Loads and validates every input; prints the report and returns nullptr on
// failure.
std::shared_ptr<const AppState> load_state(const Options& o, AppConfig config,
                                           std::ostream& err) {
  DataLoad load = load_all(resolve_paths(o));
  if (!load.data) {
    print_report(load.report, "table", err);
    return nullptr;
  }
  return AppState::build(std::move(*load.data), config);
}

void print_rows(const json& rows, std::ostream& out) {
  for (const auto& r : rows) {
    out << std::left << std::setw(4) << r["category_code"].get<std::string>() << " "
        << std::setw(kDescriptionWidth) << truncate(r["display_name"].get<std::string>()) << "  "
        << std::setw(kDescriptionWidth) << truncate(r["displayed_value"].get<std::string>()) << " "
        << std::right << std::setw(10) << fixed(r["contribution"].get<double>()) << "  "
        << r["label"].get<std::string>() << "\n";
  }
}

int cmd_explain(const Options& o, std::ostream& out, std::ostream& err) {
  AppConfig config;
  config.precompute_importance = false;
  auto state = load_state(o, config, err);
  if (!state) return kExitDataError;
  ContributionQuery q;
  q.view = o.split ? ContributionView::kSplit : o.all ? ContributionView::kAll
                                                      : ContributionView::kTop;
  q.top = o.top;
  q.query = o.query;
  q.categories.insert(o.categories.begin(), o.categories.end());
  const json payload = contributions_payload(*state, o.case_id, q);
  if (o.format == "json") {
    out << payload.dump(2) << "\n";
    return kExitOk;
  }
  out << "case " << payload["case_id"].get<std::string>() << "  risk score "
      << payload["risk_score"].get<int>() << "/20  (raw " << fixed(payload["raw_output"])
      << ", base " << fixed(payload["base_value"]) << ")\n";
  if (q.view == ContributionView::kSplit) {
    out << "-- factors increasing risk --\n";
    print_rows(payload["risk"], out);
    out << "-- factors decreasing risk --\n";
    print_rows(payload["protective"], out);
  } else {
    print_rows(payload["rows"], out);
    out << "(" << payload["rows"].size() << " of " << payload["total_factors"].get<std::size_t>()
        << " factors)\n";
  }
  return kExitOk;
}

int cmd_importance(const Options& o, std::ostream& out, std::ostream& err) {
  AppConfig config;
  config.importance_repeats = o.repeats;
  config.importance_seed = o.seed;
  auto state = load_state(o, config, err);
  if (!state) return kExitDataError;
  const json payload = importance_payload(*state);
  if (o.format == "json") {
    out << payload.dump(2) << "\n";
    return kExitOk;
  }
  out << "permutation importance (" << payload["metric_name"].get<std::string>() << ", "
      << o.repeats << " repeats, seed " << o.seed << ")\n";
  std::size_t rank = 1;
  for (const auto& e : payload["entries"]) {
    const double rel = e["relative_importance"];
    out << std::right << std::setw(4) << rank++ << "  " << std::left << std::setw(36)
        << truncate(e["factor"].get<std::string>()) << std::right << std::setw(12)
        << fixed(e["raw_importance"], 6) << "  " << std::string(static_cast<std::size_t>(rel * 30.0 + 0.5), '#')
        << "\n";
  }
  return kExitOk;
}

int cmd_distributions(const Options& o, std::ostream& out, std::ostream& err) {
  AppConfig config;
  config.precompute_importance = false;
  auto state = load_state(o, config, err);
  if (!state) return kExitDataError;
  const json payload = distributions_payload(*state, o.score, o.factor_filter);
  if (o.format == "json") {
    out << payload.dump(2) << "\n";
    return kExitOk;
  }
  const json& slice = payload["slice"];
  out << "score " << o.score << ": " << slice["case_count"].get<std::size_t>() << " past cases";
  if (slice["removal_rate_pct"].is_null()) {
    out << ", no data\n";
    return kExitOk;
  }
  out << ", " << fixed(slice["removal_rate_pct"], 1) << "% removed\n";
  for (const auto& f : payload["factors"]) {
    out << std::left << std::setw(kDescriptionWidth) << truncate(f["display_name"].get<std::string>())
        << "  ";
    const std::string kind = f["kind"];
    if (kind == "binary") {
      out << fixed(f["pct_true"], 1) << "% true";
    } else if (kind == "numeric") {
      const json& b = f["box"];
      out << "min " << fixed(b["slice_min"], 2) << "  q1 " << fixed(b["q1"], 2) << "  median "
          << fixed(b["median"], 2) << "  q3 " << fixed(b["q3"], 2) << "  max "
          << fixed(b["slice_max"], 2) << "  (global " << fixed(b["global_min"], 2) << ".."
          << fixed(b["global_max"], 2) << ")";
    } else {
      bool first = true;
      for (const auto& s : f["segments"]) {
        out << (first ? "" : ", ") << s["label"].get<std::string>() << " " << fixed(s["pct"], 1)
            << "%";
        first = false;
      }
    }
    out << "\n";
  }
  return kExitOk;
}

int cmd_similar(const Options& o, std::ostream& out, std::ostream& err) {
  if (!o.review_mode) {
    err << "similar requires --review-mode (supervision use only)\n";
    return kExitUsage;
  }
  AppConfig config;
  config.review_mode = true;
  config.precompute_importance = false;
  auto state = load_state(o, config, err);
  if (!state) return kExitDataError;
  const json payload = similar_payload(*state, o.case_id, o.k);
  if (o.format == "json") {
    out << payload.dump(2) << "\n";
    return kExitOk;
  }
  out << "cases similar to " << o.case_id << (payload["truncated"].get<bool>() ? " (truncated)" : "")
      << "\n";
  for (const auto& n : payload["neighbors"]) {
    out << "  " << std::left << std::setw(12) << n["case_id"].get<std::string>() << " distance "
        << fixed(n["distance"]) << "\n";
  }
  if (payload["timeline_empty"].get<bool>()) {
    out << "timeline: no events\n";
  } else {
    out << "timeline: " << payload["axis_start"].get<std::string>() << " .. "
        << payload["axis_end"].get<std::string>() << "\n";
    for (const auto& row : payload["rows"]) {
      out << "  " << std::left << std::setw(12) << row["case_id"].get<std::string>();
      for (const auto& e : row["events"]) {
        out << " " << e["date"].get<std::string>() << ":" << e["kind"].get<std::string>();
      }
      out << "\n";
    }
  }
  return kExitOk;
}

int cmd_validate(const Options& o, std::ostream& out) {
  const DataLoad load = load_all(resolve_paths(o));
  print_report(load.report, o.format, out);
  return load.report.ok() ? kExitOk : kExitDataError;
}

int cmd_demo(const Options& o, std::ostream& out) {
  generate_demo_corpus(o.n_cases, o.n_factors, o.demo_seed, o.out_dir);
  out << "wrote " << o.n_cases << " cases, " << o.n_factors << " factors (seed " << o.demo_seed
      << ") to " << o.out_dir << "\n";
  return kExitOk;
}

int cmd_serve(const Options& o, std::ostream& out, std::ostream& err) {
  AppConfig config;
  config.review_mode = o.review_mode;
  config.importance_repeats = o.repeats;
  config.importance_seed = o.seed;
  auto state = load_state(o, config, err);
  if (!state) return kExitDataError;
  ServerOptions so;
  so.host = o.host;
  so.port = o.port;
  so.cors_origin = o.cors_origin;
  if (!o.ui_dir.empty()) so.ui_dir = o.ui_dir;
  Server server(state, so);
  const int port = server.bind();
  out << "sibyl serving " << state->reference().size() << " cases on http://" << o.host << ":"
      << port << (o.review_mode ? " (review mode)" : "") << std::endl;
  server.listen();
  return kExitOk;
}

void add_data_options(CLI::App* cmd, Options& o) {
  cmd->add_option("--data-dir", o.data_dir, "Directory holding model.json, factors.json, ...");
  cmd->add_option("--model", o.model, "Model file (env SIBYL_MODEL)");
  cmd->add_option("--factors", o.factors, "Factor metadata file (env SIBYL_FACTORS)");
  cmd->add_option("--cases", o.cases, "Cases CSV (env SIBYL_CASES)");
  cmd->add_option("--outcomes", o.outcomes, "Outcomes CSV (env SIBYL_OUTCOMES)");
  cmd->add_option("--events", o.events, "Events CSV (env SIBYL_EVENTS)");
  cmd->add_option("--format", o.format, "Output format")
      ->check(CLI::IsMember({"table", "json"}));
}

}  // namespace

int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  Options o;
  if (const char* port = std::getenv("SIBYL_PORT"); port && *port) {
    o.port = std::atoi(port);
  }
  if (const char* origin = std::getenv("SIBYL_CORS_ORIGIN"); origin && *origin) {
    o.cors_origin = origin;
  }

  CLI::App app{"sibyl: explanations for an additive risk model"};
  app.name("sibyl");
  app.require_subcommand(1, 1);

  auto* serve = app.add_subcommand("serve", "Run the HTTP API");
  add_data_options(serve, o);
  serve->add_option("--host", o.host, "Listen address");
  serve->add_option("--port", o.port, "Listen port (env SIBYL_PORT)")->check(CLI::Range(0, 65535));
  serve->add_option("--cors-origin", o.cors_origin, "Allowed CORS origin (env SIBYL_CORS_ORIGIN)");
  serve->add_option("--ui-dir", o.ui_dir, "Static UI assets served at /");
  serve->add_flag("--review-mode", o.review_mode, "Enable the similar-cases endpoint");
  serve->add_option("--repeats", o.repeats, "Permutation repeats")->check(CLI::PositiveNumber);
  serve->add_option("--seed", o.seed, "Permutation seed");

  auto* explain = app.add_subcommand("explain", "Show factor contributions for a case");
  add_data_options(explain, o);
  explain->add_option("--case-id", o.case_id, "Case id")->required();
  explain->add_option("--top", o.top, "Rows in the default view")->check(CLI::PositiveNumber);
  explain->add_flag("--split", o.split, "Split into risk and protective factors");
  explain->add_flag("--all", o.all, "Show every factor");
  explain->add_option("--query", o.query, "Case-insensitive name filter");
  explain->add_option("--categories", o.categories, "Category codes to keep")->delimiter(',');

  auto* importance = app.add_subcommand("importance", "Global permutation importance");
  add_data_options(importance, o);
  importance->add_option("--repeats", o.repeats, "Permutation repeats")->check(CLI::PositiveNumber);
  importance->add_option("--seed", o.seed, "Permutation seed");

  auto* distributions = app.add_subcommand("distributions", "Past cases with a given score");
  add_data_options(distributions, o);
  distributions->add_option("--score", o.score, "Risk score 1-20")->required()->check(CLI::Range(1, 20));
  distributions->add_option("--factor-keys", o.factor_filter, "Presented factor keys to include")->delimiter(',');

  auto* similar = app.add_subcommand("similar", "Nearest past cases (review mode)");
  add_data_options(similar, o);
  similar->add_option("--case-id", o.case_id, "Case id")->required();
  similar->add_option("--k", o.k, "Neighbors to return")->check(CLI::Range(1, 10));
  similar->add_flag("--review-mode", o.review_mode, "Acknowledge supervision-only use");

  auto* validate = app.add_subcommand("validate", "Validate the input files");
  add_data_options(validate, o);

  auto* demo = app.add_subcommand("demo", "Write a synthetic demo corpus");
  demo->add_option("--n-cases", o.n_cases, "Number of cases")->check(CLI::Range(20, 10000000));
  demo->add_option("--n-factors", o.n_factors, "Number of model factors")
      ->check(CLI::Range(static_cast<int>(kMinDemoFactors), 100000));
  demo->add_option("--seed", o.demo_seed, "Generator seed");
  demo->add_option("--out", o.out_dir, "Output directory")->required();

  std::vector<std::string> reversed(args.rbegin(), args.rend());
  try {
    app.parse(reversed);
  } catch (const CLI::CallForHelp& e) {
    app.exit(e, out, err);
    return kExitOk;
  } catch (const CLI::CallForAllHelp& e) {
    app.exit(e, out, err);
    return kExitOk;
  } catch (const CLI::ParseError& e) {
    app.exit(e, out, err);
    return kExitUsage;
  }

  try {
    if (serve->parsed()) return cmd_serve(o, out, err);
    if (explain->parsed()) return cmd_explain(o, out, err);
    if (importance->parsed()) return cmd_importance(o, out, err);
    if (distributions->parsed()) return cmd_distributions(o, out, err);
    if (similar->parsed()) return cmd_similar(o, out, err);
    if (validate->parsed()) return cmd_validate(o, out);
    if (demo->parsed()) return cmd_demo(o, out);
  } catch (const ApiError& e) {
    err << e.body().dump() << "\n";
    return e.status() >= 500 ? kExitDataError : (e.code() == ApiCode::kBadQuery ? kExitUsage : kExitDataError);
  } catch (const Error& e) {
    err << "error: " << e.what() << "\n";
    return kExitDataError;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return kExitDataError;
  }
  return kExitUsage;
}

}  // namespace sibyl::cli
