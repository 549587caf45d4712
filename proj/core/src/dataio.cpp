#include "sibyl/dataio.hpp"

#include <charconv>
#include <cmath>
#include <cstdlib>
#include <fstream>
#include <set>
#include <sstream>

#include <nlohmann/json.hpp>

#include "csv.hpp"
#include "sibyl/error.hpp"

namespace sibyl {

using ordered_json = nlohmann::ordered_json;

namespace {

constexpr std::size_t kMaxFindings = 500;

[[noreturn]] void parse_fail(std::string_view source, std::string_view where,
                             const std::string& message) {
  std::string loc(source);
  if (!where.empty()) {
    loc += "/";
    loc += where;
  }
  throw Error(ErrorCode::kParseError, loc + ": " + message);
}

ordered_json parse_json_text(std::string_view text, std::string_view source) {
  try {
    return ordered_json::parse(text);
  } catch (const nlohmann::json::parse_error& e) {
    parse_fail(source, "", "malformed JSON at byte " + std::to_string(e.byte) +
                               " (" + e.what() + ")");
  }
}

double finite_number(const ordered_json& j, std::string_view source,
                     std::string_view where) {
  if (!j.is_number()) parse_fail(source, where, "expected a number");
  const double v = j.get<double>();
  if (!std::isfinite(v)) parse_fail(source, where, "number is not finite");
  return v;
}

std::string text_field(const ordered_json& obj, std::string_view key,
                       std::string_view source, std::string_view where,
                       bool required) {
  auto it = obj.find(std::string(key));
  if (it == obj.end() || it->is_null()) {
    if (required) parse_fail(source, where, "missing field '" + std::string(key) + "'");
    return {};
  }
  if (!it->is_string()) {
    parse_fail(source, std::string(where) + "/" + std::string(key), "expected a string");
  }
  return it->get<std::string>();
}

std::optional<std::string> read_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) return std::nullopt;
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

std::string shortest(double v) {
  char buf[64];
  auto [end, ec] = std::to_chars(buf, buf + sizeof buf, v);
  (void)ec;
  return std::string(buf, end);
}

std::optional<double> parse_number(std::string_view text) {
  while (!text.empty() && text.front() == ' ') text.remove_prefix(1);
  while (!text.empty() && text.back() == ' ') text.remove_suffix(1);
  if (text.empty()) return std::nullopt;
  if (text.front() == '+') text.remove_prefix(1);
  double v = 0.0;
  auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), v);
  if (ec != std::errc() || ptr != text.data() + text.size() || !std::isfinite(v)) {
    return std::nullopt;
  }
  return v;
}

void strip_bom(std::vector<csv::Row>& rows) {
  if (rows.empty() || rows.front().fields.empty()) return;
  auto& first = rows.front().fields.front();
  if (first.rfind("\xEF\xBB\xBF", 0) == 0) first.erase(0, 3);
}

}  // namespace

LoadedModel parse_model_json(std::string_view text, std::string_view source) {
  const ordered_json root = parse_json_text(text, source);
  if (!root.is_object()) parse_fail(source, "", "top level must be an object");
  for (const auto& [key, _] : root.items()) {
    if (key != "intercept" && key != "weights" && key != "outcome_name" &&
        key != "score_cutpoints") {
      parse_fail(source, key, "unknown field");
    }
  }
  if (!root.contains("intercept")) parse_fail(source, "", "missing field 'intercept'");
  const double intercept = finite_number(root["intercept"], source, "intercept");

  if (!root.contains("weights") || !root["weights"].is_object()) {
    parse_fail(source, "weights", "expected an object of factor weights");
  }
  std::vector<std::pair<std::string, double>> weights;
  for (const auto& [name, w] : root["weights"].items()) {
    if (name.empty()) parse_fail(source, "weights", "empty factor name");
    weights.emplace_back(name, finite_number(w, source, "weights/" + name));
  }
  const std::string outcome = text_field(root, "outcome_name", source, "", true);

  std::optional<ScoreBins> bins;
  if (root.contains("score_cutpoints") && !root["score_cutpoints"].is_null()) {
    const auto& cuts = root["score_cutpoints"];
    if (!cuts.is_array()) parse_fail(source, "score_cutpoints", "expected an array");
    if (cuts.size() != kCutpointCount) {
      parse_fail(source, "score_cutpoints",
                 "expected 19 cutpoints, got " + std::to_string(cuts.size()));
    }
    std::vector<double> values;
    for (std::size_t i = 0; i < cuts.size(); ++i) {
      values.push_back(finite_number(cuts[i], source,
                                     "score_cutpoints/" + std::to_string(i)));
    }
    try {
      bins = ScoreBins::from_vector(values);
    } catch (const Error& e) {
      parse_fail(source, "score_cutpoints", e.what());
    }
  }
  try {
    return LoadedModel{Model(intercept, std::move(weights), outcome), bins};
  } catch (const Error& e) {
    parse_fail(source, "weights", e.what());
  }
}

LoadedModel load_model_file(const std::filesystem::path& path) {
  auto text = read_file(path);
  if (!text) parse_fail(path.string(), "", "cannot read file");
  return parse_model_json(*text, path.string());
}

std::string serialize_model(const Model& model,
                            const std::optional<ScoreBins>& bins) {
  ordered_json root;
  root["intercept"] = model.intercept();
  ordered_json weights = ordered_json::object();
  for (std::size_t i = 0; i < model.factor_count(); ++i) {
    weights[model.layout()->name(i)] = model.weights()[i];
  }
  root["weights"] = std::move(weights);
  root["outcome_name"] = model.outcome_name();
  if (bins) {
    root["score_cutpoints"] = ordered_json(bins->cutpoints());
  }
  return root.dump(2) + "\n";
}

std::vector<FactorMeta> parse_factor_meta_json(std::string_view text,
                                               std::string_view source) {
  const ordered_json root = parse_json_text(text, source);
  if (!root.is_array()) parse_fail(source, "", "top level must be an array");
  std::vector<FactorMeta> metas;
  for (std::size_t i = 0; i < root.size(); ++i) {
    const auto& obj = root[i];
    const std::string where = std::to_string(i);
    if (!obj.is_object()) parse_fail(source, where, "expected an object");
    FactorMeta m;
    m.name = text_field(obj, "name", source, where, true);
    m.description = text_field(obj, "description", source, where, true);
    if (auto neg = text_field(obj, "negated_description", source, where, false); !neg.empty()) {
      m.negated_description = neg;
    }
    m.category_code = text_field(obj, "category_code", source, where, true);
    m.category_name = text_field(obj, "category_name", source, where, false);
    const std::string kind = text_field(obj, "kind", source, where, true);
    auto parsed = parse_factor_kind(kind);
    if (!parsed) parse_fail(source, where + "/kind", "unknown kind '" + kind + "'");
    m.kind = *parsed;
    if (auto g = text_field(obj, "group", source, where, false); !g.empty()) m.group = g;
    if (auto l = text_field(obj, "member_label", source, where, false); !l.empty()) {
      m.member_label = l;
    }
    if (obj.contains("min_value") && !obj["min_value"].is_null()) {
      m.min_value = finite_number(obj["min_value"], source, where + "/min_value");
    }
    if (obj.contains("max_value") && !obj["max_value"].is_null()) {
      m.max_value = finite_number(obj["max_value"], source, where + "/max_value");
    }
    metas.push_back(std::move(m));
  }
  return metas;
}

std::vector<FactorMeta> load_factor_meta_file(const std::filesystem::path& path) {
  auto text = read_file(path);
  if (!text) parse_fail(path.string(), "", "cannot read file");
  return parse_factor_meta_json(*text, path.string());
}

std::string serialize_factor_meta(const std::vector<FactorMeta>& metas) {
  ordered_json root = ordered_json::array();
  for (const auto& m : metas) {
    ordered_json obj;
    obj["name"] = m.name;
    obj["description"] = m.description;
    if (m.negated_description) obj["negated_description"] = *m.negated_description;
    obj["category_code"] = m.category_code;
    obj["category_name"] = m.category_name;
    obj["kind"] = to_string(m.kind);
    if (m.group) obj["group"] = *m.group;
    if (m.member_label) obj["member_label"] = *m.member_label;
    if (m.min_value) obj["min_value"] = *m.min_value;
    if (m.max_value) obj["max_value"] = *m.max_value;
    root.push_back(std::move(obj));
  }
  return root.dump(2) + "\n";
}

std::string_view to_string(Severity severity) {
  return severity == Severity::kError ? "error" : "warning";
}

bool ValidationReport::ok() const noexcept { return error_count() == 0; }

std::size_t ValidationReport::error_count() const noexcept {
  std::size_t n = 0;
  for (const auto& f : findings) n += f.severity == Severity::kError ? 1 : 0;
  return n;
}

void ValidationReport::error(std::string location, std::string message) {
  findings.push_back({Severity::kError, std::move(location), std::move(message)});
}

void ValidationReport::warn(std::string location, std::string message) {
  findings.push_back({Severity::kWarning, std::move(location), std::move(message)});
}

void ValidationReport::merge(const ValidationReport& other) {
  findings.insert(findings.end(), other.findings.begin(), other.findings.end());
}

namespace {

struct CaseParse {
  std::vector<CaseRecord> cases;
  std::set<std::string> ids;
  bool header_ok = false;  // false: ids are unknown, skip cross-file checks
};

std::string at_line(std::string_view file, std::size_t line) {
  return std::string(file) + ":" + std::to_string(line);
}

CaseParse parse_cases(std::string_view text, const Model& model,
                      const PresentationSchema& schema, ValidationReport& report) {
  constexpr std::string_view kFile = "cases.csv";
  CaseParse out;
  auto doc = csv::parse(text);
  for (const auto& p : doc.problems) report.error(std::string(kFile), p);
  strip_bom(doc.rows);
  if (doc.rows.empty()) {
    report.error(std::string(kFile), "missing header row");
    return out;
  }
  const auto& header = doc.rows.front().fields;
  const FactorLayout& layout = *model.layout();

  std::optional<std::size_t> id_col;
  std::optional<std::size_t> narrative_col;
  std::vector<std::optional<std::size_t>> factor_col(layout.size());
  std::set<std::string> seen;
  bool header_ok = true;
  for (std::size_t c = 0; c < header.size(); ++c) {
    const std::string& name = header[c];
    if (!seen.insert(name).second) {
      report.error(at_line(kFile, 1), "duplicate column '" + name + "'");
      header_ok = false;
      continue;
    }
    if (name == "case_id") {
      id_col = c;
    } else if (name == "narrative") {
      narrative_col = c;
    } else if (auto idx = layout.find(name)) {
      factor_col[*idx] = c;
    } else {
      report.error(at_line(kFile, 1), "unknown factor column '" + name + "'");
      header_ok = false;
    }
  }
  if (!id_col) {
    report.error(at_line(kFile, 1), "missing 'case_id' column");
    header_ok = false;
  }
  for (std::size_t j = 0; j < layout.size(); ++j) {
    if (!factor_col[j]) {
      report.error(at_line(kFile, 1), "missing factor column '" + layout.name(j) + "'");
      header_ok = false;
    }
  }
  if (!header_ok) return out;
  out.header_ok = true;

  for (std::size_t r = 1; r < doc.rows.size(); ++r) {
    if (report.findings.size() > kMaxFindings) {
      report.error(std::string(kFile), "too many problems; stopped reading");
      break;
    }
    const auto& row = doc.rows[r];
    const std::string loc = at_line(kFile, row.line);
    if (row.fields.size() != header.size()) {
      report.error(loc, "expected " + std::to_string(header.size()) + " fields, got " +
                            std::to_string(row.fields.size()));
      continue;
    }
    const std::string& id = row.fields[*id_col];
    if (id.empty()) {
      report.error(loc, "empty case_id");
      continue;
    }
    if (!out.ids.insert(id).second) {
      report.error(loc, "duplicate case_id '" + id + "'");
      continue;
    }
    std::vector<double> values(layout.size());
    bool row_ok = true;
    for (std::size_t j = 0; j < layout.size(); ++j) {
      auto v = parse_number(row.fields[*factor_col[j]]);
      if (!v) {
        report.error(loc, "factor '" + layout.name(j) + "' has non-numeric or missing value '" +
                              row.fields[*factor_col[j]] + "'");
        row_ok = false;
        continue;
      }
      values[j] = *v;
    }
    if (!row_ok) continue;
    CaseRecord record(id, model.layout(), std::move(values),
                      narrative_col ? row.fields[*narrative_col] : std::string{});
    const auto problems = schema.validate_case(record);
    for (const auto& p : problems) report.error(loc, p);
    if (problems.empty()) out.cases.push_back(std::move(record));
  }
  return out;
}

OutcomeTable parse_outcomes(std::string_view text, const std::set<std::string>* ids,
                            ValidationReport& report) {
  constexpr std::string_view kFile = "outcomes.csv";
  std::map<std::string, Outcome> rows;
  auto doc = csv::parse(text);
  for (const auto& p : doc.problems) report.error(std::string(kFile), p);
  strip_bom(doc.rows);
  if (doc.rows.empty()) {
    report.error(std::string(kFile), "missing header row");
    return {};
  }
  const auto& header = doc.rows.front().fields;
  const bool has_date = header.size() == 3 && header[2] == "removal_date";
  if (header.size() < 2 || header[0] != "case_id" || header[1] != "removed" ||
      (header.size() == 3 && !has_date) || header.size() > 3) {
    report.error(at_line(kFile, 1),
                 "header must be 'case_id,removed' optionally followed by 'removal_date'");
    return {};
  }
  for (std::size_t r = 1; r < doc.rows.size(); ++r) {
    const auto& row = doc.rows[r];
    const std::string loc = at_line(kFile, row.line);
    if (row.fields.size() != header.size()) {
      report.error(loc, "expected " + std::to_string(header.size()) + " fields");
      continue;
    }
    const std::string& id = row.fields[0];
    if (ids && !ids->contains(id)) {
      report.error(loc, "outcome for unknown case '" + id + "'");
      continue;
    }
    Outcome outcome;
    if (row.fields[1] == "0") {
      outcome.removed = 0;
    } else if (row.fields[1] == "1") {
      outcome.removed = 1;
    } else {
      report.error(loc, "removed must be 0 or 1, got '" + row.fields[1] + "'");
      continue;
    }
    if (has_date && !row.fields[2].empty()) {
      auto d = parse_iso_date(row.fields[2]);
      if (!d) {
        report.error(loc, "bad removal_date '" + row.fields[2] + "'");
        continue;
      }
      outcome.removal_date = *d;
    }
    if (!rows.emplace(id, outcome).second) {
      report.error(loc, "duplicate outcome for case '" + id + "'");
    }
  }
  for (const auto& id : ids ? *ids : std::set<std::string>{}) {
    if (!rows.contains(id)) {
      report.error(std::string(kFile), "case '" + id + "' has no outcome");
    }
  }
  return OutcomeTable(std::move(rows));
}

EventLog parse_events(std::string_view text, const std::set<std::string>* ids,
                      ValidationReport& report) {
  constexpr std::string_view kFile = "events.csv";
  auto doc = csv::parse(text);
  for (const auto& p : doc.problems) report.error(std::string(kFile), p);
  strip_bom(doc.rows);
  if (doc.rows.empty()) {
    report.error(std::string(kFile), "missing header row");
    return {};
  }
  const auto& header = doc.rows.front().fields;
  const bool has_note = header.size() == 4;
  if (header.size() < 3 || header.size() > 4 || header[0] != "case_id" ||
      header[1] != "date" || header[2] != "kind" || (has_note && header[3] != "note")) {
    report.error(at_line(kFile, 1), "header must be 'case_id,date,kind,note'");
    return {};
  }
  std::vector<CaseEvent> events;
  for (std::size_t r = 1; r < doc.rows.size(); ++r) {
    const auto& row = doc.rows[r];
    const std::string loc = at_line(kFile, row.line);
    if (row.fields.size() != header.size()) {
      report.error(loc, "expected " + std::to_string(header.size()) + " fields");
      continue;
    }
    if (ids && !ids->contains(row.fields[0])) {
      report.error(loc, "event for unknown case '" + row.fields[0] + "'");
      continue;
    }
    auto date = parse_iso_date(row.fields[1]);
    if (!date) {
      report.error(loc, "bad date '" + row.fields[1] + "'");
      continue;
    }
    auto kind = parse_event_kind(row.fields[2]);
    if (!kind) {
      report.error(loc, "unknown event kind '" + row.fields[2] + "'");
      continue;
    }
    events.push_back({row.fields[0], *date, *kind, has_note ? row.fields[3] : std::string{}});
  }
  return EventLog(std::move(events));
}

void assemble_corpus(std::string_view cases_csv, std::string_view outcomes_csv,
                     std::string_view events_csv, const Model& model,
                     const PresentationSchema& schema, CorpusLoad& load);

}  // namespace

CorpusLoad parse_corpus(std::string_view cases_csv, std::string_view outcomes_csv,
                        std::string_view events_csv, const Model& model,
                        const PresentationSchema& schema) {
  CorpusLoad load;
  ValidationReport& report = load.report;
  try {
    schema.require_covers(*model.layout());
  } catch (const Error& e) {
    report.error("factors.json", e.what());
    return load;
  }
  try {
    assemble_corpus(cases_csv, outcomes_csv, events_csv, model, schema, load);
  } catch (const std::exception& e) {
    report.error("corpus", std::string("unexpected failure: ") + e.what());
    load.corpus.reset();
  }
  return load;
}

namespace {

void assemble_corpus(std::string_view cases_csv, std::string_view outcomes_csv,
                     std::string_view events_csv, const Model& model,
                     const PresentationSchema& schema, CorpusLoad& load) {
  ValidationReport& report = load.report;
  CaseParse cases = parse_cases(cases_csv, model, schema, report);
  // With an unreadable cases header every id would look unknown; report only
  // the other files' own problems in that case.
  const std::set<std::string>* ids = cases.header_ok ? &cases.ids : nullptr;
  OutcomeTable outcomes = parse_outcomes(outcomes_csv, ids, report);
  EventLog events = events_csv.empty() ? EventLog{} : parse_events(events_csv, ids, report);

  if (cases.cases.empty() && report.ok()) {
    report.error("cases.csv", "no cases");
  }
  if (!report.ok()) return;

  ReferenceDataset reference(model.layout(), std::move(cases.cases));
  for (std::size_t j = 0; j < model.factor_count(); ++j) {
    const auto col = reference.column(j);
    if (std::all_of(col.begin(), col.end(), [&](double v) { return v == col.front(); })) {
      report.warn("cases.csv", "factor '" + model.layout()->name(j) +
                                   "' is constant across all cases");
    }
  }
  load.corpus = Corpus{std::move(reference), std::move(outcomes), std::move(events)};
}

}  // namespace

CorpusLoad load_corpus(const std::filesystem::path& cases_path,
                       const std::filesystem::path& outcomes_path,
                       const std::filesystem::path& events_path,
                       const Model& model, const PresentationSchema& schema) {
  CorpusLoad load;
  auto cases = read_file(cases_path);
  auto outcomes = read_file(outcomes_path);
  std::optional<std::string> events = std::string{};
  if (!cases) load.report.error(cases_path.string(), "cannot read file");
  if (!outcomes) load.report.error(outcomes_path.string(), "cannot read file");
  if (!events_path.empty()) {
    events = read_file(events_path);
    if (!events) load.report.error(events_path.string(), "cannot read file");
    // An events file holding only a header still needs its header checked.
    else if (events->empty()) load.report.error(events_path.string(), "missing header row");
  }
  if (!load.report.ok()) return load;
  return parse_corpus(*cases, *outcomes, *events, model, schema);
}

std::string serialize_cases_csv(const ReferenceDataset& reference) {
  std::string out = "case_id";
  for (const auto& name : reference.layout()->names()) {
    out += ',';
    out += csv::escape(name);
  }
  out += ",narrative\n";
  for (const auto& record : reference.cases()) {
    out += csv::escape(record.id());
    for (double v : record.values()) {
      out += ',';
      out += shortest(v);
    }
    out += ',';
    out += csv::escape(record.narrative());
    out += '\n';
  }
  return out;
}

std::string serialize_outcomes_csv(const OutcomeTable& outcomes) {
  std::string out = "case_id,removed,removal_date\n";
  for (const auto& [id, o] : outcomes.rows()) {
    out += csv::escape(id);
    out += ',';
    out += std::to_string(o.removed);
    out += ',';
    if (o.removal_date) out += format_iso_date(*o.removal_date);
    out += '\n';
  }
  return out;
}

std::string serialize_events_csv(const EventLog& events) {
  std::string out = "case_id,date,kind,note\n";
  for (const auto& [id, tl] : events.timelines()) {
    for (const auto& e : tl.events) {
      out += csv::escape(e.case_id);
      out += ',';
      out += format_iso_date(e.date);
      out += ',';
      out += to_string(e.kind);
      out += ',';
      out += csv::escape(e.note);
      out += '\n';
    }
  }
  return out;
}

DataPaths DataPaths::in_directory(const std::filesystem::path& dir) {
  return DataPaths{dir / "model.json", dir / "factors.json", dir / "cases.csv",
                   dir / "outcomes.csv", dir / "events.csv"};
}

void DataPaths::fill_from_environment() {
  auto fill = [](std::filesystem::path& p, const char* var) {
    if (!p.empty()) return;
    if (const char* v = std::getenv(var); v && *v) p = v;
  };
  fill(model, "SIBYL_MODEL");
  fill(factors, "SIBYL_FACTORS");
  fill(cases, "SIBYL_CASES");
  fill(outcomes, "SIBYL_OUTCOMES");
  fill(events, "SIBYL_EVENTS");
}

DataLoad load_all(const DataPaths& paths) {
  DataLoad load;
  ValidationReport& report = load.report;
  auto require = [&](const std::filesystem::path& p, std::string_view what) {
    if (p.empty()) report.error(std::string(what), "no path given");
  };
  require(paths.model, "model");
  require(paths.factors, "factors");
  require(paths.cases, "cases");
  require(paths.outcomes, "outcomes");
  if (!report.ok()) return load;

  std::optional<LoadedModel> model;
  std::optional<std::vector<FactorMeta>> metas;
  std::optional<PresentationSchema> schema;
  try {
    model = load_model_file(paths.model);
  } catch (const Error& e) {
    report.error(paths.model.string(), e.what());
  }
  try {
    metas = load_factor_meta_file(paths.factors);
    schema.emplace(*metas);
  } catch (const Error& e) {
    report.error(paths.factors.string(), e.what());
  }
  if (!model || !schema) return load;

  CorpusLoad corpus = load_corpus(paths.cases, paths.outcomes, paths.events,
                                  model->model, *schema);
  report.merge(corpus.report);
  if (!corpus.corpus) return load;
  if (!model->bins && corpus.corpus->reference.size() < static_cast<std::size_t>(kMaxRiskScore)) {
    report.error(paths.cases.string(),
                 "score bins need at least 20 cases when the model has no cutpoints");
    return load;
  }
  load.data = LoadedData{std::move(*model), std::move(*metas), std::move(*corpus.corpus)};
  return load;
}

}  // namespace sibyl
