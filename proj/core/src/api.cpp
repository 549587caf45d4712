#include "sibyl/api.hpp"

#include <algorithm>
#include <charconv>
#include <sstream>

#include "sibyl/error.hpp"
#include "sibyl/neighbors.hpp"
#include "sibyl/serialize.hpp"
#include "sibyl/whatif.hpp"

namespace sibyl {

using nlohmann::json;

std::string_view to_string(ApiCode code) {
  switch (code) {
    case ApiCode::kBadRequest: return "BAD_REQUEST";
    case ApiCode::kBadQuery: return "BAD_QUERY";
    case ApiCode::kCaseNotFound: return "CASE_NOT_FOUND";
    case ApiCode::kFeatureDisabled: return "FEATURE_DISABLED";
    case ApiCode::kNotFound: return "NOT_FOUND";
    case ApiCode::kTooManyChanges: return "TOO_MANY_CHANGES";
    case ApiCode::kInvalidChange: return "INVALID_CHANGE";
    case ApiCode::kInternal: return "INTERNAL";
  }
  return "INTERNAL";
}

int http_status(ApiCode code) {
  switch (code) {
    case ApiCode::kBadRequest:
    case ApiCode::kBadQuery: return 400;
    case ApiCode::kCaseNotFound:
    case ApiCode::kFeatureDisabled:
    case ApiCode::kNotFound: return 404;
    case ApiCode::kTooManyChanges:
    case ApiCode::kInvalidChange: return 422;
    case ApiCode::kInternal: return 500;
  }
  return 500;
}

json ApiError::body() const {
  json out = {{"code", to_string(code_)}, {"message", what()}};
  if (detail_) out["detail"] = *detail_;
  return out;
}

AppState::AppState(LoadedData data, AppConfig config)
    : model_(std::move(data.model.model)),
      bins_(data.model.bins ? *data.model.bins
                            : fit_score_bins(model_, data.corpus.reference)),
      bins_from_file_(data.model.bins.has_value()),
      schema_(std::move(data.metas)),
      corpus_(std::move(data.corpus)),
      stats_(compute_reference_stats(model_, corpus_.reference)),
      slices_(model_, bins_, corpus_.reference),
      importance_(config.precompute_importance
                      ? global_importance(model_, corpus_.reference, corpus_.outcomes,
                                          config.importance_repeats, config.importance_seed)
                      : ImportanceReport{}),
      config_(config) {
  schema_.require_covers(*model_.layout());
}

std::shared_ptr<const AppState> AppState::build(LoadedData data, AppConfig config) {
  return std::shared_ptr<const AppState>(new AppState(std::move(data), config));
}

const CaseRecord& AppState::case_by_id(std::string_view id) const {
  const CaseRecord* record = corpus_.reference.find(id);
  if (!record) {
    throw ApiError(ApiCode::kCaseNotFound, "no case with id '" + std::string(id) + "'");
  }
  return *record;
}

std::optional<ContributionView> parse_view(std::string_view text) {
  if (text == "top") return ContributionView::kTop;
  if (text == "all") return ContributionView::kAll;
  if (text == "split") return ContributionView::kSplit;
  return std::nullopt;
}

json model_payload(const AppState& state) {
  json factors = json::array();
  for (const auto& pf : state.schema().factors()) {
    json f = {{"key", pf.key},
              {"display_name", pf.display_name},
              {"kind", to_string(pf.kind)},
              {"category_code", pf.category_code},
              {"category_name", pf.category_name},
              {"sources", pf.sources}};
    if (pf.kind == PresentedKind::kCategorical) f["labels"] = pf.labels;
    factors.push_back(std::move(f));
  }
  return {{"outcome_name", state.model().outcome_name()},
          {"intercept", state.model().intercept()},
          {"factor_count", state.model().factor_count()},
          {"presented_factor_count", state.schema().factors().size()},
          {"reference_size", state.reference().size()},
          {"score_min", kMinRiskScore},
          {"score_max", kMaxRiskScore},
          {"score_cutpoints", state.bins().cutpoints()},
          {"cutpoints_source", state.bins_from_model_file() ? "model_file" : "fitted"},
          {"importance_metric", state.importance().metric_name},
          {"review_mode", state.config().review_mode},
          {"factors", std::move(factors)}};
}

json case_list_payload(const AppState& state, std::size_t offset, std::size_t limit) {
  json cases = json::array();
  const auto& reference = state.reference();
  for (std::size_t i = offset; i < reference.size() && i < offset + limit; ++i) {
    cases.push_back({{"case_id", reference.at(i).id()},
                     {"risk_score", state.slices().score_of(i).value()}});
  }
  return {{"total", reference.size()},
          {"offset", offset},
          {"limit", limit},
          {"cases", std::move(cases)}};
}

json case_payload(const AppState& state, std::string_view id) {
  const CaseRecord& record = state.case_by_id(id);
  const double raw = predict_raw(state.model(), record);
  json factors = json::array();
  for (const auto& pf : state.schema().factors()) {
    factors.push_back({{"key", pf.key},
                       {"display_name", pf.display_name},
                       {"kind", to_string(pf.kind)},
                       {"category_code", pf.category_code},
                       {"category_name", pf.category_name},
                       {"displayed_value", presented_value(state.schema(), pf, record)}});
  }
  return {{"case_id", record.id()},
          {"narrative", record.narrative()},
          {"risk_score", to_risk_score(raw, state.bins()).value()},
          {"raw_output", raw},
          {"outcome_name", state.model().outcome_name()},
          {"factors", std::move(factors)}};
}

json contributions_payload(const AppState& state, std::string_view id,
                           const ContributionQuery& query) {
  const CaseRecord& record = state.case_by_id(id);
  const ContributionSet contributions =
      local_contributions(state.model(), state.stats(), record);
  auto merged = merge_contributions(state.schema(), contributions, record);
  const std::size_t total = merged.size();
  merged = search_filter(merged, query.query, query.categories);

  json out = {{"case_id", record.id()},
              {"risk_score", to_risk_score(contributions.raw_output, state.bins()).value()},
              {"base_value", contributions.base_value},
              {"raw_output", contributions.raw_output},
              {"total_factors", total},
              {"matched_factors", merged.size()}};
  switch (query.view) {
    case ContributionView::kTop:
      out["view"] = "top";
      out["rows"] = to_json(top_k(std::move(merged), query.top));
      break;
    case ContributionView::kAll: {
      out["view"] = "all";
      const std::size_t n = std::max<std::size_t>(1, merged.size());
      out["rows"] = to_json(top_k(std::move(merged), n));
      break;
    }
    case ContributionView::kSplit: {
      out["view"] = "split";
      const SplitView split = split_view(merged);
      out["risk"] = to_json(split.risk);
      out["protective"] = to_json(split.protective);
      break;
    }
  }
  return out;
}

namespace {

std::vector<FactorChange> parse_changes(const json& request) {
  if (!request.is_object() || !request.contains("changes") || !request["changes"].is_array()) {
    throw ApiError(ApiCode::kBadRequest, "request body needs a 'changes' array");
  }
  const json& changes = request["changes"];
  if (changes.size() > kMaxChanges) {
    throw ApiError(ApiCode::kTooManyChanges,
                   "at most 4 factor changes are allowed, got " + std::to_string(changes.size()));
  }
  std::vector<FactorChange> out;
  for (const auto& c : changes) {
    if (!c.is_object() || !c.contains("factor") || !c["factor"].is_string() ||
        !c.contains("value")) {
      throw ApiError(ApiCode::kBadRequest, "each change needs 'factor' and 'value'");
    }
    const json& v = c["value"];
    ChangeValue value;
    if (v.is_boolean()) {
      value = v.get<bool>() ? 1.0 : 0.0;
    } else if (v.is_number()) {
      value = v.get<double>();
    } else if (v.is_string()) {
      value = v.get<std::string>();
    } else {
      throw ApiError(ApiCode::kInvalidChange, "change value must be a number, boolean or label",
                     c["factor"].get<std::string>());
    }
    out.push_back({c["factor"].get<std::string>(), std::move(value)});
  }
  return out;
}

}  // namespace

json whatif_payload(const AppState& state, std::string_view id, const json& request) {
  const CaseRecord& record = state.case_by_id(id);
  const std::vector<FactorChange> changes = parse_changes(request);
  try {
    json out = to_json(whatif_score(state.model(), state.bins(), state.schema(), record, changes));
    out["case_id"] = record.id();
    out["change_count"] = changes.size();
    return out;
  } catch (const Error& e) {
    if (e.code() == ErrorCode::kLimitExceeded) {
      throw ApiError(ApiCode::kTooManyChanges, e.what());
    }
    if (e.code() == ErrorCode::kInvalidChange) {
      throw ApiError(ApiCode::kInvalidChange, e.what());
    }
    throw;
  }
}

json flips_payload(const AppState& state, std::string_view id) {
  const CaseRecord& record = state.case_by_id(id);
  json out = to_json(flip_all_booleans(state.model(), state.bins(), state.schema(), record));
  out["case_id"] = record.id();
  return out;
}

json importance_payload(const AppState& state) { return to_json(state.importance()); }

json distributions_payload(const AppState& state, int score,
                           const std::vector<std::string>& factors) {
  if (score < kMinRiskScore || score > kMaxRiskScore) {
    throw ApiError(ApiCode::kBadQuery, "score must be between 1 and 20");
  }
  for (const auto& key : factors) {
    if (!state.schema().find(key)) {
      throw ApiError(ApiCode::kBadQuery, "unknown factor '" + key + "'");
    }
  }
  return to_json(distribution_bundle(state.slices(), state.reference(), state.outcomes(),
                                     state.schema(), RiskScore(score), factors));
}

json similar_payload(const AppState& state, std::string_view id, std::size_t k) {
  if (!state.config().review_mode) {
    throw ApiError(ApiCode::kFeatureDisabled,
                   "similar cases are only available in review mode");
  }
  if (k < 1 || k > kMaxNeighbors) {
    throw ApiError(ApiCode::kBadQuery, "k must be between 1 and 10");
  }
  const CaseRecord& record = state.case_by_id(id);
  NeighborResult result = find_similar(record, state.reference(), state.stats(), k);
  std::vector<Timeline> rows;
  for (const auto& n : result.neighbors) rows.push_back(state.events().timeline_for(n.case_id));
  result.timelines = assemble_timelines(state.events().timeline_for(record.id()), rows);
  json out = to_json(result);
  out["case_id"] = record.id();
  out["k"] = k;
  return out;
}

namespace {

std::vector<std::string> split_path(std::string_view path) {
  std::vector<std::string> parts;
  std::size_t start = 0;
  while (start <= path.size()) {
    const std::size_t end = path.find('/', start);
    const std::string_view part =
        path.substr(start, end == std::string_view::npos ? std::string_view::npos : end - start);
    if (!part.empty()) parts.emplace_back(part);
    if (end == std::string_view::npos) break;
    start = end + 1;
  }
  return parts;
}

std::optional<std::string> param(const QueryParams& params, const std::string& key) {
  auto it = params.find(key);
  if (it == params.end()) return std::nullopt;
  return it->second;
}

// Comma-separated values across every occurrence of `key`.
std::vector<std::string> list_param(const QueryParams& params, const std::string& key) {
  std::vector<std::string> out;
  auto [lo, hi] = params.equal_range(key);
  for (auto it = lo; it != hi; ++it) {
    std::stringstream ss(it->second);
    std::string item;
    while (std::getline(ss, item, ',')) {
      if (!item.empty()) out.push_back(item);
    }
  }
  return out;
}

long long int_param(const QueryParams& params, const std::string& key, long long fallback,
                    long long lo, long long hi) {
  auto text = param(params, key);
  if (!text) return fallback;
  long long v = 0;
  auto [ptr, ec] = std::from_chars(text->data(), text->data() + text->size(), v);
  if (ec != std::errc() || ptr != text->data() + text->size() || v < lo || v > hi) {
    throw ApiError(ApiCode::kBadQuery, "'" + key + "' must be an integer in [" +
                                           std::to_string(lo) + ", " + std::to_string(hi) + "]");
  }
  return v;
}

json route(const AppState& state, std::string_view method, std::string_view path,
           const QueryParams& params, std::string_view body) {
  const auto parts = split_path(path);
  const bool get = method == "GET";
  const bool post = method == "POST";
  if (parts.size() < 3 || parts[0] != "api" || parts[1] != "v1") {
    throw ApiError(ApiCode::kNotFound, "no route for " + std::string(path));
  }
  const std::string& resource = parts[2];

  if (get && parts.size() == 3 && resource == "model") return model_payload(state);
  if (get && parts.size() == 3 && resource == "importance") return importance_payload(state);

  if (get && parts.size() == 4 && resource == "distributions") {
    int score = 0;
    const std::string& s = parts[3];
    auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), score);
    if (ec != std::errc() || ptr != s.data() + s.size()) {
      throw ApiError(ApiCode::kBadQuery, "score must be an integer");
    }
    return distributions_payload(state, score, list_param(params, "factors"));
  }

  if (resource == "cases") {
    if (get && parts.size() == 3) {
      const auto offset = int_param(params, "offset", 0, 0, 1LL << 40);
      const auto limit = int_param(params, "limit", 50, 1, 500);
      return case_list_payload(state, static_cast<std::size_t>(offset),
                               static_cast<std::size_t>(limit));
    }
    if (get && parts.size() == 4) return case_payload(state, parts[3]);
    if (parts.size() == 5) {
      const std::string& id = parts[3];
      const std::string& action = parts[4];
      if (get && action == "contributions") {
        ContributionQuery q;
        if (auto view = param(params, "view")) {
          auto parsed = parse_view(*view);
          if (!parsed) throw ApiError(ApiCode::kBadQuery, "view must be top, all or split");
          q.view = *parsed;
        }
        q.top = static_cast<std::size_t>(int_param(params, "top", kDefaultTopK, 1, 100000));
        q.query = param(params, "query").value_or("");
        for (auto& c : list_param(params, "categories")) q.categories.insert(c);
        return contributions_payload(state, id, q);
      }
      if (post && action == "whatif") {
        json request;
        try {
          request = json::parse(body);
        } catch (const json::parse_error& e) {
          throw ApiError(ApiCode::kBadRequest, "request body is not valid JSON", e.what());
        }
        return whatif_payload(state, id, request);
      }
      if (get && action == "flips") return flips_payload(state, id);
      if (get && action == "similar") {
        if (!state.config().review_mode) {
          throw ApiError(ApiCode::kFeatureDisabled,
                         "similar cases are only available in review mode");
        }
        const auto k = int_param(params, "k", static_cast<long long>(kDefaultNeighbors), 1,
                                 static_cast<long long>(kMaxNeighbors));
        return similar_payload(state, id, static_cast<std::size_t>(k));
      }
    }
  }
  throw ApiError(ApiCode::kNotFound,
                 "no route for " + std::string(method) + " " + std::string(path));
}

}  // namespace

ApiResponse handle_request(const AppState& state, std::string_view method,
                           std::string_view path, const QueryParams& params,
                           std::string_view body) {
  try {
    return {200, route(state, method, path, params, body)};
  } catch (const ApiError& e) {
    return {e.status(), e.body()};
  } catch (const std::exception& e) {
    return {500, ApiError(ApiCode::kInternal, "internal error", e.what()).body()};
  }
}

}  // namespace sibyl
