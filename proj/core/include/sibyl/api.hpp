#pragma once

#include <cstddef>
#include <cstdint>
#include <map>
#include <memory>
#include <optional>
#include <set>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include <nlohmann/json.hpp>

#include "sibyl/dataio.hpp"
#include "sibyl/distributions.hpp"
#include "sibyl/explain.hpp"
#include "sibyl/model.hpp"
#include "sibyl/present.hpp"

namespace sibyl {

// Closed set of machine-readable error codes returned by the API.
enum class ApiCode {
  kBadRequest,       // 400 malformed body
  kBadQuery,         // 400 bad query parameter or path value
  kCaseNotFound,     // 404
  kFeatureDisabled,  // 404 review-mode endpoint while review mode is off
  kNotFound,         // 404 unknown route or factor
  kTooManyChanges,   // 422
  kInvalidChange,    // 422
  kInternal,         // 500
};

std::string_view to_string(ApiCode code);
int http_status(ApiCode code);

class ApiError : public std::runtime_error {
 public:
  ApiError(ApiCode code, const std::string& message,
           std::optional<std::string> detail = std::nullopt)
      : std::runtime_error(message), code_(code), detail_(std::move(detail)) {}

  ApiCode code() const noexcept { return code_; }
  int status() const noexcept { return http_status(code_); }
  const std::optional<std::string>& detail() const noexcept { return detail_; }
  nlohmann::json body() const;

 private:
  ApiCode code_;
  std::optional<std::string> detail_;
};

struct AppConfig {
  bool review_mode = false;
  int importance_repeats = kDefaultImportanceRepeats;
  std::uint64_t importance_seed = kDefaultImportanceSeed;
  // Off for one-shot CLI commands that never read the importance report.
  bool precompute_importance = true;
};

// Everything the service reads. Built once, never mutated afterwards, shared
// read-only by concurrent request handlers.
class AppState {
 public:
  // Fits score bins unless the model file carried cutpoints, computes
  // reference statistics, the slice index and permutation importance.
  static std::shared_ptr<const AppState> build(LoadedData data,
                                               AppConfig config = {});

  const Model& model() const noexcept { return model_; }
  const ScoreBins& bins() const noexcept { return bins_; }
  bool bins_from_model_file() const noexcept { return bins_from_file_; }
  const PresentationSchema& schema() const noexcept { return schema_; }
  const ReferenceStats& stats() const noexcept { return stats_; }
  const ReferenceDataset& reference() const noexcept { return corpus_.reference; }
  const OutcomeTable& outcomes() const noexcept { return corpus_.outcomes; }
  const EventLog& events() const noexcept { return corpus_.events; }
  const SliceIndex& slices() const noexcept { return slices_; }
  const ImportanceReport& importance() const noexcept { return importance_; }
  const AppConfig& config() const noexcept { return config_; }

  // Throws ApiError(kCaseNotFound).
  const CaseRecord& case_by_id(std::string_view id) const;

 private:
  AppState(LoadedData data, AppConfig config);

  Model model_;
  ScoreBins bins_;
  bool bins_from_file_;
  PresentationSchema schema_;
  Corpus corpus_;
  ReferenceStats stats_;
  SliceIndex slices_;
  ImportanceReport importance_;
  AppConfig config_;
};

enum class ContributionView { kTop, kAll, kSplit };

std::optional<ContributionView> parse_view(std::string_view text);

struct ContributionQuery {
  ContributionView view = ContributionView::kTop;
  std::size_t top = kDefaultTopK;
  std::string query;
  std::set<std::string> categories;
};

// Payload builders. The HTTP handlers and the CLI both serialize these, so a
// CLI --format json result equals the matching endpoint body.
nlohmann::json model_payload(const AppState& state);
nlohmann::json case_list_payload(const AppState& state, std::size_t offset,
                                 std::size_t limit);
nlohmann::json case_payload(const AppState& state, std::string_view id);
nlohmann::json contributions_payload(const AppState& state, std::string_view id,
                                     const ContributionQuery& query);
nlohmann::json whatif_payload(const AppState& state, std::string_view id,
                              const nlohmann::json& request);
nlohmann::json flips_payload(const AppState& state, std::string_view id);
nlohmann::json importance_payload(const AppState& state);
nlohmann::json distributions_payload(const AppState& state, int score,
                                     const std::vector<std::string>& factors);
nlohmann::json similar_payload(const AppState& state, std::string_view id,
                               std::size_t k);

using QueryParams = std::multimap<std::string, std::string>;

struct ApiResponse {
  int status = 200;
  nlohmann::json body;
};

// Transport-independent router for /api/v1. Never throws; failures become
// error bodies {"code", "message", "detail"?}.
ApiResponse handle_request(const AppState& state, std::string_view method,
                           std::string_view path, const QueryParams& params,
                           std::string_view body);

}  // namespace sibyl
