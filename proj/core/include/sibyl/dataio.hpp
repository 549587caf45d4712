#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "sibyl/dataset.hpp"
#include "sibyl/model.hpp"
#include "sibyl/neighbors.hpp"
#include "sibyl/present.hpp"

namespace sibyl {

struct LoadedModel {
  Model model;
  std::optional<ScoreBins> bins;  // present when the file carries cutpoints
};

// model.json: {"intercept", "weights": {factor: weight}, "outcome_name",
// optional "score_cutpoints": [19 reals]}. Weight order is preserved.
LoadedModel parse_model_json(std::string_view text,
                             std::string_view source = "model.json");
LoadedModel load_model_file(const std::filesystem::path& path);
// Canonical form: two-space indent, keys in the order above.
std::string serialize_model(const Model& model,
                            const std::optional<ScoreBins>& bins = std::nullopt);

// factors.json: array of FactorMeta objects.
std::vector<FactorMeta> parse_factor_meta_json(
    std::string_view text, std::string_view source = "factors.json");
std::vector<FactorMeta> load_factor_meta_file(const std::filesystem::path& path);
std::string serialize_factor_meta(const std::vector<FactorMeta>& metas);

enum class Severity { kWarning, kError };

std::string_view to_string(Severity severity);

struct Finding {
  Severity severity = Severity::kError;
  std::string location;  // "cases.csv:12", "model.json/weights"...
  std::string message;
};

struct ValidationReport {
  std::vector<Finding> findings;

  bool ok() const noexcept;
  std::size_t error_count() const noexcept;
  void error(std::string location, std::string message);
  void warn(std::string location, std::string message);
  void merge(const ValidationReport& other);
};

struct Corpus {
  ReferenceDataset reference;
  OutcomeTable outcomes;
  EventLog events;
};

struct CorpusLoad {
  ValidationReport report;
  std::optional<Corpus> corpus;  // set only when report.ok()
};

// Validates and assembles the corpus. Every problem is collected into the
// report; the corpus is withheld if any is error-severity. Never throws on
// bad content.
CorpusLoad parse_corpus(std::string_view cases_csv, std::string_view outcomes_csv,
                        std::string_view events_csv, const Model& model,
                        const PresentationSchema& schema);

// Missing files are reported, not thrown. An empty events path means "no
// events".
CorpusLoad load_corpus(const std::filesystem::path& cases_path,
                       const std::filesystem::path& outcomes_path,
                       const std::filesystem::path& events_path,
                       const Model& model, const PresentationSchema& schema);

std::string serialize_cases_csv(const ReferenceDataset& reference);
std::string serialize_outcomes_csv(const OutcomeTable& outcomes);
std::string serialize_events_csv(const EventLog& events);

// Locations of the five input files.
struct DataPaths {
  std::filesystem::path model;
  std::filesystem::path factors;
  std::filesystem::path cases;
  std::filesystem::path outcomes;
  std::filesystem::path events;

  // Standard file names (model.json, factors.json, ...) inside `dir`.
  static DataPaths in_directory(const std::filesystem::path& dir);
  // Fills unset entries from SIBYL_MODEL, SIBYL_FACTORS, SIBYL_CASES,
  // SIBYL_OUTCOMES and SIBYL_EVENTS.
  void fill_from_environment();
};

struct LoadedData {
  LoadedModel model;
  std::vector<FactorMeta> metas;
  Corpus corpus;
};

struct DataLoad {
  ValidationReport report;
  std::optional<LoadedData> data;
};

// Full startup validation: model, metadata, schema coverage, corpus.
DataLoad load_all(const DataPaths& paths);

struct DemoCorpus {
  Model model;
  std::vector<FactorMeta> metas;
  ReferenceDataset reference;
  OutcomeTable outcomes;
  EventLog events;
};

// Naive synthetic corpus: independent marginals, a sparse random model, one
// age-group categorical, logistic outcomes and 0-6 events per case. Same
// arguments produce byte-identical files. Requires n_cases >= 20 and
// n_factors >= 6.
DemoCorpus make_demo_corpus(std::size_t n_cases, std::size_t n_factors,
                            std::uint64_t seed);

// Writes make_demo_corpus() as the five standard files into out_dir.
void generate_demo_corpus(std::size_t n_cases, std::size_t n_factors,
                          std::uint64_t seed,
                          const std::filesystem::path& out_dir);

inline constexpr std::size_t kMinDemoFactors = 6;

}  // namespace sibyl
