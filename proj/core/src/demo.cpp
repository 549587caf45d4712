#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <random>

#include "sibyl/dataio.hpp"
#include "sibyl/error.hpp"

namespace sibyl {

namespace {

struct NumericSpec {
  const char* name;
  const char* description;
  const char* code;
  const char* category;
  int lo;
  int hi;
};

struct BinarySpec {
  const char* name;
  const char* description;
  const char* negated;  // nullptr: rely on automatic negation
  const char* code;
  const char* category;
};

constexpr NumericSpec kNumeric[] = {
    {"AGE_OF_CHILD", "AGE OF CHILD", "DG", "Demographics", 0, 17},
    {"PAST_REFERRAL_COUNT", "PAST REFERRAL COUNT", "RH", "Referral History", 0, 12},
    {"CHILDREN_IN_HOME", "NUMBER OF CHILDREN IN HOME", "DG", "Demographics", 1, 8},
    {"AGE_OF_PRIMARY_PARENT", "AGE OF PRIMARY PARENT", "PI", "Parent Information", 16, 60},
    {"PRIOR_INVESTIGATION_COUNT", "PRIOR INVESTIGATION COUNT", "RH", "Referral History", 0, 6},
    {"MONTHS_SINCE_LAST_REFERRAL", "MONTHS SINCE LAST REFERRAL", "RH", "Referral History", 0, 60},
};

constexpr BinarySpec kBinary[] = {
    {"CHILD_HAS_SIBLINGS", "CHILD HAS SIBLINGS", nullptr, "DG", "Demographics"},
    {"PARENT_COURT_INVOLVEMENT", "PARENT HAS PRIOR COURT INVOLVEMENT", nullptr, "CJ",
     "Court & Justice"},
    {"CHILD_HAS_DISABILITY", "CHILD HAS A DISABILITY", nullptr, "CH", "Child Information"},
    {"PARENT_UNDER_21", "PRIMARY PARENT IS UNDER 21", nullptr, "PI", "Parent Information"},
    {"HOUSEHOLD_PRIOR_REMOVAL", "HOUSEHOLD HAS A PRIOR REMOVAL", nullptr, "RH",
     "Referral History"},
    {"PARENT_SUBSTANCE_REFERRAL", "PARENT HAS A SUBSTANCE USE REFERRAL", nullptr, "PI",
     "Parent Information"},
    {"CHILD_IN_SCHOOL", "CHILD IS ENROLLED IN SCHOOL", nullptr, "CH", "Child Information"},
    {"PARENT_DOB_MISSING", "PARENT DATE OF BIRTH IS MISSING", "PARENT DATE OF BIRTH IS RECORDED",
     "PI", "Parent Information"},
    {"PRIOR_MEDICAL_NEGLECT", "CHILD HAS A PRIOR MEDICAL NEGLECT REFERRAL", nullptr, "RH",
     "Referral History"},
    {"DOMESTIC_VIOLENCE_REFERRAL", "HOUSEHOLD HAS A DOMESTIC VIOLENCE REFERRAL", nullptr, "RH",
     "Referral History"},
    {"LAW_ENFORCEMENT_REPORTER", "REFERRAL CAME FROM LAW ENFORCEMENT", nullptr, "RF",
     "Referral Source"},
};

struct AgeBand {
  const char* name;
  const char* description;
  const char* label;
};

constexpr AgeBand kAgeBands[] = {
    {"AGE_LT_1", "CHILD IS LESS THAN 1 YEAR OLD", "LESS THAN 1"},
    {"AGE_1_3", "CHILD IS BETWEEN THE AGES OF 1 AND 3", "1-3"},
    {"AGE_4_10", "CHILD IS BETWEEN THE AGES OF 4 AND 10", "4-10"},
    {"AGE_11_17", "CHILD IS BETWEEN THE AGES OF 11 AND 17", "11-17"},
};

constexpr const char* kAgeGroup = "AGE OF CHILD GROUP";

constexpr EventKind kEventKinds[] = {EventKind::kReferral, EventKind::kInvestigation,
                                     EventKind::kRemoval, EventKind::kServices};

constexpr const char* kEventNotes[] = {"hotline referral received", "investigation opened",
                                       "child removed from home", "family services case opened"};

// Column generator for one model factor.
struct Column {
  enum class Kind { kNumeric, kBinary, kAgeMember } kind;
  int lo = 0;
  int hi = 1;
  double p = 0.5;
};

// Rounds to `places` decimals so generated files stay readable.
double round_places(double v, int places) {
  const double scale = std::pow(10.0, places);
  return std::round(v * scale) / scale;
}

std::string pad_id(std::size_t i, std::size_t n) {
  const std::size_t width = std::max<std::size_t>(4, std::to_string(n).size());
  std::string digits = std::to_string(i + 1);
  if (digits.size() < width) digits.insert(0, width - digits.size(), '0');
  return "C" + digits;
}

void write_text(const std::filesystem::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) {
    throw Error(ErrorCode::kInvalidInput, "cannot write " + path.string());
  }
  out << text;
}

}  // namespace

DemoCorpus make_demo_corpus(std::size_t n_cases, std::size_t n_factors,
                            std::uint64_t seed) {
  if (n_cases < static_cast<std::size_t>(kMaxRiskScore)) {
    throw Error(ErrorCode::kInvalidInput, "demo corpus needs at least 20 cases");
  }
  if (n_factors < kMinDemoFactors) {
    throw Error(ErrorCode::kInvalidInput, "demo corpus needs at least 6 factors");
  }
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> unit(0.0, 1.0);

  const std::size_t standalone = n_factors - std::size(kAgeBands);
  const std::size_t n_numeric = std::max<std::size_t>(1, standalone / 3);
  const std::size_t n_binary = standalone - n_numeric;

  std::vector<FactorMeta> metas;
  std::vector<Column> columns;
  for (std::size_t i = 0; i < n_numeric; ++i) {
    const NumericSpec& spec = kNumeric[i % std::size(kNumeric)];
    const std::size_t round = i / std::size(kNumeric);
    FactorMeta m;
    m.name = spec.name;
    m.description = spec.description;
    if (round > 0) {
      m.name += "_" + std::to_string(round + 1);
      m.description += " (" + std::to_string(round + 1) + ")";
    }
    m.category_code = spec.code;
    m.category_name = spec.category;
    m.kind = FactorKind::kNumeric;
    m.min_value = spec.lo;
    m.max_value = spec.hi;
    metas.push_back(std::move(m));
    columns.push_back({Column::Kind::kNumeric, spec.lo, spec.hi, 0.0});
  }
  for (const auto& band : kAgeBands) {
    FactorMeta m;
    m.name = band.name;
    m.description = band.description;
    m.category_code = "DG";
    m.category_name = "Demographics";
    m.kind = FactorKind::kOneHotMember;
    m.group = kAgeGroup;
    m.member_label = band.label;
    metas.push_back(std::move(m));
    columns.push_back({Column::Kind::kAgeMember, 0, 1, 0.0});
  }
  for (std::size_t i = 0; i < n_binary; ++i) {
    const BinarySpec& spec = kBinary[i % std::size(kBinary)];
    const std::size_t round = i / std::size(kBinary);
    FactorMeta m;
    m.name = spec.name;
    m.description = spec.description;
    if (spec.negated) m.negated_description = spec.negated;
    if (round > 0) {
      m.name += "_" + std::to_string(round + 1);
      m.description += " (" + std::to_string(round + 1) + ")";
      if (m.negated_description) *m.negated_description += " (" + std::to_string(round + 1) + ")";
    }
    m.category_code = spec.code;
    m.category_name = spec.category;
    m.kind = FactorKind::kBinary;
    metas.push_back(std::move(m));
    columns.push_back({Column::Kind::kBinary, 0, 1, round_places(0.1 + 0.5 * unit(rng), 2)});
  }

  // Sparse weights: roughly a third are exactly zero, the rest Gaussian and
  // scaled so numeric ranges do not dominate.
  std::normal_distribution<double> gauss(0.0, 0.3);
  std::vector<std::pair<std::string, double>> weights;
  for (std::size_t j = 0; j < metas.size(); ++j) {
    double w = 0.0;
    if (unit(rng) >= 0.33) {
      w = gauss(rng);
      if (columns[j].kind == Column::Kind::kNumeric) {
        w /= static_cast<double>(std::max(1, columns[j].hi - columns[j].lo)) / 4.0;
      }
      w = round_places(w, 4);
    }
    weights.emplace_back(metas[j].name, w);
  }
  if (std::all_of(weights.begin(), weights.end(), [](const auto& p) { return p.second == 0.0; })) {
    weights.back().second = 0.25;
  }
  Model model(round_places(0.2 + 0.2 * unit(rng), 4), std::move(weights),
              "removal_within_2y");
  LayoutPtr layout = model.layout();

  std::vector<CaseRecord> cases;
  cases.reserve(n_cases);
  std::uniform_int_distribution<std::size_t> band_pick(0, std::size(kAgeBands) - 1);
  for (std::size_t i = 0; i < n_cases; ++i) {
    std::vector<double> values(columns.size(), 0.0);
    const std::size_t band = band_pick(rng);
    std::size_t member = 0;
    for (std::size_t j = 0; j < columns.size(); ++j) {
      const Column& c = columns[j];
      switch (c.kind) {
        case Column::Kind::kNumeric:
          values[j] = static_cast<double>(std::uniform_int_distribution<int>(c.lo, c.hi)(rng));
          break;
        case Column::Kind::kBinary:
          values[j] = unit(rng) < c.p ? 1.0 : 0.0;
          break;
        case Column::Kind::kAgeMember:
          values[j] = member++ == band ? 1.0 : 0.0;
          break;
      }
    }
    const std::string id = pad_id(i, n_cases);
    cases.emplace_back(id, layout, std::move(values),
                       "Synthetic referral for " + id + ": concerns reported, details withheld.");
  }
  ReferenceDataset reference(layout, std::move(cases));

  const std::vector<double> raw = predict_all(model, reference);
  double mean = 0.0;
  for (double r : raw) mean += r;
  mean /= static_cast<double>(raw.size());
  double var = 0.0;
  for (double r : raw) var += (r - mean) * (r - mean);
  const double sd = std::sqrt(var / static_cast<double>(raw.size()));

  // Calendar span 2012-01-01 .. 2020-12-31 as day offsets.
  const std::chrono::sys_days first{std::chrono::year{2012} / 1 / 1};
  const std::chrono::sys_days last{std::chrono::year{2020} / 12 / 31};
  const int span_days = static_cast<int>((last - first).count());
  std::uniform_int_distribution<int> day_pick(0, span_days);
  std::uniform_int_distribution<int> event_count(0, 5);
  // Prior history draws from everything but removal; a removal event is added
  // only for cases whose outcome says so.
  std::uniform_int_distribution<std::size_t> kind_pick(0, 2);
  constexpr std::size_t kHistoryKinds[] = {0, 1, 3};

  std::map<std::string, Outcome> outcomes;
  std::vector<CaseEvent> events;
  for (std::size_t i = 0; i < reference.size(); ++i) {
    const std::string& id = reference.at(i).id();
    const double z = sd > 0.0 ? (raw[i] - mean) / sd : 0.0;
    const double p = 1.0 / (1.0 + std::exp(-(1.5 * z - 1.0)));
    Outcome o;
    o.removed = unit(rng) < p ? 1 : 0;
    int horizon = span_days;
    if (o.removed) {
      horizon = day_pick(rng);
      o.removal_date = Date{first + std::chrono::days{horizon}};
    }
    outcomes.emplace(id, o);

    // A removal is always preceded by at least the referral that opened it.
    const int drawn = event_count(rng);
    std::vector<int> days(static_cast<std::size_t>(o.removed ? std::max(drawn, 1) : drawn));
    std::uniform_int_distribution<int> before(0, horizon);
    for (auto& d : days) d = before(rng);
    std::sort(days.begin(), days.end());
    for (std::size_t e = 0; e < days.size(); ++e) {
      const std::size_t k = e == 0 ? 0 : kHistoryKinds[kind_pick(rng)];
      events.push_back({id, Date{first + std::chrono::days{days[e]}}, kEventKinds[k],
                        kEventNotes[k]});
    }
    if (o.removal_date) {
      events.push_back({id, *o.removal_date, kEventKinds[2], kEventNotes[2]});
    }
  }

  return DemoCorpus{std::move(model), std::move(metas), std::move(reference),
                    OutcomeTable(std::move(outcomes)), EventLog(std::move(events))};
}

void generate_demo_corpus(std::size_t n_cases, std::size_t n_factors,
                          std::uint64_t seed, const std::filesystem::path& out_dir) {
  const DemoCorpus demo = make_demo_corpus(n_cases, n_factors, seed);
  std::filesystem::create_directories(out_dir);
  const DataPaths paths = DataPaths::in_directory(out_dir);
  write_text(paths.model, serialize_model(demo.model));
  write_text(paths.factors, serialize_factor_meta(demo.metas));
  write_text(paths.cases, serialize_cases_csv(demo.reference));
  write_text(paths.outcomes, serialize_outcomes_csv(demo.outcomes));
  write_text(paths.events, serialize_events_csv(demo.events));
}

}  // namespace sibyl
