#pragma once

#include <cstdint>
#include <random>
#include <string>
#include <utility>
#include <vector>

#include "sibyl/dataio.hpp"
#include "sibyl/explain.hpp"
#include "sibyl/model.hpp"
#include "sibyl/present.hpp"

namespace fixture {

// intercept 0.1, weights a=0.5, b=-0.2, c=0.3.
inline sibyl::Model three_factor_model() {
  return sibyl::Model(0.1, {{"a", 0.5}, {"b", -0.2}, {"c", 0.3}}, "removal_within_2y");
}

inline sibyl::CaseRecord make_case(const sibyl::Model& model, std::string id,
                                   std::vector<double> values) {
  return sibyl::CaseRecord(std::move(id), model.layout(), std::move(values));
}

// Stats with the given means; stds all 1.
inline sibyl::ReferenceStats stats_with_means(const sibyl::Model& model,
                                              std::vector<double> means) {
  sibyl::ReferenceStats stats;
  stats.layout = model.layout();
  stats.stds.assign(means.size(), 1.0);
  stats.means = std::move(means);
  stats.count = 1;
  return stats;
}

inline sibyl::FactorMeta binary_meta(std::string name, std::string description,
                                     std::string code = "DG") {
  sibyl::FactorMeta m;
  m.name = std::move(name);
  m.description = std::move(description);
  m.category_code = std::move(code);
  m.category_name = "Category " + m.category_code;
  m.kind = sibyl::FactorKind::kBinary;
  return m;
}

inline sibyl::FactorMeta numeric_meta(std::string name, std::string description,
                                      std::string code = "RH") {
  sibyl::FactorMeta m;
  m.name = std::move(name);
  m.description = std::move(description);
  m.category_code = std::move(code);
  m.category_name = "Category " + m.category_code;
  m.kind = sibyl::FactorKind::kNumeric;
  return m;
}

inline sibyl::FactorMeta member_meta(std::string name, std::string group, std::string label,
                                     std::string code = "DG") {
  sibyl::FactorMeta m;
  m.name = std::move(name);
  m.description = m.name;
  m.category_code = std::move(code);
  m.category_name = "Category " + m.category_code;
  m.kind = sibyl::FactorKind::kOneHotMember;
  m.group = std::move(group);
  m.member_label = std::move(label);
  return m;
}

// Random additive model with n factors named f0..f{n-1}.
inline sibyl::Model random_model(std::size_t n, std::mt19937_64& rng) {
  std::normal_distribution<double> g(0.0, 1.0);
  std::vector<std::pair<std::string, double>> w;
  for (std::size_t i = 0; i < n; ++i) w.emplace_back("f" + std::to_string(i), g(rng));
  return sibyl::Model(g(rng), std::move(w), "y");
}

inline std::vector<double> random_values(std::size_t n, std::mt19937_64& rng, double scale = 3.0) {
  std::normal_distribution<double> g(0.0, scale);
  std::vector<double> v(n);
  for (auto& x : v) x = g(rng);
  return v;
}

inline sibyl::ReferenceDataset random_reference(const sibyl::Model& model, std::size_t rows,
                                                std::mt19937_64& rng) {
  std::vector<sibyl::CaseRecord> cases;
  for (std::size_t r = 0; r < rows; ++r) {
    cases.emplace_back("r" + std::to_string(r), model.layout(),
                       random_values(model.factor_count(), rng));
  }
  return sibyl::ReferenceDataset(model.layout(), std::move(cases));
}

}  // namespace fixture
