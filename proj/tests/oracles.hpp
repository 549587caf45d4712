#pragma once

// Independent reference computations used only by tests. Each one takes a
// different route from the library code it checks.

#include <algorithm>
#include <cmath>
#include <map>
#include <numeric>
#include <string>
#include <utility>
#include <vector>

namespace oracle {

inline double dot_predict(double intercept, const std::vector<double>& w,
                          const std::vector<double>& x) {
  return std::inner_product(w.begin(), w.end(), x.begin(), intercept);
}

// Quantile by explicit order statistics on a copy sorted here.
inline double quantile(std::vector<double> v, double q) {
  std::sort(v.begin(), v.end());
  const double h = (static_cast<double>(v.size()) - 1.0) * q;
  const double lo = std::floor(h);
  const auto i = static_cast<std::size_t>(lo);
  if (i + 1 >= v.size()) return v.back();
  return v[i] + (h - lo) * (v[i + 1] - v[i]);
}

// Mean and population std via E[x^2] - E[x]^2 (one pass, different rounding
// from the library's two-pass route).
inline std::pair<double, double> moments(const std::vector<double>& v) {
  double s = 0.0;
  double s2 = 0.0;
  for (double x : v) {
    s += x;
    s2 += x * x;
  }
  const double n = static_cast<double>(v.size());
  const double mean = s / n;
  return {mean, std::sqrt(std::max(0.0, s2 / n - mean * mean))};
}

// Shapley values by averaging marginal contributions over every ordering of
// the players (n! permutations). `value` maps a membership bitmask to a
// payoff. Only usable for n <= 8.
template <typename Value>
std::vector<double> shapley_by_orderings(std::size_t n, Value value) {
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::vector<double> phi(n, 0.0);
  double count = 0.0;
  do {
    std::size_t mask = 0;
    double prev = value(mask);
    for (auto p : order) {
      mask |= std::size_t{1} << p;
      const double cur = value(mask);
      phi[p] += cur - prev;
      prev = cur;
    }
    count += 1.0;
  } while (std::next_permutation(order.begin(), order.end()));
  for (auto& p : phi) p /= count;
  return phi;
}

// Full sort of every candidate by (distance, id); the library uses a partial
// selection instead.
inline std::vector<std::pair<std::string, double>> exhaustive_knn(
    const std::vector<std::string>& ids, const std::vector<std::vector<double>>& rows,
    const std::vector<double>& query, const std::string& query_id,
    const std::vector<double>& stds, std::size_t k) {
  std::vector<std::pair<std::string, double>> all;
  for (std::size_t r = 0; r < rows.size(); ++r) {
    if (ids[r] == query_id) continue;
    double s = 0.0;
    for (std::size_t j = 0; j < query.size(); ++j) {
      if (stds[j] == 0.0) continue;
      const double z = (query[j] - rows[r][j]) / stds[j];
      s += z * z;
    }
    all.emplace_back(ids[r], std::sqrt(s));
  }
  std::sort(all.begin(), all.end(), [](const auto& a, const auto& b) {
    return a.second != b.second ? a.second < b.second : a.first < b.first;
  });
  if (all.size() > k) all.resize(k);
  return all;
}

// Group-by over (score -> rows) built by a single scan.
template <typename Row, typename ScoreFn>
std::map<int, std::vector<Row>> group_by_score(const std::vector<Row>& rows, ScoreFn score) {
  std::map<int, std::vector<Row>> out;
  for (const auto& r : rows) out[score(r)].push_back(r);
  return out;
}

}  // namespace oracle
