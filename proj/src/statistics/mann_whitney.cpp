#include "statistics/mann_whitney.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <numeric>

namespace redline::stats {

std::vector<double> midranks(const std::vector<double>& values) {
  std::vector<std::size_t> order(values.size());
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(), [&](std::size_t x, std::size_t y) { return values[x] < values[y]; });
  std::vector<double> ranks(values.size());
  for (std::size_t i = 0; i < order.size();) {
    std::size_t j = i;
    while (j + 1 < order.size() && values[order[j + 1]] == values[order[i]]) ++j;
    double r = (double(i + 1) + double(j + 1)) / 2.0;
    for (std::size_t k = i; k <= j; ++k) ranks[order[k]] = r;
    i = j + 1;
  }
  return ranks;
}

namespace {

// Two-sided exact p over all C(N, n1) placements of the observed midranks.
// Works on doubled ranks so every quantity is an integer.
double exact_p(const std::vector<double>& ranks, std::size_t n1, long long u2_obs) {
  const std::size_t n = ranks.size();
  std::vector<long long> r2(n);
  long long total = 0;
  for (std::size_t i = 0; i < n; ++i) {
    r2[i] = std::llround(2.0 * ranks[i]);
    total += r2[i];
  }
  // ways[k][s]: number of k-subsets with doubled rank sum s.
  std::vector<std::vector<double>> ways(n1 + 1, std::vector<double>(static_cast<std::size_t>(total) + 1, 0.0));
  ways[0][0] = 1.0;
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t k = std::min(n1, i + 1); k >= 1; --k)
      for (long long s = total; s >= r2[i]; --s) ways[k][static_cast<std::size_t>(s)] += ways[k - 1][static_cast<std::size_t>(s - r2[i])];
  const long long offset = static_cast<long long>(n1 * (n1 + 1));
  const long long mu2 = static_cast<long long>(n1 * (n - n1));
  const long long dev_obs = std::llabs(u2_obs - mu2);
  double hit = 0, all = 0;
  for (long long s = 0; s <= total; ++s) {
    double w = ways[n1][static_cast<std::size_t>(s)];
    if (w == 0) continue;
    all += w;
    if (std::llabs(s - offset - mu2) >= dev_obs) hit += w;
  }
  return std::min(1.0, hit / all);
}

double normal_p(const std::vector<double>& values, std::size_t n1, std::size_t n2, double u) {
  const double n = double(n1 + n2);
  std::vector<double> sorted = values;
  std::sort(sorted.begin(), sorted.end());
  double tie_term = 0;
  for (std::size_t i = 0; i < sorted.size();) {
    std::size_t j = i;
    while (j < sorted.size() && sorted[j] == sorted[i]) ++j;
    double t = double(j - i);
    tie_term += t * t * t - t;
    i = j;
  }
  const double mu = double(n1) * double(n2) / 2.0;
  const double var = double(n1) * double(n2) / 12.0 * ((n + 1.0) - tie_term / (n * (n - 1.0)));
  if (var <= 0) return 1.0;
  const double z = (std::abs(u - mu) - 0.5) / std::sqrt(var);
  return std::min(1.0, std::erfc(z / std::sqrt(2.0)));
}

}  // namespace

MannWhitneyResult mann_whitney_u(const std::vector<double>& a, const std::vector<double>& b) {
  if (a.empty() || b.empty()) throw EmptySample();
  std::vector<double> all(a);
  all.insert(all.end(), b.begin(), b.end());
  auto ranks = midranks(all);
  const std::size_t n1 = a.size(), n2 = b.size();
  double r1 = 0;
  for (std::size_t i = 0; i < n1; ++i) r1 += ranks[i];
  MannWhitneyResult res;
  res.n1 = n1;
  res.n2 = n2;
  res.u_statistic = r1 - double(n1) * double(n1 + 1) / 2.0;
  if (n1 + n2 <= kExactLimit) {
    res.exact = true;
    long long u2 = std::llround(2.0 * r1) - static_cast<long long>(n1 * (n1 + 1));
    res.p_value = exact_p(ranks, n1, u2);
  } else {
    res.p_value = normal_p(all, n1, n2, res.u_statistic);
  }
  res.significance = significance_of(res.p_value);
  return res;
}

Significance significance_of(double p) {
  if (p < 0.001) return Significance::PLt0001;
  if (p < 0.05) return Significance::PLt005;
  return Significance::NotSignificant;
}

std::string_view stars(Significance s) {
  switch (s) {
    case Significance::PLt0001: return "***";
    case Significance::PLt005: return "*";
    default: return "";
  }
}

std::vector<AnnotatedRow> annotate_table(const std::vector<MetricRow>& rows,
                                         const std::map<std::string, std::optional<MannWhitneyResult>>& results) {
  std::vector<AnnotatedRow> out;
  out.reserve(rows.size());
  for (const auto& row : rows) {
    auto it = results.find(row.metric);
    if (it == results.end()) throw MissingResult(row.metric);
    AnnotatedRow a{row, it->second, ""};
    if (a.result) a.stars = std::string(stars(a.result->significance));
    out.push_back(std::move(a));
  }
  return out;
}

}  // namespace redline::stats
