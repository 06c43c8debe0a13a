#pragma once

#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace redline::stats {

enum class Significance { NotSignificant, PLt005, PLt0001 };
enum class Alternative { TwoSided };

struct MannWhitneyResult {
  double u_statistic = 0;  // U of the first sample
  double p_value = 1;
  std::size_t n1 = 0;
  std::size_t n2 = 0;
  Alternative alternative = Alternative::TwoSided;
  Significance significance = Significance::NotSignificant;
  bool exact = false;
};

struct EmptySample : std::invalid_argument {
  EmptySample() : std::invalid_argument("Mann-Whitney U needs two non-empty samples") {}
};

/// Largest combined size tested by exact enumeration.
inline constexpr std::size_t kExactLimit = 20;

/// Two-sided Mann-Whitney U with midranks. Exact null distribution (tie
/// aware) when n1 + n2 <= kExactLimit, otherwise the normal approximation
/// with tie and continuity corrections. Throws EmptySample.
MannWhitneyResult mann_whitney_u(const std::vector<double>& a, const std::vector<double>& b);

/// 1-based ranks of `values`, ties receiving their mean rank.
std::vector<double> midranks(const std::vector<double>& values);

Significance significance_of(double p);
std::string_view stars(Significance s);

struct MetricRow {
  std::string metric;
  std::optional<double> human_mean;
  std::optional<double> agent_mean;
};

struct AnnotatedRow {
  MetricRow row;
  std::optional<MannWhitneyResult> result;  // absent: test skipped
  std::string stars;
};

struct MissingResult : std::invalid_argument {
  explicit MissingResult(const std::string& metric)
      : std::invalid_argument("no test result for metric " + metric), metric(metric) {}
  std::string metric;
};

/// Attach results and significance stars. `results` must hold an entry for
/// every row (empty optional when the test was skipped). Throws MissingResult.
std::vector<AnnotatedRow> annotate_table(const std::vector<MetricRow>& rows,
                                         const std::map<std::string, std::optional<MannWhitneyResult>>& results);

}  // namespace redline::stats
