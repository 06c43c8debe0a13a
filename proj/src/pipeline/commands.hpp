#pragma once

#include <string>
#include <vector>

#include "json.hpp"
#include "pipeline/analysis.hpp"
#include "pipeline/config.hpp"

namespace redline::pipeline {

struct CommandResult {
  std::string summary;                // human-readable text for stdout
  std::vector<std::string> warnings;  // for stderr
  std::vector<std::filesystem::path> written;
};

/// Analyze one PR and write <out>/<pr>.json. Throws RunError.
CommandResult analyze_pr(const RunConfig& config, const std::string& pr_id);

/// Analyze every PR of the manifest, write per-PR reports, cohort_table.csv,
/// cc_distribution.csv, top_pr_per_emotion.csv (with a classifier) and
/// run.json. Throws RunError.
CommandResult compare_cohorts(const RunConfig& config);

/// Histogram of a metric over a completed run in `output_dir`:
/// "mrs", "cc_delta" or "emotion:<name>". Throws RunError.
CommandResult emit_distribution(const RunConfig& config, const std::string& metric);

struct Bin {
  long index;  // bin covers [index * width, (index + 1) * width)
  std::size_t count;
};

/// Non-empty bins in ascending order.
std::vector<Bin> histogram(const std::vector<double>& values, double width);

/// "%.6f"-style fixed formatting and "%.6g" for p-values.
std::string format_fixed(double v);
std::string format_general(double v);

}  // namespace redline::pipeline
