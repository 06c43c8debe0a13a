#pragma once

#include <filesystem>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "common/http_json.hpp"

namespace redline::pipeline {

/// Outcome classes shared by the library API and the command line.
enum class Status {
  Ok = 0,
  InvalidArgument = 1,
  UnknownPr = 2,
  Provider = 3,
  EmptyCohort = 4,
  NoScored = 5,
  Io = 6,
  Manifest = 7,
  Git = 8,
  Syntax = 9,
  Classifier = 10,
  Internal = 99,
};

struct RunError : std::runtime_error {
  RunError(Status status, const std::string& message) : std::runtime_error(message), status(status) {}
  Status status;
};

enum class ProviderKind { Baseline, Remote };

struct RunConfig {
  std::filesystem::path manifest_path;
  std::filesystem::path output_dir = ".";
  ProviderKind provider = ProviderKind::Baseline;
  std::string provider_url;
  std::string classifier_url;                  // empty: none
  std::filesystem::path classifier_fixture;    // empty: none
  std::optional<std::filesystem::path> cache_dir;  // default: $REDLINE_CACHE_DIR, else <out>/.redline-cache
  std::vector<std::string> extensions = {".py"};
  double refactor_similarity = 0.95;
  long min_fn_lines = 3;
  unsigned parallelism = 4;
  bool include_nested = true;
  bool exclude_test_files = false;
  bool strip_docstrings = false;
  http::RetryPolicy retry;

  bool has_classifier() const { return !classifier_url.empty() || !classifier_fixture.empty(); }

  /// Throws RunError(InvalidArgument).
  void validate() const;
  std::filesystem::path effective_cache_dir() const;
};

}  // namespace redline::pipeline
