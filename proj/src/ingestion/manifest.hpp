#pragma once

#include <filesystem>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "ingestion/records.hpp"

namespace redline::ingestion {

struct ManifestIssue {
  enum class Kind { InvalidJson, MissingField, InvalidField, UnknownCohort, DuplicatePrId };
  int line = 0;  // 1-based
  Kind kind = Kind::InvalidJson;
  std::string field;
  std::string message;
};

std::string_view to_string(ManifestIssue::Kind k);

struct Manifest {
  std::vector<PullRequestRecord> records;  // file order
  std::vector<ManifestIssue> issues;       // malformed lines, skipped
};

struct UnreadableFile : std::runtime_error {
  explicit UnreadableFile(const std::filesystem::path& p) : std::runtime_error("cannot read manifest " + p.string()) {}
};

/// Parse JSON Lines; blank lines are ignored. Relative repo paths resolve
/// against `base_dir`.
Manifest parse_manifest(std::string_view text, const std::filesystem::path& base_dir);

/// Throws UnreadableFile.
Manifest load_manifest(const std::filesystem::path& path);

bool is_commit_id(std::string_view s);

}  // namespace redline::ingestion
