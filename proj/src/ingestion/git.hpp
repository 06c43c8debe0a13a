#pragma once

#include <filesystem>
#include <map>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "ingestion/records.hpp"

namespace redline::ingestion {

class GitError : public std::runtime_error {
 public:
  enum class Kind { NotAGitRepository, CommitNotFound, CommandFailed };
  GitError(Kind kind, const std::string& message) : std::runtime_error(message), kind_(kind) {}
  Kind kind() const { return kind_; }

 private:
  Kind kind_;
};

struct TreeEntry {
  std::string mode;
  std::string object_id;
};

/// Read-only access to a local repository through the git executable.
/// Safe to use from several threads.
class GitRepo {
 public:
  /// Throws GitError(NotAGitRepository).
  explicit GitRepo(std::filesystem::path path);

  const std::filesystem::path& path() const { return path_; }

  /// Full commit id. Throws GitError(CommitNotFound).
  std::string resolve_commit(const std::string& rev) const;

  /// Regular files (mode 100644/100755) of a commit, keyed by path.
  std::map<std::string, TreeEntry> tree(const std::string& commit) const;

  /// Contents of the given blob ids, in order.
  std::vector<std::string> read_blobs(const std::vector<std::string>& object_ids) const;

 private:
  std::string git(const std::vector<std::string>& args, const std::string& input = {}) const;

  std::filesystem::path path_;
};

struct ExtensionFilter {
  std::vector<std::string> extensions = {".py"};
  bool matches(std::string_view path) const;
};

/// A text file of a snapshot.
struct SnapshotFile {
  std::string path;
  std::string text;
};

/// True when `bytes` has no NUL and is valid UTF-8.
bool is_text(std::string_view bytes);

/// Matching text files of `commit`, sorted by path. Binary and non-UTF-8
/// files are skipped and reported in `warnings`.
std::vector<SnapshotFile> snapshot_files(const GitRepo& repo, const std::string& commit, const ExtensionFilter& filter,
                                         std::vector<std::string>* warnings = nullptr);

/// One entry per matching file whose content differs between the PR's base
/// and head commits, sorted by path. Renames appear as delete + add.
std::vector<FilePairDiff> extract_file_pairs(const PullRequestRecord& pr, const ExtensionFilter& filter = {},
                                             std::vector<std::string>* warnings = nullptr);

}  // namespace redline::ingestion
