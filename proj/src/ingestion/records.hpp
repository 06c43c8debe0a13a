#pragma once

#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace redline {

enum class Cohort { Human, Agent };

inline std::string_view to_string(Cohort c) { return c == Cohort::Human ? "Human" : "Agent"; }

enum class CommentSource { PrComment, ReviewComment, Review };

struct ReviewComment {
  std::string author_login;
  bool author_is_bot = false;
  std::string body;
  CommentSource source = CommentSource::PrComment;
};

struct PullRequestRecord {
  std::string pr_id;
  std::string repo_path;  // absolute after manifest loading
  std::string base_commit;
  std::string head_commit;
  Cohort cohort = Cohort::Human;
  std::vector<ReviewComment> comments;
};

struct FilePairDiff {
  std::string path;
  std::optional<std::string> pre_text;   // absent: file added
  std::optional<std::string> post_text;  // absent: file deleted
};

}  // namespace redline
