#include "ingestion/manifest.hpp"

#include <algorithm>
#include <cctype>
#include <fstream>
#include <set>
#include <sstream>

#include "json.hpp"

namespace redline::ingestion {

namespace {

using Kind = ManifestIssue::Kind;

struct LineError {
  Kind kind;
  std::string field;
  std::string message;
};

const nlohmann::json& require(const nlohmann::json& obj, const std::string& field, nlohmann::json::value_t type,
                              const std::string& where = "") {
  auto it = obj.find(field);
  if (it == obj.end() || it->is_null()) throw LineError{Kind::MissingField, where + field, "missing field " + where + field};
  bool ok = it->type() == type || (type == nlohmann::json::value_t::number_integer && it->is_number_integer());
  if (!ok) throw LineError{Kind::InvalidField, where + field, "field " + where + field + " has the wrong type"};
  return *it;
}

CommentSource parse_source(const std::string& s, const std::string& field) {
  if (s == "pr_comment") return CommentSource::PrComment;
  if (s == "review_comment") return CommentSource::ReviewComment;
  if (s == "review") return CommentSource::Review;
  throw LineError{Kind::InvalidField, field, "unknown comment source '" + s + "'"};
}

std::string lower(std::string s) {
  std::transform(s.begin(), s.end(), s.begin(), [](unsigned char c) { return char(std::tolower(c)); });
  return s;
}

PullRequestRecord parse_record(const nlohmann::json& j, const std::filesystem::path& base_dir) {
  using V = nlohmann::json::value_t;
  if (!j.is_object()) throw LineError{Kind::InvalidJson, "", "line is not a JSON object"};
  PullRequestRecord r;
  r.pr_id = require(j, "pr_id", V::string).get<std::string>();
  if (r.pr_id.empty()) throw LineError{Kind::InvalidField, "pr_id", "pr_id is empty"};
  std::filesystem::path repo = require(j, "repo_path", V::string).get<std::string>();
  if (repo.empty()) throw LineError{Kind::InvalidField, "repo_path", "repo_path is empty"};
  r.repo_path = (repo.is_absolute() ? repo : base_dir / repo).lexically_normal().string();
  r.base_commit = lower(require(j, "base_commit", V::string).get<std::string>());
  r.head_commit = lower(require(j, "head_commit", V::string).get<std::string>());
  for (auto [field, value] : {std::pair{"base_commit", &r.base_commit}, std::pair{"head_commit", &r.head_commit}})
    if (!is_commit_id(*value)) throw LineError{Kind::InvalidField, field, std::string(field) + " is not a 40/64-hex commit id"};
  if (r.base_commit == r.head_commit)
    throw LineError{Kind::InvalidField, "head_commit", "base_commit and head_commit are identical"};
  const std::string cohort = require(j, "cohort", V::string).get<std::string>();
  if (cohort == "Human") r.cohort = Cohort::Human;
  else if (cohort == "Agent") r.cohort = Cohort::Agent;
  else throw LineError{Kind::UnknownCohort, "cohort", "unknown cohort '" + cohort + "'"};

  auto comments = j.find("comments");
  if (comments != j.end() && !comments->is_null()) {
    if (!comments->is_array()) throw LineError{Kind::InvalidField, "comments", "comments is not an array"};
    for (std::size_t i = 0; i < comments->size(); ++i) {
      const auto& c = (*comments)[i];
      const std::string where = "comments[" + std::to_string(i) + "].";
      if (!c.is_object()) throw LineError{Kind::InvalidField, where, "comment is not an object"};
      ReviewComment rc;
      rc.body = require(c, "body", V::string, where).get<std::string>();
      auto login = c.find("author_login");
      if (login != c.end() && !login->is_null()) {
        if (!login->is_string()) throw LineError{Kind::InvalidField, where + "author_login", "author_login is not a string"};
        rc.author_login = login->get<std::string>();
      }
      auto bot = c.find("author_is_bot");
      if (bot != c.end() && !bot->is_null()) {
        if (!bot->is_boolean()) throw LineError{Kind::InvalidField, where + "author_is_bot", "author_is_bot is not a boolean"};
        rc.author_is_bot = bot->get<bool>();
      }
      auto source = c.find("source");
      if (source != c.end() && !source->is_null()) {
        if (!source->is_string()) throw LineError{Kind::InvalidField, where + "source", "source is not a string"};
        rc.source = parse_source(source->get<std::string>(), where + "source");
      }
      r.comments.push_back(std::move(rc));
    }
  }
  return r;
}

}  // namespace

std::string_view to_string(ManifestIssue::Kind k) {
  switch (k) {
    case Kind::InvalidJson: return "InvalidJson";
    case Kind::MissingField: return "MissingField";
    case Kind::InvalidField: return "InvalidField";
    case Kind::UnknownCohort: return "UnknownCohort";
    default: return "DuplicatePrId";
  }
}

bool is_commit_id(std::string_view s) {
  if (s.size() != 40 && s.size() != 64) return false;
  return std::all_of(s.begin(), s.end(), [](char c) { return std::isxdigit(static_cast<unsigned char>(c)); });
}

Manifest parse_manifest(std::string_view text, const std::filesystem::path& base_dir) {
  Manifest m;
  std::set<std::string> seen;
  int line_no = 0;
  std::size_t pos = 0;
  while (pos <= text.size()) {
    std::size_t nl = text.find('\n', pos);
    std::string_view line = text.substr(pos, nl == std::string_view::npos ? std::string_view::npos : nl - pos);
    ++line_no;
    pos = nl == std::string_view::npos ? text.size() + 1 : nl + 1;
    if (std::all_of(line.begin(), line.end(), [](unsigned char c) { return std::isspace(c); })) continue;
    try {
      nlohmann::json j;
      try {
        j = nlohmann::json::parse(line);
      } catch (const nlohmann::json::exception& e) {
        throw LineError{Kind::InvalidJson, "", std::string("invalid JSON: ") + e.what()};
      }
      auto record = parse_record(j, base_dir);
      if (!seen.insert(record.pr_id).second)
        throw LineError{Kind::DuplicatePrId, "pr_id", "duplicate pr_id '" + record.pr_id + "'"};
      m.records.push_back(std::move(record));
    } catch (const LineError& e) {
      m.issues.push_back({line_no, e.kind, e.field, e.message});
    }
  }
  return m;
}

Manifest load_manifest(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw UnreadableFile(path);
  std::ostringstream ss;
  ss << in.rdbuf();
  if (in.bad()) throw UnreadableFile(path);
  auto dir = std::filesystem::absolute(path).parent_path();
  return parse_manifest(ss.str(), dir);
}

}  // namespace redline::ingestion
