#pragma once

// Synthetic PR corpora in a throwaway git repository.

#include <filesystem>
#include <fstream>
#include <string>
#include <vector>

#include "function_gen.hpp"
#include "git_fixture.hpp"
#include "ingestion/records.hpp"
#include "json.hpp"

namespace redline::fixtures {

struct CorpusPr {
  std::string pr_id;
  Cohort cohort;
  std::string base;
  std::string head;
};

struct Corpus {
  std::filesystem::path root;
  std::filesystem::path manifest;
  std::vector<CorpusPr> prs;
};

struct CorpusOptions {
  int per_cohort = 20;
  int base_functions = 12;
  int functions_per_pr = 3;
  bool with_comments = false;
  // Agent PRs copy base functions with a one-line tweak; human PRs write fresh ones.
  bool agent_duplicates = true;
};

inline nlohmann::json manifest_line(const std::string& pr_id, const std::filesystem::path& repo, const std::string& base,
                                    const std::string& head, Cohort cohort,
                                    nlohmann::json comments = nlohmann::json::array()) {
  return {{"pr_id", pr_id},     {"repo_path", repo.string()},          {"base_commit", base},
          {"head_commit", head}, {"cohort", std::string(to_string(cohort))}, {"comments", comments}};
}

inline void write_manifest(const std::filesystem::path& path, const std::vector<nlohmann::json>& lines) {
  std::ofstream out(path, std::ios::binary);
  for (const auto& l : lines) out << l.dump() << "\n";
}

inline nlohmann::json comment_json(const std::string& login, const std::string& body, bool bot = false) {
  return {{"author_login", login}, {"author_is_bot", bot}, {"body", body}};
}

inline Corpus build_corpus(const std::filesystem::path& root, unsigned seed, const CorpusOptions& opt = {}) {
  Corpus corpus;
  corpus.root = root;
  GitFixture repo(root / "repo");
  FunctionGenerator gen(seed);

  std::vector<std::string> base_fns;
  std::string core;
  for (int i = 0; i < opt.base_functions; ++i) {
    base_fns.push_back(gen.function("base_fn" + std::to_string(i)));
    core += base_fns.back() + "\n\n";
  }
  const std::string base = repo.commit({{"pkg/core.py", core}, {"README.md", "fixture\n"}}, "base");

  std::vector<nlohmann::json> lines;
  for (int i = 0; i < 2 * opt.per_cohort; ++i) {
    const Cohort cohort = i % 2 == 0 ? Cohort::Human : Cohort::Agent;
    const std::string id = (cohort == Cohort::Human ? "human-" : "agent-") + std::to_string(i / 2);
    repo.git({"checkout", "-q", "--detach", base});
    std::string feature;
    for (int j = 0; j < opt.functions_per_pr; ++j) {
      const std::string name = "feature_" + std::to_string(i) + "_" + std::to_string(j);
      if (cohort == Cohort::Agent && opt.agent_duplicates) {
        std::string copy = base_fns[static_cast<std::size_t>(gen.pick(0, opt.base_functions - 1))];
        copy = "def " + name + copy.substr(copy.find('('));
        copy.insert(copy.find('\n') + 1, "    marker = " + std::to_string(gen.pick(1, 9)) + "\n");
        feature += copy + "\n\n";
      } else {
        feature += gen.service_function(name) + "\n\n";
      }
    }
    const std::string head = repo.commit({{"pkg/feature_" + std::to_string(i) + ".py", feature}}, id);
    nlohmann::json comments = nlohmann::json::array();
    if (opt.with_comments) {
      if (cohort == Cohort::Human) {
        comments.push_back(comment_json("alice", "Looks good to me, thanks!"));
        comments.push_back(comment_json("bob", i % 4 == 0 ? "Nice cleanup." : "Please rename this variable."));
      } else {
        comments.push_back(comment_json("carol", "This breaks the build again."));
        comments.push_back(comment_json("dave", i % 4 == 1 ? "Ugh, copy-pasted code everywhere." : "Why was this approach chosen?"));
      }
      comments.push_back(comment_json("ci-bot", "Coverage report attached.", true));
    }
    lines.push_back(manifest_line(id, repo.dir(), base, head, cohort, comments));
    corpus.prs.push_back({id, cohort, base, head});
  }
  corpus.manifest = root / "manifest.jsonl";
  write_manifest(corpus.manifest, lines);
  return corpus;
}

}  // namespace redline::fixtures
