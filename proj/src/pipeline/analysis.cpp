#include "pipeline/analysis.hpp"

#include <algorithm>
#include <cctype>
#include <cstdlib>
#include <fstream>
#include <sstream>

#include "embedding/remote.hpp"
#include "ingestion/git.hpp"

namespace redline::pipeline {

namespace {

source::LineCategoryCounts& operator+=(source::LineCategoryCounts& a, const source::LineCategoryCounts& b) {
  a.loc += b.loc;
  a.multiline_string_lines += b.multiline_string_lines;
  a.blank_lines += b.blank_lines;
  a.comment_lines += b.comment_lines;
  return a;
}

nlohmann::json counts_json(const source::LineCategoryCounts& c) {
  return {{"loc", c.loc},
          {"multiline_string_lines", c.multiline_string_lines},
          {"blank_lines", c.blank_lines},
          {"comment_lines", c.comment_lines}};
}

nlohmann::json ref_json(const redundancy::FunctionRef& r) {
  return {{"file", r.file_path}, {"start_line", r.start_line}, {"qualified_name", r.qualified_name}};
}

std::string read_text(const std::filesystem::path& p) {
  std::ifstream in(p, std::ios::binary);
  if (!in) throw RunError(Status::Io, "cannot read " + p.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

// Functions of every parseable file; unparseable files are reported.
std::vector<source::FunctionUnit> functions_of(const std::vector<std::pair<std::string, const std::string*>>& files,
                                               const source::ExtractOptions& options, const std::string& side,
                                               std::vector<std::string>& warnings) {
  std::vector<source::FunctionUnit> out;
  for (const auto& [path, text] : files) {
    try {
      auto fns = source::extract_functions(*text, path, options);
      out.insert(out.end(), std::make_move_iterator(fns.begin()), std::make_move_iterator(fns.end()));
    } catch (const source::SyntaxError& e) {
      warnings.push_back("skipping " + side + " " + path + ": syntax error at " + e.what());
    }
  }
  return out;
}

}  // namespace

void RunConfig::validate() const {
  if (provider == ProviderKind::Remote && provider_url.empty())
    throw RunError(Status::InvalidArgument, "the remote provider needs a provider url");
  if (!classifier_url.empty() && !classifier_fixture.empty())
    throw RunError(Status::InvalidArgument, "give either a classifier url or a classifier fixture, not both");
  if (parallelism == 0) throw RunError(Status::InvalidArgument, "parallelism must be positive");
  if (!(refactor_similarity > 0.0 && refactor_similarity <= 1.0))
    throw RunError(Status::InvalidArgument, "refactor similarity must be in (0, 1]");
  if (min_fn_lines < 0) throw RunError(Status::InvalidArgument, "minimum function lines must be non-negative");
  if (extensions.empty()) throw RunError(Status::InvalidArgument, "extension filter is empty");
}

std::filesystem::path RunConfig::effective_cache_dir() const {
  if (cache_dir) return *cache_dir;
  if (const char* env = std::getenv("REDLINE_CACHE_DIR"); env && *env) return env;
  return output_dir / ".redline-cache";
}

source::LineCategoryCounts FileReport::line_delta() const {
  source::LineCategoryCounts d;
  if (post) d += *post;
  if (pre) {
    d.loc -= pre->loc;
    d.multiline_string_lines -= pre->multiline_string_lines;
    d.blank_lines -= pre->blank_lines;
    d.comment_lines -= pre->comment_lines;
  }
  return d;
}

source::LineCategoryCounts PrAnalysis::line_delta() const {
  source::LineCategoryCounts d;
  for (const auto& f : files) d += f.line_delta();
  return d;
}

long PrAnalysis::cc_delta() const {
  long d = 0;
  for (const auto& f : files)
    if (f.complexity) d += f.complexity->delta;
  return d;
}

Engines::Engines(const RunConfig& config, bool want_sentiment) {
  config.validate();
  if (config.provider == ProviderKind::Baseline) {
    provider_ = std::make_unique<embedding::BaselineProvider>();
  } else {
    try {
      base_provider_ = std::make_unique<embedding::RemoteProvider>(config.provider_url, config.retry);
    } catch (const embedding::EmbeddingError& e) {
      throw RunError(Status::InvalidArgument, e.what());
    }
    try {
      cache_ = std::make_unique<embedding::EmbeddingCache>(config.effective_cache_dir() / "embeddings.bin");
    } catch (const std::exception& e) {
      throw RunError(Status::Io, std::string("embedding cache: ") + e.what());
    }
    provider_ = std::make_unique<embedding::CachedProvider>(*base_provider_, *cache_);
  }
  if (!want_sentiment) return;
  try {
    if (!config.classifier_url.empty()) {
      remote_classifier_ = std::make_unique<sentiment::RemoteClassifier>(config.classifier_url, config.retry);
      remote_counter_ = std::make_unique<sentiment::RemoteTokenCounter>(config.classifier_url, config.retry);
      classifier_ = remote_classifier_.get();
      counter_ = remote_counter_.get();
    } else if (!config.classifier_fixture.empty()) {
      recorded_ = std::make_unique<sentiment::RecordedClassifier>(
          sentiment::RecordedClassifier::from_json(read_text(config.classifier_fixture)));
      classifier_ = recorded_.get();
      counter_ = recorded_.get();
    }
  } catch (const sentiment::SentimentError& e) {
    throw RunError(Status::Classifier, e.what());
  }
}

std::string Engines::classifier_mode() const {
  if (remote_classifier_) return "remote";
  if (recorded_) return "recorded";
  return "none";
}

PrAnalysis analyze(const PullRequestRecord& pr, const RunConfig& config, Engines& engines) {
  PrAnalysis a;
  a.pr_id = pr.pr_id;
  a.cohort = pr.cohort;
  a.provider_id = engines.provider().id();
  ingestion::ExtensionFilter filter{config.extensions};
  source::ExtractOptions extract{config.include_nested};

  std::vector<FilePairDiff> pairs;
  std::vector<ingestion::SnapshotFile> base_files;
  try {
    pairs = ingestion::extract_file_pairs(pr, filter, &a.warnings);
    ingestion::GitRepo repo(pr.repo_path);
    base_files = ingestion::snapshot_files(repo, repo.resolve_commit(pr.base_commit), filter, &a.warnings);
  } catch (const ingestion::GitError& e) {
    throw RunError(Status::Git, pr.pr_id + ": " + e.what());
  }

  std::vector<std::pair<std::string, const std::string*>> changed_pre, changed_post, base_all;
  for (const auto& p : pairs) {
    FileReport f;
    f.path = p.path;
    if (p.pre_text) {
      f.pre = source::count_line_categories(*p.pre_text);
      changed_pre.emplace_back(p.path, &*p.pre_text);
    }
    if (p.post_text) {
      f.post = source::count_line_categories(*p.post_text);
      changed_post.emplace_back(p.path, &*p.post_text);
    }
    try {
      f.complexity = complexity::complexity_delta(p);
    } catch (const source::SyntaxError& e) {
      a.warnings.push_back("complexity of " + p.path + " skipped: syntax error at " + e.what());
    }
    a.files.push_back(std::move(f));
  }
  for (const auto& f : base_files)
    if (!config.exclude_test_files || !redundancy::is_test_path(f.path)) base_all.emplace_back(f.path, &f.text);

  // Unchanged files hold the same functions on both sides, so only changed
  // files can contribute new functions or refactoring sources.
  auto base_changed = functions_of(changed_pre, extract, "base", a.warnings);
  auto head_changed = functions_of(changed_post, extract, "head", a.warnings);
  refactoring::FilterOptions fopts{config.refactor_similarity, config.min_fn_lines};
  auto matches = refactoring::detect_refactorings(base_changed, head_changed, fopts);
  auto f_new = refactoring::exclude_matches(refactoring::candidate_new_functions(base_changed, head_changed),
                                            head_changed, matches);
  for (const auto& m : matches)
    a.refactorings.push_back({m.kind, redundancy::ref_of(base_changed[m.old_index]),
                              redundancy::ref_of(head_changed[m.new_index]), m.body_similarity});
  for (const auto& fn : f_new) a.new_functions.push_back(redundancy::ref_of(fn));

  std::vector<std::string> base_warnings;
  auto f_base = functions_of(base_all, extract, "base snapshot", base_warnings);
  for (auto& w : base_warnings)
    if (std::find(a.warnings.begin(), a.warnings.end(), w) == a.warnings.end()) a.warnings.push_back(std::move(w));

  try {
    a.redundancy = redundancy::max_redundancy_score(pr.pr_id, f_new, f_base, engines.provider(), config.strip_docstrings);
  } catch (const embedding::EmbeddingError& e) {
    throw RunError(Status::Provider, pr.pr_id + ": " + e.what());
  }

  if (engines.classifier()) {
    try {
      a.sentiment = sentiment::per_pr_sentiment(pr, *engines.classifier(), *engines.token_counter());
      a.sentiment_computed = true;
    } catch (const sentiment::SentimentError& e) {
      throw RunError(Status::Classifier, pr.pr_id + ": " + e.what());
    }
  }
  return a;
}

nlohmann::json to_json(const PrAnalysis& a) {
  using nlohmann::json;
  json j = json::object();
  j["pr_id"] = a.pr_id;
  j["cohort"] = std::string(to_string(a.cohort));

  json red = json::object();
  red["provider"] = a.provider_id;
  red["mrs"] = a.redundancy.mrs ? json(*a.redundancy.mrs) : json(nullptr);
  red["n_new"] = a.redundancy.n_new;
  red["n_base"] = a.redundancy.n_base;
  if (a.redundancy.argmax_pair)
    red["argmax_pair"] = {{"new", ref_json(a.redundancy.argmax_pair->first)},
                          {"base", ref_json(a.redundancy.argmax_pair->second)}};
  else
    red["argmax_pair"] = nullptr;
  j["redundancy"] = red;

  json nf = json::array();
  for (const auto& r : a.new_functions) nf.push_back(ref_json(r));
  j["new_functions"] = nf;

  json refs = json::array();
  for (const auto& r : a.refactorings)
    refs.push_back({{"kind", std::string(refactoring::to_string(r.kind))},
                    {"old", ref_json(r.old_fn)},
                    {"new", ref_json(r.new_fn)},
                    {"similarity", r.similarity}});
  j["refactorings"] = refs;

  json files = json::array();
  for (const auto& f : a.files) {
    json fj = json::object();
    fj["path"] = f.path;
    fj["status"] = !f.pre ? "added" : !f.post ? "deleted" : "modified";
    fj["pre"] = f.pre ? counts_json(*f.pre) : json(nullptr);
    fj["post"] = f.post ? counts_json(*f.post) : json(nullptr);
    if (f.complexity)
      fj["complexity"] = {{"pre_cc", f.complexity->pre_cc},
                          {"post_cc", f.complexity->post_cc},
                          {"delta", f.complexity->delta},
                          {"risk", std::string(complexity::to_string(f.complexity->risk))}};
    else
      fj["complexity"] = nullptr;
    files.push_back(fj);
  }
  j["files"] = files;
  j["line_deltas"] = counts_json(a.line_delta());
  j["cc_delta"] = a.cc_delta();

  if (a.sentiment_computed) {
    json s = json::object();
    const auto& ex = a.sentiment.excluded;
    s["excluded"] = {{"bot", ex.bot}, {"empty", ex.empty}, {"over_token_limit", ex.over_token_limit}};
    if (a.sentiment.sentiment) {
      s["n_comments_included"] = a.sentiment.sentiment->n_comments_included;
      s["mean_profile"] = sentiment::profile_to_json(a.sentiment.sentiment->mean_profile);
    } else {
      s["n_comments_included"] = 0;
      s["mean_profile"] = nullptr;
    }
    j["sentiment"] = s;
  } else {
    j["sentiment"] = nullptr;
  }
  j["warnings"] = a.warnings;
  return j;
}

std::string report_file_name(const std::string& pr_id) {
  static const char* hex = "0123456789ABCDEF";
  std::string out;
  for (unsigned char c : pr_id) {
    if (std::isalnum(c) || c == '-' || c == '.') {
      out.push_back(char(c));
    } else {
      out.push_back('_');
      out.push_back(hex[c >> 4]);
      out.push_back(hex[c & 0xf]);
    }
  }
  // Keep clear of the run summary and of dot names.
  if (out.empty() || out == "run" || out[0] == '.') {
    unsigned char c = out.empty() ? 0 : static_cast<unsigned char>(out[0]);
    out = out.empty() ? "_" : std::string{'_', hex[c >> 4], hex[c & 0xf]} + out.substr(1);
  }
  return out + ".json";
}

}  // namespace redline::pipeline
