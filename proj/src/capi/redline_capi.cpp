#include "redline/redline.h"

#include <string>
#include <vector>

#include "complexity/complexity.hpp"
#include "embedding/embedding.hpp"
#include "pipeline/commands.hpp"
#include "source_parser/source_parser.hpp"
#include "statistics/mann_whitney.hpp"

using redline::pipeline::RunError;
using redline::pipeline::Status;

struct redline_config {
  redline::pipeline::RunConfig config;
};

struct redline_result {
  std::string summary;
  std::vector<std::string> warnings;
  std::vector<std::string> outputs;
};

struct redline_function_list {
  std::vector<redline::source::FunctionUnit> functions;
};

namespace {

thread_local std::string last_error;

redline_status fail(redline_status status, const std::string& message) {
  last_error = message;
  return status;
}

// Runs `f`, mapping every exception to a status code and a message.
template <typename F>
redline_status guarded(F&& f) {
  try {
    f();
    last_error.clear();
    return REDLINE_OK;
  } catch (const RunError& e) {
    return fail(static_cast<redline_status>(e.status), e.what());
  } catch (const redline::source::SyntaxError& e) {
    return fail(REDLINE_SYNTAX_ERROR, e.what());
  } catch (const redline::embedding::EmbeddingError& e) {
    return fail(e.kind() == redline::embedding::EmbeddingError::Kind::ProviderUnavailable ? REDLINE_PROVIDER_ERROR
                                                                                         : REDLINE_INVALID_ARGUMENT,
                e.what());
  } catch (const redline::stats::EmptySample& e) {
    return fail(REDLINE_INVALID_ARGUMENT, e.what());
  } catch (const std::bad_alloc&) {
    return fail(REDLINE_INTERNAL_ERROR, "out of memory");
  } catch (const std::exception& e) {
    return fail(REDLINE_INTERNAL_ERROR, e.what());
  } catch (...) {
    return fail(REDLINE_INTERNAL_ERROR, "unknown error");
  }
}

#define REQUIRE(cond, what) \
  if (!(cond)) return fail(REDLINE_INVALID_ARGUMENT, what)

template <typename F>
redline_status set(redline_config* c, F&& f) {
  REQUIRE(c, "config is null");
  return guarded([&] { f(c->config); });
}

redline_status run_command(const redline_config* c, redline_result** out,
                           const std::function<redline::pipeline::CommandResult(const redline::pipeline::RunConfig&)>& f) {
  REQUIRE(c, "config is null");
  REQUIRE(out, "out is null");
  *out = nullptr;
  return guarded([&] {
    auto r = f(c->config);
    auto res = std::make_unique<redline_result>();
    res->summary = std::move(r.summary);
    res->warnings = std::move(r.warnings);
    for (const auto& p : r.written) res->outputs.push_back(p.string());
    *out = res.release();
  });
}

}  // namespace

extern "C" {

const char* redline_last_error(void) { return last_error.c_str(); }

const char* redline_status_name(redline_status status) {
  switch (status) {
    case REDLINE_OK: return "ok";
    case REDLINE_INVALID_ARGUMENT: return "invalid argument";
    case REDLINE_UNKNOWN_PR: return "unknown pr";
    case REDLINE_PROVIDER_ERROR: return "provider error";
    case REDLINE_EMPTY_COHORT: return "empty cohort";
    case REDLINE_NO_SCORED: return "no scored prs";
    case REDLINE_IO_ERROR: return "io error";
    case REDLINE_MANIFEST_ERROR: return "manifest error";
    case REDLINE_GIT_ERROR: return "git error";
    case REDLINE_SYNTAX_ERROR: return "syntax error";
    case REDLINE_CLASSIFIER_ERROR: return "classifier error";
    case REDLINE_INTERNAL_ERROR: return "internal error";
  }
  return "unknown status";
}

const char* redline_version(void) { return "0.1.0"; }

redline_status redline_config_new(redline_config** out) {
  REQUIRE(out, "out is null");
  return guarded([&] { *out = new redline_config(); });
}

void redline_config_free(redline_config* config) { delete config; }

redline_status redline_config_set_manifest(redline_config* c, const char* path) {
  REQUIRE(path, "path is null");
  return set(c, [&](auto& cfg) { cfg.manifest_path = path; });
}

redline_status redline_config_set_output_dir(redline_config* c, const char* path) {
  REQUIRE(path && *path, "output dir is empty");
  return set(c, [&](auto& cfg) { cfg.output_dir = path; });
}

redline_status redline_config_set_provider(redline_config* c, const char* kind) {
  REQUIRE(kind, "provider is null");
  std::string k = kind;
  REQUIRE(k == "baseline" || k == "remote", "provider must be baseline or remote");
  return set(c, [&](auto& cfg) {
    cfg.provider = k == "remote" ? redline::pipeline::ProviderKind::Remote : redline::pipeline::ProviderKind::Baseline;
  });
}

redline_status redline_config_set_provider_url(redline_config* c, const char* url) {
  REQUIRE(url, "url is null");
  return set(c, [&](auto& cfg) { cfg.provider_url = url; });
}

redline_status redline_config_set_classifier_url(redline_config* c, const char* url) {
  REQUIRE(url, "url is null");
  return set(c, [&](auto& cfg) { cfg.classifier_url = url; });
}

redline_status redline_config_set_classifier_fixture(redline_config* c, const char* path) {
  REQUIRE(path, "path is null");
  return set(c, [&](auto& cfg) { cfg.classifier_fixture = path; });
}

redline_status redline_config_set_cache_dir(redline_config* c, const char* path) {
  REQUIRE(path && *path, "cache dir is empty");
  return set(c, [&](auto& cfg) { cfg.cache_dir = std::filesystem::path(path); });
}

redline_status redline_config_set_extensions(redline_config* c, const char* extensions) {
  REQUIRE(extensions, "extensions is null");
  std::vector<std::string> list;
  std::string cur;
  for (const char* p = extensions;; ++p) {
    if (*p == ',' || *p == '\0') {
      while (!cur.empty() && cur.back() == ' ') cur.pop_back();
      if (!cur.empty()) list.push_back(cur[0] == '.' ? cur : "." + cur);
      cur.clear();
      if (!*p) break;
    } else if (!(cur.empty() && *p == ' ')) {
      cur.push_back(*p);
    }
  }
  REQUIRE(!list.empty(), "no extensions given");
  return set(c, [&](auto& cfg) { cfg.extensions = list; });
}

redline_status redline_config_set_refactor_similarity(redline_config* c, double threshold) {
  REQUIRE(threshold >= 0.0 && threshold <= 1.0, "refactor similarity must lie in [0, 1]");
  return set(c, [&](auto& cfg) { cfg.refactor_similarity = threshold; });
}

redline_status redline_config_set_min_fn_lines(redline_config* c, long lines) {
  REQUIRE(lines >= 1, "min function lines must be at least 1");
  return set(c, [&](auto& cfg) { cfg.min_fn_lines = lines; });
}

redline_status redline_config_set_parallelism(redline_config* c, unsigned workers) {
  REQUIRE(workers >= 1, "parallelism must be at least 1");
  return set(c, [&](auto& cfg) { cfg.parallelism = workers; });
}

redline_status redline_config_set_include_nested(redline_config* c, int enabled) {
  return set(c, [&](auto& cfg) { cfg.include_nested = enabled != 0; });
}

redline_status redline_config_set_exclude_test_files(redline_config* c, int enabled) {
  return set(c, [&](auto& cfg) { cfg.exclude_test_files = enabled != 0; });
}

redline_status redline_config_set_strip_docstrings(redline_config* c, int enabled) {
  return set(c, [&](auto& cfg) { cfg.strip_docstrings = enabled != 0; });
}

redline_status redline_config_set_retry(redline_config* c, unsigned retries, unsigned backoff_ms, unsigned timeout_s) {
  REQUIRE(timeout_s >= 1, "timeout must be at least one second");
  return set(c, [&](auto& cfg) {
    cfg.retry.retries = static_cast<int>(retries);
    cfg.retry.backoff_base = std::chrono::milliseconds(backoff_ms);
    cfg.retry.timeout = std::chrono::seconds(timeout_s);
  });
}

redline_status redline_analyze_pr(const redline_config* c, const char* pr_id, redline_result** out) {
  REQUIRE(pr_id, "pr_id is null");
  std::string id = pr_id;
  return run_command(c, out, [&](const auto& cfg) { return redline::pipeline::analyze_pr(cfg, id); });
}

redline_status redline_compare_cohorts(const redline_config* c, redline_result** out) {
  return run_command(c, out, [](const auto& cfg) { return redline::pipeline::compare_cohorts(cfg); });
}

redline_status redline_emit_distribution(const redline_config* c, const char* metric, redline_result** out) {
  REQUIRE(metric, "metric is null");
  std::string m = metric;
  return run_command(c, out, [&](const auto& cfg) { return redline::pipeline::emit_distribution(cfg, m); });
}

const char* redline_result_summary(const redline_result* r) { return r ? r->summary.c_str() : ""; }

size_t redline_result_warning_count(const redline_result* r) { return r ? r->warnings.size() : 0; }

const char* redline_result_warning(const redline_result* r, size_t i) {
  return r && i < r->warnings.size() ? r->warnings[i].c_str() : nullptr;
}

size_t redline_result_output_count(const redline_result* r) { return r ? r->outputs.size() : 0; }

const char* redline_result_output(const redline_result* r, size_t i) {
  return r && i < r->outputs.size() ? r->outputs[i].c_str() : nullptr;
}

void redline_result_free(redline_result* r) { delete r; }

redline_status redline_line_counts_of(const char* source, size_t length, redline_line_counts* out) {
  REQUIRE(source || length == 0, "source is null");
  REQUIRE(out, "out is null");
  return guarded([&] {
    auto c = redline::source::count_line_categories(std::string_view(source ? source : "", length));
    *out = {c.loc, c.multiline_string_lines, c.blank_lines, c.comment_lines};
  });
}

redline_status redline_file_complexity(const char* source, size_t length, long* out) {
  REQUIRE(source || length == 0, "source is null");
  REQUIRE(out, "out is null");
  return guarded([&] { *out = redline::complexity::file_complexity(std::string_view(source ? source : "", length)); });
}

redline_status redline_extract_functions(const char* source, size_t length, const char* file_path, int include_nested,
                                         redline_function_list** out) {
  REQUIRE(source || length == 0, "source is null");
  REQUIRE(out, "out is null");
  *out = nullptr;
  return guarded([&] {
    auto list = std::make_unique<redline_function_list>();
    list->functions = redline::source::extract_functions(std::string_view(source ? source : "", length),
                                                         file_path ? file_path : "", {include_nested != 0});
    *out = list.release();
  });
}

size_t redline_function_count(const redline_function_list* l) { return l ? l->functions.size() : 0; }

const char* redline_function_qualified_name(const redline_function_list* l, size_t i) {
  return l && i < l->functions.size() ? l->functions[i].qualified_name.c_str() : nullptr;
}

int redline_function_start_line(const redline_function_list* l, size_t i) {
  return l && i < l->functions.size() ? l->functions[i].span.start_line : 0;
}

int redline_function_end_line(const redline_function_list* l, size_t i) {
  return l && i < l->functions.size() ? l->functions[i].span.end_line : 0;
}

int redline_function_complexity(const redline_function_list* l, size_t i) {
  return l && i < l->functions.size() ? l->functions[i].complexity : 0;
}

const char* redline_function_normalized_body(const redline_function_list* l, size_t i) {
  return l && i < l->functions.size() ? l->functions[i].normalized_body.c_str() : nullptr;
}

void redline_function_list_free(redline_function_list* l) { delete l; }

redline_status redline_baseline_embed(const char* text, size_t dim, float* out) {
  REQUIRE(text, "text is null");
  REQUIRE(out, "out is null");
  REQUIRE(dim >= 1, "dim must be at least 1");
  return guarded([&] {
    auto v = redline::embedding::BaselineProvider(dim).embed(text);
    std::copy(v.values.begin(), v.values.end(), out);
  });
}

redline_status redline_cosine(const float* a, const float* b, size_t dim, double* out) {
  REQUIRE(a && b, "vector is null");
  REQUIRE(out, "out is null");
  REQUIRE(dim >= 1, "dim must be at least 1");
  return guarded([&] {
    redline::embedding::EmbeddingVector x{std::vector<float>(a, a + dim), dim, "caller"};
    redline::embedding::EmbeddingVector y{std::vector<float>(b, b + dim), dim, "caller"};
    *out = redline::embedding::cosine(x, y);
  });
}

redline_status redline_mann_whitney_u(const double* x, size_t n1, const double* y, size_t n2,
                                      redline_mann_whitney* out) {
  REQUIRE((x || n1 == 0) && (y || n2 == 0), "sample is null");
  REQUIRE(out, "out is null");
  return guarded([&] {
    auto r = redline::stats::mann_whitney_u(std::vector<double>(x, x + n1), std::vector<double>(y, y + n2));
    *out = {r.u_statistic, r.p_value, r.exact ? 1 : 0, redline::stats::stars(r.significance).data()};
  });
}

}  // extern "C"
