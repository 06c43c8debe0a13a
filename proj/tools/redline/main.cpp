#include <cstdio>
#include <cstdlib>
#include <string>

#include "CLI11.hpp"
#include "redline/redline.h"

namespace {

struct Options {
  std::string manifest;
  std::string out = ".";
  std::string provider = "baseline";
  std::string provider_url;
  std::string classifier_url;
  std::string classifier_fixture;
  std::string cache_dir;
  std::string extensions = ".py";
  double refactor_similarity = 0.95;
  long min_fn_lines = 3;
  unsigned parallelism = 4;
  bool no_nested = false;
  bool exclude_tests = false;
  bool strip_docstrings = false;
  unsigned retries = 3;
  unsigned backoff_ms = 200;
  unsigned timeout_s = 120;
  bool quiet = false;
  std::string pr;
  std::string metric;
};

int report(redline_status s) {
  std::fprintf(stderr, "redline: %s: %s\n", redline_status_name(s), redline_last_error());
  // Exit codes for the documented failure classes; everything else is 1.
  switch (s) {
    case REDLINE_UNKNOWN_PR:
    case REDLINE_PROVIDER_ERROR:
    case REDLINE_EMPTY_COHORT:
    case REDLINE_NO_SCORED: return static_cast<int>(s);
    default: return 1;
  }
}

redline_status configure(redline_config* c, const Options& o) {
  redline_status s = REDLINE_OK;
  auto step = [&](redline_status r) {
    if (s == REDLINE_OK) s = r;
  };
  if (!o.manifest.empty()) step(redline_config_set_manifest(c, o.manifest.c_str()));
  step(redline_config_set_output_dir(c, o.out.c_str()));
  step(redline_config_set_provider(c, o.provider.c_str()));
  step(redline_config_set_provider_url(c, o.provider_url.c_str()));
  step(redline_config_set_classifier_url(c, o.classifier_url.c_str()));
  step(redline_config_set_classifier_fixture(c, o.classifier_fixture.c_str()));
  if (!o.cache_dir.empty()) step(redline_config_set_cache_dir(c, o.cache_dir.c_str()));
  step(redline_config_set_extensions(c, o.extensions.c_str()));
  step(redline_config_set_refactor_similarity(c, o.refactor_similarity));
  step(redline_config_set_min_fn_lines(c, o.min_fn_lines));
  step(redline_config_set_parallelism(c, o.parallelism));
  step(redline_config_set_include_nested(c, !o.no_nested));
  step(redline_config_set_exclude_test_files(c, o.exclude_tests));
  step(redline_config_set_strip_docstrings(c, o.strip_docstrings));
  step(redline_config_set_retry(c, o.retries, o.backoff_ms, o.timeout_s));
  return s;
}

}  // namespace

int main(int argc, char** argv) {
  Options o;
  CLI::App app{"Measure redundancy, complexity and review sentiment of pull requests across two cohorts."};
  app.set_version_flag("--version", std::string(redline_version()));
  app.require_subcommand(1);
  app.fallthrough();

  app.add_option("--manifest", o.manifest, "JSONL manifest of pull requests")->check(CLI::ExistingFile);
  app.add_option("--out", o.out, "Output directory")->capture_default_str();
  app.add_option("--provider", o.provider, "Embedding provider")
      ->check(CLI::IsMember({"baseline", "remote"}))
      ->capture_default_str();
  app.add_option("--provider-url", o.provider_url, "Embedding service base url (remote provider)");
  app.add_option("--classifier-url", o.classifier_url, "Emotion classifier service base url");
  app.add_option("--classifier-fixture", o.classifier_fixture, "Recorded classifier responses (offline runs)")
      ->check(CLI::ExistingFile);
  app.add_option("--cache-dir", o.cache_dir, "Embedding cache directory (default: $REDLINE_CACHE_DIR or <out>/.redline-cache)");
  app.add_option("--extensions", o.extensions, "Comma-separated source extensions")->capture_default_str();
  app.add_option("--refactor-similarity", o.refactor_similarity, "Move/rename similarity threshold")
      ->check(CLI::Range(0.0, 1.0))
      ->capture_default_str();
  app.add_option("--min-fn-lines", o.min_fn_lines, "Minimum body lines for rename detection")
      ->check(CLI::PositiveNumber)
      ->capture_default_str();
  app.add_option("-j,--parallelism", o.parallelism, "PRs analyzed concurrently")
      ->check(CLI::PositiveNumber)
      ->capture_default_str();
  app.add_flag("--no-nested", o.no_nested, "Ignore functions defined inside functions");
  app.add_flag("--exclude-tests", o.exclude_tests, "Leave test files out of the base function set");
  app.add_flag("--strip-docstrings", o.strip_docstrings, "Drop docstrings before embedding");
  app.add_option("--retries", o.retries, "Retries per service request")->capture_default_str();
  app.add_option("--backoff-ms", o.backoff_ms, "Base retry backoff in milliseconds")->capture_default_str();
  app.add_option("--timeout", o.timeout_s, "Service request timeout in seconds")
      ->check(CLI::PositiveNumber)
      ->capture_default_str();
  app.add_flag("-q,--quiet", o.quiet, "Suppress warnings");

  auto* analyze = app.add_subcommand("analyze-pr", "Analyze one pull request and write <out>/<pr_id>.json");
  analyze->add_option("--pr", o.pr, "pr_id from the manifest")->required();
  auto* compare = app.add_subcommand("compare-cohorts", "Compare the Human and Agent cohorts of a manifest");
  auto* dist = app.add_subcommand("emit-distribution", "Write histogram data from a completed compare-cohorts run");
  dist->add_option("--metric", o.metric, "mrs, cc_delta or emotion:<name>")->required();

  CLI11_PARSE(app, argc, argv);

  if ((analyze->parsed() || compare->parsed()) && o.manifest.empty()) {
    std::fprintf(stderr, "redline: --manifest is required\n");
    return 1;
  }

  redline_config* config = nullptr;
  if (redline_config_new(&config) != REDLINE_OK) return report(REDLINE_INTERNAL_ERROR);
  redline_status s = configure(config, o);
  redline_result* result = nullptr;
  if (s == REDLINE_OK) {
    if (analyze->parsed()) s = redline_analyze_pr(config, o.pr.c_str(), &result);
    else if (compare->parsed()) s = redline_compare_cohorts(config, &result);
    else s = redline_emit_distribution(config, o.metric.c_str(), &result);
  }
  redline_config_free(config);
  if (s != REDLINE_OK) return report(s);

  if (!o.quiet)
    for (size_t i = 0; i < redline_result_warning_count(result); ++i)
      std::fprintf(stderr, "warning: %s\n", redline_result_warning(result, i));
  std::fputs(redline_result_summary(result), stdout);
  for (size_t i = 0; i < redline_result_output_count(result); ++i)
    std::printf("wrote %s\n", redline_result_output(result, i));
  redline_result_free(result);
  return 0;
}
