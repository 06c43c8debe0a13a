#include <cstring>
#include <gtest/gtest.h>

#include <sys/wait.h>

#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <string>
#include <vector>

#include "corpus.hpp"
#include "redline/redline.h"

namespace {

const char* kSource =
    "def f(x):\n"
    "    if x and x > 1:\n"
    "        return 1\n"
    "    return 0\n"
    "\n"
    "\n"
    "class K:\n"
    "    def g(self):\n"
    "        '''doc'''\n"
    "        return [i for i in range(3) if i]\n";

TEST(CApi, FunctionListAndMetrics) {
  redline_function_list* list = nullptr;
  ASSERT_EQ(redline_extract_functions(kSource, std::strlen(kSource), "m.py", 1, &list), REDLINE_OK);
  ASSERT_EQ(redline_function_count(list), 2u);
  EXPECT_STREQ(redline_function_qualified_name(list, 0), "f");
  EXPECT_STREQ(redline_function_qualified_name(list, 1), "K.g");
  EXPECT_EQ(redline_function_start_line(list, 0), 1);
  EXPECT_EQ(redline_function_end_line(list, 0), 4);
  EXPECT_EQ(redline_function_complexity(list, 0), 3);
  EXPECT_EQ(redline_function_complexity(list, 1), 3);
  EXPECT_EQ(redline_function_qualified_name(list, 2), nullptr);
  redline_function_list_free(list);

  long cc = 0;
  ASSERT_EQ(redline_file_complexity(kSource, std::strlen(kSource), &cc), REDLINE_OK);
  EXPECT_EQ(cc, 6);
  redline_line_counts counts{};
  ASSERT_EQ(redline_line_counts_of(kSource, std::strlen(kSource), &counts), REDLINE_OK);
  EXPECT_EQ(counts.loc, 7);  // the one-line docstring is not code
  EXPECT_EQ(counts.blank_lines, 2);
}

TEST(CApi, SyntaxErrorIsReported) {
  const char* bad = "def f(:\n  pass\n";
  long cc = 0;
  EXPECT_EQ(redline_file_complexity(bad, std::strlen(bad), &cc), REDLINE_SYNTAX_ERROR);
  EXPECT_NE(std::string(redline_last_error()), "");
  EXPECT_EQ(redline_file_complexity("x = 1\n", 6, &cc), REDLINE_OK);
  EXPECT_STREQ(redline_last_error(), "");
}

TEST(CApi, EmbeddingAndCosine) {
  std::vector<float> a(512), b(512);
  ASSERT_EQ(redline_baseline_embed("def f ( x ) : return x", 512, a.data()), REDLINE_OK);
  ASSERT_EQ(redline_baseline_embed("def f ( x ) : return x", 512, b.data()), REDLINE_OK);
  double c = 0;
  ASSERT_EQ(redline_cosine(a.data(), b.data(), 512, &c), REDLINE_OK);
  EXPECT_NEAR(c, 1.0, 1e-9);
  std::vector<float> zero(512, 0.0f);
  EXPECT_EQ(redline_cosine(a.data(), zero.data(), 512, &c), REDLINE_INVALID_ARGUMENT);
  EXPECT_EQ(redline_cosine(nullptr, zero.data(), 512, &c), REDLINE_INVALID_ARGUMENT);
}

TEST(CApi, MannWhitney) {
  const double x[] = {1, 2, 3};
  const double y[] = {4, 5, 6};
  redline_mann_whitney r{};
  ASSERT_EQ(redline_mann_whitney_u(x, 3, y, 3, &r), REDLINE_OK);
  EXPECT_EQ(r.u_statistic, 0.0);
  EXPECT_NEAR(r.p_value, 0.1, 1e-12);
  EXPECT_EQ(r.exact, 1);
  EXPECT_STREQ(r.stars, "");
  EXPECT_EQ(redline_mann_whitney_u(x, 0, y, 3, &r), REDLINE_INVALID_ARGUMENT);
}

TEST(CApi, ConfigValidation) {
  redline_config* c = nullptr;
  ASSERT_EQ(redline_config_new(&c), REDLINE_OK);
  EXPECT_EQ(redline_config_set_provider(c, "magic"), REDLINE_INVALID_ARGUMENT);
  EXPECT_EQ(redline_config_set_parallelism(c, 0), REDLINE_INVALID_ARGUMENT);
  EXPECT_EQ(redline_config_set_refactor_similarity(c, 1.5), REDLINE_INVALID_ARGUMENT);
  EXPECT_EQ(redline_config_set_extensions(c, " , "), REDLINE_INVALID_ARGUMENT);
  EXPECT_EQ(redline_config_set_extensions(c, "py, .pyi"), REDLINE_OK);
  ASSERT_EQ(redline_config_set_provider(c, "remote"), REDLINE_OK);
  ASSERT_EQ(redline_config_set_manifest(c, "/nonexistent.jsonl"), REDLINE_OK);
  redline_result* r = nullptr;
  EXPECT_EQ(redline_compare_cohorts(c, &r), REDLINE_INVALID_ARGUMENT);  // remote without a url
  EXPECT_EQ(r, nullptr);
  redline_config_free(c);
}

TEST(CApi, CompareCohortsEndToEnd) {
  auto root = redline::fixtures::fresh_temp_dir("capi");
  redline::fixtures::CorpusOptions opt;
  opt.per_cohort = 3;
  auto corpus = redline::fixtures::build_corpus(root, 2, opt);
  redline_config* c = nullptr;
  ASSERT_EQ(redline_config_new(&c), REDLINE_OK);
  ASSERT_EQ(redline_config_set_manifest(c, corpus.manifest.c_str()), REDLINE_OK);
  ASSERT_EQ(redline_config_set_output_dir(c, (root / "out").c_str()), REDLINE_OK);
  redline_result* r = nullptr;
  ASSERT_EQ(redline_compare_cohorts(c, &r), REDLINE_OK) << redline_last_error();
  EXPECT_NE(std::string(redline_result_summary(r)).find("mrs"), std::string::npos);
  EXPECT_EQ(redline_result_output_count(r), 6u + 3u);
  redline_result_free(r);
  EXPECT_EQ(redline_analyze_pr(c, "missing", &r), REDLINE_UNKNOWN_PR);
  EXPECT_EQ(redline_emit_distribution(c, "emotion:joy", &r), REDLINE_NO_SCORED);
  ASSERT_EQ(redline_emit_distribution(c, "mrs", &r), REDLINE_OK);
  redline_result_free(r);
  redline_config_free(c);
}

int run_cli(const std::string& args) {
  std::string cmd = std::string(REDLINE_CLI) + " " + args + " >/dev/null 2>&1";
  int status = std::system(cmd.c_str());
  return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

TEST(Cli, ExitCodes) {
  auto root = redline::fixtures::fresh_temp_dir("cli");
  redline::fixtures::CorpusOptions opt;
  opt.per_cohort = 2;
  auto corpus = redline::fixtures::build_corpus(root, 4, opt);
  const std::string m = " --manifest " + corpus.manifest.string();
  const std::string out = " --out " + (root / "out").string();
  EXPECT_EQ(run_cli("analyze-pr" + m + out + " --pr agent-0"), 0);
  EXPECT_TRUE(std::filesystem::exists(root / "out" / "agent-0.json"));
  EXPECT_EQ(run_cli("analyze-pr" + m + out + " --pr nope"), 2);
  EXPECT_EQ(run_cli("analyze-pr" + m + out + " --pr agent-0 --provider remote --provider-url http://127.0.0.1:1 --retries 0 --timeout 2"), 3);
  EXPECT_EQ(run_cli("emit-distribution --metric mrs" + out), 1);  // no completed run yet
  EXPECT_EQ(run_cli("compare-cohorts" + m + out), 0);
  EXPECT_EQ(run_cli("emit-distribution --metric mrs" + out), 0);
  EXPECT_EQ(run_cli("emit-distribution --metric emotion:joy" + out), 5);
  EXPECT_EQ(run_cli("emit-distribution --metric bogus" + out), 1);

  std::vector<nlohmann::json> agents_only;
  for (const auto& pr : corpus.prs)
    if (pr.cohort == redline::Cohort::Agent)
      agents_only.push_back(redline::fixtures::manifest_line(pr.pr_id, root / "repo", pr.base, pr.head, pr.cohort));
  redline::fixtures::write_manifest(root / "agents.jsonl", agents_only);
  EXPECT_EQ(run_cli("compare-cohorts --manifest " + (root / "agents.jsonl").string() + out), 4);
  EXPECT_NE(run_cli("compare-cohorts"), 0);
}

}  // namespace
