#include <gtest/gtest.h>

#include <random>

#include "fixtures.hpp"
#include "json.hpp"
#include "mw_cases.hpp"
#include "statistics/mann_whitney.hpp"

using namespace redline;
using stats::Significance;

TEST(Midranks, TiesShareMeanRank) {
  EXPECT_EQ(stats::midranks({10, 20, 20, 5}), (std::vector<double>{2, 3.5, 3.5, 1}));
  EXPECT_EQ(stats::midranks({1, 1, 1}), (std::vector<double>{2, 2, 2}));
}

TEST(MannWhitney, IdenticalSamples) {
  auto r = stats::mann_whitney_u({1, 2, 3}, {1, 2, 3});
  EXPECT_DOUBLE_EQ(r.u_statistic, 4.5);
  EXPECT_NEAR(r.p_value, 1.0, 1e-12);
  EXPECT_EQ(r.significance, Significance::NotSignificant);
  EXPECT_TRUE(r.exact);
  EXPECT_NEAR(r.p_value, oracle::brute_force_mann_whitney({1, 2, 3}, {1, 2, 3}).p, 1e-12);
}

TEST(MannWhitney, FullySeparated) {
  auto r = stats::mann_whitney_u({1, 2, 3}, {10, 20, 30});
  EXPECT_DOUBLE_EQ(r.u_statistic, 0.0);
  // Only the two extreme placements out of C(6,3) = 20 are as extreme.
  EXPECT_NEAR(r.p_value, 2.0 / 20.0, 1e-12);
  EXPECT_DOUBLE_EQ(stats::mann_whitney_u({10, 20, 30}, {1, 2, 3}).u_statistic, 9.0);
}

TEST(MannWhitney, TwoVersusTwoWithMidranks) {
  // pooled ranks 1.5, 3.5, 1.5, 3.5 -> R1 = 5, U = 5 - 3 = 2
  auto r = stats::mann_whitney_u({1, 2}, {1, 2});
  EXPECT_DOUBLE_EQ(r.u_statistic, 2.0);
  EXPECT_NEAR(r.p_value, 1.0, 1e-12);
}

TEST(MannWhitney, EmptySampleThrows) {
  EXPECT_THROW(stats::mann_whitney_u({}, {1}), stats::EmptySample);
  EXPECT_THROW(stats::mann_whitney_u({1}, {}), stats::EmptySample);
}

TEST(MannWhitney, ExactModeMatchesBruteForceOracle) {
  auto cases = oracle::small_sample_cases(10);
  ASSERT_GT(cases.size(), 10000u);
  for (const auto& [a, b] : cases) {
    auto r = stats::mann_whitney_u(a, b);
    auto o = oracle::brute_force_mann_whitney(a, b);
    ASSERT_NEAR(r.u_statistic, o.u, 1e-12);
    ASSERT_NEAR(r.p_value, o.p, 1e-9) << "n1=" << a.size() << " n2=" << b.size();
    auto s = stats::mann_whitney_u(b, a);
    ASSERT_EQ(s.u_statistic, double(a.size() * b.size()) - r.u_statistic);
    ASSERT_NEAR(s.p_value, r.p_value, 1e-9);
  }
}

TEST(MannWhitney, ExactBoundaryAtTwentyMatchesOracle) {
  std::vector<double> a, b;
  for (int i = 0; i < 10; ++i) a.push_back(i % 4);
  for (int i = 0; i < 10; ++i) b.push_back(i % 3 + 1);
  auto r = stats::mann_whitney_u(a, b);
  EXPECT_TRUE(r.exact);
  EXPECT_NEAR(r.p_value, oracle::brute_force_mann_whitney(a, b).p, 1e-9);
  a.push_back(2);
  EXPECT_FALSE(stats::mann_whitney_u(a, b).exact);
}

TEST(MannWhitney, MatchesRecordedScipyValues) {
  auto doc = nlohmann::json::parse(fixtures::read_file(fixtures::source_dir() / "golden" / "scipy_mannwhitney.json"));
  for (auto& [name, c] : doc["values"].items()) {
    auto a = c["a"].template get<std::vector<double>>(), b = c["b"].template get<std::vector<double>>();
    auto r = stats::mann_whitney_u(a, b);
    EXPECT_DOUBLE_EQ(r.u_statistic, c["u"].template get<double>()) << name;
    EXPECT_NEAR(r.p_value, c["p"].template get<double>(), 1e-9) << name;
    EXPECT_EQ(r.exact, c["method"] == "exact") << name;
  }
}

TEST(MannWhitney, ShiftInvarianceAndSwapInNormalMode) {
  std::mt19937 rng(3);
  std::uniform_int_distribution<int> v(0, 9);
  for (int trial = 0; trial < 50; ++trial) {
    std::vector<double> a(14), b(17);
    for (auto& x : a) x = v(rng) * 0.25;
    for (auto& x : b) x = v(rng) * 0.25 + 0.5;
    auto r = stats::mann_whitney_u(a, b);
    auto shifted_a = a, shifted_b = b;
    for (auto& x : shifted_a) x += 3.0;
    for (auto& x : shifted_b) x += 3.0;
    auto s = stats::mann_whitney_u(shifted_a, shifted_b);
    EXPECT_EQ(s.u_statistic, r.u_statistic);
    EXPECT_NEAR(s.p_value, r.p_value, 1e-12);
    auto w = stats::mann_whitney_u(b, a);
    EXPECT_EQ(w.u_statistic, double(a.size() * b.size()) - r.u_statistic);
    EXPECT_NEAR(w.p_value, r.p_value, 1e-9);
    EXPECT_GT(r.p_value, 0.0);
    EXPECT_LE(r.p_value, 1.0);
    EXPECT_LE(r.u_statistic, double(a.size() * b.size()));
  }
}

TEST(MannWhitney, AllTiedIsNotSignificant) {
  std::vector<double> a(15, 0.5), b(15, 0.5);
  auto r = stats::mann_whitney_u(a, b);
  EXPECT_DOUBLE_EQ(r.p_value, 1.0);
}

TEST(Significance, Thresholds) {
  EXPECT_EQ(stats::stars(stats::significance_of(0.03)), "*");
  EXPECT_EQ(stats::stars(stats::significance_of(0.0005)), "***");
  EXPECT_EQ(stats::stars(stats::significance_of(0.2)), "");
  EXPECT_EQ(stats::stars(stats::significance_of(0.05)), "");
  EXPECT_EQ(stats::stars(stats::significance_of(0.001)), "*");
}

TEST(AnnotateTable, AttachesStarsAndRequiresResults) {
  stats::MannWhitneyResult sig;
  sig.p_value = 0.0005;
  sig.significance = stats::significance_of(sig.p_value);
  std::vector<stats::MetricRow> rows = {{"mrs", 0.1, 0.3}, {"added_loc", 4.0, 4.0}};
  auto out = stats::annotate_table(rows, {{"mrs", sig}, {"added_loc", std::nullopt}});
  ASSERT_EQ(out.size(), 2u);
  EXPECT_EQ(out[0].stars, "***");
  EXPECT_FALSE(out[1].result.has_value());
  EXPECT_EQ(out[1].stars, "");
  EXPECT_THROW(stats::annotate_table(rows, {{"mrs", sig}}), stats::MissingResult);
}
