#include <gtest/gtest.h>

#include <atomic>
#include <random>

#include "fixtures.hpp"
#include "sentiment/sentiment.hpp"
#include "sentiment_suite.hpp"
#include "stub_server.hpp"

using namespace redline;
using sentiment::EmotionProfile;
using sentiment::ExclusionReason;
using sentiment::SentimentError;

namespace {

sentiment::RecordedClassifier recorded() {
  return sentiment::RecordedClassifier::from_json(fixtures::read_fixture("classifier/recorded.json"));
}

SentimentError::Kind kind_of(const std::function<void()>& f) {
  try {
    f();
  } catch (const SentimentError& e) {
    return e.kind();
  }
  ADD_FAILURE() << "no SentimentError thrown";
  return SentimentError::Kind::UnknownPrId;
}

EmotionProfile uniform() {
  EmotionProfile p;
  p.scores.fill(1.0 / 7.0);
  return p;
}

class UniformClassifier : public sentiment::Classifier {
 public:
  std::vector<EmotionProfile> classify(const std::vector<std::string>& texts) override {
    calls += texts.size();
    return std::vector<EmotionProfile>(texts.size(), uniform());
  }
  std::size_t calls = 0;
};

class FixedCounter : public sentiment::TokenCounter {
 public:
  explicit FixedCounter(long n) : n_(n) {}
  std::vector<long> count(const std::vector<std::string>& texts) override {
    seen += texts.size();
    return std::vector<long>(texts.size(), n_);
  }
  bool approximate() const override { return false; }
  std::size_t seen = 0;

 private:
  long n_;
};

http::RetryPolicy fast() {
  http::RetryPolicy p;
  p.backoff_base = std::chrono::milliseconds(1);
  p.timeout = std::chrono::seconds(5);
  return p;
}

}  // namespace

TEST(Filter, ExclusionReasons) {
  FixedCounter ten(10);
  auto r = sentiment::filter_comments({fixtures::comment("bot", "hi", true), fixtures::comment("a", "fine")}, ten);
  ASSERT_EQ(r.excluded.size(), 1u);
  EXPECT_EQ(r.excluded[0].second, ExclusionReason::Bot);
  ASSERT_EQ(r.included.size(), 1u);
  EXPECT_EQ(r.included[0].body, "fine");

  FixedCounter six_hundred(600);
  auto long_one = sentiment::filter_comments({fixtures::comment("a", "long text")}, six_hundred);
  ASSERT_EQ(long_one.excluded.size(), 1u);
  EXPECT_EQ(long_one.excluded[0].second, ExclusionReason::OverTokenLimit);
}

TEST(Filter, LimitIsInclusiveAt512) {
  FixedCounter at(512), over(513);
  EXPECT_EQ(sentiment::filter_comments({fixtures::comment("a", "x")}, at).included.size(), 1u);
  EXPECT_EQ(sentiment::filter_comments({fixtures::comment("a", "x")}, over).included.size(), 0u);
}

TEST(Filter, BotSuffixEmptyAndOrder) {
  FixedCounter big(9999);
  auto r = sentiment::filter_comments({fixtures::comment("renovate[bot]", "   "), fixtures::comment("x", " \t\n"),
                                       fixtures::comment("y", "too long")},
                                      big);
  ASSERT_EQ(r.excluded.size(), 3u);
  EXPECT_EQ(r.excluded[0].second, ExclusionReason::Bot);
  EXPECT_EQ(r.excluded[1].second, ExclusionReason::Empty);
  EXPECT_EQ(r.excluded[2].second, ExclusionReason::OverTokenLimit);
  EXPECT_EQ(r.counts, (sentiment::ExclusionCounts{1, 1, 1}));
  EXPECT_EQ(big.seen, 1u);  // only the third comment needed counting
}

TEST(Filter, WhitespaceFallbackCountsWords) {
  sentiment::WhitespaceTokenCounter c;
  EXPECT_EQ(c.count({"", "a b  c", fixtures::long_comment(600)}), (std::vector<long>{0, 3, 600}));
  EXPECT_TRUE(c.approximate());
  auto r = sentiment::filter_comments({fixtures::comment("a", fixtures::long_comment(600))}, c);
  EXPECT_EQ(r.counts.over_token_limit, 1u);
}

TEST(Classify, UniformStubAndEmptyInput) {
  UniformClassifier u;
  auto out = sentiment::classify({"a", "b"}, u);
  ASSERT_EQ(out.size(), 2u);
  for (auto& p : out)
    for (double s : p.scores) EXPECT_DOUBLE_EQ(s, 1.0 / 7.0);
  EXPECT_TRUE(sentiment::classify({}, u).empty());
  EXPECT_EQ(u.calls, 2u);
}

TEST(Classify, MalformedScoresRejected) {
  EmotionProfile low = uniform();
  low[0] -= 0.05;
  EXPECT_EQ(kind_of([&] { sentiment::validate_profile(low); }), SentimentError::Kind::MalformedScores);
  EmotionProfile negative = uniform();
  negative[0] = -0.001;
  negative[1] += 0.001 + 1.0 / 7.0;
  EXPECT_EQ(kind_of([&] { sentiment::validate_profile(negative); }), SentimentError::Kind::MalformedScores);
  EmotionProfile slightly_off = uniform();
  slightly_off[6] += 0.009;
  EXPECT_NO_THROW(sentiment::validate_profile(slightly_off));
}

TEST(PerPr, MeanOfTwoProfiles) {
  auto c = recorded();
  PullRequestRecord pr;
  pr.pr_id = "p";
  pr.comments = {fixtures::comment("a", "Nice cleanup."), fixtures::comment("b", "Please rename this variable.")};
  auto out = sentiment::per_pr_sentiment(pr, c, c);
  ASSERT_TRUE(out.sentiment.has_value());
  auto p = c.classify({"Nice cleanup."})[0], q = c.classify({"Please rename this variable."})[0];
  for (std::size_t i = 0; i < sentiment::kEmotionCount; ++i)
    EXPECT_EQ(out.sentiment->mean_profile[i], (p[i] + q[i]) / 2);
  EXPECT_EQ(out.sentiment->n_comments_included, 2u);
}

TEST(PerPr, AllBotsGivesNoSentiment) {
  UniformClassifier u;
  FixedCounter ten(10);
  PullRequestRecord pr;
  pr.pr_id = "b";
  pr.comments = {fixtures::comment("ci[bot]", "ok"), fixtures::comment("x", "done", true)};
  auto out = sentiment::per_pr_sentiment(pr, u, ten);
  EXPECT_FALSE(out.sentiment.has_value());
  EXPECT_EQ(out.excluded.bot, 2u);
  EXPECT_EQ(u.calls, 0u);
}

TEST(PerPr, FixtureMeansMatchHandComputation) {
  auto c = recorded();
  auto expected = fixtures::sentiment_expected_means();
  for (const auto& pr : fixtures::sentiment_prs()) {
    auto out = sentiment::per_pr_sentiment(pr, c, c);
    ASSERT_TRUE(out.sentiment.has_value()) << pr.pr_id;
    EXPECT_EQ(out.sentiment->mean_profile, expected.at(pr.pr_id)) << pr.pr_id;
  }
}

TEST(PerPr, ExcludedCountsOnFixture) {
  auto c = recorded();
  auto prs = fixtures::sentiment_prs();
  EXPECT_EQ(sentiment::per_pr_sentiment(prs[0], c, c).excluded, (sentiment::ExclusionCounts{1, 0, 0}));
  EXPECT_EQ(sentiment::per_pr_sentiment(prs[1], c, c).excluded, (sentiment::ExclusionCounts{0, 0, 1}));
  EXPECT_EQ(sentiment::per_pr_sentiment(prs[3], c, c).excluded, (sentiment::ExclusionCounts{1, 1, 0}));
}

TEST(PerPr, CommentOrderDoesNotMatter) {
  auto c = recorded();
  std::mt19937 rng(17);
  for (auto pr : fixtures::sentiment_prs()) {
    auto ref = sentiment::per_pr_sentiment(pr, c, c);
    for (int i = 0; i < 10; ++i) {
      std::shuffle(pr.comments.begin(), pr.comments.end(), rng);
      auto again = sentiment::per_pr_sentiment(pr, c, c);
      EXPECT_EQ(again.sentiment->mean_profile, ref.sentiment->mean_profile);
      EXPECT_EQ(again.excluded, ref.excluded);
    }
  }
}

TEST(PerPr, MeansStayOnTheSimplex) {
  std::mt19937 rng(23);
  std::gamma_distribution<double> g(0.7);
  for (int trial = 0; trial < 100; ++trial) {
    std::vector<EmotionProfile> ps(static_cast<std::size_t>(1 + trial % 9));
    for (auto& p : ps) {
      double sum = 0;
      for (auto& s : p.scores) sum += (s = g(rng) + 1e-12);
      for (auto& s : p.scores) s /= sum;
    }
    auto m = sentiment::mean_profile(ps);
    double total = 0;
    for (double s : m.scores) {
      EXPECT_GE(s, 0.0);
      EXPECT_LE(s, 1.0);
      total += s;
    }
    EXPECT_NEAR(total, 1.0, 1e-4);
  }
}

TEST(PerPr, FilteringIgnoresClassifierOutput) {
  // The same comments classified by two different classifiers lose the same members.
  auto prs = fixtures::sentiment_prs();
  sentiment::WhitespaceTokenCounter counter;
  UniformClassifier u;
  auto c = recorded();
  for (const auto& pr : prs) {
    auto a = sentiment::per_pr_sentiment(pr, u, counter);
    auto b = sentiment::per_pr_sentiment(pr, c, counter);
    EXPECT_EQ(a.excluded, b.excluded);
    EXPECT_EQ(a.sentiment->n_comments_included, b.sentiment->n_comments_included);
  }
}

TEST(TopPr, SinglePrPerCohortWinsEverything) {
  sentiment::PrSentiment h{"h", uniform(), 1, {}}, a{"a", uniform(), 1, {}};
  auto t = sentiment::top_pr_per_emotion({h, a}, {{"h", Cohort::Human}, {"a", Cohort::Agent}});
  EXPECT_EQ(t.size(), 14u);
  for (std::size_t e = 0; e < sentiment::kEmotionCount; ++e) {
    EXPECT_EQ(t.at({Cohort::Human, e}), "h");
    EXPECT_EQ(t.at({Cohort::Agent, e}), "a");
  }
}

TEST(TopPr, HigherJoyWinsAndTiesGoToSmallestId) {
  EmotionProfile hi{}, lo{};
  hi[3] = 0.9, hi[6] = 0.1;
  lo[3] = 0.1, lo[6] = 0.9;
  std::vector<sentiment::PrSentiment> ss = {{"b", lo, 1, {}}, {"c", hi, 1, {}}, {"z", uniform(), 1, {}},
                                            {"y", uniform(), 1, {}}};
  std::map<std::string, Cohort> cohorts = {{"b", Cohort::Human}, {"c", Cohort::Human}, {"z", Cohort::Agent},
                                           {"y", Cohort::Agent}};
  auto t = sentiment::top_pr_per_emotion(ss, cohorts);
  EXPECT_EQ(t.at({Cohort::Human, 3}), "c");
  EXPECT_EQ(t.at({Cohort::Human, 6}), "b");
  EXPECT_EQ(t.at({Cohort::Agent, 0}), "y");
}

TEST(TopPr, FixtureMatchesExhaustiveScan) {
  auto c = recorded();
  std::vector<sentiment::PrSentiment> ss;
  std::map<std::string, Cohort> cohorts;
  for (const auto& pr : fixtures::sentiment_prs()) {
    ss.push_back(*sentiment::per_pr_sentiment(pr, c, c).sentiment);
    cohorts[pr.pr_id] = pr.cohort;
  }
  auto t = sentiment::top_pr_per_emotion(ss, cohorts);
  EXPECT_EQ(t, fixtures::scan_oracle(ss, cohorts));
  EXPECT_EQ(t.at({Cohort::Agent, 3}), "a2");  // joy
  EXPECT_EQ(t.at({Cohort::Agent, 1}), "a1");  // disgust
  EXPECT_EQ(t.at({Cohort::Human, 5}), "h1");  // surprise
  EXPECT_EQ(t.at({Cohort::Human, 6}), "h2");  // neutral
}

TEST(TopPr, Errors) {
  sentiment::PrSentiment h{"h", uniform(), 1, {}};
  EXPECT_EQ(kind_of([&] { sentiment::top_pr_per_emotion({h}, {{"h", Cohort::Human}}); }),
            SentimentError::Kind::EmptyCohort);
  EXPECT_EQ(kind_of([&] { sentiment::top_pr_per_emotion({h}, {}); }), SentimentError::Kind::UnknownPrId);
}

namespace {

// Replays the recorded fixture over the sidecar HTTP contract.
struct ClassifierStub {
  fixtures::StubServer stub;
  nlohmann::json doc = nlohmann::json::parse(fixtures::read_fixture("classifier/recorded.json"));
  std::atomic<int> classify_requests{0};
  std::atomic<int> count_requests{0};
  std::atomic<bool> malformed{false};

  ClassifierStub() {
    stub.server().Post("/classify", [this](const httplib::Request& req, httplib::Response& res) {
      ++classify_requests;
      auto texts = nlohmann::json::parse(req.body)["texts"];
      nlohmann::json profiles = nlohmann::json::array();
      for (auto& t : texts) {
        auto s = t.get<std::string>();
        if (std::count(s.begin(), s.end(), ' ') >= 512) {
          res.status = 422;
          return;
        }
        auto p = doc["profiles"][s];
        if (malformed) p["joy"] = 1.5;
        profiles.push_back(p);
      }
      res.set_content(nlohmann::json{{"profiles", profiles}}.dump(), "application/json");
    });
    stub.server().Post("/count_tokens", [this](const httplib::Request& req, httplib::Response& res) {
      ++count_requests;
      auto body = nlohmann::json::parse(req.body);
      nlohmann::json counts = nlohmann::json::array();
      for (auto& t : body["texts"]) {
        auto s = t.get<std::string>();
        counts.push_back(doc["token_counts"].contains(s) ? doc["token_counts"][s].get<long>()
                                                         : long(std::count(s.begin(), s.end(), ' ') + 1));
      }
      res.set_content(nlohmann::json{{"counts", counts}}.dump(), "application/json");
    });
    stub.start();
  }
};

}  // namespace

TEST(RemoteClassifier, ReplaysRecordedProfilesByteForByte) {
  ClassifierStub s;
  sentiment::RemoteClassifier c(s.stub.url(), fast());
  std::vector<std::string> texts;
  for (auto& [t, _] : s.doc["profiles"].items()) texts.push_back(t);
  auto out = sentiment::classify(texts, c);
  ASSERT_EQ(out.size(), texts.size());
  for (std::size_t i = 0; i < texts.size(); ++i)
    EXPECT_EQ(sentiment::profile_to_json(out[i]).dump(), s.doc["profiles"][texts[i]].dump());
}

TEST(RemoteClassifier, BatchesLargeInputsInOrder) {
  ClassifierStub s;
  sentiment::RemoteClassifier c(s.stub.url(), fast());
  std::vector<std::string> texts;
  for (int i = 0; i < 70; ++i) texts.push_back(i % 2 ? "Nice cleanup." : "This breaks the build again.");
  auto out = sentiment::classify(texts, c);
  ASSERT_EQ(out.size(), 70u);
  EXPECT_EQ(s.classify_requests, 3);
  for (std::size_t i = 0; i < out.size(); ++i)
    EXPECT_EQ(out[i], sentiment::profile_from_json(s.doc["profiles"][texts[i]]));
}

TEST(RemoteClassifier, MalformedReplyIsRejected) {
  ClassifierStub s;
  s.malformed = true;
  sentiment::RemoteClassifier c(s.stub.url(), fast());
  EXPECT_EQ(kind_of([&] { sentiment::classify({"Nice cleanup."}, c); }), SentimentError::Kind::MalformedScores);
}

TEST(RemoteClassifier, ClientErrorsAreNotRetried) {
  ClassifierStub s;
  sentiment::RemoteClassifier c(s.stub.url(), fast());
  EXPECT_EQ(kind_of([&] { c.classify({fixtures::long_comment(600)}); }), SentimentError::Kind::ClassifierUnavailable);
  EXPECT_EQ(s.classify_requests, 1);
}

TEST(RemoteClassifier, UnreachableIsUnavailable) {
  int port;
  {
    fixtures::StubServer dead;
    dead.start();
    port = dead.port();
  }
  sentiment::RemoteClassifier c("http://127.0.0.1:" + std::to_string(port), fast());
  EXPECT_EQ(kind_of([&] { c.classify({"x"}); }), SentimentError::Kind::ClassifierUnavailable);
}

TEST(RemoteTokenCounter, DrivesTheFilter) {
  ClassifierStub s;
  sentiment::RemoteTokenCounter counter(s.stub.url(), fast());
  sentiment::RemoteClassifier c(s.stub.url(), fast());
  EXPECT_FALSE(counter.approximate());
  auto expected = fixtures::sentiment_expected_means();
  for (const auto& pr : fixtures::sentiment_prs()) {
    auto out = sentiment::per_pr_sentiment(pr, c, counter);
    ASSERT_TRUE(out.sentiment.has_value());
    EXPECT_EQ(out.sentiment->mean_profile, expected.at(pr.pr_id)) << pr.pr_id;
  }
  EXPECT_EQ(s.count_requests, 5);
}

TEST(RecordedClassifier, UnknownTextAndBadDocuments) {
  auto c = recorded();
  EXPECT_EQ(kind_of([&] { c.classify({"never recorded"}); }), SentimentError::Kind::ClassifierUnavailable);
  EXPECT_EQ(kind_of([] { sentiment::RecordedClassifier::from_json("{"); }), SentimentError::Kind::ClassifierUnavailable);
  EXPECT_EQ(kind_of([] { sentiment::RecordedClassifier::from_json("{\"profiles\": {\"x\": {\"joy\": 1}}}"); }),
            SentimentError::Kind::MalformedScores);
  EXPECT_FALSE(c.approximate());
}
