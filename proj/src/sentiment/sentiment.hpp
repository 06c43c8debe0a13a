#pragma once

#include <array>
#include <map>
#include <memory>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "common/http_json.hpp"
#include "ingestion/records.hpp"

namespace redline::sentiment {

inline constexpr std::size_t kEmotionCount = 7;
inline constexpr std::array<std::string_view, kEmotionCount> kEmotions = {"anger",   "disgust",  "fear",   "joy",
                                                                         "sadness", "surprise", "neutral"};
inline constexpr long kMaxTokens = 512;

struct EmotionProfile {
  std::array<double, kEmotionCount> scores{};

  double& operator[](std::size_t i) { return scores[i]; }
  double operator[](std::size_t i) const { return scores[i]; }
  bool operator==(const EmotionProfile&) const = default;
};

class SentimentError : public std::runtime_error {
 public:
  enum class Kind { ClassifierUnavailable, MalformedScores, EmptyCohort, UnknownPrId };
  SentimentError(Kind kind, const std::string& message) : std::runtime_error(message), kind_(kind) {}
  Kind kind() const { return kind_; }

 private:
  Kind kind_;
};

/// Throws MalformedScores unless every score is in [0, 1] and they sum to
/// 1 within 1e-2.
void validate_profile(const EmotionProfile& p);

enum class ExclusionReason { Bot, Empty, OverTokenLimit };
std::string_view to_string(ExclusionReason r);

struct ExclusionCounts {
  std::size_t bot = 0;
  std::size_t empty = 0;
  std::size_t over_token_limit = 0;

  std::size_t total() const { return bot + empty + over_token_limit; }
  bool operator==(const ExclusionCounts&) const = default;
};

class TokenCounter {
 public:
  virtual ~TokenCounter() = default;
  virtual std::vector<long> count(const std::vector<std::string>& texts) = 0;
  /// True when counts only approximate the classifier's tokenizer.
  virtual bool approximate() const = 0;
};

/// Whitespace-separated word count.
class WhitespaceTokenCounter : public TokenCounter {
 public:
  std::vector<long> count(const std::vector<std::string>& texts) override;
  bool approximate() const override { return true; }
};

/// POST <url>/count_tokens {"texts": [...]} -> {"counts": [...]}.
class RemoteTokenCounter : public TokenCounter {
 public:
  explicit RemoteTokenCounter(std::string url, http::RetryPolicy policy = {});
  std::vector<long> count(const std::vector<std::string>& texts) override;
  bool approximate() const override { return false; }

 private:
  std::unique_ptr<http::JsonEndpoint> endpoint_;
};

class Classifier {
 public:
  virtual ~Classifier() = default;
  /// Order-preserving. Safe for concurrent calls.
  virtual std::vector<EmotionProfile> classify(const std::vector<std::string>& texts) = 0;
};

/// POST <url>/classify {"texts": [...]} -> {"profiles": [{emotion: score}, ...]}.
class RemoteClassifier : public Classifier {
 public:
  static constexpr std::size_t kBatchSize = 32;
  explicit RemoteClassifier(std::string url, http::RetryPolicy policy = {});
  std::vector<EmotionProfile> classify(const std::vector<std::string>& texts) override;

 private:
  std::unique_ptr<http::JsonEndpoint> endpoint_;
};

/// Replays recorded classifier responses from a JSON document of the form
/// {"profiles": {text: {emotion: score}}, "token_counts": {text: n}}.
/// Also serves as a token counter, falling back to whitespace counts for
/// texts without a recorded count.
class RecordedClassifier : public Classifier, public TokenCounter {
 public:
  static RecordedClassifier from_json(const std::string& json_text);

  std::vector<EmotionProfile> classify(const std::vector<std::string>& texts) override;
  std::vector<long> count(const std::vector<std::string>& texts) override;
  bool approximate() const override { return !complete_counts_; }

 private:
  std::map<std::string, EmotionProfile> profiles_;
  std::map<std::string, long> counts_;
  bool complete_counts_ = false;
};

EmotionProfile profile_from_json(const nlohmann::json& j);
nlohmann::json profile_to_json(const EmotionProfile& p);

bool is_bot(const ReviewComment& c);

struct FilterResult {
  std::vector<ReviewComment> included;
  std::vector<std::pair<ReviewComment, ExclusionReason>> excluded;
  ExclusionCounts counts;
};

/// Drops bot comments, then empty ones, then those over `max_tokens`.
/// Token counts are only requested for comments that survive the first two.
FilterResult filter_comments(const std::vector<ReviewComment>& comments, TokenCounter& counter,
                             long max_tokens = kMaxTokens);

/// Order-preserving classification with profile validation.
std::vector<EmotionProfile> classify(const std::vector<std::string>& texts, Classifier& classifier);

/// Componentwise mean; independent of input order. Requires non-empty input.
EmotionProfile mean_profile(const std::vector<EmotionProfile>& profiles);

struct PrSentiment {
  std::string pr_id;
  EmotionProfile mean_profile;
  std::size_t n_comments_included = 0;
  ExclusionCounts excluded;
};

struct PrSentimentOutcome {
  std::optional<PrSentiment> sentiment;  // absent when no comment survives filtering
  ExclusionCounts excluded;
};

PrSentimentOutcome per_pr_sentiment(const PullRequestRecord& pr, Classifier& classifier, TokenCounter& counter);

using TopTable = std::map<std::pair<Cohort, std::size_t>, std::string>;  // (cohort, emotion index) -> pr_id

/// Highest-scoring PR per cohort and emotion, ties to the smallest pr_id.
/// Throws EmptyCohort or UnknownPrId.
TopTable top_pr_per_emotion(const std::vector<PrSentiment>& sentiments, const std::map<std::string, Cohort>& cohorts);

}  // namespace redline::sentiment
