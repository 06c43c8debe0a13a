#include "sentiment/sentiment.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

namespace redline::sentiment {

namespace {

using Kind = SentimentError::Kind;

std::vector<std::vector<std::string>> batches(const std::vector<std::string>& texts, std::size_t size) {
  std::vector<std::vector<std::string>> out;
  for (std::size_t i = 0; i < texts.size(); i += size)
    out.emplace_back(texts.begin() + static_cast<std::ptrdiff_t>(i),
                     texts.begin() + static_cast<std::ptrdiff_t>(std::min(texts.size(), i + size)));
  return out;
}

std::unique_ptr<http::JsonEndpoint> make_endpoint(std::string url, http::RetryPolicy policy) {
  try {
    return std::make_unique<http::JsonEndpoint>(std::move(url), policy);
  } catch (const http::BadUrl& e) {
    throw SentimentError(Kind::ClassifierUnavailable, std::string("classifier: ") + e.what());
  }
}

bool blank(const std::string& s) {
  return std::all_of(s.begin(), s.end(), [](unsigned char c) { return std::isspace(c); });
}

}  // namespace

void validate_profile(const EmotionProfile& p) {
  double sum = 0;
  for (std::size_t i = 0; i < kEmotionCount; ++i) {
    if (!(p[i] >= 0.0 && p[i] <= 1.0))
      throw SentimentError(Kind::MalformedScores, std::string(kEmotions[i]) + " score out of [0, 1]");
    sum += p[i];
  }
  if (std::abs(sum - 1.0) > 1e-2)
    throw SentimentError(Kind::MalformedScores, "emotion scores sum to " + std::to_string(sum));
}

std::string_view to_string(ExclusionReason r) {
  switch (r) {
    case ExclusionReason::Bot: return "bot";
    case ExclusionReason::Empty: return "empty";
    default: return "over_token_limit";
  }
}

EmotionProfile profile_from_json(const nlohmann::json& j) {
  if (!j.is_object()) throw SentimentError(Kind::MalformedScores, "emotion profile is not an object");
  EmotionProfile p;
  for (std::size_t i = 0; i < kEmotionCount; ++i) {
    auto it = j.find(std::string(kEmotions[i]));
    if (it == j.end() || !it->is_number())
      throw SentimentError(Kind::MalformedScores, "emotion profile lacks " + std::string(kEmotions[i]));
    p[i] = it->get<double>();
  }
  return p;
}

nlohmann::json profile_to_json(const EmotionProfile& p) {
  nlohmann::json j = nlohmann::json::object();
  for (std::size_t i = 0; i < kEmotionCount; ++i) j[std::string(kEmotions[i])] = p[i];
  return j;
}

std::vector<long> WhitespaceTokenCounter::count(const std::vector<std::string>& texts) {
  std::vector<long> out;
  out.reserve(texts.size());
  for (const auto& t : texts) {
    std::istringstream in(t);
    std::string w;
    long n = 0;
    while (in >> w) ++n;
    out.push_back(n);
  }
  return out;
}

RemoteTokenCounter::RemoteTokenCounter(std::string url, http::RetryPolicy policy)
    : endpoint_(make_endpoint(std::move(url), policy)) {}

std::vector<long> RemoteTokenCounter::count(const std::vector<std::string>& texts) {
  std::vector<long> out;
  out.reserve(texts.size());
  for (const auto& batch : batches(texts, RemoteClassifier::kBatchSize)) {
    auto check = [&](const nlohmann::json& r) {
      if (!r.is_object() || !r.contains("counts") || !r["counts"].is_array() || r["counts"].size() != batch.size())
        throw http::HttpError("count_tokens reply lacks a matching counts array", true);
      for (const auto& c : r["counts"])
        if (!c.is_number_integer()) throw http::HttpError("count_tokens reply holds a non-integer", true);
    };
    try {
      auto reply = endpoint_->post_with_retries("/count_tokens", {{"texts", batch}}, check);
      for (const auto& c : reply["counts"]) out.push_back(c.get<long>());
    } catch (const http::HttpError& e) {
      throw SentimentError(Kind::ClassifierUnavailable, std::string("token counter unavailable: ") + e.what());
    }
  }
  return out;
}

RemoteClassifier::RemoteClassifier(std::string url, http::RetryPolicy policy)
    : endpoint_(make_endpoint(std::move(url), policy)) {}

std::vector<EmotionProfile> RemoteClassifier::classify(const std::vector<std::string>& texts) {
  std::vector<EmotionProfile> out;
  out.reserve(texts.size());
  for (const auto& batch : batches(texts, kBatchSize)) {
    auto check = [&](const nlohmann::json& r) {
      if (!r.is_object() || !r.contains("profiles") || !r["profiles"].is_array() ||
          r["profiles"].size() != batch.size())
        throw http::HttpError("classify reply lacks a matching profiles array", true);
    };
    nlohmann::json reply;
    try {
      reply = endpoint_->post_with_retries("/classify", {{"texts", batch}}, check);
    } catch (const http::HttpError& e) {
      throw SentimentError(Kind::ClassifierUnavailable, std::string("classifier unavailable: ") + e.what());
    }
    for (const auto& p : reply["profiles"]) out.push_back(profile_from_json(p));
  }
  return out;
}

RecordedClassifier RecordedClassifier::from_json(const std::string& json_text) {
  nlohmann::json doc;
  try {
    doc = nlohmann::json::parse(json_text);
  } catch (const nlohmann::json::exception& e) {
    throw SentimentError(Kind::ClassifierUnavailable, std::string("classifier fixture is not JSON: ") + e.what());
  }
  if (!doc.is_object() || !doc.contains("profiles") || !doc["profiles"].is_object())
    throw SentimentError(Kind::ClassifierUnavailable, "classifier fixture lacks a profiles object");
  RecordedClassifier c;
  for (auto& [text, profile] : doc["profiles"].items()) c.profiles_[text] = profile_from_json(profile);
  if (doc.contains("token_counts")) {
    for (auto& [text, n] : doc["token_counts"].items()) {
      if (!n.is_number_integer())
        throw SentimentError(Kind::ClassifierUnavailable, "classifier fixture token count is not an integer");
      c.counts_[text] = n.get<long>();
    }
  }
  c.complete_counts_ = std::all_of(c.profiles_.begin(), c.profiles_.end(),
                                   [&](const auto& kv) { return c.counts_.count(kv.first) > 0; });
  return c;
}

std::vector<EmotionProfile> RecordedClassifier::classify(const std::vector<std::string>& texts) {
  std::vector<EmotionProfile> out;
  out.reserve(texts.size());
  for (const auto& t : texts) {
    auto it = profiles_.find(t);
    if (it == profiles_.end())
      throw SentimentError(Kind::ClassifierUnavailable,
                           "no recorded classifier response for text: " + t.substr(0, 60));
    out.push_back(it->second);
  }
  return out;
}

std::vector<long> RecordedClassifier::count(const std::vector<std::string>& texts) {
  auto fallback = WhitespaceTokenCounter().count(texts);
  for (std::size_t i = 0; i < texts.size(); ++i) {
    auto it = counts_.find(texts[i]);
    if (it != counts_.end()) fallback[i] = it->second;
  }
  return fallback;
}

bool is_bot(const ReviewComment& c) {
  static const std::string suffix = "[bot]";
  const auto& login = c.author_login;
  return c.author_is_bot ||
         (login.size() >= suffix.size() && login.compare(login.size() - suffix.size(), suffix.size(), suffix) == 0);
}

FilterResult filter_comments(const std::vector<ReviewComment>& comments, TokenCounter& counter, long max_tokens) {
  FilterResult result;
  std::vector<std::string> texts;
  // Decisions are recorded per comment first, so output order follows input.
  std::vector<std::optional<ExclusionReason>> reason(comments.size());
  std::vector<std::size_t> pending_index;
  for (std::size_t i = 0; i < comments.size(); ++i) {
    if (is_bot(comments[i])) {
      reason[i] = ExclusionReason::Bot;
    } else if (blank(comments[i].body)) {
      reason[i] = ExclusionReason::Empty;
    } else {
      pending_index.push_back(i);
      texts.push_back(comments[i].body);
    }
  }
  if (!texts.empty()) {
    auto counts = counter.count(texts);
    for (std::size_t k = 0; k < pending_index.size(); ++k)
      if (counts[k] > max_tokens) reason[pending_index[k]] = ExclusionReason::OverTokenLimit;
  }
  for (std::size_t i = 0; i < comments.size(); ++i) {
    if (!reason[i]) {
      result.included.push_back(comments[i]);
      continue;
    }
    result.excluded.emplace_back(comments[i], *reason[i]);
    switch (*reason[i]) {
      case ExclusionReason::Bot: ++result.counts.bot; break;
      case ExclusionReason::Empty: ++result.counts.empty; break;
      case ExclusionReason::OverTokenLimit: ++result.counts.over_token_limit; break;
    }
  }
  return result;
}

std::vector<EmotionProfile> classify(const std::vector<std::string>& texts, Classifier& classifier) {
  if (texts.empty()) return {};
  auto out = classifier.classify(texts);
  if (out.size() != texts.size())
    throw SentimentError(Kind::ClassifierUnavailable, "classifier returned a different number of profiles");
  for (const auto& p : out) validate_profile(p);
  return out;
}

EmotionProfile mean_profile(const std::vector<EmotionProfile>& profiles) {
  if (profiles.empty()) throw std::invalid_argument("mean of no profiles");
  // Summing in a canonical order makes the result exactly order-independent.
  std::vector<EmotionProfile> sorted = profiles;
  std::sort(sorted.begin(), sorted.end(), [](const EmotionProfile& a, const EmotionProfile& b) { return a.scores < b.scores; });
  EmotionProfile mean;
  for (std::size_t i = 0; i < kEmotionCount; ++i) {
    double sum = 0;
    for (const auto& p : sorted) sum += p[i];
    mean[i] = sum / double(sorted.size());
  }
  return mean;
}

PrSentimentOutcome per_pr_sentiment(const PullRequestRecord& pr, Classifier& classifier, TokenCounter& counter) {
  auto filtered = filter_comments(pr.comments, counter);
  PrSentimentOutcome outcome;
  outcome.excluded = filtered.counts;
  if (filtered.included.empty()) return outcome;
  std::vector<std::string> texts;
  for (const auto& c : filtered.included) texts.push_back(c.body);
  PrSentiment s;
  s.pr_id = pr.pr_id;
  s.mean_profile = mean_profile(classify(texts, classifier));
  s.n_comments_included = texts.size();
  s.excluded = filtered.counts;
  outcome.sentiment = std::move(s);
  return outcome;
}

TopTable top_pr_per_emotion(const std::vector<PrSentiment>& sentiments, const std::map<std::string, Cohort>& cohorts) {
  TopTable table;
  std::map<std::pair<Cohort, std::size_t>, double> best;
  bool seen[2] = {false, false};
  for (const auto& s : sentiments) {
    auto it = cohorts.find(s.pr_id);
    if (it == cohorts.end()) throw SentimentError(Kind::UnknownPrId, "unknown pr_id: " + s.pr_id);
    seen[it->second == Cohort::Agent] = true;
    for (std::size_t e = 0; e < kEmotionCount; ++e) {
      auto key = std::make_pair(it->second, e);
      double v = s.mean_profile[e];
      auto cur = table.find(key);
      if (cur == table.end() || v > best[key] || (v == best[key] && s.pr_id < cur->second)) {
        table[key] = s.pr_id;
        best[key] = v;
      }
    }
  }
  if (!seen[0]) throw SentimentError(Kind::EmptyCohort, "no Human PR has a sentiment profile");
  if (!seen[1]) throw SentimentError(Kind::EmptyCohort, "no Agent PR has a sentiment profile");
  return table;
}

}  // namespace redline::sentiment
