#pragma once

#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "complexity/complexity.hpp"
#include "embedding/cache.hpp"
#include "embedding/embedding.hpp"
#include "ingestion/records.hpp"
#include "json.hpp"
#include "pipeline/config.hpp"
#include "redundancy/redundancy_engine.hpp"
#include "refactoring/refactoring_filter.hpp"
#include "sentiment/sentiment.hpp"

namespace redline::pipeline {

struct FileReport {
  std::string path;
  std::optional<source::LineCategoryCounts> pre;   // absent: file added
  std::optional<source::LineCategoryCounts> post;  // absent: file deleted
  std::optional<complexity::ComplexityDelta> complexity;  // absent: a side does not parse

  /// post - pre per category, absent sides counting as zero.
  source::LineCategoryCounts line_delta() const;
};

struct RefactoringReport {
  refactoring::Kind kind;
  redundancy::FunctionRef old_fn;
  redundancy::FunctionRef new_fn;
  double similarity = 0;
};

struct PrAnalysis {
  std::string pr_id;
  Cohort cohort = Cohort::Human;
  std::string provider_id;
  redundancy::RedundancyReport redundancy;
  std::vector<redundancy::FunctionRef> new_functions;
  std::vector<RefactoringReport> refactorings;
  std::vector<FileReport> files;
  bool sentiment_computed = false;
  sentiment::PrSentimentOutcome sentiment;
  std::vector<std::string> warnings;

  source::LineCategoryCounts line_delta() const;
  long cc_delta() const;
};

/// Embedding provider and optional classifier shared by every PR of a run.
class Engines {
 public:
  /// Throws RunError.
  explicit Engines(const RunConfig& config, bool want_sentiment);

  embedding::Provider& provider() { return *provider_; }
  sentiment::Classifier* classifier() { return classifier_; }
  sentiment::TokenCounter* token_counter() { return counter_; }
  std::string classifier_mode() const;

 private:
  std::unique_ptr<embedding::Provider> base_provider_;
  std::unique_ptr<embedding::EmbeddingCache> cache_;
  std::unique_ptr<embedding::Provider> provider_;
  std::unique_ptr<sentiment::RemoteClassifier> remote_classifier_;
  std::unique_ptr<sentiment::RemoteTokenCounter> remote_counter_;
  std::unique_ptr<sentiment::RecordedClassifier> recorded_;
  std::unique_ptr<sentiment::WhitespaceTokenCounter> whitespace_;
  sentiment::Classifier* classifier_ = nullptr;
  sentiment::TokenCounter* counter_ = nullptr;
};

/// Full per-PR analysis. Throws RunError (Git, Provider, Classifier).
PrAnalysis analyze(const PullRequestRecord& pr, const RunConfig& config, Engines& engines);

nlohmann::json to_json(const PrAnalysis& a);

/// File name for a PR's report: unsafe characters become _XX hex escapes.
std::string report_file_name(const std::string& pr_id);

}  // namespace redline::pipeline
