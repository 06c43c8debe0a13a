#pragma once

#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "embedding/embedding.hpp"
#include "ingestion/records.hpp"
#include "source_parser/source_parser.hpp"

namespace redline::redundancy {

struct FunctionRef {
  std::string file_path;
  int start_line = 0;
  std::string qualified_name;

  bool operator==(const FunctionRef&) const = default;
};

FunctionRef ref_of(const source::FunctionUnit& fn);

struct RedundancyReport {
  std::string pr_id;
  std::optional<double> mrs;  // absent when either set is empty
  std::optional<std::pair<FunctionRef, FunctionRef>> argmax_pair;  // (new, base)
  std::size_t n_new = 0;
  std::size_t n_base = 0;
};

/// A function together with its embedding.
struct Embedded {
  FunctionRef ref;
  embedding::EmbeddingVector vector;
};

std::vector<Embedded> embed_functions(const std::vector<source::FunctionUnit>& fns, embedding::Provider& provider,
                                      bool strip_docstrings = false);

/// Max over new of max over base of cosine. Ties go to the pair smallest by
/// (new file, new start line, base file, base start line). Pairs touching a
/// zero vector are skipped.
RedundancyReport max_redundancy_score(const std::string& pr_id, const std::vector<Embedded>& f_new,
                                      const std::vector<Embedded>& f_base);

RedundancyReport max_redundancy_score(const std::string& pr_id, const std::vector<source::FunctionUnit>& f_new,
                                      const std::vector<source::FunctionUnit>& f_base,
                                      embedding::Provider& provider, bool strip_docstrings = false);

/// True for `test_*.py` and `*_test.py` file names.
bool is_test_path(const std::string& path);

struct CohortSummary {
  Cohort cohort = Cohort::Human;
  std::optional<double> amr;  // absent when no PR of the cohort was scored
  std::size_t n_prs_scored = 0;
  std::vector<double> mrs_values;

  bool empty() const { return n_prs_scored == 0; }
};

struct UnknownPrId : std::runtime_error {
  explicit UnknownPrId(const std::string& pr_id) : std::runtime_error("unknown pr_id: " + pr_id), pr_id(pr_id) {}
  std::string pr_id;
};

/// Per-cohort mean of present MRS values, in report order. Returns
/// (Human, Agent). Throws UnknownPrId.
std::pair<CohortSummary, CohortSummary> cohort_amr(const std::vector<RedundancyReport>& reports,
                                                   const std::map<std::string, Cohort>& cohorts);

}  // namespace redline::redundancy
