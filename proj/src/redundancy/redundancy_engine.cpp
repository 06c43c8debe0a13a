#include "redundancy/redundancy_engine.hpp"

#include <algorithm>
#include <numeric>
#include <tuple>

namespace redline::redundancy {

namespace {

bool ref_less(const FunctionRef& a, const FunctionRef& b) {
  return std::tie(a.file_path, a.start_line, a.qualified_name) < std::tie(b.file_path, b.start_line, b.qualified_name);
}

std::vector<const Embedded*> sorted_nonzero(const std::vector<Embedded>& xs) {
  std::vector<const Embedded*> out;
  for (const auto& x : xs)
    if (!embedding::is_zero(x.vector)) out.push_back(&x);
  std::stable_sort(out.begin(), out.end(), [](const Embedded* a, const Embedded* b) { return ref_less(a->ref, b->ref); });
  return out;
}

}  // namespace

FunctionRef ref_of(const source::FunctionUnit& fn) { return {fn.file_path, fn.span.start_line, fn.qualified_name}; }

std::vector<Embedded> embed_functions(const std::vector<source::FunctionUnit>& fns, embedding::Provider& provider,
                                      bool strip_docstrings) {
  std::vector<std::string> texts;
  texts.reserve(fns.size());
  for (const auto& fn : fns) texts.push_back(embedding::provider_input(fn, provider.input_kind(), strip_docstrings));
  auto vectors = texts.empty() ? std::vector<embedding::EmbeddingVector>{} : provider.embed_batch(texts);
  std::vector<Embedded> out;
  out.reserve(fns.size());
  for (std::size_t i = 0; i < fns.size(); ++i) out.push_back({ref_of(fns[i]), std::move(vectors[i])});
  return out;
}

RedundancyReport max_redundancy_score(const std::string& pr_id, const std::vector<Embedded>& f_new,
                                      const std::vector<Embedded>& f_base) {
  RedundancyReport report;
  report.pr_id = pr_id;
  report.n_new = f_new.size();
  report.n_base = f_base.size();
  auto news = sorted_nonzero(f_new);
  auto bases = sorted_nonzero(f_base);
  for (const Embedded* n : news) {
    for (const Embedded* b : bases) {
      double c = embedding::cosine(n->vector, b->vector);
      if (!report.mrs || c > *report.mrs) {
        report.mrs = c;
        report.argmax_pair = std::make_pair(n->ref, b->ref);
      }
    }
  }
  return report;
}

RedundancyReport max_redundancy_score(const std::string& pr_id, const std::vector<source::FunctionUnit>& f_new,
                                      const std::vector<source::FunctionUnit>& f_base,
                                      embedding::Provider& provider, bool strip_docstrings) {
  if (f_new.empty() || f_base.empty()) {
    RedundancyReport report;
    report.pr_id = pr_id;
    report.n_new = f_new.size();
    report.n_base = f_base.size();
    return report;
  }
  return max_redundancy_score(pr_id, embed_functions(f_new, provider, strip_docstrings),
                              embed_functions(f_base, provider, strip_docstrings));
}

bool is_test_path(const std::string& path) {
  auto slash = path.find_last_of('/');
  std::string name = slash == std::string::npos ? path : path.substr(slash + 1);
  auto dot = name.rfind('.');
  std::string stem = dot == std::string::npos ? name : name.substr(0, dot);
  return stem.rfind("test_", 0) == 0 || (stem.size() >= 5 && stem.compare(stem.size() - 5, 5, "_test") == 0);
}

std::pair<CohortSummary, CohortSummary> cohort_amr(const std::vector<RedundancyReport>& reports,
                                                   const std::map<std::string, Cohort>& cohorts) {
  CohortSummary human, agent;
  human.cohort = Cohort::Human;
  agent.cohort = Cohort::Agent;
  for (const auto& r : reports) {
    auto it = cohorts.find(r.pr_id);
    if (it == cohorts.end()) throw UnknownPrId(r.pr_id);
    if (!r.mrs) continue;
    (it->second == Cohort::Human ? human : agent).mrs_values.push_back(*r.mrs);
  }
  for (CohortSummary* s : {&human, &agent}) {
    s->n_prs_scored = s->mrs_values.size();
    if (!s->mrs_values.empty())
      s->amr = std::accumulate(s->mrs_values.begin(), s->mrs_values.end(), 0.0) / double(s->mrs_values.size());
  }
  return {human, agent};
}

}  // namespace redline::redundancy
