#include "pipeline/commands.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdio>
#include <exception>
#include <fstream>
#include <map>
#include <sstream>
#include <thread>

#include "ingestion/manifest.hpp"
#include "statistics/mann_whitney.hpp"

namespace redline::pipeline {

namespace {

using nlohmann::json;

ingestion::Manifest load(const RunConfig& config, std::vector<std::string>& warnings) {
  ingestion::Manifest m;
  try {
    m = ingestion::load_manifest(config.manifest_path);
  } catch (const ingestion::UnreadableFile& e) {
    throw RunError(Status::Io, e.what());
  }
  for (const auto& issue : m.issues)
    warnings.push_back("manifest line " + std::to_string(issue.line) + ": " + std::string(to_string(issue.kind)) +
                       (issue.field.empty() ? "" : " (" + issue.field + ")") + ": " + issue.message);
  return m;
}

void write_file(const std::filesystem::path& path, const std::string& content, CommandResult& result) {
  std::error_code ec;
  std::filesystem::create_directories(path.parent_path(), ec);
  // Write to a sibling and rename so readers never see a partial file.
  auto tmp = path;
  tmp += ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw RunError(Status::Io, "cannot write " + path.string());
    out << content;
    if (!out.flush()) throw RunError(Status::Io, "cannot write " + path.string());
  }
  std::filesystem::rename(tmp, path, ec);
  if (ec) throw RunError(Status::Io, "cannot write " + path.string() + ": " + ec.message());
  result.written.push_back(path);
}

std::string dump(const json& j) { return j.dump(2) + "\n"; }

json issues_json(const ingestion::Manifest& m) {
  json arr = json::array();
  for (const auto& i : m.issues)
    arr.push_back({{"line", i.line}, {"kind", std::string(to_string(i.kind))}, {"field", i.field}, {"message", i.message}});
  return arr;
}

std::optional<double> mean(const std::vector<double>& xs) {
  if (xs.empty()) return std::nullopt;
  double s = 0;
  for (double x : xs) s += x;
  return s / double(xs.size());
}

std::string opt_fixed(const std::optional<double>& v) { return v ? format_fixed(*v) : ""; }

struct Samples {
  std::vector<double> human, agent;
  std::vector<double>& of(Cohort c) { return c == Cohort::Human ? human : agent; }
};

struct TableRow {
  std::string metric;
  std::optional<double> human_mean, agent_mean, delta;
  std::optional<stats::MannWhitneyResult> test;
  std::string stars;
  std::size_t n_human = 0, n_agent = 0;
};

std::string render_table(const std::vector<TableRow>& rows) {
  std::vector<std::array<std::string, 6>> cells = {{"metric", "human_mean", "agent_mean", "delta", "p_value", "stars"}};
  for (const auto& r : rows)
    cells.push_back({r.metric, opt_fixed(r.human_mean), opt_fixed(r.agent_mean), opt_fixed(r.delta),
                     r.test ? format_general(r.test->p_value) : "-", r.stars});
  std::array<std::size_t, 6> width{};
  for (const auto& row : cells)
    for (std::size_t i = 0; i < 6; ++i) width[i] = std::max(width[i], row[i].size());
  std::string out;
  for (std::size_t r = 0; r < cells.size(); ++r) {
    std::string line;
    for (std::size_t i = 0; i < 6; ++i) {
      std::string cell = cells[r][i].empty() ? "-" : cells[r][i];
      if (i == 0) line += cell + std::string(width[i] - std::min(width[i], cell.size()), ' ');
      else line += "  " + std::string(width[i] - std::min(width[i], cell.size()), ' ') + cell;
    }
    while (!line.empty() && line.back() == ' ') line.pop_back();
    out += line + "\n";
    if (r == 0) out += std::string(line.size(), '-') + "\n";
  }
  return out;
}

// Runs analyses on a bounded pool; results keep manifest order.
std::vector<std::optional<PrAnalysis>> analyze_all(const std::vector<PullRequestRecord>& prs, const RunConfig& config,
                                                   Engines& engines, std::vector<std::string>& errors) {
  std::vector<std::optional<PrAnalysis>> results(prs.size());
  std::vector<std::exception_ptr> failures(prs.size());
  std::atomic<std::size_t> next{0};
  std::atomic<bool> fatal{false};
  auto work = [&] {
    for (std::size_t i; (i = next++) < prs.size();) {
      if (fatal) return;
      try {
        results[i] = analyze(prs[i], config, engines);
      } catch (const RunError& e) {
        failures[i] = std::current_exception();
        if (e.status != Status::Git) fatal = true;
      } catch (...) {
        failures[i] = std::current_exception();
        fatal = true;
      }
    }
  };
  unsigned n = std::max(1u, std::min<unsigned>(config.parallelism, unsigned(prs.size())));
  std::vector<std::thread> pool;
  for (unsigned t = 1; t < n; ++t) pool.emplace_back(work);
  work();
  for (auto& t : pool) t.join();

  errors.assign(prs.size(), "");
  for (std::size_t i = 0; i < prs.size(); ++i) {
    if (!failures[i]) continue;
    try {
      std::rethrow_exception(failures[i]);
    } catch (const RunError& e) {
      if (e.status != Status::Git) throw;
      errors[i] = e.what();
    } catch (const std::exception& e) {
      throw RunError(Status::Internal, prs[i].pr_id + ": " + e.what());
    }
  }
  return results;
}

struct MetricSpec {
  std::string name;  // also the file suffix
  enum class Kind { Mrs, CcDelta, Emotion } kind;
  std::size_t emotion = 0;
  double width = 0.05;
};

MetricSpec parse_metric(const std::string& metric) {
  if (metric == "mrs") return {"mrs", MetricSpec::Kind::Mrs, 0, 0.05};
  if (metric == "cc_delta") return {"cc_delta", MetricSpec::Kind::CcDelta, 0, 1.0};
  for (const std::string prefix : {"emotion:", "emotion_"}) {
    if (metric.rfind(prefix, 0) != 0) continue;
    std::string name = metric.substr(prefix.size());
    for (std::size_t e = 0; e < sentiment::kEmotionCount; ++e)
      if (name == sentiment::kEmotions[e]) return {"emotion_" + name, MetricSpec::Kind::Emotion, e, 0.05};
  }
  throw RunError(Status::InvalidArgument,
                 "unknown metric '" + metric + "' (expected mrs, cc_delta or emotion:<anger|disgust|fear|joy|sadness|surprise|neutral>)");
}

json read_json(const std::filesystem::path& p) {
  std::ifstream in(p, std::ios::binary);
  if (!in) throw RunError(Status::Io, "cannot read " + p.string());
  try {
    return json::parse(in);
  } catch (const json::exception& e) {
    throw RunError(Status::Io, p.string() + " is not valid JSON: " + e.what());
  }
}

}  // namespace

std::string format_fixed(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.6f", v);
  std::string s = buf;
  if (s == "-0.000000") s = "0.000000";
  return s;
}

std::string format_general(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.6g", v);
  return buf;
}

std::vector<Bin> histogram(const std::vector<double>& values, double width) {
  std::map<long, std::size_t> counts;
  for (double v : values) ++counts[static_cast<long>(std::floor(v / width + 1e-9))];
  std::vector<Bin> out;
  for (const auto& [k, n] : counts) out.push_back({k, n});
  return out;
}

CommandResult analyze_pr(const RunConfig& config, const std::string& pr_id) {
  CommandResult result;
  config.validate();
  auto manifest = load(config, result.warnings);
  auto it = std::find_if(manifest.records.begin(), manifest.records.end(),
                         [&](const PullRequestRecord& r) { return r.pr_id == pr_id; });
  if (it == manifest.records.end()) throw RunError(Status::UnknownPr, "unknown pr_id: " + pr_id);
  Engines engines(config, config.has_classifier());
  auto analysis = analyze(*it, config, engines);
  result.warnings.insert(result.warnings.end(), analysis.warnings.begin(), analysis.warnings.end());
  write_file(config.output_dir / report_file_name(pr_id), dump(to_json(analysis)), result);

  std::ostringstream s;
  const auto& r = analysis.redundancy;
  auto d = analysis.line_delta();
  s << "pr " << pr_id << " (" << to_string(analysis.cohort) << ")\n"
    << "  mrs             " << (r.mrs ? format_fixed(*r.mrs) : "absent") << "\n"
    << "  new functions   " << r.n_new << " (after " << analysis.refactorings.size() << " move/rename exclusions)\n"
    << "  base functions  " << r.n_base << "\n";
  if (r.argmax_pair)
    s << "  closest pair    " << r.argmax_pair->first.file_path << ":" << r.argmax_pair->first.qualified_name << " ~ "
      << r.argmax_pair->second.file_path << ":" << r.argmax_pair->second.qualified_name << "\n";
  s << "  files changed   " << analysis.files.size() << "\n"
    << "  cc delta        " << analysis.cc_delta() << "\n"
    << "  loc delta       " << d.loc << "\n"
    << "  multiline delta " << d.multiline_string_lines << "\n"
    << "  blank delta     " << d.blank_lines << "\n";
  if (analysis.sentiment_computed) {
    if (analysis.sentiment.sentiment) {
      s << "  sentiment       " << analysis.sentiment.sentiment->n_comments_included << " comments:";
      for (std::size_t e = 0; e < sentiment::kEmotionCount; ++e)
        s << " " << sentiment::kEmotions[e] << "=" << format_fixed(analysis.sentiment.sentiment->mean_profile[e]);
      s << "\n";
    } else {
      s << "  sentiment       no includable comments\n";
    }
  }
  result.summary = s.str();
  return result;
}

CommandResult compare_cohorts(const RunConfig& config) {
  CommandResult result;
  config.validate();
  auto manifest = load(config, result.warnings);
  std::map<std::string, Cohort> cohorts;
  std::size_t n_human = 0, n_agent = 0;
  for (const auto& r : manifest.records) {
    cohorts[r.pr_id] = r.cohort;
    (r.cohort == Cohort::Human ? n_human : n_agent)++;
  }
  if (n_human == 0 || n_agent == 0)
    throw RunError(Status::EmptyCohort, std::string("the manifest has no ") + (n_human == 0 ? "Human" : "Agent") + " PRs");

  Engines engines(config, config.has_classifier());
  std::vector<std::string> errors;
  auto analyses = analyze_all(manifest.records, config, engines, errors);

  json prs = json::array();
  std::vector<redundancy::RedundancyReport> reports;
  Samples mrs, cc, emotions[sentiment::kEmotionCount];
  Samples loc_add, loc_rem, multi_add, multi_rem, blank_add, blank_rem;
  std::map<std::pair<Cohort, complexity::Risk>, std::size_t> risk_counts;
  std::vector<sentiment::PrSentiment> sentiments;
  std::map<Cohort, std::size_t> without_comments;
  sentiment::ExclusionCounts excluded_total;
  for (std::size_t i = 0; i < manifest.records.size(); ++i) {
    const auto& rec = manifest.records[i];
    json entry = {{"pr_id", rec.pr_id}, {"cohort", std::string(to_string(rec.cohort))}};
    if (!analyses[i]) {
      entry["status"] = "failed";
      entry["error"] = errors[i];
      result.warnings.push_back("skipping " + errors[i]);
      prs.push_back(entry);
      continue;
    }
    const auto& a = *analyses[i];
    for (const auto& w : a.warnings) result.warnings.push_back(a.pr_id + ": " + w);
    const std::string file = report_file_name(a.pr_id);
    write_file(config.output_dir / file, dump(to_json(a)), result);
    entry["status"] = "ok";
    entry["report"] = file;
    prs.push_back(entry);

    reports.push_back(a.redundancy);
    if (a.redundancy.mrs) mrs.of(a.cohort).push_back(*a.redundancy.mrs);
    for (const auto& f : a.files) {
      auto d = f.line_delta();
      auto split = [&](long v, Samples& add, Samples& rem) {
        if (v > 0) add.of(a.cohort).push_back(double(v));
        if (v < 0) rem.of(a.cohort).push_back(double(-v));
      };
      split(d.loc, loc_add, loc_rem);
      split(d.multiline_string_lines, multi_add, multi_rem);
      split(d.blank_lines, blank_add, blank_rem);
      if (f.complexity) {
        cc.of(a.cohort).push_back(double(f.complexity->delta));
        ++risk_counts[{a.cohort, f.complexity->risk}];
      }
    }
    if (a.sentiment_computed) {
      const auto& ex = a.sentiment.excluded;
      excluded_total.bot += ex.bot;
      excluded_total.empty += ex.empty;
      excluded_total.over_token_limit += ex.over_token_limit;
      if (a.sentiment.sentiment) {
        sentiments.push_back(*a.sentiment.sentiment);
        for (std::size_t e = 0; e < sentiment::kEmotionCount; ++e)
          emotions[e].of(a.cohort).push_back(a.sentiment.sentiment->mean_profile[e]);
      } else {
        ++without_comments[a.cohort];
      }
    }
  }

  std::vector<std::pair<std::string, Samples*>> metrics = {
      {"mrs", &mrs},           {"loc_added", &loc_add},     {"loc_removed", &loc_rem},
      {"multiline_string_added", &multi_add}, {"multiline_string_removed", &multi_rem},
      {"blank_added", &blank_add}, {"blank_removed", &blank_rem}, {"cc_delta", &cc}};
  if (config.has_classifier())
    for (std::size_t e = 0; e < sentiment::kEmotionCount; ++e)
      metrics.emplace_back("emotion_" + std::string(sentiment::kEmotions[e]), &emotions[e]);

  std::vector<TableRow> rows;
  std::string csv = "metric,human_mean,agent_mean,delta,p_value,stars\n";
  json sizes = json::object();
  for (auto& [name, samples] : metrics) {
    TableRow row;
    row.metric = name;
    row.human_mean = mean(samples->human);
    row.agent_mean = mean(samples->agent);
    if (row.human_mean && row.agent_mean) row.delta = *row.human_mean - *row.agent_mean;
    row.n_human = samples->human.size();
    row.n_agent = samples->agent.size();
    if (row.n_human >= 2 && row.n_agent >= 2) {
      row.test = stats::mann_whitney_u(samples->human, samples->agent);
      row.stars = std::string(stats::stars(row.test->significance));
    }
    csv += row.metric + "," + opt_fixed(row.human_mean) + "," + opt_fixed(row.agent_mean) + "," + opt_fixed(row.delta) +
           "," + (row.test ? format_general(row.test->p_value) : "") + "," + row.stars + "\n";
    sizes[name] = {{"human", row.n_human}, {"agent", row.n_agent}};
    if (row.test) sizes[name]["u_statistic"] = row.test->u_statistic;
    rows.push_back(std::move(row));
  }
  write_file(config.output_dir / "cohort_table.csv", csv, result);

  using complexity::Risk;
  const Risk risks[] = {Risk::NoRisk, Risk::LowRiskAddition, Risk::LowRiskRemoval, Risk::HighRiskAddition,
                        Risk::HighRiskRemoval};
  std::string dist = "cohort";
  for (Risk r : risks) dist += "," + std::string(complexity::to_string(r));
  dist += "\n";
  for (const char* label : {"Human", "Agent", "All"}) {
    dist += label;
    for (Risk r : risks) {
      std::size_t n = 0;
      if (std::string(label) != "Agent") n += risk_counts[{Cohort::Human, r}];
      if (std::string(label) != "Human") n += risk_counts[{Cohort::Agent, r}];
      dist += "," + std::to_string(n);
    }
    dist += "\n";
  }
  write_file(config.output_dir / "cc_distribution.csv", dist, result);

  if (config.has_classifier()) {
    std::string top = "cohort,emotion,pr_id,score\n";
    bool has[2] = {false, false};
    for (const auto& s : sentiments) has[cohorts.at(s.pr_id) == Cohort::Agent] = true;
    if (has[0] && has[1]) {
      auto table = sentiment::top_pr_per_emotion(sentiments, cohorts);
      std::map<std::string, const sentiment::PrSentiment*> by_id;
      for (const auto& s : sentiments) by_id[s.pr_id] = &s;
      for (Cohort c : {Cohort::Human, Cohort::Agent})
        for (std::size_t e = 0; e < sentiment::kEmotionCount; ++e) {
          const std::string& id = table.at({c, e});
          top += std::string(to_string(c)) + "," + std::string(sentiment::kEmotions[e]) + "," + id + "," +
                 format_fixed(by_id.at(id)->mean_profile[e]) + "\n";
        }
    } else {
      result.warnings.push_back("top_pr_per_emotion skipped: a cohort has no PR with includable comments");
    }
    write_file(config.output_dir / "top_pr_per_emotion.csv", top, result);
  }

  auto [human, agent] = redundancy::cohort_amr(reports, cohorts);
  json run = json::object();
  run["command"] = "compare-cohorts";
  run["manifest"] = config.manifest_path.string();
  run["provider"] = engines.provider().id();
  run["classifier"] = engines.classifier_mode();
  run["token_counts_approximate"] =
      engines.token_counter() ? json(engines.token_counter()->approximate()) : json(nullptr);
  json ext = config.extensions;
  run["settings"] = {{"extensions", ext},
                     {"refactor_similarity", config.refactor_similarity},
                     {"min_fn_lines", config.min_fn_lines},
                     {"include_nested", config.include_nested},
                     {"exclude_test_files", config.exclude_test_files},
                     {"strip_docstrings", config.strip_docstrings}};
  auto cohort_json = [&](const redundancy::CohortSummary& s, std::size_t n) {
    return json{{"prs", n}, {"scored_mrs", s.n_prs_scored}, {"amr", s.amr ? json(*s.amr) : json(nullptr)}};
  };
  run["cohorts"] = {{"Human", cohort_json(human, n_human)}, {"Agent", cohort_json(agent, n_agent)}};
  run["sample_sizes"] = sizes;
  if (config.has_classifier())
    run["sentiment"] = {{"excluded_comments",
                         {{"bot", excluded_total.bot},
                          {"empty", excluded_total.empty},
                          {"over_token_limit", excluded_total.over_token_limit}}},
                        {"prs_without_includable_comments",
                         {{"Human", without_comments[Cohort::Human]}, {"Agent", without_comments[Cohort::Agent]}}}};
  run["prs"] = prs;
  run["manifest_issues"] = issues_json(manifest);
  run["warnings"] = result.warnings;
  write_file(config.output_dir / "run.json", dump(run), result);

  std::ostringstream s;
  s << "PRs: " << n_human << " Human, " << n_agent << " Agent";
  std::size_t failed = std::count_if(analyses.begin(), analyses.end(), [](const auto& a) { return !a; });
  if (failed) s << " (" << failed << " failed)";
  s << "\nAMR: Human " << (human.amr ? format_fixed(*human.amr) : "-") << ", Agent "
    << (agent.amr ? format_fixed(*agent.amr) : "-") << "\n\n"
    << render_table(rows);
  result.summary = s.str();
  return result;
}

CommandResult emit_distribution(const RunConfig& config, const std::string& metric) {
  CommandResult result;
  auto spec = parse_metric(metric);
  auto run_path = config.output_dir / "run.json";
  if (!std::filesystem::exists(run_path))
    throw RunError(Status::Io, "no completed run in " + config.output_dir.string() + " (run compare-cohorts first)");
  json run = read_json(run_path);
  Samples values;
  for (const auto& pr : run.value("prs", json::array())) {
    if (pr.value("status", "") != "ok") continue;
    json rep = read_json(config.output_dir / pr.at("report").get<std::string>());
    Cohort c = pr.at("cohort").get<std::string>() == "Agent" ? Cohort::Agent : Cohort::Human;
    switch (spec.kind) {
      case MetricSpec::Kind::Mrs:
        if (!rep["redundancy"]["mrs"].is_null()) values.of(c).push_back(rep["redundancy"]["mrs"].get<double>());
        break;
      case MetricSpec::Kind::CcDelta:
        for (const auto& f : rep["files"])
          if (!f["complexity"].is_null()) values.of(c).push_back(f["complexity"]["delta"].get<double>());
        break;
      case MetricSpec::Kind::Emotion:
        if (!rep["sentiment"].is_null() && !rep["sentiment"]["mean_profile"].is_null())
          values.of(c).push_back(rep["sentiment"]["mean_profile"][std::string(sentiment::kEmotions[spec.emotion])].get<double>());
        break;
    }
  }
  if (values.human.empty() && values.agent.empty())
    throw RunError(Status::NoScored, "no scored PRs for metric " + spec.name);

  const int decimals = spec.width < 1 ? 2 : 0;
  auto bound = [&](long k) {
    char buf[64];
    double v = double(k) * spec.width;
    std::snprintf(buf, sizeof buf, "%.*f", decimals, v == 0 ? 0.0 : v);
    return std::string(buf);
  };
  std::string csv = "cohort,bin_lower,bin_upper,count\n";
  std::ostringstream s;
  for (Cohort c : {Cohort::Human, Cohort::Agent}) {
    auto bins = histogram(values.of(c), spec.width);
    for (const auto& b : bins)
      csv += std::string(to_string(c)) + "," + bound(b.index) + "," + bound(b.index + 1) + "," + std::to_string(b.count) + "\n";
    s << to_string(c) << ": " << values.of(c).size() << " values in " << bins.size() << " bins\n";
  }
  write_file(config.output_dir / ("distribution_" + spec.name + ".csv"), csv, result);
  result.summary = s.str();
  return result;
}

}  // namespace redline::pipeline
