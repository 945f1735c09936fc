#include "fnreuse/evaluation.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <numeric>
#include <thread>

#include "fnreuse/errors.hpp"
#include "json.hpp"
#include "text_util.hpp"

namespace fnreuse {

using nlohmann::json;

std::vector<QueryCase> parse_query_dataset(const std::string& text) {
  std::vector<QueryCase> cases;
  std::set<std::string> ids;
  std::size_t line_no = 0;
  for (auto line : detail::split_lines(text)) {
    ++line_no;
    if (detail::trim_view(line).empty()) continue;
    QueryCase c;
    try {
      auto j = json::parse(line);
      c.id = j.at("id").get<std::string>();
      c.text = j.at("text").get<std::string>();
      c.ground_truth_id = j.at("ground_truth_id").get<std::string>();
    } catch (const json::exception& e) {
      throw ParseError("query dataset line " + std::to_string(line_no) + ": " + e.what(), line_no);
    }
    if (!ids.insert(c.id).second)
      throw ParseError("query dataset line " + std::to_string(line_no) + ": duplicate id '" + c.id + "'",
                       line_no);
    cases.push_back(std::move(c));
  }
  return cases;
}

std::vector<QueryCase> load_query_dataset(const std::filesystem::path& path) {
  if (!std::filesystem::exists(path)) throw ConfigError("query dataset not found: " + path.string());
  return parse_query_dataset(detail::read_file(path));
}

Fraction Fraction::make(std::int64_t num, std::int64_t den) {
  if (den <= 0) throw ValidationError("fraction denominator must be positive");
  const auto g = std::gcd(num, den);
  return g == 0 ? Fraction{0, 1} : Fraction{num / g, den / g};
}

Fraction Fraction::operator+(const Fraction& o) const {
  const auto l = std::lcm(den, o.den);
  return make(num * (l / den) + o.num * (l / o.den), l);
}

namespace {

std::vector<std::size_t> ground_truth_ranks(const RankingsByQuery& rankings,
                                            const std::vector<QueryCase>& cases) {
  std::vector<std::size_t> ranks;
  ranks.reserve(cases.size());
  for (const auto& c : cases) {
    auto it = rankings.find(c.id);
    if (it == rankings.end()) throw IntegrityError("no ranking for query '" + c.id + "'");
    ranks.push_back(it->second.rank_of(c.ground_truth_id));
  }
  return ranks;
}

}  // namespace

std::map<std::size_t, Fraction> recall_at_k_exact(const RankingsByQuery& rankings,
                                                  const std::vector<QueryCase>& cases,
                                                  const std::vector<std::size_t>& ks) {
  const auto ranks = ground_truth_ranks(rankings, cases);
  std::map<std::size_t, Fraction> out;
  for (auto k : ks) {
    if (cases.empty()) {
      out[k] = Fraction{};
      continue;
    }
    std::int64_t hits = 0;
    for (auto r : ranks)
      if (r >= 1 && r <= k) ++hits;
    out[k] = Fraction::make(hits, static_cast<std::int64_t>(cases.size()));
  }
  return out;
}

std::map<std::size_t, Fraction> mrr_at_k_exact(const RankingsByQuery& rankings,
                                               const std::vector<QueryCase>& cases,
                                               const std::vector<std::size_t>& ks) {
  const auto ranks = ground_truth_ranks(rankings, cases);
  std::map<std::size_t, Fraction> out;
  for (auto k : ks) {
    Fraction sum;
    for (auto r : ranks)
      if (r >= 1 && r <= k) sum = sum + Fraction::make(1, static_cast<std::int64_t>(r));
    out[k] = cases.empty() ? Fraction{}
                           : Fraction::make(sum.num, sum.den * static_cast<std::int64_t>(cases.size()));
  }
  return out;
}

std::map<std::size_t, double> recall_at_k(const RankingsByQuery& rankings,
                                          const std::vector<QueryCase>& cases,
                                          const std::vector<std::size_t>& ks) {
  std::map<std::size_t, double> out;
  for (const auto& [k, f] : recall_at_k_exact(rankings, cases, ks))
    out[k] = 100.0 * static_cast<double>(f.num) / static_cast<double>(f.den);
  return out;
}

std::map<std::size_t, double> mrr_at_k(const RankingsByQuery& rankings,
                                       const std::vector<QueryCase>& cases,
                                       const std::vector<std::size_t>& ks) {
  std::map<std::size_t, double> out;
  for (const auto& [k, f] : mrr_at_k_exact(rankings, cases, ks)) out[k] = f.value();
  return out;
}

namespace {

RepetitionResult run_repetition(RankingMethod& method, const std::vector<QueryCase>& cases,
                                const EvalOptions& opts, int repetition) {
  const std::size_t max_k = *std::max_element(opts.ks.begin(), opts.ks.end());
  std::vector<Ranking> rankings(cases.size());
  std::vector<double> latencies(cases.size(), 0.0);

  auto fail = [&](std::size_t i, const std::string& what) {
    return EvaluationError("repetition " + std::to_string(repetition) + ", query '" + cases[i].id +
                           "': " + what);
  };

  if (opts.measure_latency || opts.max_concurrency <= 1 || cases.size() <= 1) {
    for (std::size_t i = 0; i < cases.size(); ++i) {
      const auto start = std::chrono::steady_clock::now();
      try {
        rankings[i] = method.rank(cases[i], max_k);
      } catch (const std::exception& e) {
        throw fail(i, e.what());
      }
      latencies[i] =
          std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - start).count();
    }
  } else {
    std::vector<std::optional<std::string>> errors(cases.size());
    std::atomic<std::size_t> next{0};
    auto worker = [&] {
      for (std::size_t i = next++; i < cases.size(); i = next++) {
        try {
          rankings[i] = method.rank(cases[i], max_k);
        } catch (const std::exception& e) {
          errors[i] = e.what();
        }
      }
    };
    {
      std::vector<std::jthread> pool;
      for (std::size_t t = 0; t < std::min(opts.max_concurrency, cases.size()); ++t)
        pool.emplace_back(worker);
    }
    for (std::size_t i = 0; i < cases.size(); ++i)
      if (errors[i]) throw fail(i, *errors[i]);
  }

  RankingsByQuery by_query;
  for (std::size_t i = 0; i < cases.size(); ++i) by_query[cases[i].id] = rankings[i];

  RepetitionResult result;
  result.recall = recall_at_k(by_query, cases, opts.ks);
  result.mrr = mrr_at_k(by_query, cases, opts.ks);
  if (opts.measure_latency) {
    result.latencies_ms = latencies;
    result.mean_latency_ms =
        cases.empty() ? 0.0
                      : std::accumulate(latencies.begin(), latencies.end(), 0.0) /
                            static_cast<double>(cases.size());
  }
  return result;
}

}  // namespace

EvalReport run_evaluation(RankingMethod& method, const std::vector<QueryCase>& cases,
                          const std::set<std::string>& known_ids, const EvalOptions& opts) {
  if (opts.repetitions < 1) throw ValidationError("repetitions must be at least 1");
  if (opts.ks.empty()) throw ValidationError("at least one k is required");
  for (auto k : opts.ks)
    if (k == 0) throw ValidationError("k must be at least 1");
  for (const auto& c : cases)
    if (!known_ids.count(c.ground_truth_id))
      throw IntegrityError("query '" + c.id + "': ground truth '" + c.ground_truth_id +
                           "' is not in the repository");

  EvalReport report;
  report.method = method.name();
  report.latency_mode = opts.measure_latency ? method.latency_mode() : "disabled";
  report.ks = opts.ks;
  std::sort(report.ks.begin(), report.ks.end());
  report.ks.erase(std::unique(report.ks.begin(), report.ks.end()), report.ks.end());
  report.repetitions = opts.repetitions;
  report.queries = cases.size();

  for (int r = 1; r <= opts.repetitions; ++r)
    report.per_repetition.push_back(run_repetition(method, cases, opts, r));

  const double n = static_cast<double>(opts.repetitions);
  for (auto k : report.ks) {
    double recall = 0.0;
    double mrr = 0.0;
    for (const auto& rep : report.per_repetition) {
      recall += rep.recall.at(k);
      mrr += rep.mrr.at(k);
    }
    report.recall[k] = recall / n;
    report.mrr[k] = mrr / n;
  }
  if (opts.measure_latency) {
    double total = 0.0;
    for (const auto& rep : report.per_repetition) total += *rep.mean_latency_ms;
    report.mean_latency_ms = total / n;
  }
  return report;
}

namespace {

json metric_map(const std::map<std::size_t, double>& m) {
  json j = json::object();
  for (const auto& [k, v] : m) j[std::to_string(k)] = v;
  return j;
}

json optional_number(const std::optional<double>& v) { return v ? json(*v) : json(nullptr); }

}  // namespace

std::string eval_report_json(const EvalReport& report) {
  json reps = json::array();
  for (const auto& r : report.per_repetition) {
    json block = {{"recall", metric_map(r.recall)},
                  {"mrr", metric_map(r.mrr)},
                  {"mean_latency_ms", optional_number(r.mean_latency_ms)}};
    if (r.mean_latency_ms) block["latencies_ms"] = r.latencies_ms;
    reps.push_back(std::move(block));
  }
  json doc = {{"method", report.method},
              {"latency_mode", report.latency_mode},
              {"ks", report.ks},
              {"queries", report.queries},
              {"repetitions", report.repetitions},
              {"recall", metric_map(report.recall)},
              {"mrr", metric_map(report.mrr)},
              {"mean_latency_ms", optional_number(report.mean_latency_ms)},
              {"per_repetition", reps}};
  return doc.dump();
}

}  // namespace fnreuse
