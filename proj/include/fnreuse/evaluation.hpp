#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "fnreuse/errors.hpp"
#include "fnreuse/matching.hpp"

namespace fnreuse {

struct QueryCase {
  std::string id;
  std::string text;
  std::string ground_truth_id;
};

// JSON lines: {"id", "text", "ground_truth_id"}.
std::vector<QueryCase> load_query_dataset(const std::filesystem::path& path);
std::vector<QueryCase> parse_query_dataset(const std::string& text);

// Exact non-negative rational, always reduced.
struct Fraction {
  std::int64_t num = 0;
  std::int64_t den = 1;

  static Fraction make(std::int64_t num, std::int64_t den);
  Fraction operator+(const Fraction& o) const;
  double value() const { return static_cast<double>(num) / static_cast<double>(den); }
  bool operator==(const Fraction&) const = default;
};

using RankingsByQuery = std::map<std::string, Ranking>;

inline const std::vector<std::size_t> kDefaultKs = {1, 5, 10, 15, 20};

// Fraction of cases whose ground truth sits in the top k. Throws
// IntegrityError when a case has no ranking.
std::map<std::size_t, Fraction> recall_at_k_exact(const RankingsByQuery& rankings,
                                                  const std::vector<QueryCase>& cases,
                                                  const std::vector<std::size_t>& ks);
// Mean of 1/rank, counting 0 when the ground truth is outside the top k.
std::map<std::size_t, Fraction> mrr_at_k_exact(const RankingsByQuery& rankings,
                                               const std::vector<QueryCase>& cases,
                                               const std::vector<std::size_t>& ks);

// Percentages in [0, 100].
std::map<std::size_t, double> recall_at_k(const RankingsByQuery& rankings,
                                          const std::vector<QueryCase>& cases,
                                          const std::vector<std::size_t>& ks);
std::map<std::size_t, double> mrr_at_k(const RankingsByQuery& rankings,
                                       const std::vector<QueryCase>& cases,
                                       const std::vector<std::size_t>& ks);

// A recommendation method under evaluation. rank() must be safe to call
// concurrently when latency measurement is off.
class RankingMethod {
 public:
  virtual ~RankingMethod() = default;
  virtual std::string name() const = 0;
  // "provider-inclusive" or "cached-representation"
  virtual std::string latency_mode() const = 0;
  virtual Ranking rank(const QueryCase& query, std::size_t k) = 0;
};

struct EvalOptions {
  std::vector<std::size_t> ks = kDefaultKs;
  int repetitions = 5;
  // Off: queries may run concurrently and no latency is reported.
  bool measure_latency = true;
  std::size_t max_concurrency = 4;
};

struct RepetitionResult {
  std::map<std::size_t, double> recall;
  std::map<std::size_t, double> mrr;
  std::optional<double> mean_latency_ms;
  std::vector<double> latencies_ms;  // per query, in case order

  bool operator==(const RepetitionResult&) const = default;
};

struct EvalReport {
  std::string method;
  std::string latency_mode;
  std::vector<std::size_t> ks;
  std::map<std::size_t, double> recall;
  std::map<std::size_t, double> mrr;
  std::optional<double> mean_latency_ms;
  int repetitions = 0;
  std::size_t queries = 0;
  std::vector<RepetitionResult> per_repetition;
};

class EvaluationError : public Error {
 public:
  using Error::Error;
};

// Runs `method` over every case `opts.repetitions` times. Throws
// IntegrityError when a ground truth id is not in `known_ids`, and
// EvaluationError when the method fails on any case.
EvalReport run_evaluation(RankingMethod& method, const std::vector<QueryCase>& cases,
                          const std::set<std::string>& known_ids, const EvalOptions& opts = {});

// JSON object mirroring EvalReport.
std::string eval_report_json(const EvalReport& report);

}  // namespace fnreuse
