#include <atomic>

#include "doctest.h"
#include "fnreuse/evaluation.hpp"
#include "json.hpp"
#include "test_support.hpp"

using namespace fnreuse;
using fnreuse::testing::TempDir;

namespace {

// Places each case's ground truth at a fixed 1-based rank (0 = absent).
Ranking planted(const QueryCase& c, std::size_t rank, std::size_t k) {
  std::vector<RankedEntry> entries;
  const std::size_t n = std::max<std::size_t>(k, rank);
  for (std::size_t pos = 1; pos <= n; ++pos) {
    const std::string id = pos == rank ? c.ground_truth_id : c.id + "-filler-" + std::to_string(pos);
    entries.push_back({id, 1.0 - static_cast<double>(pos) / 1000.0});
  }
  return make_ranking(c.id, entries, k);
}

class PlantedMethod : public RankingMethod {
 public:
  explicit PlantedMethod(std::map<std::string, std::size_t> ranks) : ranks_(std::move(ranks)) {}
  std::string name() const override { return "planted"; }
  std::string latency_mode() const override { return "cached-representation"; }
  Ranking rank(const QueryCase& q, std::size_t k) override {
    ++calls;
    if (q.id == "boom") throw std::runtime_error("provider down");
    return planted(q, ranks_.at(q.id), k);
  }
  std::atomic<int> calls{0};

 private:
  std::map<std::string, std::size_t> ranks_;
};

std::vector<QueryCase> cases_for(const std::vector<std::size_t>& ranks) {
  std::vector<QueryCase> cases;
  for (std::size_t i = 0; i < ranks.size(); ++i)
    cases.push_back({"q" + std::to_string(i), "text", "gt" + std::to_string(i)});
  return cases;
}

}  // namespace

TEST_CASE("recall over three cases with ranks 1, 7 and absent") {
  auto cases = cases_for({1, 7, 0});
  RankingsByQuery r;
  r["q0"] = planted(cases[0], 1, 20);
  r["q1"] = planted(cases[1], 7, 20);
  r["q2"] = planted(cases[2], 0, 20);
  auto exact = recall_at_k_exact(r, cases, {5, 10});
  CHECK(exact[5] == Fraction{1, 3});
  CHECK(exact[10] == Fraction{2, 3});
  auto pct = recall_at_k(r, cases, {5, 10});
  CHECK(pct[5] == doctest::Approx(33.33).epsilon(1e-3));
  CHECK(pct[10] == doctest::Approx(66.67).epsilon(1e-3));
}

TEST_CASE("MRR with ranks 1, 2 and 4") {
  auto cases = cases_for({1, 2, 4});
  RankingsByQuery r;
  for (std::size_t i = 0; i < 3; ++i) r[cases[i].id] = planted(cases[i], std::vector<std::size_t>{1, 2, 4}[i], 10);
  auto exact = mrr_at_k_exact(r, cases, {1, 3, 10});
  CHECK(exact[10] == Fraction{7, 12});  // (1 + 1/2 + 1/4) / 3
  CHECK(exact[3] == Fraction{1, 2});
  CHECK(exact[1] == Fraction{1, 3});
  CHECK(mrr_at_k(r, cases, {10})[10] == doctest::Approx(0.58333).epsilon(1e-4));
}

TEST_CASE("fractions stay reduced") {
  CHECK(Fraction::make(6, 8) == Fraction{3, 4});
  CHECK(Fraction::make(0, 5) == Fraction{0, 1});
  CHECK(Fraction::make(1, 3) + Fraction::make(1, 6) == Fraction{1, 2});
  CHECK_THROWS_AS(Fraction::make(1, 0), ValidationError);
}

TEST_CASE("missing ranking is an integrity error") {
  auto cases = cases_for({1});
  CHECK_THROWS_AS(recall_at_k_exact({}, cases, {1}), IntegrityError);
}

TEST_CASE("query dataset parsing") {
  auto cases = parse_query_dataset(
      "{\"id\":\"a\",\"text\":\"t1\",\"ground_truth_id\":\"f1\"}\n\n"
      "{\"id\":\"b\",\"text\":\"t2\",\"ground_truth_id\":\"f2\"}\n");
  REQUIRE(cases.size() == 2);
  CHECK(cases[1].ground_truth_id == "f2");
  CHECK_THROWS_AS(parse_query_dataset("{\"id\":\"a\",\"text\":\"t\",\"ground_truth_id\":\"f\"}\n"
                                      "{\"id\":\"a\",\"text\":\"t\",\"ground_truth_id\":\"f\"}\n"),
                  ParseError);
  CHECK_THROWS_AS(parse_query_dataset("{\"id\":\"a\"}\n"), ParseError);
  TempDir dir;
  CHECK_THROWS_AS(load_query_dataset(dir / "none.jsonl"), ConfigError);
}

TEST_CASE("run_evaluation aggregates repetitions") {
  std::vector<std::size_t> ranks = {1, 2, 4, 0};
  auto cases = cases_for(ranks);
  std::map<std::string, std::size_t> plan;
  std::set<std::string> known;
  for (std::size_t i = 0; i < cases.size(); ++i) {
    plan[cases[i].id] = ranks[i];
    known.insert(cases[i].ground_truth_id);
  }
  PlantedMethod m(plan);

  SUBCASE("with latency") {
    auto rep = run_evaluation(m, cases, known, {.ks = {10, 1}, .repetitions = 3});
    CHECK(m.calls == 12);
    CHECK(rep.ks == std::vector<std::size_t>{1, 10});
    CHECK(rep.latency_mode == "cached-representation");
    CHECK(rep.recall[10] == doctest::Approx(75.0));
    CHECK(rep.recall[1] == doctest::Approx(25.0));
    CHECK(rep.mrr[10] == doctest::Approx((1 + 0.5 + 0.25) / 4));
    REQUIRE(rep.mean_latency_ms.has_value());
    REQUIRE(rep.per_repetition.size() == 3);
    CHECK(rep.per_repetition[0].latencies_ms.size() == 4);

    auto doc = nlohmann::json::parse(eval_report_json(rep));
    CHECK(doc["method"] == "planted");
    CHECK(doc["per_repetition"].size() == 3);
    CHECK(doc["recall"]["10"] == 75.0);
  }
  SUBCASE("without latency, concurrently") {
    auto rep = run_evaluation(m, cases, known, {.repetitions = 5, .measure_latency = false});
    CHECK(rep.latency_mode == "disabled");
    CHECK_FALSE(rep.mean_latency_ms.has_value());
    for (const auto& block : rep.per_repetition) CHECK(block == rep.per_repetition.front());
  }
  SUBCASE("unknown ground truth") {
    known.erase("gt0");
    CHECK_THROWS_AS(run_evaluation(m, cases, known), IntegrityError);
  }
  SUBCASE("method failure names the query") {
    cases.push_back({"boom", "t", "gt0"});
    try {
      run_evaluation(m, cases, known, {.repetitions = 1});
      FAIL("expected EvaluationError");
    } catch (const EvaluationError& e) {
      CHECK(std::string(e.what()).find("boom") != std::string::npos);
    }
  }
  SUBCASE("bad options") {
    CHECK_THROWS_AS(run_evaluation(m, cases, known, {.ks = {0}}), ValidationError);
    CHECK_THROWS_AS(run_evaluation(m, cases, known, {.repetitions = 0}), ValidationError);
  }
}
