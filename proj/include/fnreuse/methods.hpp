#pragma once

#include <optional>
#include <string>

#include "fnreuse/baselines.hpp"
#include "fnreuse/evaluation.hpp"
#include "fnreuse/matching.hpp"

namespace fnreuse {

inline constexpr const char* kLatencyProviderInclusive = "provider-inclusive";
inline constexpr const char* kLatencyCached = "cached-representation";
inline constexpr const char* kLatencyNoProvider = "no-provider";

// Adapters that let run_evaluation drive each recommender.

// Attribute pruning + intent similarity. With `cached_queries` the query
// representation is looked up instead of extracted and embedded.
class PruningMethod : public RankingMethod {
 public:
  PruningMethod(const ReprStore& reps, ExtractionProvider& extractor, Embedder& embedder,
                const NormalizationTable& table, const ReprStore* cached_queries = nullptr,
                ExtractOptions opts = {});

  std::string name() const override { return "slsreuse"; }
  std::string latency_mode() const override;
  Ranking rank(const QueryCase& query, std::size_t k) override;

  // Same as rank() but keeps the pruning audit and counters.
  Recommendation recommend_case(const QueryCase& query, std::size_t k);

 private:
  const ReprStore* reps_;
  ExtractionProvider* extractor_;
  Embedder* embedder_;
  const NormalizationTable* table_;
  const ReprStore* cached_;
  ExtractOptions opts_;
};

class KeywordMethod : public RankingMethod {
 public:
  explicit KeywordMethod(const Repository& repo) : index_(repo) {}
  std::string name() const override { return "keyword"; }
  std::string latency_mode() const override { return kLatencyNoProvider; }
  Ranking rank(const QueryCase& query, std::size_t k) override {
    return index_.rank(query.id, query.text, k);
  }

 private:
  KeywordIndex index_;
};

class EmbeddingMethod : public RankingMethod {
 public:
  EmbeddingMethod(const Repository& repo, Embedder& embedder) : index_(repo, embedder) {}
  std::string name() const override { return "embedding"; }
  std::string latency_mode() const override { return kLatencyProviderInclusive; }
  Ranking rank(const QueryCase& query, std::size_t k) override {
    return index_.rank(query.id, query.text, k);
  }

 private:
  EmbeddingIndex index_;
};

// Intent-only ranking without pruning. Cached query representations supply
// the query intent vector when given.
class VariantMethod : public RankingMethod {
 public:
  VariantMethod(VariantIndex index, const ReprStore* cached_queries = nullptr)
      : index_(std::move(index)), cached_(cached_queries) {}
  std::string name() const override { return "llm-variant"; }
  std::string latency_mode() const override;
  Ranking rank(const QueryCase& query, std::size_t k) override;

 private:
  VariantIndex index_;
  const ReprStore* cached_;
};

}  // namespace fnreuse
