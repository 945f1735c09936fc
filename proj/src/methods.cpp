#include "fnreuse/methods.hpp"

#include "fnreuse/errors.hpp"

namespace fnreuse {

namespace {

const SemanticRepresentation& cached_query(const ReprStore& cache, const std::string& id) {
  auto it = cache.find(id);
  if (it == cache.end()) throw IntegrityError("no cached representation for query '" + id + "'");
  if (!it->second.intent_vector)
    throw IntegrityError("cached query '" + id + "' has no intent vector");
  return it->second;
}

}  // namespace

PruningMethod::PruningMethod(const ReprStore& reps, ExtractionProvider& extractor, Embedder& embedder,
                             const NormalizationTable& table, const ReprStore* cached_queries,
                             ExtractOptions opts)
    : reps_(&reps),
      extractor_(&extractor),
      embedder_(&embedder),
      table_(&table),
      cached_(cached_queries),
      opts_(std::move(opts)) {}

std::string PruningMethod::latency_mode() const {
  return cached_ ? kLatencyCached : kLatencyProviderInclusive;
}

Recommendation PruningMethod::recommend_case(const QueryCase& query, std::size_t k) {
  if (cached_) return recommend(cached_query(*cached_, query.id), *reps_, k);
  auto rep = extract(query.id, query.text, *extractor_, *table_, opts_);
  rep.intent_vector = embed_intent(rep.intent_text, *embedder_);
  return recommend(rep, *reps_, k);
}

Ranking PruningMethod::rank(const QueryCase& query, std::size_t k) {
  return recommend_case(query, k).ranking;
}

std::string VariantMethod::latency_mode() const {
  return cached_ ? kLatencyCached : kLatencyProviderInclusive;
}

Ranking VariantMethod::rank(const QueryCase& query, std::size_t k) {
  if (cached_) return index_.rank_vector(query.id, *cached_query(*cached_, query.id).intent_vector, k).ranking;
  return index_.rank(query.id, query.text, k).ranking;
}

}  // namespace fnreuse
