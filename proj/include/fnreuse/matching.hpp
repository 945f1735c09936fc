#pragma once

#include <cstddef>
#include <span>
#include <string>
#include <vector>

#include "fnreuse/extraction.hpp"

namespace fnreuse {

// 1 - |a n b| / |a u b|, with 0 for two empty sets. Elements compare
// case-insensitively.
double jaccard_distance(const AttributeSet& a, const AttributeSet& b);

// |q n f| / |q|. Throws ValidationError when q is empty.
double subset_coverage(const AttributeSet& q, const AttributeSet& f);

// Both components lie in [0, 1] and are minimized.
struct ObjectiveVector {
  double jaccard_distance = 0.0;
  double coverage_gap = 0.0;  // 1 - subset coverage

  bool operator==(const ObjectiveVector&) const = default;
};

// true when `a` is no worse than `b` on both objectives and strictly better on
// at least one.
bool dominates(const ObjectiveVector& a, const ObjectiveVector& b);

// Indices (ascending) of the points not strictly dominated by any other point.
// Points with identical values are kept together. O(n log n).
std::vector<std::size_t> pareto_front(std::span<const ObjectiveVector> points);

struct LevelAudit {
  AttributeKind attribute = AttributeKind::kPlatform;
  bool applied = false;
  std::size_t input = 0;
  std::size_t full = 0;
  std::size_t pareto = 0;
  std::size_t retained = 0;
};

// Function ids that survived pruning so far (sorted ascending) plus one audit
// entry per level visited.
struct CandidateSet {
  std::vector<std::string> ids;
  std::vector<LevelAudit> levels;

  static CandidateSet all_of(const ReprStore& reps);
};

// One level of attribute pruning: keeps every full match (coverage 1) and the
// Pareto front of the partial matches. `query_attr` must be non-empty.
// Throws IntegrityError for a candidate id missing from `reps`.
CandidateSet prune_level(const CandidateSet& candidates, const ReprStore& reps,
                         const AttributeSet& query_attr, AttributeKind level);

// Platforms, then services, then languages; levels whose query attribute set
// is empty are recorded as not applied and leave the candidates untouched.
CandidateSet multi_level_prune(const ReprStore& reps, const SemanticRepresentation& query);

// Dot product of two unit vectors clamped to [-1, 1].
double cosine_similarity(std::span<const double> u, std::span<const double> v);

struct RankedEntry {
  std::string function_id;
  double score = 0.0;

  bool operator==(const RankedEntry&) const = default;
};

struct Ranking {
  std::string query_id;
  std::size_t k = 0;
  std::vector<RankedEntry> entries;  // best first

  // 1-based position of `function_id`, 0 when absent.
  std::size_t rank_of(const std::string& function_id) const;
  bool operator==(const Ranking&) const = default;
};

// Sorts by score descending, ties by ascending id, then truncates to k.
Ranking make_ranking(std::string query_id, std::vector<RankedEntry> scored, std::size_t k);

struct Recommendation {
  Ranking ranking;
  CandidateSet candidates;
  std::size_t similarity_evaluations = 0;
  double latency_ms = 0.0;
};

// Prune, score survivors by intent cosine similarity, keep the top k.
// Throws ValidationError when k == 0 or the query has no intent vector, and
// IntegrityError when a survivor lacks one.
Recommendation recommend(const SemanticRepresentation& query, const ReprStore& reps, std::size_t k);

// {"query_id", "levels": [...], "survivors", "latency_ms", "ranking": [...]}.
// With `include_latency` false the latency field is null.
std::string recommendation_trace_json(const Recommendation& rec, bool include_latency = true);

}  // namespace fnreuse
