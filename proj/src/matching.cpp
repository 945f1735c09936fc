#include "fnreuse/matching.hpp"

#include <algorithm>
#include <chrono>
#include <limits>
#include <numeric>
#include <string_view>

#include "fnreuse/errors.hpp"
#include "json.hpp"

namespace fnreuse {

namespace {

char fold(char c) { return c >= 'A' && c <= 'Z' ? static_cast<char>(c - 'A' + 'a') : c; }

bool equal_ci(std::string_view a, std::string_view b) {
  if (a.size() != b.size()) return false;
  for (std::size_t i = 0; i < a.size(); ++i)
    if (a[i] != b[i] && fold(a[i]) != fold(b[i])) return false;
  return true;
}

// Sizes after case folding. Attribute sets hold a handful of entries, so the
// quadratic scans beat building folded copies.
struct Overlap {
  std::size_t a = 0;
  std::size_t b = 0;
  std::size_t common = 0;
};

bool first_of_fold(const AttributeSet& s, AttributeSet::const_iterator it) {
  for (auto p = s.begin(); p != it; ++p)
    if (equal_ci(*p, *it)) return false;
  return true;
}

Overlap overlap(const AttributeSet& a, const AttributeSet& b) {
  Overlap o;
  for (auto it = a.begin(); it != a.end(); ++it) {
    if (!first_of_fold(a, it)) continue;
    ++o.a;
    for (const auto& y : b)
      if (equal_ci(*it, y)) {
        ++o.common;
        break;
      }
  }
  for (auto it = b.begin(); it != b.end(); ++it)
    if (first_of_fold(b, it)) ++o.b;
  return o;
}

double jaccard_of(const Overlap& o) {
  const std::size_t uni = o.a + o.b - o.common;
  if (uni == 0) return 0.0;
  return 1.0 - static_cast<double>(o.common) / static_cast<double>(uni);
}

double coverage_of(const Overlap& o) { return static_cast<double>(o.common) / static_cast<double>(o.a); }

const char* level_key(AttributeKind kind) {
  switch (kind) {
    case AttributeKind::kPlatform: return "platforms";
    case AttributeKind::kService: return "services";
    case AttributeKind::kLanguage: return "languages";
  }
  return "platforms";
}

}  // namespace

double jaccard_distance(const AttributeSet& a, const AttributeSet& b) { return jaccard_of(overlap(a, b)); }

double subset_coverage(const AttributeSet& q, const AttributeSet& f) {
  if (q.empty()) throw ValidationError("subset_coverage: query attribute set is empty");
  return coverage_of(overlap(q, f));
}

bool dominates(const ObjectiveVector& a, const ObjectiveVector& b) {
  return a.jaccard_distance <= b.jaccard_distance && a.coverage_gap <= b.coverage_gap &&
         (a.jaccard_distance < b.jaccard_distance || a.coverage_gap < b.coverage_gap);
}

std::vector<std::size_t> pareto_front(std::span<const ObjectiveVector> points) {
  std::vector<std::size_t> order(points.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    const auto& pa = points[a];
    const auto& pb = points[b];
    if (pa.jaccard_distance != pb.jaccard_distance) return pa.jaccard_distance < pb.jaccard_distance;
    return pa.coverage_gap < pb.coverage_gap;
  });

  // Sweep groups of equal first objective. A point is dominated when an
  // earlier group reaches a gap <= its own, or its own group has a smaller gap.
  std::vector<std::size_t> front;
  double best_gap_before = std::numeric_limits<double>::infinity();
  std::size_t i = 0;
  while (i < order.size()) {
    std::size_t j = i;
    const double jd = points[order[i]].jaccard_distance;
    while (j < order.size() && points[order[j]].jaccard_distance == jd) ++j;
    const double group_min = points[order[i]].coverage_gap;
    for (std::size_t t = i; t < j; ++t) {
      const double gap = points[order[t]].coverage_gap;
      if (best_gap_before <= gap || group_min < gap) continue;
      front.push_back(order[t]);
    }
    best_gap_before = std::min(best_gap_before, group_min);
    i = j;
  }
  std::sort(front.begin(), front.end());
  return front;
}

CandidateSet CandidateSet::all_of(const ReprStore& reps) {
  CandidateSet c;
  c.ids.reserve(reps.size());
  for (const auto& [id, rep] : reps) c.ids.push_back(id);
  return c;
}

namespace {

using RepRefs = std::vector<const ReprStore::value_type*>;

// Keeps full matches and the Pareto front of the partial matches, preserving
// input order.
LevelAudit prune_refs(RepRefs& current, const AttributeSet& query_attr, AttributeKind level) {
  std::vector<std::size_t> full;
  std::vector<std::size_t> partial;
  std::vector<ObjectiveVector> points;
  for (std::size_t i = 0; i < current.size(); ++i) {
    const auto& attr = current[i]->second.attribute(level);
    if (attr.empty()) {
      partial.push_back(i);
      points.push_back({1.0, 1.0});
      continue;
    }
    const auto o = overlap(query_attr, attr);
    if (o.common == o.a) {
      full.push_back(i);
    } else {
      partial.push_back(i);
      points.push_back({jaccard_of(o), 1.0 - coverage_of(o)});
    }
  }
  const auto front = pareto_front(points);

  std::vector<char> keep(current.size(), 0);
  for (std::size_t i : full) keep[i] = 1;
  for (std::size_t idx : front) keep[partial[idx]] = 1;

  LevelAudit audit;
  audit.attribute = level;
  audit.applied = true;
  audit.input = current.size();
  audit.full = full.size();
  audit.pareto = front.size();

  std::size_t out = 0;
  for (std::size_t i = 0; i < current.size(); ++i)
    if (keep[i]) current[out++] = current[i];
  current.resize(out);
  audit.retained = out;
  return audit;
}

// Map order is id order, so the survivors stay sorted by id.
RepRefs prune_store(const ReprStore& reps, const SemanticRepresentation& query, std::vector<LevelAudit>& levels) {
  RepRefs current;
  current.reserve(reps.size());
  for (const auto& entry : reps) current.push_back(&entry);
  for (auto kind : {AttributeKind::kPlatform, AttributeKind::kService, AttributeKind::kLanguage}) {
    const auto& q = query.attribute(kind);
    if (q.empty()) {
      LevelAudit skipped;
      skipped.attribute = kind;
      skipped.input = current.size();
      skipped.retained = current.size();
      levels.push_back(skipped);
      continue;
    }
    levels.push_back(prune_refs(current, q, kind));
  }
  return current;
}

}  // namespace

CandidateSet prune_level(const CandidateSet& candidates, const ReprStore& reps,
                         const AttributeSet& query_attr, AttributeKind level) {
  if (query_attr.empty()) throw ValidationError("prune_level: query attribute set is empty");
  RepRefs refs;
  refs.reserve(candidates.ids.size());
  for (const auto& id : candidates.ids) {
    auto it = reps.find(id);
    if (it == reps.end()) throw IntegrityError("prune_level: unknown function id '" + id + "'");
    refs.push_back(&*it);
  }

  CandidateSet out;
  out.levels = candidates.levels;
  out.levels.push_back(prune_refs(refs, query_attr, level));
  out.ids.reserve(refs.size());
  for (const auto* entry : refs) out.ids.push_back(entry->first);
  std::sort(out.ids.begin(), out.ids.end());
  return out;
}

CandidateSet multi_level_prune(const ReprStore& reps, const SemanticRepresentation& query) {
  CandidateSet out;
  for (const auto* entry : prune_store(reps, query, out.levels)) out.ids.push_back(entry->first);
  return out;
}

double cosine_similarity(std::span<const double> u, std::span<const double> v) {
  if (u.size() != v.size()) throw DimensionMismatchError(u.size(), v.size());
  double dot = 0.0;
  for (std::size_t i = 0; i < u.size(); ++i) dot += u[i] * v[i];
  return std::clamp(dot, -1.0, 1.0);
}

std::size_t Ranking::rank_of(const std::string& function_id) const {
  for (std::size_t i = 0; i < entries.size(); ++i)
    if (entries[i].function_id == function_id) return i + 1;
  return 0;
}

Ranking make_ranking(std::string query_id, std::vector<RankedEntry> scored, std::size_t k) {
  std::sort(scored.begin(), scored.end(), [](const RankedEntry& a, const RankedEntry& b) {
    if (a.score != b.score) return a.score > b.score;
    return a.function_id < b.function_id;
  });
  if (scored.size() > k) scored.resize(k);
  Ranking r;
  r.query_id = std::move(query_id);
  r.k = k;
  r.entries = std::move(scored);
  return r;
}

Recommendation recommend(const SemanticRepresentation& query, const ReprStore& reps, std::size_t k) {
  if (k == 0) throw ValidationError("k must be at least 1");
  if (!query.intent_vector) throw ValidationError("query '" + query.subject_id + "' has no intent vector");
  const auto start = std::chrono::steady_clock::now();

  Recommendation rec;
  const auto survivors = prune_store(reps, query, rec.candidates.levels);
  rec.candidates.ids.reserve(survivors.size());
  std::vector<RankedEntry> scored;
  scored.reserve(survivors.size());
  for (const auto* entry : survivors) {
    const auto& [id, rep] = *entry;
    rec.candidates.ids.push_back(id);
    if (!rep.intent_vector) throw IntegrityError("function '" + id + "' has no intent vector");
    scored.push_back({id, cosine_similarity(*query.intent_vector, *rep.intent_vector)});
    ++rec.similarity_evaluations;
  }
  rec.ranking = make_ranking(query.subject_id, std::move(scored), k);

  rec.latency_ms =
      std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - start).count();
  return rec;
}

std::string recommendation_trace_json(const Recommendation& rec, bool include_latency) {
  using nlohmann::json;
  json levels = json::array();
  for (const auto& l : rec.candidates.levels) {
    levels.push_back({{"attribute", level_key(l.attribute)},
                      {"applied", l.applied},
                      {"full", l.full},
                      {"pareto", l.pareto},
                      {"retained", l.retained}});
  }
  json ranking = json::array();
  for (const auto& e : rec.ranking.entries) ranking.push_back({{"id", e.function_id}, {"score", e.score}});
  json doc = {{"query_id", rec.ranking.query_id},
              {"levels", levels},
              {"survivors", rec.candidates.ids.size()},
              {"latency_ms", include_latency ? json(rec.latency_ms) : json(nullptr)},
              {"ranking", ranking}};
  return doc.dump();
}

}  // namespace fnreuse
