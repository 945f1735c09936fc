#pragma once

#include <cstddef>
#include <map>
#include <set>
#include <string>
#include <vector>

#include "fnreuse/corpus.hpp"
#include "fnreuse/extraction.hpp"
#include "fnreuse/matching.hpp"

namespace fnreuse {

// Porter's original suffix stripper. Expects a lower-case ASCII word.
std::string porter_stem(const std::string& word);

bool is_stop_word(const std::string& lower_token);
const std::set<std::string>& stop_words();

// Lower-case stemmed tokens with stop-words removed, in text order.
struct TokenBag {
  std::vector<std::string> tokens;

  std::set<std::string> distinct() const { return {tokens.begin(), tokens.end()}; }
  bool empty() const { return tokens.empty(); }
};

// Lower-case, split on non-alphanumerics, drop stop-words, stem.
TokenBag keyword_preprocess(const std::string& text);

// Name, readme and every source file joined with newlines.
std::string function_text(const FunctionUnit& unit);

// Bag-of-words index over code + readme.
class KeywordIndex {
 public:
  explicit KeywordIndex(const Repository& repo);

  // Score = number of distinct query tokens present in the function. Functions
  // matching no token are left out.
  Ranking rank(const std::string& query_id, const std::string& query_text, std::size_t k) const;
  std::size_t size() const { return docs_.size(); }

 private:
  std::map<std::string, std::set<std::string>> docs_;
};

Ranking keyword_rank(const std::string& query_text, const Repository& repo, std::size_t k,
                     const std::string& query_id = "query");

struct EmbeddingIndexOptions {
  // Documents longer than this are cut to their first max_chars bytes.
  std::size_t max_chars = 16384;
};

// Whole-text embeddings of every function, compared to the raw query text.
class EmbeddingIndex {
 public:
  EmbeddingIndex(const Repository& repo, Embedder& embedder, EmbeddingIndexOptions opts = {});

  Ranking rank(const std::string& query_id, const std::string& query_text, std::size_t k) const;
  std::size_t size() const { return vectors_.size(); }
  std::size_t truncated_documents() const { return truncated_; }

 private:
  Embedder* embedder_;
  EmbeddingIndexOptions opts_;
  std::map<std::string, Vector> vectors_;
  std::size_t truncated_ = 0;
};

Ranking embedding_rank(const std::string& query_text, const Repository& repo, Embedder& embedder,
                       std::size_t k, const std::string& query_id = "query");

// Intent-summary-only ranking without attribute pruning: every function is
// scored.
class VariantIndex {
 public:
  // Asks `extractor` for an intent-only summary of each function's code.
  VariantIndex(const Repository& repo, ExtractionProvider& extractor, Embedder& embedder,
               const ExtractOptions& opts = {});
  // Reuses already computed intent vectors.
  VariantIndex(const ReprStore& reps, ExtractionProvider& extractor, Embedder& embedder,
               const ExtractOptions& opts = {});

  // Extracts the query intent, then ranks.
  Recommendation rank(const std::string& query_id, const std::string& query_text, std::size_t k) const;
  // Ranks an already embedded query intent.
  Recommendation rank_vector(const std::string& query_id, const Vector& query_intent, std::size_t k) const;

  std::size_t size() const { return vectors_.size(); }

 private:
  ExtractionProvider* extractor_;
  Embedder* embedder_;
  ExtractOptions opts_;
  std::map<std::string, Vector> vectors_;
};

Recommendation variant_rank(const std::string& query_text, const Repository& repo,
                            ExtractionProvider& extractor, Embedder& embedder, std::size_t k,
                            const std::string& query_id = "query");

}  // namespace fnreuse
