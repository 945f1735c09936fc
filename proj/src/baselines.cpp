#include "fnreuse/baselines.hpp"

#include <cctype>
#include <chrono>
#include <iostream>

#include "fnreuse/errors.hpp"

namespace fnreuse {

const std::set<std::string>& stop_words() {
  static const std::set<std::string> kWords = {
      "i", "me", "my", "myself", "we", "our", "ours", "ourselves", "you", "you're",
      "you've", "you'll", "you'd", "your", "yours", "yourself", "yourselves", "he", "him",
      "his", "himself", "she", "she's", "her", "hers", "herself", "it", "it's", "its",
      "itself", "they", "them", "their", "theirs", "themselves", "what", "which", "who",
      "whom", "this", "that", "that'll", "these", "those", "am", "is", "are", "was",
      "were", "be", "been", "being", "have", "has", "had", "having", "do", "does", "did",
      "doing", "a", "an", "the", "and", "but", "if", "or", "because", "as", "until",
      "while", "of", "at", "by", "for", "with", "about", "against", "between", "into",
      "through", "during", "before", "after", "above", "below", "to", "from", "up",
      "down", "in", "out", "on", "off", "over", "under", "again", "further", "then",
      "once", "here", "there", "when", "where", "why", "how", "all", "any", "both",
      "each", "few", "more", "most", "other", "some", "such", "no", "nor", "not", "only",
      "own", "same", "so", "than", "too", "very", "s", "t", "can", "will", "just", "don",
      "don't", "should", "should've", "now", "d", "ll", "m", "o", "re", "ve", "y", "ain",
      "aren", "aren't", "couldn", "couldn't", "didn", "didn't", "doesn", "doesn't",
      "hadn", "hadn't", "hasn", "hasn't", "haven", "haven't", "isn", "isn't", "ma",
      "mightn", "mightn't", "mustn", "mustn't", "needn", "needn't", "shan", "shan't",
      "shouldn", "shouldn't", "wasn", "wasn't", "weren", "weren't", "won", "won't",
      "wouldn", "wouldn't"};
  return kWords;
}

bool is_stop_word(const std::string& lower_token) { return stop_words().count(lower_token) != 0; }

TokenBag keyword_preprocess(const std::string& text) {
  TokenBag bag;
  std::string token;
  auto flush = [&] {
    if (!token.empty() && !is_stop_word(token)) {
      auto stem = porter_stem(token);
      if (!stem.empty()) bag.tokens.push_back(std::move(stem));
    }
    token.clear();
  };
  for (char ch : text) {
    auto c = static_cast<unsigned char>(ch);
    if (c < 0x80 && std::isalnum(c))
      token += static_cast<char>(std::tolower(c));
    else
      flush();
  }
  flush();
  return bag;
}

std::string function_text(const FunctionUnit& unit) {
  std::string text = unit.name;
  if (unit.readme_text) {
    text += '\n';
    text += *unit.readme_text;
  }
  for (const auto& f : unit.files) {
    text += '\n';
    text += f.content;
  }
  return text;
}

// ---------------------------------------------------------------------------

KeywordIndex::KeywordIndex(const Repository& repo) {
  for (const auto& [id, unit] : repo.units()) {
    std::string text = unit.readme_text.value_or("");
    for (const auto& f : unit.files) {
      text += '\n';
      text += f.content;
    }
    docs_[id] = keyword_preprocess(text).distinct();
  }
}

Ranking KeywordIndex::rank(const std::string& query_id, const std::string& query_text,
                           std::size_t k) const {
  if (k == 0) throw ValidationError("k must be at least 1");
  const auto query = keyword_preprocess(query_text).distinct();
  std::vector<RankedEntry> scored;
  for (const auto& [id, doc] : docs_) {
    std::size_t hits = 0;
    for (const auto& t : query) hits += doc.count(t);
    if (hits > 0) scored.push_back({id, static_cast<double>(hits)});
  }
  return make_ranking(query_id, std::move(scored), k);
}

Ranking keyword_rank(const std::string& query_text, const Repository& repo, std::size_t k,
                     const std::string& query_id) {
  return KeywordIndex(repo).rank(query_id, query_text, k);
}

// ---------------------------------------------------------------------------

namespace {

// Cuts at a UTF-8 code point boundary at or below max_chars.
std::string truncate_utf8(const std::string& s, std::size_t max_chars) {
  if (s.size() <= max_chars) return s;
  std::size_t end = max_chars;
  while (end > 0 && (static_cast<unsigned char>(s[end]) & 0xC0) == 0x80) --end;
  return s.substr(0, end);
}

}  // namespace

EmbeddingIndex::EmbeddingIndex(const Repository& repo, Embedder& embedder, EmbeddingIndexOptions opts)
    : embedder_(&embedder), opts_(opts) {
  std::vector<std::string> ids;
  std::vector<std::string> docs;
  for (const auto& [id, unit] : repo.units()) {
    auto text = function_text(unit);
    if (text.size() > opts_.max_chars) {
      std::cerr << "warning: document '" << id << "' truncated from " << text.size() << " to "
                << opts_.max_chars << " bytes before embedding\n";
      text = truncate_utf8(text, opts_.max_chars);
      ++truncated_;
    }
    ids.push_back(id);
    docs.push_back(std::move(text));
  }
  auto vectors = embed_intents(docs, embedder);
  for (std::size_t i = 0; i < ids.size(); ++i) vectors_[ids[i]] = std::move(vectors[i]);
}

Ranking EmbeddingIndex::rank(const std::string& query_id, const std::string& query_text,
                             std::size_t k) const {
  if (k == 0) throw ValidationError("k must be at least 1");
  const auto q = embed_intent(truncate_utf8(query_text, opts_.max_chars), *embedder_);
  std::vector<RankedEntry> scored;
  scored.reserve(vectors_.size());
  for (const auto& [id, v] : vectors_) scored.push_back({id, cosine_similarity(q, v)});
  return make_ranking(query_id, std::move(scored), k);
}

Ranking embedding_rank(const std::string& query_text, const Repository& repo, Embedder& embedder,
                       std::size_t k, const std::string& query_id) {
  return EmbeddingIndex(repo, embedder).rank(query_id, query_text, k);
}

// ---------------------------------------------------------------------------

VariantIndex::VariantIndex(const Repository& repo, ExtractionProvider& extractor, Embedder& embedder,
                           const ExtractOptions& opts)
    : extractor_(&extractor), embedder_(&embedder), opts_(opts) {
  for (const auto& [id, unit] : repo.units()) {
    std::string code;
    for (const auto& f : unit.files) {
      if (!code.empty()) code += '\n';
      code += f.content;
    }
    const auto intent = extract_intent_only(id, code, extractor, opts_);
    vectors_[id] = embed_intent(intent, embedder);
  }
}

VariantIndex::VariantIndex(const ReprStore& reps, ExtractionProvider& extractor, Embedder& embedder,
                           const ExtractOptions& opts)
    : extractor_(&extractor), embedder_(&embedder), opts_(opts) {
  for (const auto& [id, rep] : reps) {
    if (!rep.intent_vector) throw IntegrityError("function '" + id + "' has no intent vector");
    vectors_[id] = *rep.intent_vector;
  }
}

Recommendation VariantIndex::rank_vector(const std::string& query_id, const Vector& query_intent,
                                         std::size_t k) const {
  if (k == 0) throw ValidationError("k must be at least 1");
  const auto start = std::chrono::steady_clock::now();
  Recommendation rec;
  std::vector<RankedEntry> scored;
  scored.reserve(vectors_.size());
  for (const auto& [id, v] : vectors_) {
    scored.push_back({id, cosine_similarity(query_intent, v)});
    rec.candidates.ids.push_back(id);
    ++rec.similarity_evaluations;
  }
  rec.ranking = make_ranking(query_id, std::move(scored), k);
  rec.latency_ms =
      std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - start).count();
  return rec;
}

Recommendation VariantIndex::rank(const std::string& query_id, const std::string& query_text,
                                  std::size_t k) const {
  const auto intent = extract_intent_only(query_id, query_text, *extractor_, opts_);
  return rank_vector(query_id, embed_intent(intent, *embedder_), k);
}

Recommendation variant_rank(const std::string& query_text, const Repository& repo,
                            ExtractionProvider& extractor, Embedder& embedder, std::size_t k,
                            const std::string& query_id) {
  return VariantIndex(repo, extractor, embedder).rank(query_id, query_text, k);
}

}  // namespace fnreuse
