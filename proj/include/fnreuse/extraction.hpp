#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <utility>
#include <vector>

namespace fnreuse {

using AttributeSet = std::set<std::string>;
using Vector = std::vector<double>;

inline constexpr std::size_t kDefaultEmbeddingDim = 384;

enum class AttributeKind { kPlatform, kService, kLanguage };

// "platform", "service", "language"
const char* attribute_kind_name(AttributeKind kind);

struct Provenance {
  std::string extractor;
  std::string model;
  double temperature = 0.0;

  bool operator==(const Provenance&) const = default;
};

// Quadruple {intent, platforms, services, languages} describing a function or
// a task query. The intent vector is unit-norm when present.
struct SemanticRepresentation {
  std::string subject_id;
  std::string intent_text;
  std::optional<Vector> intent_vector;
  AttributeSet platforms;
  AttributeSet services;
  AttributeSet languages;
  Provenance provenance;

  const AttributeSet& attribute(AttributeKind kind) const;
  bool operator==(const SemanticRepresentation&) const = default;
};

// Verbatim four-section extractor output, before terminology mapping.
struct RawExtraction {
  std::string intent_summary;
  AttributeSet platforms_raw;
  AttributeSet services_raw;
  AttributeSet languages_raw;

  bool operator==(const RawExtraction&) const = default;
};

// Alias -> canonical name per attribute category. Lookups ignore case and
// every canonical name maps to itself.
class NormalizationTable {
 public:
  NormalizationTable() = default;

  void add_alias(AttributeKind kind, const std::string& alias, const std::string& canonical);
  std::optional<std::string> lookup(AttributeKind kind, const std::string& term) const;
  std::size_t size() const;

  // Ships with the common serverless platforms, cloud services and language
  // aliases (JS -> JavaScript, s3 -> AWS S3, ...).
  static NormalizationTable builtin();
  // {"platform": {alias: canonical}, "service": {...}, "language": {...}}
  static NormalizationTable from_json(const std::string& text);
  static NormalizationTable from_json_file(const std::filesystem::path& path);

 private:
  std::map<std::string, std::string>& table(AttributeKind kind);
  const std::map<std::string, std::string>& table(AttributeKind kind) const;

  std::map<std::string, std::string> platforms_;
  std::map<std::string, std::string> services_;
  std::map<std::string, std::string> languages_;
};

struct PromptConfig {
  std::string role_preamble;
  std::string task_instruction;
  std::string guideline_notes;
  std::string response_format_spec;

  // Full quadruple extraction prompt.
  static PromptConfig defaults();
  // Intent-summary-only prompt used by the no-pruning baseline.
  static PromptConfig intent_only();
};

// Renders task description, guideline notes, response format and finally the
// subject verbatim. Throws ValidationError on an empty subject or part.
std::string build_prompt(const std::string& subject, const PromptConfig& cfg = PromptConfig::defaults());

struct ParseOptions {
  // Strict mode accepts only undecorated "Label:" lines.
  bool strict = false;
};

inline constexpr const char* kIntentLabel = "Intent Summary";
inline constexpr const char* kPlatformsLabel = "Serverless Platforms";
inline constexpr const char* kServicesLabel = "Cloud Services";
inline constexpr const char* kLanguagesLabel = "Programming Languages";

// Throws MalformedResponseError naming the first missing section.
RawExtraction parse_extraction(const std::string& response, const ParseOptions& opts = {});
// Intent text of an intent-only reply: the "Intent Summary" section when
// present, otherwise the whole trimmed reply. Throws MalformedResponseError
// when empty.
std::string parse_intent_only(const std::string& response, const ParseOptions& opts = {});
// Canonical four-section text; parse_extraction(render_extraction(x)) == x.
std::string render_extraction(const RawExtraction& raw);

struct UnmappedTerm {
  AttributeKind kind;
  std::string term;

  bool operator==(const UnmappedTerm&) const = default;
};

struct NormalizedExtraction {
  std::string intent_text;
  AttributeSet platforms;
  AttributeSet services;
  AttributeSet languages;
  std::vector<UnmappedTerm> unmapped;
};

NormalizedExtraction normalize(const RawExtraction& raw, const NormalizationTable& table);

// Something that answers extraction prompts: a remote chat model or a fixture
// file. Implementations must be safe to call from several threads.
class ExtractionProvider {
 public:
  virtual ~ExtractionProvider() = default;
  virtual std::string complete(const std::string& subject_id, const std::string& prompt) = 0;
  virtual std::string name() const = 0;
  virtual std::string model() const = 0;
  virtual double temperature() const = 0;
};

// Replays recorded extractions keyed by subject id. The file uses the
// representation-store line format without "intent_vector".
class FixtureExtractor : public ExtractionProvider {
 public:
  explicit FixtureExtractor(std::map<std::string, RawExtraction> records,
                            std::string model = "fixture");
  static FixtureExtractor from_file(const std::filesystem::path& path);

  std::string complete(const std::string& subject_id, const std::string& prompt) override;
  std::string name() const override { return "fixture"; }
  std::string model() const override { return model_; }
  double temperature() const override { return 0.0; }

  const std::map<std::string, RawExtraction>& records() const { return records_; }

 private:
  std::map<std::string, RawExtraction> records_;
  std::string model_;
};

struct ExtractOptions {
  PromptConfig prompt = PromptConfig::defaults();
  ParseOptions parse;
  // Total attempts when the reply is malformed.
  int max_attempts = 3;
};

// build_prompt -> provider -> parse_extraction -> normalize. The result has no
// intent vector.
SemanticRepresentation extract(const std::string& subject_id, const std::string& subject,
                               ExtractionProvider& provider, const NormalizationTable& table,
                               const ExtractOptions& opts = {});

std::string extract_intent_only(const std::string& subject_id, const std::string& subject,
                                ExtractionProvider& provider, const ExtractOptions& opts = {});

// Text -> vector provider. Implementations must be thread-safe.
class Embedder {
 public:
  virtual ~Embedder() = default;
  virtual std::size_t dimension() const = 0;
  virtual std::vector<Vector> embed(const std::vector<std::string>& texts) = 0;
  virtual std::string name() const = 0;
};

// Network-free stand-in for a sentence encoder: lower-cased alphanumeric token
// counts pushed through a seeded +-1 random projection. Output depends only on
// the text, the dimension and the seed.
class DeterministicEmbedder : public Embedder {
 public:
  static constexpr std::uint64_t kDefaultSeed = 0x5eed5a11f00dULL;

  explicit DeterministicEmbedder(std::size_t dimension = kDefaultEmbeddingDim,
                                 std::uint64_t seed = kDefaultSeed);

  std::size_t dimension() const override { return dimension_; }
  std::vector<Vector> embed(const std::vector<std::string>& texts) override;
  std::string name() const override { return "deterministic"; }

  Vector embed_one(const std::string& text) const;

 private:
  std::size_t dimension_;
  std::uint64_t seed_;
};

// Provider vector re-normalized to unit length. Throws ValidationError on empty
// text and DimensionMismatchError when the provider disagrees with
// `expected_dim` (defaults to the embedder's own dimension).
Vector embed_intent(const std::string& intent_text, Embedder& embedder,
                    std::optional<std::size_t> expected_dim = std::nullopt);
std::vector<Vector> embed_intents(const std::vector<std::string>& texts, Embedder& embedder,
                                  std::optional<std::size_t> expected_dim = std::nullopt);

Vector normalized(Vector v);

struct BatchSubject {
  std::string id;
  std::string text;
};

struct BatchOutcome {
  std::string id;
  std::optional<SemanticRepresentation> representation;
  std::string error;
};

// Extracts and embeds every subject with at most `max_inflight` extractions
// running at once. Outcomes come back in input order; a failure is recorded
// per subject rather than thrown.
std::vector<BatchOutcome> extract_batch(const std::vector<BatchSubject>& subjects,
                                        ExtractionProvider& provider, Embedder& embedder,
                                        const NormalizationTable& table,
                                        const ExtractOptions& opts = {},
                                        std::size_t max_inflight = 4);

// Representation store: one JSON object per line, keyed by subject id.
using ReprStore = std::map<std::string, SemanticRepresentation>;

std::string repr_to_json_line(const SemanticRepresentation& rep);
SemanticRepresentation repr_from_json_line(const std::string& line);
ReprStore load_repr_store(const std::filesystem::path& path);
ReprStore parse_repr_store(const std::string& text);
std::string dump_repr_store(const ReprStore& store);
void save_repr_store(const ReprStore& store, const std::filesystem::path& path);

}  // namespace fnreuse
