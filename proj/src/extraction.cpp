#include "fnreuse/extraction.hpp"

#include <array>
#include <atomic>
#include <cmath>
#include <mutex>
#include <thread>

#include "fnreuse/errors.hpp"
#include "json.hpp"
#include "text_util.hpp"

namespace fnreuse {

using nlohmann::json;

const char* attribute_kind_name(AttributeKind kind) {
  switch (kind) {
    case AttributeKind::kPlatform: return "platform";
    case AttributeKind::kService: return "service";
    case AttributeKind::kLanguage: return "language";
  }
  return "platform";
}

const AttributeSet& SemanticRepresentation::attribute(AttributeKind kind) const {
  switch (kind) {
    case AttributeKind::kPlatform: return platforms;
    case AttributeKind::kService: return services;
    case AttributeKind::kLanguage: return languages;
  }
  return platforms;
}

// ---------------------------------------------------------------------------
// Normalization table

std::map<std::string, std::string>& NormalizationTable::table(AttributeKind kind) {
  switch (kind) {
    case AttributeKind::kPlatform: return platforms_;
    case AttributeKind::kService: return services_;
    case AttributeKind::kLanguage: return languages_;
  }
  return platforms_;
}

const std::map<std::string, std::string>& NormalizationTable::table(AttributeKind kind) const {
  return const_cast<NormalizationTable*>(this)->table(kind);
}

void NormalizationTable::add_alias(AttributeKind kind, const std::string& alias,
                                   const std::string& canonical) {
  auto canon = detail::trim(canonical);
  if (canon.empty()) throw ValidationError("normalization table: empty canonical name");
  auto& t = table(kind);
  t[detail::to_lower(canon)] = canon;
  auto key = detail::to_lower(detail::trim(alias));
  if (!key.empty()) t[key] = canon;
}

std::optional<std::string> NormalizationTable::lookup(AttributeKind kind,
                                                      const std::string& term) const {
  const auto& t = table(kind);
  auto it = t.find(detail::to_lower(detail::trim(term)));
  if (it == t.end()) return std::nullopt;
  return it->second;
}

std::size_t NormalizationTable::size() const {
  return platforms_.size() + services_.size() + languages_.size();
}

NormalizationTable NormalizationTable::builtin() {
  struct Entry {
    AttributeKind kind;
    const char* canonical;
    std::vector<const char*> aliases;
  };
  const std::vector<Entry> entries = {
      {AttributeKind::kPlatform, "AWS Lambda", {"Lambda", "Amazon Lambda", "Amazon Web Services Lambda"}},
      {AttributeKind::kPlatform, "Google Cloud Functions", {"GCF", "Google Cloud Function", "Cloud Functions", "GCP Cloud Functions"}},
      {AttributeKind::kPlatform, "Azure Functions", {"Azure Function", "Microsoft Azure Functions"}},
      {AttributeKind::kPlatform, "Apache OpenWhisk", {"OpenWhisk"}},
      {AttributeKind::kService, "AWS S3", {"S3", "Amazon S3", "Amazon Simple Storage Service"}},
      {AttributeKind::kService, "AWS Rekognition", {"Rekognition", "Amazon Rekognition"}},
      {AttributeKind::kService, "AWS DynamoDB", {"DynamoDB", "Amazon DynamoDB"}},
      {AttributeKind::kService, "AWS SNS", {"SNS", "Amazon SNS"}},
      {AttributeKind::kService, "AWS SQS", {"SQS", "Amazon SQS"}},
      {AttributeKind::kService, "AWS API Gateway", {"API Gateway", "Amazon API Gateway"}},
      {AttributeKind::kService, "Google Firestore", {"Firestore", "Cloud Firestore", "Google Cloud Firestore"}},
      {AttributeKind::kService, "Google Cloud Storage", {"GCS", "Cloud Storage"}},
      {AttributeKind::kService, "Google Pub/Sub", {"PubSub", "Pub/Sub", "Cloud Pub/Sub", "Google Cloud Pub/Sub"}},
      {AttributeKind::kService, "Azure Blob Storage", {"Blob Storage", "Azure Blob"}},
      {AttributeKind::kService, "Azure Cosmos DB", {"Cosmos DB", "CosmosDB"}},
      {AttributeKind::kLanguage, "JavaScript", {"JS", "Node.js", "NodeJS"}},
      {AttributeKind::kLanguage, "TypeScript", {"TS"}},
      {AttributeKind::kLanguage, "Go", {"Golang"}},
      {AttributeKind::kLanguage, "C#", {"C Sharp", "CSharp"}},
      {AttributeKind::kLanguage, "Python", {"Py", "Python3"}},
      {AttributeKind::kLanguage, "Java", {}},
      {AttributeKind::kLanguage, "Ruby", {"rb"}},
  };
  NormalizationTable t;
  for (const auto& e : entries) {
    t.add_alias(e.kind, e.canonical, e.canonical);
    for (const char* a : e.aliases) t.add_alias(e.kind, a, e.canonical);
  }
  return t;
}

NormalizationTable NormalizationTable::from_json(const std::string& text) {
  json doc;
  try {
    doc = json::parse(text);
  } catch (const json::parse_error& e) {
    throw ParseError(std::string("normalization table: ") + e.what(), 0, e.byte);
  }
  if (!doc.is_object()) throw ParseError("normalization table: expected a JSON object");
  NormalizationTable t;
  const std::pair<const char*, AttributeKind> categories[] = {
      {"platform", AttributeKind::kPlatform},
      {"service", AttributeKind::kService},
      {"language", AttributeKind::kLanguage}};
  try {
    for (const auto& [key, kind] : categories) {
      if (!doc.contains(key)) continue;
      for (const auto& [alias, canonical] : doc.at(key).items())
        t.add_alias(kind, alias, canonical.get<std::string>());
    }
  } catch (const json::exception& e) {
    throw ParseError(std::string("normalization table: ") + e.what());
  }
  return t;
}

NormalizationTable NormalizationTable::from_json_file(const std::filesystem::path& path) {
  return from_json(detail::read_file(path));
}

// ---------------------------------------------------------------------------
// Prompt

PromptConfig PromptConfig::defaults() {
  PromptConfig cfg;
  cfg.role_preamble = "You are an expert writing serverless functions.";
  cfg.task_instruction =
      "Analyze the serverless function code or task description below and extract:\n"
      "1. Intent Summary: a concise natural-language summary of what it accomplishes.\n"
      "2. Serverless Platforms: the serverless platforms used "
      "(for example, AWS Lambda, Google Cloud Functions).\n"
      "3. Cloud Services: the cloud services employed "
      "(for example, AWS S3, Google Firestore).\n"
      "4. Programming Languages: the programming languages adopted "
      "(for example, Python, JavaScript).";
  cfg.guideline_notes =
      "Notes:\n"
      "- Serverless Framework is a development framework rather than a serverless "
      "platform; never report it as a platform.\n"
      "- Using a platform's cloud services or its handler interface implies that "
      "serverless platform, even when it is not declared explicitly.";
  cfg.response_format_spec =
      "Respond in exactly this format:\n"
      "Intent Summary: <summary>\n"
      "Serverless Platforms: <comma-separated list>\n"
      "Cloud Services: <comma-separated list>\n"
      "Programming Languages: <comma-separated list>\n"
      "Return \"None\" when no relevant serverless platform, cloud service, or "
      "programming language can be identified.";
  return cfg;
}

PromptConfig PromptConfig::intent_only() {
  PromptConfig cfg;
  cfg.role_preamble = "You are an expert writing serverless functions.";
  cfg.task_instruction =
      "Summarize the intent of the serverless function code or task description "
      "below in one concise natural-language paragraph.";
  cfg.guideline_notes =
      "Notes:\n"
      "- Describe what the code or task accomplishes.\n"
      "- Do not list serverless platforms, cloud services or programming languages "
      "separately.";
  cfg.response_format_spec =
      "Respond in exactly this format:\n"
      "Intent Summary: <summary>";
  return cfg;
}

std::string build_prompt(const std::string& subject, const PromptConfig& cfg) {
  if (detail::trim_view(subject).empty()) throw ValidationError("prompt subject is empty");
  const std::pair<const char*, const std::string*> parts[] = {
      {"role_preamble", &cfg.role_preamble},
      {"task_instruction", &cfg.task_instruction},
      {"guideline_notes", &cfg.guideline_notes},
      {"response_format_spec", &cfg.response_format_spec}};
  for (const auto& [name, text] : parts)
    if (detail::trim_view(*text).empty())
      throw ValidationError(std::string("prompt part '") + name + "' is empty");

  std::string out;
  out.reserve(subject.size() + 1024);
  out += cfg.role_preamble;
  out += ' ';
  out += cfg.task_instruction;
  out += "\n\n";
  out += cfg.guideline_notes;
  out += "\n\n";
  out += cfg.response_format_spec;
  out += "\n\nInput:\n";
  out += subject;
  return out;
}

// ---------------------------------------------------------------------------
// Response parsing

namespace {

struct SectionSpec {
  const char* label;
  std::vector<const char*> tolerant_aliases;
};

const SectionSpec kSections[] = {
    {kIntentLabel, {"Intent Summary", "Intent"}},
    {kPlatformsLabel, {"Serverless Platforms", "Serverless Platform"}},
    {kServicesLabel, {"Cloud Services", "Cloud Service"}},
    {kLanguagesLabel, {"Programming Languages", "Programming Language"}},
};

bool is_decoration(char c) { return c == '*' || c == '_' || c == '#' || c == '`'; }

// Returns (section index, remainder of the line) when `line` opens a section.
std::optional<std::pair<int, std::string>> match_label(std::string_view line, bool strict) {
  std::string_view s = line;
  if (!strict) {
    s = detail::trim_view(s);
    // bullets, headings, emphasis, "1." / "2)" numbering
    while (!s.empty() && (is_decoration(s.front()) || s.front() == '-' || s.front() == '>' ||
                          s.front() == ' ' || s.front() == '\t'))
      s.remove_prefix(1);
    std::size_t digits = 0;
    while (digits < s.size() && std::isdigit(static_cast<unsigned char>(s[digits]))) ++digits;
    if (digits > 0 && digits < s.size() && (s[digits] == '.' || s[digits] == ')')) {
      s.remove_prefix(digits + 1);
      while (!s.empty() && (is_decoration(s.front()) || s.front() == ' ')) s.remove_prefix(1);
    }
  }
  for (int i = 0; i < 4; ++i) {
    std::vector<const char*> names = {kSections[i].label};
    if (!strict) names = kSections[i].tolerant_aliases;
    for (const char* name : names) {
      std::string_view n(name);
      if (!detail::starts_with_ci(s, n)) continue;
      std::string_view rest = s.substr(n.size());
      if (!strict)
        while (!rest.empty() && (is_decoration(rest.front()) || rest.front() == ' ')) rest.remove_prefix(1);
      if (rest.empty() || rest.front() != ':') continue;
      rest.remove_prefix(1);
      if (!strict)
        while (!rest.empty() && (is_decoration(rest.front()) || rest.front() == ' ')) rest.remove_prefix(1);
      return std::make_pair(i, std::string(rest));
    }
  }
  return std::nullopt;
}

std::array<std::optional<std::string>, 4> split_sections(const std::string& response, bool strict) {
  std::array<std::optional<std::string>, 4> sections;
  int current = -1;
  for (auto line : detail::split_lines(response)) {
    if (auto m = match_label(line, strict)) {
      current = m->first;
      auto& slot = sections[current];
      if (slot)
        *slot += "\n" + m->second;
      else
        slot = m->second;
      continue;
    }
    if (current >= 0) {
      *sections[current] += "\n";
      *sections[current] += line;
    }
  }
  return sections;
}

bool is_none_item(std::string_view item) {
  if (!detail::starts_with_ci(item, "none")) return false;
  if (item.size() == 4) return true;
  return !std::isalnum(static_cast<unsigned char>(item[4]));
}

std::string clean_item(std::string_view item) {
  item = detail::trim_view(item);
  // list bullets
  if (item.size() >= 2 && (item[0] == '-' || item[0] == '*' || item[0] == '+') && item[1] == ' ')
    item.remove_prefix(2);
  std::size_t digits = 0;
  while (digits < item.size() && std::isdigit(static_cast<unsigned char>(item[digits]))) ++digits;
  if (digits > 0 && digits + 1 < item.size() && (item[digits] == '.' || item[digits] == ')') &&
      item[digits + 1] == ' ')
    item.remove_prefix(digits + 2);
  auto strip = [](char c) { return is_decoration(c) || c == '"' || c == '\'' || c == ' ' || c == '\t'; };
  while (!item.empty() && strip(item.front())) item.remove_prefix(1);
  // A trailing '#' belongs to the name (C#, F#).
  while (!item.empty() && item.back() != '#' && (strip(item.back()) || item.back() == '.')) item.remove_suffix(1);
  return std::string(item);
}

AttributeSet split_list(const std::string& section) {
  AttributeSet out;
  std::string token;
  auto flush = [&] {
    auto item = clean_item(token);
    token.clear();
    if (item.empty() || is_none_item(item)) return;
    out.insert(std::move(item));
  };
  for (char c : section) {
    if (c == ',' || c == ';' || c == '\n') {
      flush();
    } else {
      token += c;
    }
  }
  flush();
  return out;
}

std::string clean_intent(const std::string& section) {
  auto t = detail::trim_view(section);
  while (!t.empty() && t.back() != '#' && is_decoration(t.back())) t.remove_suffix(1);
  t = detail::trim_view(t);
  if (t.size() >= 2 && t.front() == '"' && t.back() == '"') t = t.substr(1, t.size() - 2);
  return detail::trim(t);
}

}  // namespace

RawExtraction parse_extraction(const std::string& response, const ParseOptions& opts) {
  auto sections = split_sections(response, opts.strict);
  for (int i = 0; i < 4; ++i)
    if (!sections[i]) throw MalformedResponseError(kSections[i].label);
  RawExtraction raw;
  raw.intent_summary = clean_intent(*sections[0]);
  raw.platforms_raw = split_list(*sections[1]);
  raw.services_raw = split_list(*sections[2]);
  raw.languages_raw = split_list(*sections[3]);
  return raw;
}

std::string parse_intent_only(const std::string& response, const ParseOptions& opts) {
  auto sections = split_sections(response, opts.strict);
  std::string intent = sections[0] ? clean_intent(*sections[0]) : detail::trim(response);
  if (intent.empty()) throw MalformedResponseError(kIntentLabel);
  return intent;
}

std::string render_extraction(const RawExtraction& raw) {
  auto list = [](const AttributeSet& s) {
    if (s.empty()) return std::string("None");
    std::string out;
    for (const auto& item : s) {
      if (!out.empty()) out += ", ";
      out += item;
    }
    return out;
  };
  std::string out;
  out += std::string(kIntentLabel) + ": " + raw.intent_summary + "\n";
  out += std::string(kPlatformsLabel) + ": " + list(raw.platforms_raw) + "\n";
  out += std::string(kServicesLabel) + ": " + list(raw.services_raw) + "\n";
  out += std::string(kLanguagesLabel) + ": " + list(raw.languages_raw) + "\n";
  return out;
}

NormalizedExtraction normalize(const RawExtraction& raw, const NormalizationTable& table) {
  NormalizedExtraction out;
  out.intent_text = detail::trim(raw.intent_summary);
  auto map_into = [&](AttributeKind kind, const AttributeSet& in, AttributeSet& dst) {
    for (const auto& term : in) {
      auto t = detail::trim(term);
      if (t.empty() || is_none_item(t)) continue;
      if (auto canon = table.lookup(kind, t)) {
        dst.insert(*canon);
      } else {
        out.unmapped.push_back({kind, t});
        dst.insert(std::move(t));
      }
    }
  };
  map_into(AttributeKind::kPlatform, raw.platforms_raw, out.platforms);
  map_into(AttributeKind::kService, raw.services_raw, out.services);
  map_into(AttributeKind::kLanguage, raw.languages_raw, out.languages);
  return out;
}

// ---------------------------------------------------------------------------
// Providers

namespace {

AttributeSet string_set(const json& j, const char* key) {
  AttributeSet out;
  if (!j.contains(key) || j.at(key).is_null()) return out;
  for (const auto& v : j.at(key)) out.insert(v.get<std::string>());
  return out;
}

}  // namespace

FixtureExtractor::FixtureExtractor(std::map<std::string, RawExtraction> records, std::string model)
    : records_(std::move(records)), model_(std::move(model)) {}

FixtureExtractor FixtureExtractor::from_file(const std::filesystem::path& path) {
  const auto text = detail::read_file(path);
  std::map<std::string, RawExtraction> records;
  std::size_t line_no = 0;
  for (auto line : detail::split_lines(text)) {
    ++line_no;
    if (detail::trim_view(line).empty()) continue;
    try {
      auto j = json::parse(line);
      RawExtraction raw;
      auto id = j.at("id").get<std::string>();
      raw.intent_summary = j.at("intent_text").get<std::string>();
      raw.platforms_raw = string_set(j, "platforms");
      raw.services_raw = string_set(j, "services");
      raw.languages_raw = string_set(j, "languages");
      records[id] = std::move(raw);
    } catch (const json::exception& e) {
      throw ParseError(path.string() + ":" + std::to_string(line_no) + ": " + e.what(), line_no);
    }
  }
  return FixtureExtractor(std::move(records));
}

std::string FixtureExtractor::complete(const std::string& subject_id, const std::string&) {
  auto it = records_.find(subject_id);
  if (it == records_.end())
    throw Error("fixture extractor has no record for '" + subject_id + "'");
  return render_extraction(it->second);
}

SemanticRepresentation extract(const std::string& subject_id, const std::string& subject,
                               ExtractionProvider& provider, const NormalizationTable& table,
                               const ExtractOptions& opts) {
  const auto prompt = build_prompt(subject, opts.prompt);
  const int attempts = std::max(1, opts.max_attempts);
  std::string last;
  for (int attempt = 1; attempt <= attempts; ++attempt) {
    last = provider.complete(subject_id, prompt);
    try {
      auto norm = normalize(parse_extraction(last, opts.parse), table);
      SemanticRepresentation rep;
      rep.subject_id = subject_id;
      rep.intent_text = std::move(norm.intent_text);
      rep.platforms = std::move(norm.platforms);
      rep.services = std::move(norm.services);
      rep.languages = std::move(norm.languages);
      rep.provenance = {provider.name(), provider.model(), provider.temperature()};
      return rep;
    } catch (const MalformedResponseError&) {
    }
  }
  throw ExtractionFailedError(subject_id, attempts, last);
}

std::string extract_intent_only(const std::string& subject_id, const std::string& subject,
                                ExtractionProvider& provider, const ExtractOptions& opts) {
  const auto prompt = build_prompt(subject, PromptConfig::intent_only());
  const int attempts = std::max(1, opts.max_attempts);
  std::string last;
  for (int attempt = 1; attempt <= attempts; ++attempt) {
    last = provider.complete(subject_id, prompt);
    try {
      return parse_intent_only(last, opts.parse);
    } catch (const MalformedResponseError&) {
    }
  }
  throw ExtractionFailedError(subject_id, attempts, last);
}

// ---------------------------------------------------------------------------
// Embedding

namespace {

std::uint64_t fnv1a64(std::string_view s) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : s) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  return h;
}

std::uint64_t splitmix64(std::uint64_t& state) {
  std::uint64_t z = (state += 0x9e3779b97f4a7c15ULL);
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

std::map<std::string, int> token_counts(const std::string& text) {
  std::map<std::string, int> counts;
  std::string token;
  for (char ch : text) {
    auto c = static_cast<unsigned char>(ch);
    if (std::isalnum(c) || c >= 0x80) {
      token += static_cast<char>(std::tolower(c));
    } else if (!token.empty()) {
      ++counts[token];
      token.clear();
    }
  }
  if (!token.empty()) ++counts[token];
  return counts;
}

}  // namespace

DeterministicEmbedder::DeterministicEmbedder(std::size_t dimension, std::uint64_t seed)
    : dimension_(dimension), seed_(seed) {
  if (dimension_ == 0) throw ValidationError("embedding dimension must be positive");
}

Vector DeterministicEmbedder::embed_one(const std::string& text) const {
  auto counts = token_counts(text);
  if (counts.empty()) counts[text] = 1;
  Vector v(dimension_, 0.0);
  for (const auto& [token, count] : counts) {
    std::uint64_t state = fnv1a64(token) ^ seed_;
    std::uint64_t bits = 0;
    for (std::size_t i = 0; i < dimension_; ++i) {
      if (i % 64 == 0) bits = splitmix64(state);
      v[i] += ((bits >> (i % 64)) & 1U) ? count : -count;
    }
  }
  return normalized(std::move(v));
}

std::vector<Vector> DeterministicEmbedder::embed(const std::vector<std::string>& texts) {
  std::vector<Vector> out;
  out.reserve(texts.size());
  for (const auto& t : texts) out.push_back(embed_one(t));
  return out;
}

Vector normalized(Vector v) {
  double sq = 0.0;
  for (double x : v) sq += x * x;
  const double norm = std::sqrt(sq);
  if (!(norm > 0.0) || !std::isfinite(norm))
    throw IntegrityError("cannot normalize a zero or non-finite vector");
  for (double& x : v) x /= norm;
  return v;
}

std::vector<Vector> embed_intents(const std::vector<std::string>& texts, Embedder& embedder,
                                  std::optional<std::size_t> expected_dim) {
  for (const auto& t : texts)
    if (detail::trim_view(t).empty()) throw ValidationError("intent text is empty");
  if (texts.empty()) return {};
  const std::size_t dim = expected_dim.value_or(embedder.dimension());
  auto vectors = embedder.embed(texts);
  if (vectors.size() != texts.size())
    throw IntegrityError("embedder returned " + std::to_string(vectors.size()) +
                         " vectors for " + std::to_string(texts.size()) + " texts");
  for (auto& v : vectors) {
    if (v.size() != dim) throw DimensionMismatchError(dim, v.size());
    v = normalized(std::move(v));
  }
  return vectors;
}

Vector embed_intent(const std::string& intent_text, Embedder& embedder,
                    std::optional<std::size_t> expected_dim) {
  return embed_intents({intent_text}, embedder, expected_dim).front();
}

std::vector<BatchOutcome> extract_batch(const std::vector<BatchSubject>& subjects,
                                        ExtractionProvider& provider, Embedder& embedder,
                                        const NormalizationTable& table,
                                        const ExtractOptions& opts, std::size_t max_inflight) {
  std::vector<BatchOutcome> outcomes(subjects.size());
  std::atomic<std::size_t> next{0};
  auto worker = [&] {
    for (std::size_t i = next++; i < subjects.size(); i = next++) {
      auto& out = outcomes[i];
      out.id = subjects[i].id;
      try {
        auto rep = extract(subjects[i].id, subjects[i].text, provider, table, opts);
        rep.intent_vector = embed_intent(rep.intent_text, embedder);
        out.representation = std::move(rep);
      } catch (const std::exception& e) {
        out.error = e.what();
      }
    }
  };
  const std::size_t n = std::min(std::max<std::size_t>(1, max_inflight), subjects.size());
  {
    std::vector<std::jthread> pool;
    for (std::size_t t = 0; t < n; ++t) pool.emplace_back(worker);
  }
  return outcomes;
}

// ---------------------------------------------------------------------------
// Representation store

std::string repr_to_json_line(const SemanticRepresentation& rep) {
  json j;
  j["id"] = rep.subject_id;
  j["intent_text"] = rep.intent_text;
  if (rep.intent_vector) j["intent_vector"] = *rep.intent_vector;
  j["platforms"] = rep.platforms;
  j["services"] = rep.services;
  j["languages"] = rep.languages;
  j["provenance"] = {{"extractor", rep.provenance.extractor},
                     {"model", rep.provenance.model},
                     {"temperature", rep.provenance.temperature}};
  return j.dump();
}

SemanticRepresentation repr_from_json_line(const std::string& line) {
  json j;
  try {
    j = json::parse(line);
  } catch (const json::parse_error& e) {
    throw ParseError(e.what(), 0, e.byte);
  }
  try {
    SemanticRepresentation rep;
    rep.subject_id = j.at("id").get<std::string>();
    rep.intent_text = j.at("intent_text").get<std::string>();
    if (j.contains("intent_vector") && !j["intent_vector"].is_null())
      rep.intent_vector = j["intent_vector"].get<Vector>();
    rep.platforms = string_set(j, "platforms");
    rep.services = string_set(j, "services");
    rep.languages = string_set(j, "languages");
    if (j.contains("provenance")) {
      const auto& p = j["provenance"];
      rep.provenance.extractor = p.value("extractor", "");
      rep.provenance.model = p.value("model", "");
      rep.provenance.temperature = p.value("temperature", 0.0);
    }
    return rep;
  } catch (const json::exception& e) {
    throw ParseError(std::string("malformed representation: ") + e.what());
  }
}

ReprStore parse_repr_store(const std::string& text) {
  ReprStore store;
  std::size_t line_no = 0;
  for (auto line : detail::split_lines(text)) {
    ++line_no;
    if (detail::trim_view(line).empty()) continue;
    try {
      auto rep = repr_from_json_line(std::string(line));
      auto id = rep.subject_id;
      store[id] = std::move(rep);
    } catch (const ParseError& e) {
      throw ParseError("line " + std::to_string(line_no) + ": " + e.what(), line_no);
    }
  }
  return store;
}

ReprStore load_repr_store(const std::filesystem::path& path) {
  if (!std::filesystem::exists(path)) throw ConfigError("representation store not found: " + path.string());
  try {
    return parse_repr_store(detail::read_file(path));
  } catch (const ParseError& e) {
    throw ParseError(path.string() + ": " + e.what(), e.line());
  }
}

std::string dump_repr_store(const ReprStore& store) {
  std::string out;
  for (const auto& [id, rep] : store) {
    out += repr_to_json_line(rep);
    out += '\n';
  }
  return out;
}

void save_repr_store(const ReprStore& store, const std::filesystem::path& path) {
  detail::write_file(path, dump_repr_store(store));
}

}  // namespace fnreuse
