#include <cmath>
#include <mutex>

#include "doctest.h"
#include "fnreuse/errors.hpp"
#include "fnreuse/extraction.hpp"
#include "json.hpp"
#include "test_support.hpp"

using namespace fnreuse;
using fnreuse::testing::data_dir;
using fnreuse::testing::slurp;
using fnreuse::testing::TempDir;

namespace {

AttributeSet as_set(const nlohmann::json& j) { return j.get<AttributeSet>(); }

double dot(const Vector& a, const Vector& b) {
  double s = 0;
  for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
  return s;
}

// Replies from a script, one entry per call, repeating the last one.
class ScriptedProvider : public ExtractionProvider {
 public:
  explicit ScriptedProvider(std::vector<std::string> replies) : replies_(std::move(replies)) {}
  std::string complete(const std::string&, const std::string& prompt) override {
    std::lock_guard lock(mu_);
    last_prompt = prompt;
    auto i = std::min(calls++, replies_.size() - 1);
    return replies_[i];
  }
  std::string name() const override { return "scripted"; }
  std::string model() const override { return "script-1"; }
  double temperature() const override { return 0.0; }

  std::size_t calls = 0;
  std::string last_prompt;

 private:
  std::mutex mu_;
  std::vector<std::string> replies_;
};

const char* kGood =
    "Intent Summary: Tags images.\nServerless Platforms: Lambda\nCloud Services: S3, Rekognition\n"
    "Programming Languages: C Sharp\n";

}  // namespace

TEST_CASE("parse golden fixtures") {
  const auto dir = data_dir() / "parse";
  const auto expected = nlohmann::json::parse(slurp(dir / "expected.json"));
  REQUIRE(expected.size() >= 12);
  for (const auto& [file, exp] : expected.items()) {
    CAPTURE(file);
    const auto text = slurp(dir / file);
    REQUIRE_FALSE(text.empty());
    if (exp.contains("error")) {
      try {
        parse_extraction(text);
        FAIL("expected MalformedResponseError");
      } catch (const MalformedResponseError& e) {
        CHECK(e.missing_label() == exp["error"].get<std::string>());
      }
      continue;
    }
    const auto raw = parse_extraction(text);
    CHECK(raw.intent_summary == exp["intent"].get<std::string>());
    CHECK(raw.platforms_raw == as_set(exp["platforms"]));
    CHECK(raw.services_raw == as_set(exp["services"]));
    CHECK(raw.languages_raw == as_set(exp["languages"]));
  }
}

TEST_CASE("strict parsing rejects decorated labels") {
  const auto text = slurp(data_dir() / "parse" / "02_markdown_bold.txt");
  CHECK_THROWS_AS(parse_extraction(text, {.strict = true}), MalformedResponseError);
  const auto plain = slurp(data_dir() / "parse" / "01_well_formed.txt");
  CHECK(parse_extraction(plain, {.strict = true}).platforms_raw == AttributeSet{"AWS Lambda"});
}

TEST_CASE("render and parse round-trip") {
  RawExtraction raw;
  raw.intent_summary = "Multi\nline intent.";
  raw.platforms_raw = {"AWS Lambda"};
  raw.languages_raw = {"Go", "Python"};
  CHECK(parse_extraction(render_extraction(raw)).intent_summary == raw.intent_summary);
  auto back = parse_extraction(render_extraction(raw));
  CHECK(back.platforms_raw == raw.platforms_raw);
  CHECK(back.services_raw.empty());
  CHECK(back.languages_raw == raw.languages_raw);
}

TEST_CASE("parse_intent_only") {
  CHECK(parse_intent_only("Intent Summary: Resizes images.\n") == "Resizes images.");
  CHECK(parse_intent_only("  Resizes images.  ") == "Resizes images.");
  CHECK_THROWS_AS(parse_intent_only("   "), MalformedResponseError);
}

TEST_CASE("normalization maps aliases case-insensitively") {
  const auto table = NormalizationTable::builtin();
  CHECK(table.lookup(AttributeKind::kLanguage, "JS") == "JavaScript");
  CHECK(table.lookup(AttributeKind::kLanguage, "node.js") == "JavaScript");
  CHECK(table.lookup(AttributeKind::kService, "Amazon S3") == "AWS S3");
  CHECK(table.lookup(AttributeKind::kService, "s3") == "AWS S3");
  CHECK(table.lookup(AttributeKind::kPlatform, "aws lambda") == "AWS Lambda");
  CHECK_FALSE(table.lookup(AttributeKind::kPlatform, "S3").has_value());

  RawExtraction raw;
  raw.intent_summary = "  x  ";
  raw.platforms_raw = {"Lambda"};
  raw.services_raw = {"Amazon Rekognition", "Amazon Textract"};
  raw.languages_raw = {"golang", "None"};
  auto n = normalize(raw, table);
  CHECK(n.intent_text == "x");
  CHECK(n.platforms == AttributeSet{"AWS Lambda"});
  CHECK(n.services == AttributeSet{"AWS Rekognition", "Amazon Textract"});
  CHECK(n.languages == AttributeSet{"Go"});
  REQUIRE(n.unmapped.size() == 1);
  CHECK(n.unmapped[0] == UnmappedTerm{AttributeKind::kService, "Amazon Textract"});
}

TEST_CASE("normalization table from JSON") {
  auto t = NormalizationTable::from_json(R"({"platform": {"OW": "Apache OpenWhisk"}, "language": {"py": "Python"}})");
  CHECK(t.lookup(AttributeKind::kPlatform, "ow") == "Apache OpenWhisk");
  CHECK(t.lookup(AttributeKind::kPlatform, "apache openwhisk") == "Apache OpenWhisk");
  CHECK(t.lookup(AttributeKind::kLanguage, "PY") == "Python");
  CHECK_THROWS_AS(NormalizationTable::from_json("{"), ParseError);
  CHECK_THROWS_AS(NormalizationTable::from_json("[1]"), ParseError);
}

TEST_CASE("prompt layout") {
  const auto cfg = PromptConfig::defaults();
  const std::string subject = "exports.handler = async () => {}";
  const auto p = build_prompt(subject, cfg);

  const auto role = p.find(cfg.role_preamble);
  const auto task = p.find(cfg.task_instruction);
  const auto notes = p.find(cfg.guideline_notes);
  const auto format = p.find(cfg.response_format_spec);
  const auto input = p.rfind(subject);
  REQUIRE(role == 0);
  CHECK(role < task);
  CHECK(task < notes);
  CHECK(notes < format);
  CHECK(format < input);
  CHECK(input + subject.size() == p.size());

  CHECK(cfg.role_preamble.find("expert writing serverless functions") != std::string::npos);
  CHECK(cfg.response_format_spec.find("None") != std::string::npos);
  for (const char* label : {kIntentLabel, kPlatformsLabel, kServicesLabel, kLanguagesLabel})
    CHECK(cfg.response_format_spec.find(label) != std::string::npos);

  CHECK_THROWS_AS(build_prompt("   "), ValidationError);
  auto broken = cfg;
  broken.guideline_notes.clear();
  CHECK_THROWS_AS(build_prompt(subject, broken), ValidationError);
}

TEST_CASE("extract retries malformed replies") {
  const auto table = NormalizationTable::builtin();

  SUBCASE("succeeds on the third attempt") {
    ScriptedProvider p({"garbage", "still garbage", kGood});
    auto rep = extract("fn-1", "code", p, table);
    CHECK(p.calls == 3);
    CHECK(rep.subject_id == "fn-1");
    CHECK(rep.platforms == AttributeSet{"AWS Lambda"});
    CHECK(rep.services == AttributeSet{"AWS Rekognition", "AWS S3"});
    CHECK(rep.languages == AttributeSet{"C#"});
    CHECK(rep.provenance == Provenance{"scripted", "script-1", 0.0});
    CHECK_FALSE(rep.intent_vector.has_value());
  }
  SUBCASE("gives up after max_attempts") {
    ScriptedProvider p({"Intent Summary: x\nServerless Platforms: None\n"});
    try {
      extract("fn-2", "code", p, table);
      FAIL("expected ExtractionFailedError");
    } catch (const ExtractionFailedError& e) {
      CHECK(p.calls == 3);
      CHECK(e.last_response().find("Intent Summary") != std::string::npos);
    }
  }
  SUBCASE("the subject is the tail of the prompt") {
    ScriptedProvider p({kGood});
    extract("fn-3", "SUBJECT-MARKER", p, table);
    CHECK(p.last_prompt.size() >= 14);
    CHECK(p.last_prompt.substr(p.last_prompt.size() - 14) == "SUBJECT-MARKER");
  }
}

TEST_CASE("fixture extractor") {
  auto fx = FixtureExtractor::from_file(data_dir() / "worked_example" / "extractions.jsonl");
  auto rep = extract("aws-s3-rekognition-tagging", "ignored", fx, NormalizationTable::builtin());
  CHECK(rep.platforms == AttributeSet{"AWS Lambda"});
  CHECK(rep.services == AttributeSet{"AWS Rekognition", "AWS S3"});
  CHECK(rep.languages == AttributeSet{"C#"});
  CHECK_THROWS_AS(fx.complete("unknown", "p"), Error);

  TempDir dir;
  auto bad = dir.write("bad.jsonl", "{\"id\": \"a\"}\n");
  CHECK_THROWS_AS(FixtureExtractor::from_file(bad), ParseError);
}

TEST_CASE("deterministic embedder") {
  DeterministicEmbedder e;
  CHECK(e.dimension() == kDefaultEmbeddingDim);
  const auto a = e.embed_one("Detect labels in uploaded images");
  const auto b = e.embed_one("Detect labels in uploaded images");
  CHECK(a == b);
  CHECK(std::abs(dot(a, a) - 1.0) < 1e-12);
  CHECK(DeterministicEmbedder(kDefaultEmbeddingDim, 7).embed_one("x") != e.embed_one("x"));

  // 100 distinct pairs of unrelated texts stay well apart.
  for (int i = 0; i < 100; ++i) {
    const auto u = e.embed_one("alpha" + std::to_string(i) + " topic" + std::to_string(i));
    const auto v = e.embed_one("omega" + std::to_string(i + 1000) + " other" + std::to_string(i));
    CHECK(dot(u, v) < 0.99);
  }
}

TEST_CASE("embed_intent validation") {
  DeterministicEmbedder e(16);
  CHECK(embed_intent("hello there", e).size() == 16);
  CHECK_THROWS_AS(embed_intent("", e), ValidationError);
  CHECK_THROWS_AS(embed_intent("text", e, 32), DimensionMismatchError);
  CHECK_THROWS_AS(normalized(Vector(4, 0.0)), IntegrityError);
}

TEST_CASE("extract_batch records failures per subject") {
  auto fx = FixtureExtractor::from_file(data_dir() / "worked_example" / "extractions.jsonl");
  DeterministicEmbedder e;
  std::vector<BatchSubject> subjects = {
      {"aws-s3-thumbnail", "code"}, {"not-in-fixture", "code"}, {"openwhisk-jwt", "code"}};
  auto out = extract_batch(subjects, fx, e, NormalizationTable::builtin(), {}, 2);
  REQUIRE(out.size() == 3);
  CHECK(out[0].id == "aws-s3-thumbnail");
  REQUIRE(out[0].representation.has_value());
  CHECK(out[0].representation->intent_vector.has_value());
  CHECK_FALSE(out[1].representation.has_value());
  CHECK_FALSE(out[1].error.empty());
  CHECK(out[2].representation.has_value());
}

TEST_CASE("representation store round-trip") {
  auto fx = FixtureExtractor::from_file(data_dir() / "worked_example" / "extractions.jsonl");
  DeterministicEmbedder e;
  auto rep = extract("gcf-pubsub-firestore", "code", fx, NormalizationTable::builtin());
  rep.intent_vector = embed_intent(rep.intent_text, e);
  ReprStore store{{rep.subject_id, rep}};

  auto line = repr_to_json_line(rep);
  CHECK(line.find('\n') == std::string::npos);
  CHECK(repr_from_json_line(line) == rep);

  TempDir dir;
  save_repr_store(store, dir / "reprs.jsonl");
  CHECK(load_repr_store(dir / "reprs.jsonl") == store);
  CHECK(parse_repr_store(dump_repr_store(store)) == store);
  CHECK_THROWS_AS(load_repr_store(dir / "missing.jsonl"), ConfigError);
}
