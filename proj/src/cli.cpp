#include "fnreuse/cli.hpp"

#include <chrono>
#include <ctime>
#include <iomanip>
#include <memory>
#include <sstream>

#include "CLI11.hpp"
#include "fnreuse/baselines.hpp"
#include "fnreuse/corpus.hpp"
#include "fnreuse/errors.hpp"
#include "fnreuse/evaluation.hpp"
#include "fnreuse/extraction.hpp"
#include "fnreuse/gateway.hpp"
#include "fnreuse/matching.hpp"
#include "fnreuse/methods.hpp"
#include "json.hpp"

namespace fnreuse {

namespace {

using nlohmann::json;

struct ProviderFlags {
  std::string extractor = "fixture";
  std::string fixture;
  std::string embedder = "deterministic";
  std::size_t dim = kDefaultEmbeddingDim;
  std::uint64_t seed = DeterministicEmbedder::kDefaultSeed;
  std::string endpoint = "https://api.openai.com/v1";
  std::string embed_endpoint;
  std::string model = "gpt-4o";
  std::string embed_model = "all-MiniLM-L6-v2";
  std::string api_key_env = "OPENAI_API_KEY";
  double temperature = 0.0;
  double timeout_s = 60.0;
  int max_retries = 3;
  int max_inflight = 4;
  std::string norm_table;
};

struct Options {
  std::string output = "table";
  ProviderFlags providers;

  // ingest
  std::string manifest;
  std::string filter_config;
  // shared paths
  std::string repo;
  std::string reprs;
  std::string dataset;
  std::string query_reprs;
  std::string report;
  // query
  std::string text;
  std::string query_id = "query";
  bool trace = false;
  bool no_latency = false;
  // evaluate
  std::string method = "all";
  std::vector<std::size_t> ks;
  int repetitions = 5;
};

void add_provider_flags(CLI::App* cmd, ProviderFlags& p) {
  cmd->add_option("--extractor", p.extractor, "Extraction provider")
      ->check(CLI::IsMember({"remote", "fixture"}))
      ->capture_default_str();
  cmd->add_option("--fixture", p.fixture, "Fixture file for the fixture extractor");
  cmd->add_option("--embedder", p.embedder, "Embedding provider")
      ->check(CLI::IsMember({"remote", "deterministic"}))
      ->capture_default_str();
  cmd->add_option("--dim", p.dim, "Embedding dimension")->capture_default_str();
  cmd->add_option("--seed", p.seed, "Seed of the deterministic embedder");
  cmd->add_option("--endpoint", p.endpoint, "Chat completion base URL")->capture_default_str();
  cmd->add_option("--embed-endpoint", p.embed_endpoint, "Embedding base URL (defaults to --endpoint)");
  cmd->add_option("--model", p.model, "Chat model name")->capture_default_str();
  cmd->add_option("--embed-model", p.embed_model, "Embedding model name")->capture_default_str();
  cmd->add_option("--api-key-env", p.api_key_env, "Environment variable holding the API key")
      ->capture_default_str();
  cmd->add_option("--temperature", p.temperature, "Sampling temperature")
      ->check(CLI::NonNegativeNumber)
      ->capture_default_str();
  cmd->add_option("--timeout", p.timeout_s, "Request timeout in seconds");
  cmd->add_option("--max-retries", p.max_retries, "Retries for 429/5xx/timeouts")
      ->check(CLI::NonNegativeNumber);
  cmd->add_option("--max-inflight", p.max_inflight, "Concurrent provider requests")
      ->check(CLI::PositiveNumber);
  cmd->add_option("--norm-table", p.norm_table, "Normalization table JSON (default: built-in)");
}

void add_output_flag(CLI::App* cmd, Options& o) {
  cmd->add_option("--output", o.output, "Output format")
      ->check(CLI::IsMember({"table", "json"}))
      ->capture_default_str();
}

ProviderConfig provider_config(const ProviderFlags& p, const std::string& url, const std::string& model) {
  ProviderConfig cfg;
  cfg.base_url = url;
  cfg.api_key_env = p.api_key_env;
  cfg.model_name = model;
  cfg.temperature = p.temperature;
  cfg.timeout_s = p.timeout_s;
  cfg.max_retries = p.max_retries;
  cfg.max_inflight = p.max_inflight;
  return cfg;
}

std::unique_ptr<ExtractionProvider> make_extractor(const ProviderFlags& p) {
  if (p.extractor == "fixture") {
    if (p.fixture.empty()) throw ConfigError("--extractor fixture requires --fixture");
    if (!std::filesystem::exists(p.fixture)) throw ConfigError("fixture file not found: " + p.fixture);
    return std::make_unique<FixtureExtractor>(FixtureExtractor::from_file(p.fixture));
  }
  auto gw = std::make_shared<ModelGateway>(provider_config(p, p.endpoint, p.model));
  return std::make_unique<RemoteExtractor>(std::move(gw));
}

std::unique_ptr<Embedder> make_embedder(const ProviderFlags& p) {
  if (p.embedder == "deterministic") return std::make_unique<DeterministicEmbedder>(p.dim, p.seed);
  auto cfg = provider_config(p, p.embed_endpoint.empty() ? p.endpoint : p.embed_endpoint, p.embed_model);
  return std::make_unique<RemoteEmbedder>(std::make_shared<ModelGateway>(cfg), p.dim);
}

NormalizationTable make_table(const ProviderFlags& p) {
  if (p.norm_table.empty()) return NormalizationTable::builtin();
  if (!std::filesystem::exists(p.norm_table))
    throw ConfigError("normalization table not found: " + p.norm_table);
  return NormalizationTable::from_json_file(p.norm_table);
}

void require_file(const std::string& path, const char* flag) {
  if (path.empty()) throw ConfigError(std::string(flag) + " is required");
  if (!std::filesystem::exists(path)) throw ConfigError(std::string(flag) + " not found: " + path);
}

std::string unit_subject(const FunctionUnit& unit) {
  std::string text;
  for (const auto& f : unit.files) {
    if (!text.empty()) text += '\n';
    text += "// file: " + f.path + "\n" + f.content;
  }
  return text;
}

std::string fmt_fixed(double v, int precision) {
  std::ostringstream ss;
  ss << std::fixed << std::setprecision(precision) << v;
  return ss.str();
}

// --------------------------------------------------------------------------

int cmd_ingest(const Options& o, std::ostream& out, std::ostream& err) {
  FilterConfig cfg;
  if (!o.filter_config.empty()) {
    require_file(o.filter_config, "--filter-config");
    cfg = FilterConfig::from_json_file(o.filter_config);
  }
  auto result = ingest_corpus(o.manifest, cfg);
  persist_to_file(result.repository, o.repo);
  if (o.output == "json") {
    json rejections = json::array();
    for (const auto& r : result.rejections)
      rejections.push_back({{"id", r.id}, {"rule", r.rule}, {"detail", r.detail}});
    json doc = {{"kept", result.repository.size()},
                {"rejected", result.rejections.size()},
                {"version", result.repository.version()},
                {"rejections", rejections}};
    out << doc.dump() << "\n";
  } else {
    out << "kept=" << result.repository.size() << " rejected=" << result.rejections.size() << "\n";
    for (const auto& r : result.rejections)
      out << "rejected " << r.id << ": " << r.rule << " (" << r.detail << ")\n";
  }
  (void)err;
  return kExitOk;
}

int cmd_extract(const Options& o, std::ostream& out, std::ostream& err) {
  require_file(o.repo, "--repo");
  if (o.reprs.empty()) throw ConfigError("--reprs is required");
  const auto repo = load_repository_file(o.repo);
  ReprStore store;
  if (std::filesystem::exists(o.reprs)) store = load_repr_store(o.reprs);

  auto table = make_table(o.providers);
  auto extractor = make_extractor(o.providers);
  auto embedder = make_embedder(o.providers);
  const Provenance wanted{extractor->name(), extractor->model(), extractor->temperature()};

  std::vector<BatchSubject> todo;
  std::size_t skipped = 0;
  for (const auto& [id, unit] : repo.units()) {
    auto it = store.find(id);
    if (it != store.end() && it->second.provenance == wanted && it->second.intent_vector) {
      ++skipped;
      continue;
    }
    todo.push_back({id, unit_subject(unit)});
  }

  const auto outcomes =
      extract_batch(todo, *extractor, *embedder, table, {}, static_cast<std::size_t>(o.providers.max_inflight));
  std::size_t extracted = 0;
  std::size_t failed = 0;
  json failures = json::array();
  for (const auto& r : outcomes) {
    if (r.representation) {
      store[r.id] = *r.representation;
      ++extracted;
    } else {
      ++failed;
      err << "error: " << r.id << ": " << r.error << "\n";
      failures.push_back({{"id", r.id}, {"error", r.error}});
    }
  }
  if (extracted > 0 || !std::filesystem::exists(o.reprs)) save_repr_store(store, o.reprs);

  if (o.output == "json") {
    json doc = {{"extracted", extracted}, {"skipped", skipped}, {"failed", failed}, {"failures", failures}};
    out << doc.dump() << "\n";
  } else {
    out << "extracted=" << extracted << " skipped=" << skipped << " failed=" << failed << "\n";
  }
  return failed > 0 ? kExitFailure : kExitOk;
}

int cmd_query(const Options& o, std::ostream& out, std::ostream&) {
  const std::size_t k = o.ks.empty() ? 10 : o.ks.front();
  if (k == 0) throw ValidationError("--k must be at least 1");
  if (o.text.empty()) throw ValidationError("--text must not be empty");
  require_file(o.reprs, "--reprs");
  const auto reps = load_repr_store(o.reprs);
  auto table = make_table(o.providers);
  auto extractor = make_extractor(o.providers);
  auto embedder = make_embedder(o.providers);

  auto query = extract(o.query_id, o.text, *extractor, table);
  query.intent_vector = embed_intent(query.intent_text, *embedder);
  const auto rec = recommend(query, reps, k);

  if (o.trace || o.output == "json") {
    out << recommendation_trace_json(rec, !o.no_latency) << "\n";
    return kExitOk;
  }

  auto list = [](const AttributeSet& s) {
    if (s.empty()) return std::string("None");
    std::string r;
    for (const auto& x : s) r += (r.empty() ? "" : ", ") + x;
    return r;
  };
  out << "query: " << query.intent_text << "\n";
  out << "  platforms: " << list(query.platforms) << "\n";
  out << "  services:  " << list(query.services) << "\n";
  out << "  languages: " << list(query.languages) << "\n";
  out << "pruning:\n";
  for (const auto& l : rec.candidates.levels) {
    const char* names[] = {"platforms", "services", "languages"};
    out << "  " << std::left << std::setw(10) << names[static_cast<int>(l.attribute)];
    if (!l.applied) {
      out << "skipped\n";
      continue;
    }
    out << "full=" << l.full << " pareto=" << l.pareto << " retained=" << l.retained << "\n";
  }
  out << "survivors=" << rec.candidates.ids.size() << " of " << reps.size() << "\n";
  out << "rank  score     function\n";
  for (std::size_t i = 0; i < rec.ranking.entries.size(); ++i) {
    const auto& e = rec.ranking.entries[i];
    out << std::left << std::setw(6) << (i + 1) << std::setw(10) << fmt_fixed(e.score, 4) << e.function_id
        << "\n";
  }
  if (!o.no_latency) out << "latency_ms=" << fmt_fixed(rec.latency_ms, 3) << "\n";
  return kExitOk;
}

std::string utc_timestamp() {
  const auto now = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
  std::tm tm{};
  gmtime_r(&now, &tm);
  std::ostringstream ss;
  ss << std::put_time(&tm, "%Y-%m-%dT%H:%M:%SZ");
  return ss.str();
}

int cmd_evaluate(const Options& o, std::ostream& out, std::ostream& err) {
  require_file(o.repo, "--repo");
  require_file(o.dataset, "--dataset");
  const std::vector<std::string> all = {"slsreuse", "keyword", "embedding", "llm-variant"};
  std::vector<std::string> methods = o.method == "all" ? all : std::vector<std::string>{o.method};
  auto needs = [&](const char* m) { return std::find(methods.begin(), methods.end(), m) != methods.end(); };

  const auto repo = load_repository_file(o.repo);
  const auto cases = load_query_dataset(o.dataset);
  std::set<std::string> known;
  for (const auto& [id, u] : repo.units()) known.insert(id);

  ReprStore reps;
  if (needs("slsreuse")) {
    require_file(o.reprs, "--reprs");
    reps = load_repr_store(o.reprs);
  }
  std::optional<ReprStore> cached;
  if (!o.query_reprs.empty()) {
    require_file(o.query_reprs, "--query-reprs");
    cached = load_repr_store(o.query_reprs);
  }

  auto table = make_table(o.providers);
  std::unique_ptr<ExtractionProvider> extractor;
  if (needs("slsreuse") || needs("llm-variant")) extractor = make_extractor(o.providers);
  auto embedder = make_embedder(o.providers);

  EvalOptions eval;
  if (!o.ks.empty()) eval.ks = o.ks;
  eval.repetitions = o.repetitions;
  eval.measure_latency = !o.no_latency;
  eval.max_concurrency = static_cast<std::size_t>(o.providers.max_inflight);
  const ReprStore* cache = cached ? &*cached : nullptr;

  std::vector<EvalReport> reports;
  for (const auto& m : methods) {
    std::unique_ptr<RankingMethod> method;
    if (m == "slsreuse") {
      method = std::make_unique<PruningMethod>(reps, *extractor, *embedder, table, cache);
    } else if (m == "keyword") {
      method = std::make_unique<KeywordMethod>(repo);
    } else if (m == "embedding") {
      method = std::make_unique<EmbeddingMethod>(repo, *embedder);
    } else {
      method = std::make_unique<VariantMethod>(VariantIndex(repo, *extractor, *embedder), cache);
    }
    reports.push_back(run_evaluation(*method, cases, known, eval));
  }

  json docs = json::array();
  for (const auto& r : reports) docs.push_back(json::parse(eval_report_json(r)));
  json doc = {{"environment",
               {{"timestamp", utc_timestamp()},
                {"extractor", extractor ? extractor->name() : std::string("none")},
                {"model", extractor ? extractor->model() : std::string("none")},
                {"embedder", embedder->name()},
                {"embedding_dim", embedder->dimension()},
                {"temperature", extractor ? extractor->temperature() : o.providers.temperature},
                {"queries", cases.size()},
                {"repository_size", repo.size()}}},
              {"reports", docs}};
  if (!o.report.empty()) {
    std::ofstream f(o.report, std::ios::trunc);
    if (!f) throw IoError(o.report, "cannot open for writing");
    f << doc.dump(2) << "\n";
  }

  if (o.output == "json") {
    out << doc.dump() << "\n";
    return kExitOk;
  }

  const auto& ks = reports.front().ks;
  out << std::left << std::setw(13) << "method";
  for (auto k : ks) out << std::setw(9) << ("R@" + std::to_string(k));
  for (auto k : ks) out << std::setw(9) << ("MRR@" + std::to_string(k));
  out << "latency_ms\n";
  for (const auto& r : reports) {
    out << std::setw(13) << r.method;
    for (auto k : ks) out << std::setw(9) << fmt_fixed(r.recall.at(k), 2);
    for (auto k : ks) out << std::setw(9) << fmt_fixed(r.mrr.at(k), 4);
    if (r.mean_latency_ms)
      out << fmt_fixed(*r.mean_latency_ms, 3) << " (" << r.latency_mode << ")";
    else
      out << "-";
    out << "\n";
  }
  out << "queries=" << cases.size() << " repetitions=" << o.repetitions << "\n";
  (void)err;
  return kExitOk;
}

}  // namespace

int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Recommends reusable serverless functions for natural-language task queries"};
  app.require_subcommand(1, 1);
  Options o;

  auto* ingest = app.add_subcommand("ingest", "Build a repository from a corpus manifest");
  ingest->add_option("--manifest", o.manifest, "JSON-lines manifest")->required();
  ingest->add_option("--repo,--out", o.repo, "Output repository file")->required();
  ingest->add_option("--filter-config", o.filter_config, "Filter pattern overrides (JSON)");
  add_output_flag(ingest, o);

  auto* extract_cmd = app.add_subcommand("extract", "Extract representations for repository functions");
  extract_cmd->add_option("--repo", o.repo, "Repository file")->required();
  extract_cmd->add_option("--reprs,--out", o.reprs, "Representation store (created or extended)")->required();
  add_provider_flags(extract_cmd, o.providers);
  add_output_flag(extract_cmd, o);

  auto* query = app.add_subcommand("query", "Recommend functions for one task query");
  query->add_option("--text", o.text, "Task description")->required();
  query->add_option("--query-id", o.query_id, "Subject id of the query")->capture_default_str();
  query->add_option("--reprs", o.reprs, "Representation store")->required();
  query->add_option("--k", o.ks, "Number of results (default 10)")->delimiter(',');
  query->add_flag("--trace", o.trace, "Emit the JSON pruning trace");
  query->add_flag("--no-latency", o.no_latency, "Leave wall-clock latency out of the output");
  add_provider_flags(query, o.providers);
  add_output_flag(query, o);

  auto* evaluate = app.add_subcommand("evaluate", "Recall@k / MRR@k / latency over a query dataset");
  evaluate->add_option("--repo", o.repo, "Repository file")->required();
  evaluate->add_option("--reprs", o.reprs, "Representation store");
  evaluate->add_option("--dataset", o.dataset, "Query dataset (JSON lines)")->required();
  evaluate->add_option("--query-reprs", o.query_reprs, "Precomputed query representations");
  evaluate->add_option("--method", o.method, "Method to evaluate")
      ->check(CLI::IsMember({"slsreuse", "keyword", "embedding", "llm-variant", "all"}))
      ->capture_default_str();
  evaluate->add_option("--k", o.ks, "Cutoffs (repeatable, default 1,5,10,15,20)")->delimiter(',');
  evaluate->add_option("--repetitions", o.repetitions, "Repetitions")
      ->check(CLI::PositiveNumber)
      ->capture_default_str();
  evaluate->add_option("--report", o.report, "Write the JSON report here");
  evaluate->add_flag("--no-latency", o.no_latency, "Skip latency measurement (queries may run concurrently)");
  add_provider_flags(evaluate, o.providers);
  add_output_flag(evaluate, o);

  std::vector<std::string> argv_rev(args.rbegin(), args.rend());
  if (!argv_rev.empty()) argv_rev.pop_back();  // program name
  try {
    app.parse(argv_rev);
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return kExitOk;
  } catch (const CLI::CallForAllHelp&) {
    out << app.help("", CLI::AppFormatMode::All);
    return kExitOk;
  } catch (const CLI::ParseError& e) {
    err << "usage error: " << e.what() << "\n";
    return kExitUsage;
  }

  try {
    for (auto k : o.ks)
      if (k == 0) throw ValidationError("--k must be at least 1");
    if (ingest->parsed()) return cmd_ingest(o, out, err);
    if (extract_cmd->parsed()) return cmd_extract(o, out, err);
    if (query->parsed()) return cmd_query(o, out, err);
    return cmd_evaluate(o, out, err);
  } catch (const ConfigError& e) {
    err << "configuration error: " << e.what() << "\n";
    return kExitUsage;
  } catch (const ValidationError& e) {
    err << "validation error: " << e.what() << "\n";
    return kExitUsage;
  } catch (const ParseError& e) {
    err << "parse error: " << e.what() << "\n";
    return kExitUsage;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return kExitFailure;
  }
}

}  // namespace fnreuse
