#include <pybind11/pybind11.h>
#include <pybind11/stl.h>
#include <pybind11/stl/filesystem.h>

#include <sstream>

#include "fnreuse/baselines.hpp"
#include "fnreuse/cli.hpp"
#include "fnreuse/errors.hpp"
#include "fnreuse/evaluation.hpp"
#include "fnreuse/extraction.hpp"
#include "fnreuse/matching.hpp"

namespace py = pybind11;
using namespace fnreuse;

PYBIND11_MODULE(_fnreuse, m) {
  m.doc() = "Serverless function reuse: attribute pruning plus intent similarity";

  auto base = py::register_exception<Error>(m, "Error");
  py::register_exception<ConfigError>(m, "ConfigError", base);
  py::register_exception<ValidationError>(m, "ValidationError", base);
  py::register_exception<ParseError>(m, "ParseError", base);
  py::register_exception<IntegrityError>(m, "IntegrityError", base);
  py::register_exception<MalformedResponseError>(m, "MalformedResponseError", base);
  py::register_exception<DimensionMismatchError>(m, "DimensionMismatchError", base);

  py::enum_<AttributeKind>(m, "AttributeKind")
      .value("PLATFORM", AttributeKind::kPlatform)
      .value("SERVICE", AttributeKind::kService)
      .value("LANGUAGE", AttributeKind::kLanguage);

  py::class_<Provenance>(m, "Provenance")
      .def(py::init<>())
      .def_readwrite("extractor", &Provenance::extractor)
      .def_readwrite("model", &Provenance::model)
      .def_readwrite("temperature", &Provenance::temperature);

  py::class_<SemanticRepresentation>(m, "SemanticRepresentation")
      .def(py::init<>())
      .def(py::init([](std::string id, std::string intent, AttributeSet platforms, AttributeSet services,
                       AttributeSet languages, std::optional<Vector> vector) {
             SemanticRepresentation r;
             r.subject_id = std::move(id);
             r.intent_text = std::move(intent);
             r.platforms = std::move(platforms);
             r.services = std::move(services);
             r.languages = std::move(languages);
             r.intent_vector = std::move(vector);
             return r;
           }),
           py::arg("subject_id"), py::arg("intent_text"), py::arg("platforms") = AttributeSet{},
           py::arg("services") = AttributeSet{}, py::arg("languages") = AttributeSet{},
           py::arg("intent_vector") = std::nullopt)
      .def_readwrite("subject_id", &SemanticRepresentation::subject_id)
      .def_readwrite("intent_text", &SemanticRepresentation::intent_text)
      .def_readwrite("intent_vector", &SemanticRepresentation::intent_vector)
      .def_readwrite("platforms", &SemanticRepresentation::platforms)
      .def_readwrite("services", &SemanticRepresentation::services)
      .def_readwrite("languages", &SemanticRepresentation::languages)
      .def_readwrite("provenance", &SemanticRepresentation::provenance);

  py::class_<RawExtraction>(m, "RawExtraction")
      .def_readonly("intent_summary", &RawExtraction::intent_summary)
      .def_readonly("platforms", &RawExtraction::platforms_raw)
      .def_readonly("services", &RawExtraction::services_raw)
      .def_readonly("languages", &RawExtraction::languages_raw);

  py::class_<ObjectiveVector>(m, "ObjectiveVector")
      .def(py::init<double, double>(), py::arg("jaccard_distance"), py::arg("coverage_gap"))
      .def_readwrite("jaccard_distance", &ObjectiveVector::jaccard_distance)
      .def_readwrite("coverage_gap", &ObjectiveVector::coverage_gap);

  py::class_<LevelAudit>(m, "LevelAudit")
      .def_readonly("attribute", &LevelAudit::attribute)
      .def_readonly("applied", &LevelAudit::applied)
      .def_readonly("input", &LevelAudit::input)
      .def_readonly("full", &LevelAudit::full)
      .def_readonly("pareto", &LevelAudit::pareto)
      .def_readonly("retained", &LevelAudit::retained);

  py::class_<CandidateSet>(m, "CandidateSet")
      .def_readonly("ids", &CandidateSet::ids)
      .def_readonly("levels", &CandidateSet::levels);

  py::class_<RankedEntry>(m, "RankedEntry")
      .def_readonly("function_id", &RankedEntry::function_id)
      .def_readonly("score", &RankedEntry::score);

  py::class_<Ranking>(m, "Ranking")
      .def_readonly("query_id", &Ranking::query_id)
      .def_readonly("k", &Ranking::k)
      .def_readonly("entries", &Ranking::entries)
      .def("rank_of", &Ranking::rank_of)
      .def("ids", [](const Ranking& r) {
        std::vector<std::string> ids;
        for (const auto& e : r.entries) ids.push_back(e.function_id);
        return ids;
      });

  py::class_<Recommendation>(m, "Recommendation")
      .def_readonly("ranking", &Recommendation::ranking)
      .def_readonly("candidates", &Recommendation::candidates)
      .def_readonly("similarity_evaluations", &Recommendation::similarity_evaluations)
      .def_readonly("latency_ms", &Recommendation::latency_ms)
      .def("trace_json", &recommendation_trace_json, py::arg("include_latency") = true);

  py::class_<QueryCase>(m, "QueryCase")
      .def(py::init<std::string, std::string, std::string>(), py::arg("id"), py::arg("text"),
           py::arg("ground_truth_id"))
      .def_readonly("id", &QueryCase::id)
      .def_readonly("text", &QueryCase::text)
      .def_readonly("ground_truth_id", &QueryCase::ground_truth_id);

  m.def("jaccard_distance", &jaccard_distance, py::arg("a"), py::arg("b"));
  m.def("subset_coverage", &subset_coverage, py::arg("query"), py::arg("function"));
  m.def("dominates", &dominates, py::arg("a"), py::arg("b"));
  m.def("pareto_front", [](const std::vector<ObjectiveVector>& pts) { return pareto_front(pts); }, py::arg("points"));
  m.def("cosine_similarity", [](const Vector& u, const Vector& v) { return cosine_similarity(u, v); });
  m.def("multi_level_prune", &multi_level_prune, py::arg("reps"), py::arg("query"));
  m.def("recommend", &recommend, py::arg("query"), py::arg("reps"), py::arg("k") = 10);
  m.def("make_ranking", &make_ranking, py::arg("query_id"), py::arg("scored"), py::arg("k"));
  m.def("scored", [](std::string id, double score) { return RankedEntry{std::move(id), score}; });

  m.def("parse_extraction",
        [](const std::string& text, bool strict) { return parse_extraction(text, {.strict = strict}); },
        py::arg("text"), py::arg("strict") = false);
  m.def("build_prompt", [](const std::string& subject) { return build_prompt(subject); });
  m.def("embed", [](const std::string& text, std::size_t dim, std::uint64_t seed) {
        DeterministicEmbedder e(dim, seed);
        return embed_intent(text, e);
      },
      py::arg("text"), py::arg("dim") = kDefaultEmbeddingDim, py::arg("seed") = DeterministicEmbedder::kDefaultSeed);
  m.def("load_repr_store", &load_repr_store, py::arg("path"));

  m.def("porter_stem", &porter_stem);
  m.def("keyword_preprocess", [](const std::string& text) { return keyword_preprocess(text).tokens; });

  m.def("recall_at_k", &recall_at_k, py::arg("rankings"), py::arg("cases"), py::arg("ks"));
  m.def("mrr_at_k", &mrr_at_k, py::arg("rankings"), py::arg("cases"), py::arg("ks"));

  m.def("run_cli", [](std::vector<std::string> args) {
        args.insert(args.begin(), "fnreuse");
        std::ostringstream out, err;
        int code;
        {
          py::gil_scoped_release release;
          code = run_cli(args, out, err);
        }
        return py::make_tuple(code, out.str(), err.str());
      },
      py::arg("args"));
}
