#include "fnreuse/corpus.hpp"

#include "json.hpp"
#include <set>
#include <sstream>

#include "fnreuse/errors.hpp"
#include "text_util.hpp"

namespace fnreuse {

using nlohmann::json;

struct RepositoryAccess {
  static std::map<std::string, FunctionUnit>& units(Repository& r) { return r.units_; }
  static void set_version(Repository& r, std::uint64_t v) { r.version_ = v; }
};

const FunctionUnit& Repository::at(const std::string& id) const {
  auto it = units_.find(id);
  if (it == units_.end()) throw IntegrityError("unknown function id '" + id + "'");
  return it->second;
}

void validate_unit(const FunctionUnit& unit) {
  if (unit.id.empty()) throw ValidationError("function unit has an empty id");
  if (unit.files.empty())
    throw ValidationError("function unit '" + unit.id + "' has no files");
  for (const auto& f : unit.files) {
    std::filesystem::path p(f.path);
    if (f.path.empty() || p.is_absolute() || p.has_root_name() ||
        p.has_root_directory())
      throw ValidationError("function unit '" + unit.id +
                            "': path must be relative: '" + f.path + "'");
    int depth = 0;
    for (const auto& part : p.lexically_normal()) {
      if (part == "..") {
        if (--depth < 0)
          throw ValidationError("function unit '" + unit.id +
                                "': path escapes the unit root: '" + f.path + "'");
      } else if (part != "." && !part.empty()) {
        ++depth;
      }
    }
  }
}

namespace {

// Lines that only shape the program (signatures, imports, braces, attributes)
// rather than doing work.
bool is_structural(std::string_view line) {
  static const char* kPrefixes[] = {
      "def ",      "async def ", "function ", "async function", "import ",
      "from ",     "using ",     "package ",  "namespace ",      "#include",
      "module.exports", "exports.", "public ", "private ",      "protected ",
      "internal ", "static ",    "class ",    "func ",           "@",
      "[",         "const ",     "let ",      "var ",            "export ",
      "fn ",       "pub ",       "else"};
  if (std::all_of(line.begin(), line.end(), [](char c) {
        return c == '{' || c == '}' || c == '(' || c == ')' || c == ';' ||
               c == '[' || c == ']' || c == ',' || c == ' ' || c == '\t';
      }))
    return true;
  for (const char* p : kPrefixes) {
    if (detail::starts_with_ci(line, p)) {
      // Declarations that compute something are real statements.
      std::string_view sv(p);
      if ((sv == "const " || sv == "let " || sv == "var ") &&
          line.find("require(") == std::string_view::npos &&
          line.find("=>") == std::string_view::npos)
        return false;
      return true;
    }
  }
  return false;
}

// Strips comments from every file and returns the remaining non-blank lines.
std::vector<std::string> code_lines(const FunctionUnit& unit) {
  std::vector<std::string> out;
  for (const auto& file : unit.files) {
    bool in_block = false;
    std::string_view block_end;
    for (auto raw : detail::split_lines(file.content)) {
      std::string line = detail::trim(raw);
      if (in_block) {
        auto pos = line.find(block_end);
        if (pos == std::string::npos) continue;
        in_block = false;
        line = detail::trim(line.substr(pos + block_end.size()));
      }
      // Block comments and docstrings opening at the start of a line.
      for (std::string_view open : {"/*", "\"\"\"", "'''", "<!--"}) {
        if (line.rfind(open, 0) != 0) continue;
        std::string_view close = open == "/*"     ? std::string_view("*/")
                                 : open == "<!--" ? std::string_view("-->")
                                                  : open;
        auto pos = line.find(close, open.size());
        if (pos == std::string::npos) {
          in_block = true;
          block_end = close;
          line.clear();
        } else {
          line = detail::trim(line.substr(pos + close.size()));
        }
        break;
      }
      if (line.empty()) continue;
      if (line.rfind("//", 0) == 0) continue;
      if (line[0] == '#' && line.rfind("#include", 0) != 0 &&
          line.rfind("#region", 0) != 0)
        continue;
      out.push_back(std::move(line));
    }
  }
  return out;
}

bool matches_any(std::string_view lower_text, const std::vector<std::string>& patterns) {
  for (const auto& p : patterns)
    if (detail::contains_lower(lower_text, p)) return true;
  return false;
}

std::string squash_separators(std::string s) {
  for (auto& c : s)
    if (c == '_' || c == '-' || c == '.') c = ' ';
  return s;
}

}  // namespace

int effective_line_count(const FunctionUnit& unit) {
  return static_cast<int>(code_lines(unit).size());
}

std::string FilterDecision::rule_name() const {
  switch (rule) {
    case FilterRule::kKeep: return "keep";
    case FilterRule::kTrivial: return "trivial";
    case FilterRule::kBenchmark: return "benchmark";
  }
  return "keep";
}

FilterDecision filter_unit(const FunctionUnit& unit, const FilterConfig& cfg) {
  const std::string name_lower = detail::to_lower(unit.name);
  const std::string name_spaced = squash_separators(name_lower);

  std::string content_lower;
  for (const auto& f : unit.files) {
    content_lower += detail::to_lower(f.content);
    content_lower += '\n';
  }

  // (a) trivial
  if (matches_any(name_lower, cfg.hello_world_patterns) ||
      matches_any(name_spaced, cfg.hello_world_patterns) ||
      matches_any(content_lower, cfg.hello_world_patterns))
    return {FilterRule::kTrivial, "hello-world pattern"};

  const auto lines = code_lines(unit);
  if (static_cast<int>(lines.size()) <= cfg.max_trivial_lines)
    return {FilterRule::kTrivial,
            std::to_string(lines.size()) + " effective line(s)"};

  std::size_t statements = 0;
  bool only_output = true;
  for (const auto& line : lines) {
    if (is_structural(line)) continue;
    ++statements;
    bool output = false;
    for (const auto& p : cfg.output_only_prefixes)
      if (detail::starts_with_ci(line, p)) output = true;
    if (!output) {
      only_output = false;
      break;
    }
  }
  if (statements > 0 && only_output)
    return {FilterRule::kTrivial, "body is return/print only"};

  // (b) benchmark script without a handler
  bool benchmark_named = matches_any(name_lower, cfg.benchmark_patterns) ||
                         matches_any(detail::to_lower(unit.id), cfg.benchmark_patterns);
  for (const auto& f : unit.files)
    if (matches_any(detail::to_lower(f.path), cfg.benchmark_patterns)) benchmark_named = true;
  if (benchmark_named && !matches_any(content_lower, cfg.handler_patterns))
    return {FilterRule::kBenchmark, "measurement/orchestration code without handler"};

  return {};
}

FilterConfig FilterConfig::from_json_file(const std::filesystem::path& path) {
  json doc;
  try {
    doc = json::parse(detail::read_file(path));
  } catch (const json::parse_error& e) {
    throw ParseError(path.string() + ": " + e.what(), 0, e.byte);
  }
  FilterConfig cfg;
  try {
    if (doc.contains("max_trivial_lines")) cfg.max_trivial_lines = doc.at("max_trivial_lines").get<int>();
    if (doc.contains("hello_world_patterns")) cfg.hello_world_patterns = doc.at("hello_world_patterns").get<std::vector<std::string>>();
    if (doc.contains("benchmark_patterns")) cfg.benchmark_patterns = doc.at("benchmark_patterns").get<std::vector<std::string>>();
    if (doc.contains("handler_patterns")) cfg.handler_patterns = doc.at("handler_patterns").get<std::vector<std::string>>();
    if (doc.contains("output_only_prefixes")) cfg.output_only_prefixes = doc.at("output_only_prefixes").get<std::vector<std::string>>();
  } catch (const json::exception& e) {
    throw ConfigError(path.string() + ": " + e.what());
  }
  return cfg;
}

BatchResult batch_add(const Repository& repo, const std::vector<FunctionUnit>& new_units,
                      const FilterConfig& cfg) {
  std::set<std::string> seen;
  std::set<std::string> colliding;
  for (const auto& u : new_units) {
    validate_unit(u);
    if (repo.contains(u.id) || !seen.insert(u.id).second) colliding.insert(u.id);
  }
  if (!colliding.empty()) {
    std::string ids;
    for (const auto& id : colliding) ids += (ids.empty() ? "" : ", ") + id;
    throw ValidationError("duplicate function id(s): " + ids);
  }

  BatchResult result{repo, {}};
  auto& units = RepositoryAccess::units(result.repository);
  for (const auto& u : new_units) {
    auto decision = filter_unit(u, cfg);
    if (decision.keep())
      units.emplace(u.id, u);
    else
      result.rejections.push_back({u.id, decision.rule_name(), decision.detail});
  }
  RepositoryAccess::set_version(result.repository, repo.version() + 1);
  return result;
}

namespace {

void require_utf8(const std::string& text, const std::string& path) {
  try {
    (void)json(text).dump();
  } catch (const json::type_error&) {
    throw IoError(path, "not valid UTF-8");
  }
}

}  // namespace

BatchResult ingest_corpus(const std::filesystem::path& manifest_path, const FilterConfig& cfg) {
  if (!std::filesystem::exists(manifest_path))
    throw ConfigError("manifest not found: " + manifest_path.string());
  const auto root = manifest_path.parent_path();
  const std::string text = detail::read_file(manifest_path);

  std::vector<FunctionUnit> units;
  std::size_t line_no = 0;
  for (auto raw : detail::split_lines(text)) {
    ++line_no;
    if (detail::trim_view(raw).empty()) continue;
    const std::string where = manifest_path.string() + ":" + std::to_string(line_no);
    json entry;
    try {
      entry = json::parse(raw);
    } catch (const json::parse_error& e) {
      throw ParseError(where + ": " + e.what(), line_no);
    }
    FunctionUnit unit;
    std::vector<std::string> paths;
    std::optional<std::string> readme_path;
    try {
      unit.id = entry.at("id").get<std::string>();
      unit.name = entry.at("name").get<std::string>();
      unit.origin = entry.at("origin").get<std::string>();
      paths = entry.at("paths").get<std::vector<std::string>>();
      if (entry.contains("readme_path") && !entry["readme_path"].is_null())
        readme_path = entry["readme_path"].get<std::string>();
      if (entry.contains("language_hint") && !entry["language_hint"].is_null())
        unit.language_hint = entry["language_hint"].get<std::string>();
    } catch (const json::exception& e) {
      throw ParseError(where + ": malformed manifest entry: " + e.what(), line_no);
    }
    for (const auto& p : paths) {
      unit.files.push_back({p, {}});
    }
    try {
      validate_unit(unit);
    } catch (const ValidationError& e) {
      throw ParseError(where + ": " + e.what(), line_no);
    }
    for (auto& f : unit.files) {
      const auto full = root / f.path;
      f.content = detail::read_file(full);
      require_utf8(f.content, full.string());
    }
    if (readme_path) {
      const auto full = root / *readme_path;
      unit.readme_text = detail::read_file(full);
      require_utf8(*unit.readme_text, full.string());
    }
    units.push_back(std::move(unit));
  }
  return batch_add(Repository{}, units, cfg);
}

namespace {

json unit_to_json(const FunctionUnit& u) {
  json files = json::array();
  for (const auto& f : u.files) files.push_back({{"path", f.path}, {"content", f.content}});
  json j = {{"id", u.id}, {"name", u.name}, {"origin", u.origin}, {"files", files}};
  if (u.readme_text) j["readme_text"] = *u.readme_text;
  if (u.language_hint) j["language_hint"] = *u.language_hint;
  return j;
}

FunctionUnit unit_from_json(const json& j) {
  FunctionUnit u;
  u.id = j.at("id").get<std::string>();
  u.name = j.at("name").get<std::string>();
  u.origin = j.at("origin").get<std::string>();
  for (const auto& f : j.at("files"))
    u.files.push_back({f.at("path").get<std::string>(), f.at("content").get<std::string>()});
  if (j.contains("readme_text")) u.readme_text = j["readme_text"].get<std::string>();
  if (j.contains("language_hint")) u.language_hint = j["language_hint"].get<std::string>();
  return u;
}

}  // namespace

std::string persist(const Repository& repo) {
  json units = json::array();
  for (const auto& [id, u] : repo.units()) units.push_back(unit_to_json(u));
  json doc = {{"version", repo.version()}, {"units", units}};
  return doc.dump(1) + "\n";
}

void persist_to_file(const Repository& repo, const std::filesystem::path& path) {
  detail::write_file(path, persist(repo));
}

Repository load_repository(const std::string& bytes) {
  json doc;
  try {
    doc = json::parse(bytes);
  } catch (const json::parse_error& e) {
    throw ParseError(std::string("corrupted repository file at byte ") +
                         std::to_string(e.byte) + ": " + e.what(),
                     0, e.byte);
  }
  Repository repo;
  auto& units = RepositoryAccess::units(repo);
  try {
    RepositoryAccess::set_version(repo, doc.at("version").get<std::uint64_t>());
    for (const auto& j : doc.at("units")) {
      auto u = unit_from_json(j);
      validate_unit(u);
      auto id = u.id;
      if (!units.emplace(id, std::move(u)).second)
        throw ParseError("corrupted repository file: duplicate id '" + id + "'");
    }
  } catch (const json::exception& e) {
    throw ParseError(std::string("corrupted repository file: ") + e.what());
  } catch (const ValidationError& e) {
    throw ParseError(std::string("corrupted repository file: ") + e.what());
  }
  return repo;
}

Repository load_repository_file(const std::filesystem::path& path) {
  return load_repository(detail::read_file(path));
}

}  // namespace fnreuse
