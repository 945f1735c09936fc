#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <vector>

namespace fnreuse {

struct SourceFile {
  std::string path;  // relative to the unit root
  std::string content;

  bool operator==(const SourceFile&) const = default;
};

// One reusable serverless function with every file it needs.
struct FunctionUnit {
  std::string id;
  std::string name;
  std::string origin;
  std::vector<SourceFile> files;
  std::optional<std::string> readme_text;
  std::optional<std::string> language_hint;

  bool operator==(const FunctionUnit&) const = default;
};

// Throws ValidationError if the id is empty, there are no files, or a path is
// absolute or escapes the unit root.
void validate_unit(const FunctionUnit& unit);

// Immutable, versioned collection of units. Mutations go through batch_add,
// which returns a new Repository.
class Repository {
 public:
  Repository() = default;

  const std::map<std::string, FunctionUnit>& units() const { return units_; }
  std::uint64_t version() const { return version_; }
  std::size_t size() const { return units_.size(); }
  bool empty() const { return units_.empty(); }
  bool contains(const std::string& id) const { return units_.count(id) != 0; }
  const FunctionUnit& at(const std::string& id) const;

  bool operator==(const Repository&) const = default;

 private:
  friend struct RepositoryAccess;
  std::map<std::string, FunctionUnit> units_;
  std::uint64_t version_ = 0;
};

// Patterns driving filter_unit. All matching is case-insensitive.
struct FilterConfig {
  // A unit with at most this many non-blank, non-comment lines is trivial.
  int max_trivial_lines = 3;
  std::vector<std::string> hello_world_patterns = {"hello world", "helloworld"};
  std::vector<std::string> benchmark_patterns = {"benchmark", "load_test",
                                                 "measure", "orchestrat"};
  std::vector<std::string> handler_patterns = {
      "handler", "exports.", "def main", "func main", "@app.",
      "functions.http", "[functionname", "functionhandler", "@function",
      "function.run", "def invoke"};
  std::vector<std::string> output_only_prefixes = {
      "return", "print", "console.log", "echo", "printf", "puts",
      "system.out.print", "console.write", "fmt.print", "log."};

  static FilterConfig from_json_file(const std::filesystem::path& path);
};

enum class FilterRule { kKeep, kTrivial, kBenchmark };

struct FilterDecision {
  FilterRule rule = FilterRule::kKeep;
  std::string detail;

  bool keep() const { return rule == FilterRule::kKeep; }
  // "keep", "trivial" or "benchmark"
  std::string rule_name() const;
};

FilterDecision filter_unit(const FunctionUnit& unit,
                           const FilterConfig& cfg = {});

// Count of non-blank lines outside comments across all files.
int effective_line_count(const FunctionUnit& unit);

struct Rejection {
  std::string id;
  std::string rule;
  std::string detail;
};

struct BatchResult {
  Repository repository;
  std::vector<Rejection> rejections;
};

// Appends every new unit that passes filter_unit and bumps the version once.
// Any id collision (with the repository or inside the batch) throws
// ValidationError listing the ids; the input repository is left untouched.
BatchResult batch_add(const Repository& repo,
                      const std::vector<FunctionUnit>& new_units,
                      const FilterConfig& cfg = {});

// Reads a JSON-lines manifest. Source paths resolve against the manifest's
// directory.
BatchResult ingest_corpus(const std::filesystem::path& manifest_path,
                          const FilterConfig& cfg = {});

std::string persist(const Repository& repo);
void persist_to_file(const Repository& repo, const std::filesystem::path& path);
Repository load_repository(const std::string& bytes);
Repository load_repository_file(const std::filesystem::path& path);

}  // namespace fnreuse
