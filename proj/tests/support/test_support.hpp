#pragma once

#include <atomic>
#include <filesystem>
#include <fstream>
#include <random>
#include <string>

#include "fnreuse/corpus.hpp"
#include "fnreuse/extraction.hpp"

namespace fnreuse::testing {

inline std::filesystem::path data_dir() { return FNREUSE_TEST_DATA; }

// Fresh directory under the system temp dir, removed on destruction.
class TempDir {
 public:
  TempDir() {
    static std::atomic<int> counter{0};
    std::random_device rd;
    path_ = std::filesystem::temp_directory_path() /
            ("fnreuse-test-" + std::to_string(rd()) + "-" + std::to_string(counter++));
    std::filesystem::create_directories(path_);
  }
  ~TempDir() {
    std::error_code ec;
    std::filesystem::remove_all(path_, ec);
  }
  TempDir(const TempDir&) = delete;
  TempDir& operator=(const TempDir&) = delete;

  const std::filesystem::path& path() const { return path_; }
  std::filesystem::path operator/(const std::string& name) const { return path_ / name; }

  std::filesystem::path write(const std::string& name, const std::string& content) const {
    auto p = path_ / name;
    std::filesystem::create_directories(p.parent_path());
    std::ofstream f(p, std::ios::binary);
    f << content;
    return p;
  }

 private:
  std::filesystem::path path_;
};

inline std::string slurp(const std::filesystem::path& p) {
  std::ifstream f(p, std::ios::binary);
  return {std::istreambuf_iterator<char>(f), std::istreambuf_iterator<char>()};
}

inline FunctionUnit make_unit(std::string id, std::string content, std::string path = "index.js") {
  FunctionUnit u;
  u.id = id;
  u.name = std::move(id);
  u.origin = "https://example.org/repo";
  u.files.push_back({std::move(path), std::move(content)});
  return u;
}

inline SemanticRepresentation make_rep(std::string id, std::string intent, AttributeSet platforms,
                                       AttributeSet services, AttributeSet languages) {
  SemanticRepresentation r;
  r.subject_id = std::move(id);
  r.intent_text = std::move(intent);
  r.platforms = std::move(platforms);
  r.services = std::move(services);
  r.languages = std::move(languages);
  r.provenance = {"fixture", "fixture", 0.0};
  return r;
}

}  // namespace fnreuse::testing
