#include "fixture.hpp"

#include <algorithm>
#include <atomic>
#include <fstream>
#include <regex>
#include <sstream>
#include <stdexcept>

#include <unistd.h>

namespace fixture {

fs::path fixtures_dir() { return ADAPTCHUNK_TEST_FIXTURES_DIR; }
fs::path corpus_dir() { return fixtures_dir() / "corpus"; }
fs::path config_path() { return fixtures_dir() / "config.json"; }
fs::path golden(std::string_view name) { return fixtures_dir() / "golden" / name; }

TempDir::TempDir(std::string_view tag) {
  static std::atomic<int> counter{0};
  path_ = fs::temp_directory_path() /
          ("adaptchunk-" + std::string(tag) + "-" + std::to_string(::getpid()) + "-" + std::to_string(counter++));
  fs::remove_all(path_);
  fs::create_directories(path_);
}

TempDir::~TempDir() {
  std::error_code ec;
  fs::remove_all(path_, ec);
}

void copy_docs(const fs::path& dir, const std::vector<std::string>& doc_ids) {
  fs::create_directories(dir);
  for (const auto& id : doc_ids) {
    fs::copy_file(corpus_dir() / (id + ".md"), dir / (id + ".md"), fs::copy_options::overwrite_existing);
    fs::copy_file(corpus_dir() / (id + ".json"), dir / (id + ".json"), fs::copy_options::overwrite_existing);
  }
}

std::string read(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot read " + path.string());
  std::stringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

void write(const fs::path& path, std::string_view content) {
  if (path.has_parent_path()) fs::create_directories(path.parent_path());
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  out.write(content.data(), static_cast<std::streamsize>(content.size()));
}

std::string mask_times(std::string_view table) {
  static const std::regex time(R"([0-9]+\.[0-9]{2}$)", std::regex::multiline);
  return std::regex_replace(std::string(table), time, "#.##");
}

std::string tree_dump(const fs::path& dir) {
  std::vector<fs::path> files;
  for (const auto& f : fs::recursive_directory_iterator(dir)) {
    if (f.is_regular_file()) files.push_back(f.path());
  }
  std::sort(files.begin(), files.end());
  std::string out;
  for (const auto& f : files) out += "== " + fs::relative(f, dir).string() + "\n" + read(f);
  return out;
}

}  // namespace fixture
