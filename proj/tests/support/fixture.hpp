#pragma once

#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

namespace fixture {

namespace fs = std::filesystem;

fs::path fixtures_dir();
fs::path corpus_dir();
fs::path config_path();
fs::path golden(std::string_view name);

// Fresh directory under the system temp dir, removed on destruction.
class TempDir {
 public:
  explicit TempDir(std::string_view tag);
  ~TempDir();
  TempDir(const TempDir&) = delete;
  TempDir& operator=(const TempDir&) = delete;
  const fs::path& path() const { return path_; }
  fs::path operator/(std::string_view name) const { return path_ / name; }

 private:
  fs::path path_;
};

// Copies the named fixture documents (Markdown and sidecar) into `dir`.
void copy_docs(const fs::path& dir, const std::vector<std::string>& doc_ids);

std::string read(const fs::path& path);
void write(const fs::path& path, std::string_view content);

// Replaces a trailing "d.dd" on every line by "#.##" so wall times drop out.
std::string mask_times(std::string_view table);

// Concatenation of every regular file under `dir`, in path order, with names.
std::string tree_dump(const fs::path& dir);

}  // namespace fixture
