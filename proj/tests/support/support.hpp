#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <string>
#include <vector>

namespace ddlpb::testing {

namespace fs = std::filesystem;

// Fresh directory under the system temp dir, removed on destruction.
class TempDir {
 public:
  TempDir();
  ~TempDir();
  TempDir(const TempDir&) = delete;
  TempDir& operator=(const TempDir&) = delete;

  const fs::path& path() const { return path_; }
  fs::path operator/(const fs::path& rel) const { return path_ / rel; }

 private:
  fs::path path_;
};

fs::path source_dir();
fs::path frames_dir();
fs::path avito_ddl();
fs::path golden_dir();
fs::path cli_path();

// Runs the CLI with the given arguments (each shell-quoted), feeding
// stdin_text when non-empty. stdout is captured; stderr is discarded.
struct CliResult {
  int exit_code = -1;
  std::string out;
};
CliResult run_cli(const std::vector<std::string>& args, const std::string& stdin_text = {},
                  const std::map<std::string, std::string>& env = {});

// Per-file identity used to prove that a file was not rewritten: an atomic
// rename always installs a new inode.
struct FileState {
  std::string content;
  std::uintmax_t inode = 0;

  friend bool operator==(const FileState&, const FileState&) = default;
};

// Relative path -> state for every regular file below root.
std::map<std::string, FileState> snapshot(const fs::path& root);

// Relative path -> content; drops inode numbers so that two separate
// trees can be compared.
std::map<std::string, std::string> contents(const fs::path& root);

std::uint64_t fnv1a(const std::string& data);

}  // namespace ddlpb::testing
