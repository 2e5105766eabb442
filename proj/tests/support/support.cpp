#include "support.hpp"

#include <sys/stat.h>
#include <sys/wait.h>
#include <unistd.h>

#include <array>
#include <cstdio>
#include <cstdlib>
#include <stdexcept>

#include "ddlpb/atomic_file.hpp"

namespace ddlpb::testing {

TempDir::TempDir() {
  std::string tmpl = (fs::temp_directory_path() / "ddlpb-test-XXXXXX").string();
  if (!mkdtemp(tmpl.data())) throw std::runtime_error("mkdtemp failed");
  path_ = tmpl;
}

TempDir::~TempDir() {
  std::error_code ec;
  fs::remove_all(path_, ec);
}

fs::path source_dir() { return DDLPB_SOURCE_DIR; }
fs::path frames_dir() { return source_dir() / "data" / "frames"; }
fs::path avito_ddl() { return source_dir() / "data" / "ddl" / "rel-avito.sql"; }
fs::path golden_dir() { return source_dir() / "tests" / "golden"; }
fs::path cli_path() { return DDLPB_CLI_PATH; }

namespace {

std::string shell_quote(const std::string& s) {
  std::string out = "'";
  for (char c : s) {
    if (c == '\'') {
      out += "'\\''";
    } else {
      out += c;
    }
  }
  return out + "'";
}

}  // namespace

CliResult run_cli(const std::vector<std::string>& args, const std::string& stdin_text,
                  const std::map<std::string, std::string>& env) {
  TempDir scratch;
  std::string cmd;
  for (const auto& [k, v] : env) cmd += k + "=" + shell_quote(v) + " ";
  cmd += shell_quote(cli_path().string());
  for (const auto& a : args) cmd += " " + shell_quote(a);
  auto in_file = scratch / "stdin";
  write_file_atomic(in_file, stdin_text);
  cmd += " < " + shell_quote(in_file.string()) + " 2>/dev/null";

  CliResult result;
  FILE* pipe = popen(cmd.c_str(), "r");
  if (!pipe) throw std::runtime_error("popen failed");
  std::array<char, 4096> buf;
  std::size_t n;
  while ((n = fread(buf.data(), 1, buf.size(), pipe)) > 0) result.out.append(buf.data(), n);
  int status = pclose(pipe);
  result.exit_code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
  return result;
}

std::map<std::string, FileState> snapshot(const fs::path& root) {
  std::map<std::string, FileState> out;
  if (!fs::exists(root)) return out;
  for (const auto& e : fs::recursive_directory_iterator(root)) {
    if (!e.is_regular_file()) continue;
    struct stat st {};
    ::stat(e.path().c_str(), &st);
    out[fs::relative(e.path(), root).string()] = {read_file(e.path()), static_cast<std::uintmax_t>(st.st_ino)};
  }
  return out;
}

std::map<std::string, std::string> contents(const fs::path& root) {
  std::map<std::string, std::string> out;
  for (auto& [k, v] : snapshot(root)) out[k] = std::move(v.content);
  return out;
}

std::uint64_t fnv1a(const std::string& data) {
  std::uint64_t h = 1469598103934665603ULL;
  for (unsigned char c : data) {
    h ^= c;
    h *= 1099511628211ULL;
  }
  return h;
}

}  // namespace ddlpb::testing
