#pragma once

#include <filesystem>
#include <optional>
#include <string_view>
#include <vector>

#include "ddlpb/mcp/server.hpp"

namespace ddlpb::mcp {

struct FsServerConfig {
  std::vector<std::filesystem::path> allowed_dirs;
  bool read_only = false;
};

// Path confinement for the filesystem tools. Every allowed directory is
// canonicalized once; candidate paths have all symlinks resolved (dangling
// ones included) before the containment check, so neither ".." nor a link
// can lead outside.
class Sandbox {
 public:
  // Throws ValidationError when allowed_dirs is empty or an entry is not an
  // existing directory.
  explicit Sandbox(FsServerConfig config);

  const FsServerConfig& config() const { return config_; }

  // Fully resolved absolute path when it lies inside an allowed directory,
  // nothing otherwise. Relative paths are taken against the first allowed
  // directory.
  std::optional<std::filesystem::path> resolve(std::string_view path) const;

  bool contains(const std::filesystem::path& resolved) const;

 private:
  FsServerConfig config_;
};

// Resolves every symlink along `path` the way the kernel would, without
// requiring the final components to exist. Gives up (nullopt) after 40
// links.
std::optional<std::filesystem::path> resolve_symlinks(const std::filesystem::path& path);

// Registers list_directory, read_text_file, read_file (alias of
// read_text_file) and write_file.
void add_fs_tools(McpServer& server, const Sandbox& sandbox);

McpServer make_fs_server(FsServerConfig config);

}  // namespace ddlpb::mcp
