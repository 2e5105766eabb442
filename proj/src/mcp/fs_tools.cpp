#include "ddlpb/mcp/fs_tools.hpp"

#include <algorithm>
#include <array>
#include <cstdint>
#include <deque>
#include <functional>
#include <mutex>

#include "ddlpb/atomic_file.hpp"
#include "ddlpb/error.hpp"

namespace fs = std::filesystem;

namespace ddlpb::mcp {

namespace {

constexpr int kMaxSymlinkHops = 40;

bool valid_utf8(std::string_view s) {
  std::size_t i = 0;
  while (i < s.size()) {
    auto c = static_cast<unsigned char>(s[i]);
    if (c < 0x80) {
      ++i;
      continue;
    }
    std::size_t n = 0;
    std::uint32_t cp = 0;
    if ((c >> 5) == 0x6) {
      n = 1, cp = c & 0x1F;
    } else if ((c >> 4) == 0xE) {
      n = 2, cp = c & 0x0F;
    } else if ((c >> 3) == 0x1E) {
      n = 3, cp = c & 0x07;
    } else {
      return false;
    }
    if (i + n >= s.size()) return false;
    for (std::size_t k = 1; k <= n; ++k) {
      auto cc = static_cast<unsigned char>(s[i + k]);
      if ((cc >> 6) != 0x2) return false;
      cp = (cp << 6) | (cc & 0x3F);
    }
    // Overlong forms, surrogates and values past U+10FFFF.
    if ((n == 1 && cp < 0x80) || (n == 2 && cp < 0x800) || (n == 3 && cp < 0x10000)) return false;
    if ((cp >= 0xD800 && cp <= 0xDFFF) || cp > 0x10FFFF) return false;
    i += n + 1;
  }
  return true;
}

std::string kind_of(const fs::directory_entry& e) {
  std::error_code ec;
  if (e.is_symlink(ec)) return "symlink";
  if (e.is_directory(ec)) return "directory";
  if (e.is_regular_file(ec)) return "file";
  return "other";
}

// Striped locks so that concurrent writes to one target are serialized
// while writes to different targets mostly are not.
std::mutex& write_lock_for(const fs::path& p) {
  static std::array<std::mutex, 64> locks;
  return locks[std::hash<std::string>{}(p.string()) % locks.size()];
}

}  // namespace

std::optional<fs::path> resolve_symlinks(const fs::path& path) {
  std::deque<fs::path> pending(path.begin(), path.end());
  fs::path out = path.root_path();
  if (out.empty()) out = fs::current_path();
  if (path.has_root_path()) pending.pop_front();  // root already in `out`
  int hops = 0;
  while (!pending.empty()) {
    fs::path part = std::move(pending.front());
    pending.pop_front();
    if (part.empty() || part == ".") continue;
    if (part == "..") {
      out = out.parent_path();
      continue;
    }
    fs::path next = out / part;
    std::error_code ec;
    auto st = fs::symlink_status(next, ec);
    if (!ec && fs::is_symlink(st)) {
      if (++hops > kMaxSymlinkHops) return std::nullopt;
      fs::path target = fs::read_symlink(next, ec);
      if (ec) return std::nullopt;
      std::vector<fs::path> parts(target.begin(), target.end());
      if (target.has_root_path()) {
        out = target.root_path();
        parts.erase(parts.begin());
      }
      pending.insert(pending.begin(), parts.begin(), parts.end());
      continue;
    }
    out = std::move(next);
  }
  return out;
}

Sandbox::Sandbox(FsServerConfig config) : config_(std::move(config)) {
  std::vector<std::string> v;
  if (config_.allowed_dirs.empty()) v.push_back("allowed_dirs must not be empty");
  for (auto& dir : config_.allowed_dirs) {
    std::error_code ec;
    auto canon = fs::canonical(dir, ec);
    if (ec || !fs::is_directory(canon)) {
      v.push_back("allowed dir " + dir.string() + " is not an existing directory");
      continue;
    }
    dir = canon;
  }
  if (!v.empty()) throw ValidationError(std::move(v));
}

bool Sandbox::contains(const fs::path& resolved) const {
  for (const auto& dir : config_.allowed_dirs) {
    auto [d, r] = std::mismatch(dir.begin(), dir.end(), resolved.begin(), resolved.end());
    if (d == dir.end()) return true;
  }
  return false;
}

std::optional<fs::path> Sandbox::resolve(std::string_view path) const {
  if (path.empty() || path.find('\0') != std::string_view::npos) return std::nullopt;
  fs::path p(path);
  if (p.is_relative()) p = config_.allowed_dirs.front() / p;
  auto resolved = resolve_symlinks(p);
  if (!resolved || !contains(*resolved)) return std::nullopt;
  return resolved;
}

void add_fs_tools(McpServer& server, const Sandbox& sandbox) {
  auto path_schema = [](const char* what) {
    return Json{{"type", "object"},
                {"properties", {{"path", {{"type", "string"}, {"description", what}}}}},
                {"required", {"path"}},
                {"additionalProperties", false}};
  };
  auto denied = [](const std::string& p) { return ToolResult::error("access denied: " + p); };

  server.add_tool({"list_directory",
                   "List the entries of a directory inside the allowed directories, sorted by name. Each entry "
                   "carries its kind: file, directory, symlink or other.",
                   path_schema("Directory to list")},
                  [sandbox, denied](const Json& args) {
                    auto raw = args["path"].get<std::string>();
                    auto p = sandbox.resolve(raw);
                    if (!p) return denied(raw);
                    std::error_code ec;
                    if (!fs::exists(*p, ec)) return ToolResult::error("not found: " + raw);
                    if (!fs::is_directory(*p, ec)) return ToolResult::error("not a directory: " + raw);
                    std::vector<std::pair<std::string, std::string>> entries;
                    for (fs::directory_iterator it(*p, ec), end; !ec && it != end; it.increment(ec)) {
                      entries.emplace_back(it->path().filename().string(), kind_of(*it));
                    }
                    if (ec) return ToolResult::error("cannot list " + raw + ": " + ec.message());
                    std::sort(entries.begin(), entries.end());
                    Json out = Json::array();
                    for (const auto& [name, kind] : entries) out.push_back({{"name", name}, {"kind", kind}});
                    return ToolResult::text(out.dump(2));
                  });

  auto read_text = [sandbox, denied](const Json& args) {
    auto raw = args["path"].get<std::string>();
    auto p = sandbox.resolve(raw);
    if (!p) return denied(raw);
    std::error_code ec;
    if (!fs::exists(*p, ec)) return ToolResult::error("not found: " + raw);
    if (!fs::is_regular_file(*p, ec)) return ToolResult::error("not a regular file: " + raw);
    std::string content;
    try {
      content = read_file(*p);
    } catch (const IoError& e) {
      return ToolResult::error(e.what());
    }
    if (!valid_utf8(content)) return ToolResult::error("not a UTF-8 text file: " + raw);
    return ToolResult::text(std::move(content));
  };
  server.add_tool({"read_text_file", "Read a UTF-8 text file inside the allowed directories.",
                   path_schema("File to read")},
                  read_text);
  server.add_tool({"read_file", "Alias of read_text_file.", path_schema("File to read")}, read_text);

  server.add_tool(
      {"write_file",
       "Create or replace a file inside the allowed directories with the given UTF-8 content. The write is "
       "atomic and missing parent directories are created.",
       {{"type", "object"},
        {"properties",
         {{"path", {{"type", "string"}, {"description", "File to write"}}},
          {"content", {{"type", "string"}, {"description", "Complete new file content"}}}}},
        {"required", {"path", "content"}},
        {"additionalProperties", false}}},
      [sandbox, denied](const Json& args) {
        auto raw = args["path"].get<std::string>();
        if (sandbox.config().read_only) return ToolResult::error("write rejected: server is read-only");
        auto p = sandbox.resolve(raw);
        if (!p) return denied(raw);
        std::error_code ec;
        if (fs::is_directory(*p, ec)) return ToolResult::error("is a directory: " + raw);
        const auto content = args["content"].get<std::string>();
        try {
          std::lock_guard lock(write_lock_for(*p));
          write_file_atomic(*p, content);
        } catch (const IoError& e) {
          return ToolResult::error(e.what());
        }
        return ToolResult::text("wrote " + std::to_string(content.size()) + " bytes to " + raw);
      });
}

McpServer make_fs_server(FsServerConfig config) {
  McpServer server("filesystem", DDLPB_VERSION);
  add_fs_tools(server, Sandbox(std::move(config)));
  return server;
}

}  // namespace ddlpb::mcp
