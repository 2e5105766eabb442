#pragma once

#include <functional>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

namespace ddlpb::mcp {

using Json = nlohmann::ordered_json;

// The protocol revision this server speaks; echoed in every initialize
// response regardless of what the client asks for.
inline constexpr std::string_view kProtocolVersion = "2025-11-25";

namespace rpc {
inline constexpr int kParseError = -32700;
inline constexpr int kInvalidRequest = -32600;
inline constexpr int kMethodNotFound = -32601;
inline constexpr int kInvalidParams = -32602;
inline constexpr int kInternalError = -32603;

Json error_response(const Json& id, int code, std::string_view message);
}  // namespace rpc

struct ToolResult {
  std::vector<std::string> content;  // text blocks
  bool is_error = false;

  static ToolResult text(std::string s) { return {{std::move(s)}, false}; }
  static ToolResult error(std::string s) { return {{std::move(s)}, true}; }

  Json to_json() const;
};

struct ToolDescriptor {
  std::string name;
  std::string description;
  Json input_schema;
};

// Receives the call arguments with schema defaults filled in. Exceptions
// escaping a handler become is_error results carrying the message.
using ToolHandler = std::function<ToolResult(const Json& arguments)>;

// Subset of JSON Schema used for tool inputs: type, properties, required,
// additionalProperties (false only), minimum, maximum. Returns every
// violation, empty when the arguments conform.
std::vector<std::string> validate_arguments(const Json& schema, const Json& arguments);
Json apply_defaults(const Json& schema, Json arguments);

// Transport-independent MCP dispatcher. Tools are registered during setup;
// afterwards the server is immutable and handle() may be called
// concurrently.
class McpServer {
 public:
  McpServer(std::string name, std::string version) : name_(std::move(name)), version_(std::move(version)) {}

  // Throws std::invalid_argument when the name is already taken.
  void add_tool(ToolDescriptor descriptor, ToolHandler handler);

  const std::string& name() const { return name_; }
  std::vector<ToolDescriptor> tools() const;

  // Returns the response for a request, nothing for notifications and for
  // stray responses.
  std::optional<Json> handle(const Json& message) const;

  // Parses one serialized message; malformed JSON yields a -32700 response
  // with a null id.
  std::optional<Json> handle_text(std::string_view text) const;

  // Calls a tool directly, bypassing JSON-RPC framing. Throws NotFoundError
  // for an unknown tool and ValidationError for non-conforming arguments.
  ToolResult call_tool(std::string_view name, const Json& arguments) const;

 private:
  struct Entry {
    ToolDescriptor descriptor;
    ToolHandler handler;
  };

  Json dispatch(const std::string& method, const Json& params, const Json& id) const;
  const Entry* find(std::string_view name) const;

  std::string name_;
  std::string version_;
  std::vector<Entry> tools_;
};

// Single-line serialization used on the wire. Invalid UTF-8 in strings is
// replaced rather than failing the whole message.
std::string to_wire(const Json& message);

}  // namespace ddlpb::mcp
