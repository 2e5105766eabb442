#include "ddlpb/mcp/server.hpp"

#include <cmath>
#include <stdexcept>

#include "ddlpb/error.hpp"
#include "ddlpb/log.hpp"

namespace ddlpb::mcp {

namespace {

// Error raised while dispatching a request that maps onto a JSON-RPC error
// object rather than a tool result.
struct RpcError {
  int code;
  std::string message;
};

bool type_matches(const Json& value, const std::string& type) {
  if (type == "string") return value.is_string();
  if (type == "integer") {
    if (value.is_number_integer()) return true;
    if (value.is_number_float()) {
      double d = value.get<double>();
      return std::isfinite(d) && std::floor(d) == d;
    }
    return false;
  }
  if (type == "number") return value.is_number();
  if (type == "boolean") return value.is_boolean();
  if (type == "object") return value.is_object();
  if (type == "array") return value.is_array();
  if (type == "null") return value.is_null();
  return true;
}

void validate_value(const Json& schema, const Json& value, const std::string& where, std::vector<std::string>& out) {
  if (!schema.is_object()) return;
  if (auto t = schema.find("type"); t != schema.end() && t->is_string()) {
    if (!type_matches(value, t->get<std::string>())) {
      out.push_back(where + ": expected " + t->get<std::string>());
      return;
    }
  }
  if (value.is_number()) {
    double d = value.get<double>();
    if (auto m = schema.find("minimum"); m != schema.end() && m->is_number() && d < m->get<double>()) {
      out.push_back(where + ": must be >= " + m->dump());
    }
    if (auto m = schema.find("maximum"); m != schema.end() && m->is_number() && d > m->get<double>()) {
      out.push_back(where + ": must be <= " + m->dump());
    }
  }
  if (!value.is_object()) return;

  const Json* props = nullptr;
  if (auto p = schema.find("properties"); p != schema.end() && p->is_object()) props = &*p;
  if (auto r = schema.find("required"); r != schema.end() && r->is_array()) {
    for (const auto& key : *r) {
      if (key.is_string() && !value.contains(key.get<std::string>())) {
        out.push_back(where + "." + key.get<std::string>() + ": required");
      }
    }
  }
  bool closed = false;
  if (auto a = schema.find("additionalProperties"); a != schema.end() && a->is_boolean()) closed = !a->get<bool>();
  for (const auto& [key, item] : value.items()) {
    if (props && props->contains(key)) {
      validate_value((*props)[key], item, where + "." + key, out);
    } else if (closed) {
      out.push_back(where + "." + key + ": unexpected property");
    }
  }
}

}  // namespace

namespace rpc {

Json error_response(const Json& id, int code, std::string_view message) {
  return {{"jsonrpc", "2.0"}, {"id", id}, {"error", {{"code", code}, {"message", message}}}};
}

}  // namespace rpc

Json ToolResult::to_json() const {
  Json blocks = Json::array();
  for (const auto& t : content) blocks.push_back({{"type", "text"}, {"text", t}});
  return {{"content", std::move(blocks)}, {"isError", is_error}};
}

std::vector<std::string> validate_arguments(const Json& schema, const Json& arguments) {
  std::vector<std::string> out;
  validate_value(schema, arguments, "arguments", out);
  return out;
}

Json apply_defaults(const Json& schema, Json arguments) {
  auto p = schema.find("properties");
  if (!arguments.is_object() || p == schema.end() || !p->is_object()) return arguments;
  for (const auto& [key, prop] : p->items()) {
    if (!arguments.contains(key) && prop.is_object() && prop.contains("default")) arguments[key] = prop["default"];
  }
  return arguments;
}

void McpServer::add_tool(ToolDescriptor descriptor, ToolHandler handler) {
  if (find(descriptor.name)) throw std::invalid_argument("duplicate tool name: " + descriptor.name);
  tools_.push_back({std::move(descriptor), std::move(handler)});
}

std::vector<ToolDescriptor> McpServer::tools() const {
  std::vector<ToolDescriptor> out;
  for (const auto& e : tools_) out.push_back(e.descriptor);
  return out;
}

const McpServer::Entry* McpServer::find(std::string_view name) const {
  for (const auto& e : tools_)
    if (e.descriptor.name == name) return &e;
  return nullptr;
}

ToolResult McpServer::call_tool(std::string_view name, const Json& arguments) const {
  const Entry* entry = find(name);
  if (!entry) throw NotFoundError("unknown tool: " + std::string(name), std::string(name));
  const Json& schema = entry->descriptor.input_schema;
  if (auto v = validate_arguments(schema, arguments); !v.empty()) throw ValidationError(std::move(v));
  try {
    return entry->handler(apply_defaults(schema, arguments));
  } catch (const std::exception& e) {
    return ToolResult::error(e.what());
  }
}

Json McpServer::dispatch(const std::string& method, const Json& params, const Json& id) const {
  if (method == "initialize") {
    return {{"protocolVersion", kProtocolVersion},
            {"capabilities", {{"tools", {{"listChanged", false}}}}},
            {"serverInfo", {{"name", name_}, {"version", version_}}}};
  }
  if (method == "ping") return Json::object();
  if (method == "tools/list") {
    Json list = Json::array();
    for (const auto& e : tools_) {
      list.push_back({{"name", e.descriptor.name},
                      {"description", e.descriptor.description},
                      {"inputSchema", e.descriptor.input_schema}});
    }
    return {{"tools", std::move(list)}};
  }
  if (method == "tools/call") {
    if (!params.is_object()) throw RpcError{rpc::kInvalidParams, "tools/call params must be an object"};
    auto name = params.find("name");
    if (name == params.end() || !name->is_string()) {
      throw RpcError{rpc::kInvalidParams, "tools/call params.name must be a string"};
    }
    Json args = Json::object();
    if (auto a = params.find("arguments"); a != params.end() && !a->is_null()) {
      if (!a->is_object()) throw RpcError{rpc::kInvalidParams, "tools/call params.arguments must be an object"};
      args = *a;
    }
    ToolResult result;
    try {
      result = call_tool(name->get<std::string>(), args);
    } catch (const NotFoundError& e) {
      throw RpcError{rpc::kInvalidParams, e.what()};
    } catch (const ValidationError& e) {
      throw RpcError{rpc::kInvalidParams, "invalid arguments for tool " + name->get<std::string>() + ": " + e.what()};
    }
    logger().debug("event=tool_call server={} tool={} id={} is_error={}", name_, name->get<std::string>(),
                   id.dump(), result.is_error);
    return result.to_json();
  }
  throw RpcError{rpc::kMethodNotFound, "method not found: " + method};
}

std::optional<Json> McpServer::handle(const Json& message) const {
  if (message.is_array()) return rpc::error_response(nullptr, rpc::kInvalidRequest, "batch requests are not supported");
  if (!message.is_object()) return rpc::error_response(nullptr, rpc::kInvalidRequest, "message must be an object");

  const bool has_id = message.contains("id");
  Json id = has_id ? message["id"] : Json();
  if (has_id && !(id.is_string() || id.is_number() || id.is_null())) {
    return rpc::error_response(nullptr, rpc::kInvalidRequest, "id must be a string or number");
  }

  auto version = message.find("jsonrpc");
  if (version == message.end() || *version != "2.0") {
    return rpc::error_response(id, rpc::kInvalidRequest, "jsonrpc must be \"2.0\"");
  }
  auto method = message.find("method");
  if (method == message.end()) {
    // A response sent to us (result or error): nothing to answer.
    if (has_id && (message.contains("result") || message.contains("error"))) return std::nullopt;
    return rpc::error_response(id, rpc::kInvalidRequest, "method is required");
  }
  if (!method->is_string()) return rpc::error_response(id, rpc::kInvalidRequest, "method must be a string");

  Json params = message.contains("params") ? message["params"] : Json::object();
  if (!has_id) {
    // Notifications are never answered, not even with errors.
    logger().debug("event=notification server={} method={}", name_, method->get<std::string>());
    return std::nullopt;
  }
  try {
    return Json{{"jsonrpc", "2.0"}, {"id", id}, {"result", dispatch(method->get<std::string>(), params, id)}};
  } catch (const RpcError& e) {
    return rpc::error_response(id, e.code, e.message);
  } catch (const std::exception& e) {
    logger().error("event=internal_error server={} method={} error=\"{}\"", name_, method->get<std::string>(),
                   e.what());
    return rpc::error_response(id, rpc::kInternalError, e.what());
  }
}

std::optional<Json> McpServer::handle_text(std::string_view text) const {
  Json message;
  try {
    message = Json::parse(text.begin(), text.end());
  } catch (const Json::parse_error& e) {
    return rpc::error_response(nullptr, rpc::kParseError, std::string("parse error: ") + e.what());
  }
  return handle(message);
}

std::string to_wire(const Json& message) { return message.dump(-1, ' ', false, Json::error_handler_t::replace); }

}  // namespace ddlpb::mcp
