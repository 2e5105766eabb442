#include "ddlpb/mcp/http_transport.hpp"

#include <httplib.h>

#include <atomic>
#include <chrono>
#include <mutex>
#include <random>
#include <thread>
#include <unordered_set>

#include "ddlpb/error.hpp"
#include "ddlpb/log.hpp"
#include "ddlpb/text.hpp"

namespace ddlpb::mcp {

namespace {

constexpr const char* kSessionHeader = "Mcp-Session-Id";
constexpr const char* kJsonType = "application/json";

std::string new_session_id() {
  static std::mutex mu;
  static std::random_device rd;
  static const char* hex = "0123456789abcdef";
  std::lock_guard lock(mu);
  std::string id;
  for (int i = 0; i < 8; ++i) {
    auto word = rd();
    for (int k = 0; k < 4; ++k, word >>= 4) id += hex[word & 0xF];
  }
  return id;
}

bool is_json_content(const httplib::Request& req) {
  auto type = req.get_header_value("Content-Type");
  auto semi = type.find(';');
  return text::iequals(text::trim(std::string_view(type).substr(0, semi)), kJsonType);
}

void reply_error(httplib::Response& res, int status, int code, std::string_view message) {
  res.status = status;
  res.set_content(to_wire(rpc::error_response(nullptr, code, message)), kJsonType);
}

}  // namespace

struct HttpTransport::Impl {
  const McpServer& server;
  HttpOptions options;
  httplib::Server http;
  mutable std::mutex mu;
  std::unordered_set<std::string> sessions;
  int port = -1;
  std::atomic<bool> listening{false};
  std::atomic<bool> stop_requested{false};

  Impl(const McpServer& s, HttpOptions o) : server(s), options(std::move(o)) { routes(); }

  bool known(const std::string& id) const {
    std::lock_guard lock(mu);
    return sessions.count(id) != 0;
  }

  void post(const httplib::Request& req, httplib::Response& res) {
    if (!is_json_content(req)) {
      reply_error(res, 415, rpc::kInvalidRequest, "Content-Type must be application/json");
      return;
    }
    Json message;
    try {
      message = Json::parse(req.body);
    } catch (const Json::parse_error& e) {
      reply_error(res, 400, rpc::kParseError, std::string("parse error: ") + e.what());
      return;
    }

    const bool initialize = message.is_object() && message.contains("id") && message.value("method", "") == "initialize";
    std::string session;
    if (initialize) {
      session = new_session_id();
    } else {
      if (!req.has_header(kSessionHeader)) {
        reply_error(res, 400, rpc::kInvalidRequest, "missing Mcp-Session-Id header");
        return;
      }
      session = req.get_header_value(kSessionHeader);
      if (!known(session)) {
        reply_error(res, 404, rpc::kInvalidRequest, "unknown session");
        return;
      }
    }

    auto response = server.handle(message);
    if (initialize && response && response->contains("result")) {
      std::lock_guard lock(mu);
      sessions.insert(session);
      res.set_header(kSessionHeader, session);
      logger().info("event=session_open server={} session={}", server.name(), session);
    }
    if (!response) {
      res.status = 202;
      return;
    }
    res.status = 200;
    res.set_content(to_wire(*response), kJsonType);
  }

  void del(const httplib::Request& req, httplib::Response& res) {
    if (!req.has_header(kSessionHeader)) {
      reply_error(res, 400, rpc::kInvalidRequest, "missing Mcp-Session-Id header");
      return;
    }
    auto id = req.get_header_value(kSessionHeader);
    std::lock_guard lock(mu);
    if (sessions.erase(id) == 0) {
      reply_error(res, 404, rpc::kInvalidRequest, "unknown session");
      return;
    }
    logger().info("event=session_close server={} session={}", server.name(), id);
    res.status = 204;
  }

  void routes() {
    const auto& ep = options.endpoint;
    http.Post(ep, [this](const httplib::Request& req, httplib::Response& res) { post(req, res); });
    http.Delete(ep, [this](const httplib::Request& req, httplib::Response& res) { del(req, res); });
    auto not_allowed = [](const httplib::Request&, httplib::Response& res) {
      res.set_header("Allow", "POST, DELETE");
      reply_error(res, 405, rpc::kInvalidRequest, "method not allowed");
    };
    http.Get(ep, not_allowed);
    http.Put(ep, not_allowed);
    http.Patch(ep, not_allowed);
    http.Options(ep, not_allowed);
  }
};

HttpTransport::HttpTransport(const McpServer& server, HttpOptions options)
    : impl_(std::make_unique<Impl>(server, std::move(options))) {}

HttpTransport::~HttpTransport() { stop(); }

int HttpTransport::bind() {
  auto& o = impl_->options;
  int port = o.port == 0 ? impl_->http.bind_to_any_port(o.host) : (impl_->http.bind_to_port(o.host, o.port) ? o.port : -1);
  if (port < 0) throw IoError("cannot bind " + o.host + ":" + std::to_string(o.port));
  impl_->port = port;
  logger().info("event=http_bound server={} host={} port={} endpoint={}", impl_->server.name(), o.host, port,
                o.endpoint);
  return port;
}

void HttpTransport::listen() {
  if (impl_->port < 0) throw IoError("listen() called before bind()");
  impl_->listening = true;
  if (!impl_->stop_requested) impl_->http.listen_after_bind();
  impl_->listening = false;
}

void HttpTransport::stop() {
  // httplib ignores stop() until its accept loop runs, so a stop racing
  // with listen() waits for the loop to come up first.
  impl_->stop_requested = true;
  while (impl_->listening && !impl_->http.is_running()) std::this_thread::sleep_for(std::chrono::milliseconds(1));
  impl_->http.stop();
}

std::size_t HttpTransport::session_count() const {
  std::lock_guard lock(impl_->mu);
  return impl_->sessions.size();
}

}  // namespace ddlpb::mcp
