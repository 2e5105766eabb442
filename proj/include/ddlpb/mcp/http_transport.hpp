#pragma once

#include <memory>
#include <string>

#include "ddlpb/mcp/server.hpp"

namespace ddlpb::mcp {

struct HttpOptions {
  std::string host = "127.0.0.1";
  int port = 8811;  // 0 picks a free port
  std::string endpoint = "/mcp";
};

// Streamable HTTP transport, request/response subset: every JSON-RPC
// message is POSTed to the endpoint and answered in the response body.
// initialize issues an Mcp-Session-Id header that later requests must echo;
// DELETE ends the session. Requests are served concurrently.
class HttpTransport {
 public:
  HttpTransport(const McpServer& server, HttpOptions options);
  ~HttpTransport();
  HttpTransport(const HttpTransport&) = delete;
  HttpTransport& operator=(const HttpTransport&) = delete;

  // Binds the listening socket and returns the bound port. Throws IoError.
  int bind();

  // Serves until stop() is called. bind() must have succeeded.
  void listen();

  // Safe to call from any thread, including a signal-watching one.
  void stop();

  std::size_t session_count() const;

 private:
  struct Impl;
  std::unique_ptr<Impl> impl_;
};

}  // namespace ddlpb::mcp
