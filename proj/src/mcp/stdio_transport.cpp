#include "ddlpb/mcp/stdio_transport.hpp"

#include <string>

#include "ddlpb/log.hpp"
#include "ddlpb/text.hpp"

namespace ddlpb::mcp {

int serve_stdio(const McpServer& server, std::istream& in, std::ostream& out) {
  logger().info("event=stdio_start server={}", server.name());
  std::string line;
  std::size_t handled = 0;
  while (std::getline(in, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (text::trim(line).empty()) continue;
    ++handled;
    if (auto response = server.handle_text(line)) {
      out << to_wire(*response) << '\n';
      out.flush();
    }
  }
  logger().info("event=stdio_eof server={} messages={}", server.name(), handled);
  return 0;
}

}  // namespace ddlpb::mcp
