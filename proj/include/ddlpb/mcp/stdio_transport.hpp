#pragma once

#include <iostream>

#include "ddlpb/mcp/server.hpp"

namespace ddlpb::mcp {

// Newline-delimited JSON-RPC: one message per input line, one response per
// output line, flushed immediately. Blank lines are skipped; a line that is
// not JSON gets a -32700 response and the loop goes on. Returns 0 once the
// input reaches end of stream.
int serve_stdio(const McpServer& server, std::istream& in = std::cin, std::ostream& out = std::cout);

}  // namespace ddlpb::mcp
