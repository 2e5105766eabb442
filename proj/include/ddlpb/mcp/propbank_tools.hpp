#pragma once

#include "ddlpb/frames.hpp"
#include "ddlpb/mcp/server.hpp"

namespace ddlpb::mcp {

// Registers search_by_lemma and search_by_sense_id. The index is shared,
// immutable and read concurrently by every call.
void add_propbank_tools(McpServer& server, frames::FrameIndex index);

McpServer make_propbank_server(frames::FrameIndex index);

}  // namespace ddlpb::mcp
