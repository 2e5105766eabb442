#include "ddlpb/mcp/propbank_tools.hpp"

#include "ddlpb/error.hpp"

namespace ddlpb::mcp {

void add_propbank_tools(McpServer& server, frames::FrameIndex index) {
  server.add_tool(
      {"search_by_lemma",
       "Find PropBank rolesets whose lemma or alias equals the given verb base form. Returns sense_id, "
       "definition and roles for each match, ordered by sense_id.",
       {{"type", "object"},
        {"properties",
         {{"lemma", {{"type", "string"}, {"description", "Verb base form, e.g. \"order\""}}},
          {"max_results",
           {{"type", "integer"},
            {"description", "Maximum number of rolesets to return"},
            {"default", frames::FrameIndex::kDefaultMaxResults},
            {"minimum", 1}}}}},
        {"required", {"lemma"}},
        {"additionalProperties", false}}},
      [index](const Json& args) {
        auto hits = index.search_by_lemma(args["lemma"].get<std::string>(), args["max_results"].get<std::size_t>());
        Json out = Json::array();
        for (const auto& h : hits) out.push_back(frames::to_json(h));
        return ToolResult::text(out.dump(2));
      });

  server.add_tool(
      {"search_by_sense_id",
       "Retrieve one PropBank roleset by its identifier (e.g. \"order.02\"), including roles, lexical links "
       "and, unless disabled, annotated examples.",
       {{"type", "object"},
        {"properties",
         {{"sense_id", {{"type", "string"}, {"description", "Roleset identifier, lemma.NN"}}},
          {"include_examples",
           {{"type", "boolean"}, {"description", "Include annotated example sentences"}, {"default", true}}}}},
        {"required", {"sense_id"}},
        {"additionalProperties", false}}},
      [index](const Json& args) {
        try {
          auto r = index.search_by_sense_id(args["sense_id"].get<std::string>(), args["include_examples"].get<bool>());
          return ToolResult::text(frames::to_json(r).dump(2));
        } catch (const NotFoundError& e) {
          return ToolResult::error(e.what());
        }
      });
}

McpServer make_propbank_server(frames::FrameIndex index) {
  McpServer server("propbank", DDLPB_VERSION);
  add_propbank_tools(server, std::move(index));
  return server;
}

}  // namespace ddlpb::mcp
