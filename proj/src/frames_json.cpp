#include "ddlpb/frames.hpp"

namespace ddlpb::frames {

using nlohmann::ordered_json;

namespace {

ordered_json roles_json(const std::vector<Role>& roles) {
  ordered_json out = ordered_json::array();
  for (const auto& r : roles) out.push_back({{"label", r.label}, {"description", r.description}});
  return out;
}

}  // namespace

ordered_json to_json(const RolesetSummary& s) {
  return {{"sense_id", s.sense_id}, {"definition", s.definition}, {"roles", roles_json(s.roles)}};
}

ordered_json to_json(const Roleset& r) {
  ordered_json examples = ordered_json::array();
  for (const auto& ex : r.examples) {
    ordered_json spans = ordered_json::array();
    for (const auto& s : ex.argument_spans) spans.push_back({{"label", s.label}, {"text", s.text}});
    examples.push_back({{"name", ex.name}, {"text", ex.text}, {"arguments", std::move(spans)}});
  }
  ordered_json links = ordered_json::array();
  for (const auto& l : r.lexlinks) links.push_back({{"resource", l.resource}, {"identifier", l.identifier}});

  return {{"sense_id", r.sense_id},
          {"lemma", r.lemma},
          {"definition", r.definition},
          {"aliases", r.aliases},
          {"roles", roles_json(r.roles)},
          {"examples", std::move(examples)},
          {"lexlinks", std::move(links)}};
}

ordered_json to_json(const LoadReport& rep) {
  return {{"files_seen", rep.files_seen},
          {"files_parsed", rep.files_parsed},
          {"failed_files", rep.failed_files},
          {"warnings", rep.warnings.size()}};
}

}  // namespace ddlpb::frames
