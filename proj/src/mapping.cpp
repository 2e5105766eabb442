#include "ddlpb/mapping.hpp"

#include <algorithm>
#include <cmath>
#include <set>

#include "ddlpb/atomic_file.hpp"
#include "ddlpb/error.hpp"
#include "ddlpb/frames.hpp"
#include "ddlpb/text.hpp"

namespace fs = std::filesystem;
using nlohmann::json;
using nlohmann::ordered_json;

namespace ddlpb::mapping {

namespace {

void check_mapping(const RolesetMapping& m, const std::string& where, std::vector<std::string>& v) {
  if (m.sense_id.empty()) v.push_back(where + ".sense_id: must be non-empty");
  if (m.lemma.empty()) v.push_back(where + ".lemma: must be non-empty");
  if (!m.sense_id.empty() && !m.lemma.empty() && m.sense_id.rfind(m.lemma + ".", 0) != 0) {
    v.push_back(where + ".sense_id: \"" + m.sense_id + "\" must begin with lemma \"" + m.lemma + ".\"");
  }
  if (!(m.confidence >= 0.0 && m.confidence <= 1.0)) {
    v.push_back(where + ".confidence: must be within [0, 1]");
  }
  for (const auto& [label, _] : m.roles) {
    if (!frames::is_valid_role_label(label)) v.push_back(where + ".roles: invalid role label \"" + label + "\"");
  }
  for (auto required : {"ARG0", "ARG1"}) {
    if (!m.roles.count(required)) v.push_back(where + ".roles: missing required role " + required);
  }
}

}  // namespace

std::vector<std::string> check_invariants(const TableMappingOutput& out) {
  std::vector<std::string> v;
  if (out.table_name.empty()) v.push_back("table_name: must be non-empty");
  std::set<std::string> seen;
  for (std::size_t i = 0; i < out.mappings.size(); ++i) {
    auto where = "mappings[" + std::to_string(i) + "]";
    check_mapping(out.mappings[i], where, v);
    if (!seen.insert(out.mappings[i].sense_id).second) {
      v.push_back(where + ".sense_id: duplicate sense_id \"" + out.mappings[i].sense_id + "\"");
    }
  }
  return v;
}

TableMappingOutput canonicalize(TableMappingOutput out) {
  std::stable_sort(out.mappings.begin(), out.mappings.end(), [](const RolesetMapping& a, const RolesetMapping& b) {
    if (a.confidence != b.confidence) return a.confidence > b.confidence;
    return a.sense_id < b.sense_id;
  });
  return out;
}

ordered_json to_json(const TableMappingOutput& out) {
  ordered_json mappings = ordered_json::array();
  for (const auto& m : out.mappings) {
    ordered_json roles = ordered_json::object();
    for (const auto& [label, value] : m.roles) roles[label] = value;
    mappings.push_back({{"sense_id", m.sense_id},
                        {"lemma", m.lemma},
                        {"definition", m.definition},
                        {"roles", std::move(roles)},
                        {"confidence", m.confidence}});
  }
  return {{"table_name", out.table_name}, {"mappings", std::move(mappings)}};
}

std::string serialize_mapping(const TableMappingOutput& out) {
  if (auto v = check_invariants(out); !v.empty()) throw ValidationError(std::move(v));
  return to_json(canonicalize(out)).dump(2) + "\n";
}

TableMappingOutput deserialize_mapping(std::string_view document) {
  json doc;
  try {
    doc = json::parse(document.begin(), document.end());
  } catch (const json::parse_error& e) {
    throw ParseError(std::string("malformed JSON: ") + e.what(), e.byte);
  }

  std::vector<std::string> v;
  TableMappingOutput out;
  if (!doc.is_object()) throw ValidationError({"document: must be a JSON object"});

  auto string_field = [&](const json& obj, const char* key, const std::string& where, std::string& dst) {
    auto it = obj.find(key);
    if (it == obj.end()) {
      v.push_back(where + key + ": missing");
    } else if (!it->is_string()) {
      v.push_back(where + key + ": must be a string");
    } else {
      dst = it->get<std::string>();
    }
  };

  string_field(doc, "table_name", "", out.table_name);
  if (out.table_name.empty() && doc.contains("table_name") && doc["table_name"].is_string()) {
    v.push_back("table_name: must be non-empty");
  }

  auto mit = doc.find("mappings");
  if (mit == doc.end()) {
    v.push_back("mappings: missing");
  } else if (!mit->is_array()) {
    v.push_back("mappings: must be an array");
  } else {
    std::set<std::string> seen;
    for (std::size_t i = 0; i < mit->size(); ++i) {
      const json& item = (*mit)[i];
      auto where = "mappings[" + std::to_string(i) + "]";
      if (!item.is_object()) {
        v.push_back(where + ": must be an object");
        continue;
      }
      RolesetMapping m;
      std::size_t before = v.size();
      string_field(item, "sense_id", where + ".", m.sense_id);
      string_field(item, "lemma", where + ".", m.lemma);
      string_field(item, "definition", where + ".", m.definition);

      auto rit = item.find("roles");
      if (rit == item.end()) {
        v.push_back(where + ".roles: missing");
      } else if (!rit->is_object()) {
        v.push_back(where + ".roles: must be an object");
      } else {
        for (const auto& [label, value] : rit->items()) {
          if (!value.is_string()) {
            v.push_back(where + ".roles." + label + ": must be a string");
          } else {
            m.roles[label] = value.get<std::string>();
          }
        }
      }

      auto cit = item.find("confidence");
      if (cit == item.end()) {
        v.push_back(where + ".confidence: missing");
      } else if (!cit->is_number()) {
        v.push_back(where + ".confidence: must be a number");
      } else {
        m.confidence = cit->get<double>();
      }

      // Field-level checks only make sense once the fields themselves parsed.
      if (v.size() == before) {
        check_mapping(m, where, v);
        if (!seen.insert(m.sense_id).second) {
          v.push_back(where + ".sense_id: duplicate sense_id \"" + m.sense_id + "\"");
        }
      }
      out.mappings.push_back(std::move(m));
    }
  }

  if (!v.empty()) throw ValidationError(std::move(v));
  return out;
}

std::vector<std::string> grounding_warnings(const TableMappingOutput& out, const ddl::Table& table) {
  std::vector<std::string> w;
  for (const auto& m : out.mappings) {
    for (const auto& [label, value] : m.roles) {
      if (!table.find_column(value)) {
        w.push_back(m.sense_id + " " + label + ": \"" + value + "\" is not a column of " + table.name);
      }
    }
  }
  return w;
}

std::string_view to_string(Status s) {
  switch (s) {
    case Status::Valid: return "VALID";
    case Status::Missing: return "MISSING";
    case Status::Empty: return "EMPTY";
    case Status::Error: return "ERROR";
  }
  return "ERROR";
}

fs::path mapping_path(const fs::path& output_dir, std::string_view db_name, std::string_view table_name) {
  return output_dir / std::string(db_name) / (std::string(table_name) + ".json");
}

MappingStatus classify_mapping_file(const fs::path& output_dir, std::string_view db_name,
                                    std::string_view table_name) {
  const auto path = mapping_path(output_dir, db_name, table_name);
  std::error_code ec;
  auto st = fs::status(path, ec);
  if (ec && st.type() != fs::file_type::not_found) {
    return {Status::Error, "cannot stat " + path.string() + ": " + ec.message()};
  }
  if (st.type() == fs::file_type::not_found) {
    return {Status::Missing, std::string(db_name) + "/" + std::string(table_name) + ".json not found"};
  }

  std::string content;
  try {
    content = read_file(path);
  } catch (const IoError& e) {
    return {Status::Error, e.what()};
  }

  TableMappingOutput out;
  try {
    out = deserialize_mapping(content);
  } catch (const ParseError& e) {
    return {Status::Error, e.what()};
  } catch (const ValidationError& e) {
    return {Status::Error, "schema violation: " + e.violations().front()};
  }
  if (!text::iequals(out.table_name, table_name)) {
    return {Status::Error,
            "file for table " + std::string(table_name) + " declares table_name \"" + out.table_name + "\""};
  }
  if (out.mappings.empty()) return {Status::Empty, "mappings array is empty"};
  return {Status::Valid, std::to_string(out.mappings.size()) + " mappings"};
}

}  // namespace ddlpb::mapping
