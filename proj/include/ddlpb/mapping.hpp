#pragma once

#include <filesystem>
#include <map>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

#include "ddlpb/ddl.hpp"

namespace ddlpb::mapping {

// One (roleset, argument grounding, confidence) triple for a table.
struct RolesetMapping {
  std::string sense_id;
  std::string lemma;
  std::string definition;
  // Role label -> column name, or free text when no column fits. Ordered so
  // that ARG0 < ARG1 < ... < ARGA < ARGM-*.
  std::map<std::string, std::string> roles;
  double confidence = 0.0;

  friend bool operator==(const RolesetMapping&, const RolesetMapping&) = default;
};

struct TableMappingOutput {
  std::string table_name;
  std::vector<RolesetMapping> mappings;

  friend bool operator==(const TableMappingOutput&, const TableMappingOutput&) = default;
};

// Every invariant violation of `out`, empty when valid.
std::vector<std::string> check_invariants(const TableMappingOutput& out);

// Mappings reordered the way serialize_mapping writes them: confidence
// descending, then sense_id ascending.
TableMappingOutput canonicalize(TableMappingOutput out);

// Deterministic JSON document with a trailing newline. Throws
// ValidationError naming each violated invariant.
std::string serialize_mapping(const TableMappingOutput& out);

// Throws ParseError for malformed JSON and ValidationError (listing every
// violation) for documents that do not match the schema. Unknown keys are
// ignored. Mapping order is preserved as written.
TableMappingOutput deserialize_mapping(std::string_view document);

// Optional strict check: role values that are not column names of `table`.
// These are warnings, never errors.
std::vector<std::string> grounding_warnings(const TableMappingOutput& out, const ddl::Table& table);

enum class Status { Valid, Missing, Empty, Error };

std::string_view to_string(Status s);

struct MappingStatus {
  Status status = Status::Missing;
  std::string detail;

  friend bool operator==(const MappingStatus&, const MappingStatus&) = default;
};

// {output_dir}/{db_name}/{table_name}.json
std::filesystem::path mapping_path(const std::filesystem::path& output_dir, std::string_view db_name,
                                   std::string_view table_name);

// Read-only. MISSING when the file is absent, ERROR when it cannot be read,
// is malformed, fails validation or names a different table, EMPTY when it
// holds zero mappings, VALID otherwise.
MappingStatus classify_mapping_file(const std::filesystem::path& output_dir, std::string_view db_name,
                                    std::string_view table_name);

nlohmann::ordered_json to_json(const TableMappingOutput& out);

}  // namespace ddlpb::mapping
