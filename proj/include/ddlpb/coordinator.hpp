#pragma once

#include <filesystem>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include <json.hpp>

#include "ddlpb/ddl.hpp"
#include "ddlpb/mapping.hpp"

namespace ddlpb::coordinator {

struct TableStatus {
  std::string table_name;
  mapping::MappingStatus status;

  friend bool operator==(const TableStatus&, const TableStatus&) = default;
};

struct CoordinatorReport {
  std::string db_name;
  std::vector<TableStatus> statuses;  // one per schema table, schema order
  std::vector<std::string> todo;      // MISSING, EMPTY or ERROR tables, schema order

  const mapping::MappingStatus* status_of(std::string_view table_name) const;
  std::size_t count(mapping::Status s) const;

  friend bool operator==(const CoordinatorReport&, const CoordinatorReport&) = default;
};

// Classifies every table's mapping file under {output_dir}/{db_name}/ and
// lists the ones still needing work. Never writes. A missing output_dir
// means every table is MISSING; an unreadable one makes every table ERROR.
CoordinatorReport coordinate(const ddl::Schema& schema, const std::filesystem::path& output_dir,
                             std::string_view db_name);

// Fixed-width table of (table, status, detail) followed by a summary line.
std::string render_text(const CoordinatorReport& report);
nlohmann::ordered_json to_json(const CoordinatorReport& report);

}  // namespace ddlpb::coordinator
