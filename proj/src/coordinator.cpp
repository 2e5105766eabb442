#include "ddlpb/coordinator.hpp"

#include <algorithm>
#include <sstream>

namespace fs = std::filesystem;

namespace ddlpb::coordinator {

using mapping::MappingStatus;
using mapping::Status;

const MappingStatus* CoordinatorReport::status_of(std::string_view table_name) const {
  for (const auto& s : statuses)
    if (s.table_name == table_name) return &s.status;
  return nullptr;
}

std::size_t CoordinatorReport::count(Status s) const {
  return static_cast<std::size_t>(
      std::count_if(statuses.begin(), statuses.end(), [&](const TableStatus& t) { return t.status.status == s; }));
}

namespace {

// Detects an output folder that exists but cannot be listed, in which case
// no file under it can be classified.
std::string unreadable_reason(const fs::path& dir) {
  std::error_code ec;
  auto st = fs::status(dir, ec);
  if (st.type() == fs::file_type::not_found) return {};
  if (ec) return "cannot stat " + dir.string() + ": " + ec.message();
  if (st.type() != fs::file_type::directory) return dir.string() + " is not a directory";
  fs::directory_iterator it(dir, ec);
  if (ec) return "cannot read " + dir.string() + ": " + ec.message();
  return {};
}

}  // namespace

CoordinatorReport coordinate(const ddl::Schema& schema, const fs::path& output_dir, std::string_view db_name) {
  CoordinatorReport report;
  report.db_name = std::string(db_name);

  std::string reason = unreadable_reason(output_dir);
  if (reason.empty()) reason = unreadable_reason(output_dir / std::string(db_name));

  for (const auto& table : schema.tables) {
    MappingStatus st = reason.empty() ? mapping::classify_mapping_file(output_dir, db_name, table.name)
                                      : MappingStatus{Status::Error, reason};
    if (st.status != Status::Valid) report.todo.push_back(table.name);
    report.statuses.push_back({table.name, std::move(st)});
  }
  return report;
}

std::string render_text(const CoordinatorReport& report) {
  std::size_t width = 5;
  for (const auto& s : report.statuses) width = std::max(width, s.table_name.size());

  std::ostringstream out;
  auto pad = [](std::string_view s, std::size_t w) { return std::string(s) + std::string(w - s.size(), ' '); };
  out << pad("TABLE", width) << "  " << pad("STATUS", 7) << "  DETAIL\n";
  for (const auto& s : report.statuses) {
    out << pad(s.table_name, width) << "  " << pad(mapping::to_string(s.status.status), 7) << "  "
        << s.status.detail << "\n";
  }
  out << report.statuses.size() << " tables: " << report.count(Status::Valid) << " valid, "
      << report.count(Status::Missing) << " missing, " << report.count(Status::Empty) << " empty, "
      << report.count(Status::Error) << " error; " << report.todo.size() << " to map\n";
  return out.str();
}

nlohmann::ordered_json to_json(const CoordinatorReport& report) {
  nlohmann::ordered_json statuses = nlohmann::ordered_json::array();
  for (const auto& s : report.statuses) {
    statuses.push_back(
        {{"table", s.table_name}, {"status", mapping::to_string(s.status.status)}, {"detail", s.status.detail}});
  }
  return {{"db_name", report.db_name}, {"statuses", std::move(statuses)}, {"todo", report.todo}};
}

}  // namespace ddlpb::coordinator
