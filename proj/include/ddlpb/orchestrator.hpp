#pragma once

#include <chrono>
#include <cstddef>
#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

#include "ddlpb/coordinator.hpp"
#include "ddlpb/ddl.hpp"
#include "ddlpb/error.hpp"
#include "ddlpb/frames.hpp"
#include "ddlpb/mapper.hpp"

namespace ddlpb::orchestrator {

// Another run holds the lock for the same (output folder, database).
class LockError : public Error {
 public:
  using Error::Error;
};

struct RunOptions {
  mapper::MapperConfig mapper;
  std::size_t concurrency = 4;
  std::size_t max_iterations = 3;
};

void validate(const RunOptions& opts);

struct TableFailure {
  std::string table_name;
  std::size_t iteration = 0;
  std::string error;
};

struct RunReport {
  std::string db_name;
  std::size_t iterations = 0;
  coordinator::CoordinatorReport final_report;
  std::vector<std::string> tables_mapped_this_run;  // schema order, each once
  std::chrono::milliseconds elapsed{0};
  std::vector<TableFailure> failures;

  bool complete() const { return final_report.todo.empty(); }
};

// Coordinate, map every pending table with at most opts.concurrency mappers
// in flight, and repeat until nothing is pending or opts.max_iterations
// iterations have run. In the latter case one more coordinate pass produces
// final_report without counting as an iteration. Tables that were
// VALID when a wave started are never touched. Mapper failures are recorded
// and retried on the next iteration.
//
// Holds an advisory lock on {output_folder}/.ddlpb-{db_name}.lock for the
// whole run; throws LockError when another process holds it.
RunReport run(const ddl::Schema& schema, std::string_view db_name, const std::filesystem::path& output_folder,
              const frames::FrameIndex& index, const mapper::VerbProvider& verbs, const RunOptions& opts);

// Reads and parses the DDL file first (IoError / ParseError are fatal).
RunReport run(const std::filesystem::path& ddl_file, std::string_view db_name,
              const std::filesystem::path& output_folder, const frames::FrameIndex& index,
              const mapper::VerbProvider& verbs, const RunOptions& opts);

nlohmann::ordered_json to_json(const RunReport& report);
std::string render_text(const RunReport& report);

}  // namespace ddlpb::orchestrator
