#include "ddlpb/orchestrator.hpp"

#include <fcntl.h>
#include <sys/file.h>
#include <unistd.h>

#include <atomic>
#include <cerrno>
#include <cstring>
#include <set>
#include <sstream>
#include <thread>

#include "ddlpb/atomic_file.hpp"
#include "ddlpb/log.hpp"

namespace fs = std::filesystem;
using nlohmann::ordered_json;

namespace ddlpb::orchestrator {

namespace {

class RunLock {
 public:
  RunLock(const fs::path& output_folder, std::string_view db_name)
      : path_(output_folder / (".ddlpb-" + std::string(db_name) + ".lock")) {
    std::error_code ec;
    fs::create_directories(output_folder, ec);
    if (ec) throw IoError("cannot create " + output_folder.string() + ": " + ec.message());
    fd_ = ::open(path_.c_str(), O_RDWR | O_CREAT | O_CLOEXEC, 0644);
    if (fd_ < 0) throw IoError("cannot open lock file " + path_.string() + ": " + std::strerror(errno));
    if (::flock(fd_, LOCK_EX | LOCK_NB) != 0) {
      int err = errno;
      ::close(fd_);
      if (err == EWOULDBLOCK) throw LockError("another run holds " + path_.string());
      throw IoError("cannot lock " + path_.string() + ": " + std::strerror(err));
    }
  }
  // The lock file itself stays; unlinking it would race with a waiting run.
  ~RunLock() {
    ::flock(fd_, LOCK_UN);
    ::close(fd_);
  }
  RunLock(const RunLock&) = delete;
  RunLock& operator=(const RunLock&) = delete;

 private:
  fs::path path_;
  int fd_ = -1;
};

struct WaveResult {
  std::vector<std::string> written;
  std::vector<TableFailure> failures;
};

WaveResult map_wave(const ddl::Schema& schema, const std::vector<std::string>& todo, std::string_view db_name,
                    const fs::path& output_folder, const frames::FrameIndex& index,
                    const mapper::VerbProvider& verbs, const RunOptions& opts, std::size_t iteration) {
  std::vector<char> ok(todo.size(), 0);  // not vector<bool>: workers write neighbouring slots
  std::vector<std::string> errors(todo.size());
  std::atomic<std::size_t> next{0};

  auto worker = [&] {
    for (std::size_t i = next++; i < todo.size(); i = next++) {
      try {
        auto ctx = ddl::table_context(schema, todo[i]);
        mapper::map_table(ctx, index, verbs, opts.mapper, output_folder, db_name);
        ok[i] = 1;
      } catch (const std::exception& e) {
        errors[i] = e.what();
      }
    }
  };

  std::size_t n = std::min(opts.concurrency, todo.size());
  {
    std::vector<std::jthread> pool;
    for (std::size_t t = 0; t < n; ++t) pool.emplace_back(worker);
  }

  WaveResult r;
  for (std::size_t i = 0; i < todo.size(); ++i) {
    if (ok[i]) {
      r.written.push_back(todo[i]);
    } else {
      logger().warn("event=table_failed table=\"{}\" iteration={} error=\"{}\"", todo[i], iteration, errors[i]);
      r.failures.push_back({todo[i], iteration, errors[i]});
    }
  }
  return r;
}

}  // namespace

void validate(const RunOptions& opts) {
  std::vector<std::string> v;
  if (opts.concurrency < 1) v.push_back("concurrency must be >= 1");
  if (opts.max_iterations < 1) v.push_back("max_iterations must be >= 1");
  try {
    mapper::validate(opts.mapper);
  } catch (const ValidationError& e) {
    v.insert(v.end(), e.violations().begin(), e.violations().end());
  }
  if (!v.empty()) throw ValidationError(std::move(v));
}

RunReport run(const ddl::Schema& schema, std::string_view db_name, const fs::path& output_folder,
              const frames::FrameIndex& index, const mapper::VerbProvider& verbs, const RunOptions& opts) {
  validate(opts);
  if (db_name.empty()) throw ValidationError({"db_name must be non-empty"});
  const auto start = std::chrono::steady_clock::now();
  RunLock lock(output_folder, db_name);

  RunReport report;
  report.db_name = std::string(db_name);
  std::set<std::string> mapped;

  // Iteration k coordinates and, when work is pending, runs one mapping
  // wave. Once the bound is reached a final coordinate pass fills in the
  // report without counting as an iteration.
  bool done = false;
  while (report.iterations < opts.max_iterations) {
    ++report.iterations;
    auto status = coordinator::coordinate(schema, output_folder, db_name);
    if (status.todo.empty()) {
      report.final_report = std::move(status);
      done = true;
      break;
    }
    logger().info("event=wave_start db=\"{}\" iteration={} todo={}", db_name, report.iterations, status.todo.size());
    auto wave = map_wave(schema, status.todo, db_name, output_folder, index, verbs, opts, report.iterations);
    mapped.insert(wave.written.begin(), wave.written.end());
    for (auto& f : wave.failures) report.failures.push_back(std::move(f));
  }
  if (!done) report.final_report = coordinator::coordinate(schema, output_folder, db_name);

  for (const auto& t : schema.tables)
    if (mapped.count(t.name)) report.tables_mapped_this_run.push_back(t.name);
  report.elapsed =
      std::chrono::duration_cast<std::chrono::milliseconds>(std::chrono::steady_clock::now() - start);
  logger().info("event=run_done db=\"{}\" iterations={} mapped={} pending={} elapsed_ms={}", db_name,
                report.iterations, report.tables_mapped_this_run.size(), report.final_report.todo.size(),
                report.elapsed.count());
  return report;
}

RunReport run(const fs::path& ddl_file, std::string_view db_name, const fs::path& output_folder,
              const frames::FrameIndex& index, const mapper::VerbProvider& verbs, const RunOptions& opts) {
  auto schema = ddl::parse_ddl(read_file(ddl_file), ddl_file.filename().string());
  return run(schema, db_name, output_folder, index, verbs, opts);
}

ordered_json to_json(const RunReport& report) {
  ordered_json failures = ordered_json::array();
  for (const auto& f : report.failures) {
    failures.push_back({{"table", f.table_name}, {"iteration", f.iteration}, {"error", f.error}});
  }
  auto coord = coordinator::to_json(report.final_report);
  return {{"db_name", report.db_name},
          {"complete", report.complete()},
          {"iterations", report.iterations},
          {"tables_mapped_this_run", report.tables_mapped_this_run},
          {"final_statuses", coord["statuses"]},
          {"failures", std::move(failures)},
          {"elapsed_ms", report.elapsed.count()}};
}

std::string render_text(const RunReport& report) {
  std::ostringstream os;
  os << coordinator::render_text(report.final_report);
  for (const auto& f : report.failures) {
    os << "failure: " << f.table_name << " (iteration " << f.iteration << "): " << f.error << "\n";
  }
  os << report.tables_mapped_this_run.size() << " tables mapped in " << report.iterations
     << (report.iterations == 1 ? " iteration" : " iterations") << " (" << report.elapsed.count() << " ms)\n";
  return os.str();
}

}  // namespace ddlpb::orchestrator
