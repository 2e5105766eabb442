// ddlpb: map relational schemas to PropBank rolesets, serve the frame index
// and a sandboxed filesystem over MCP, and inspect mapping output.

#include <csignal>
#include <cstdlib>
#include <iostream>
#include <optional>
#include <thread>

#include <CLI11.hpp>
#include <json.hpp>

#include "ddlpb/atomic_file.hpp"
#include "ddlpb/coordinator.hpp"
#include "ddlpb/ddl.hpp"
#include "ddlpb/error.hpp"
#include "ddlpb/frames.hpp"
#include "ddlpb/lexicon.hpp"
#include "ddlpb/log.hpp"
#include "ddlpb/mapper.hpp"
#include "ddlpb/mapping.hpp"
#include "ddlpb/mcp/fs_tools.hpp"
#include "ddlpb/mcp/http_transport.hpp"
#include "ddlpb/mcp/propbank_tools.hpp"
#include "ddlpb/mcp/stdio_transport.hpp"
#include "ddlpb/orchestrator.hpp"

namespace fs = std::filesystem;
using namespace ddlpb;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitDomain = 1;
constexpr int kExitFatal = 2;
constexpr int kExitUsage = 64;

struct UsageError : Error {
  using Error::Error;
};

// Settings that may come from a flag, a DDLPB_* environment variable or the
// JSON config file, in that order of precedence.
class Settings {
 public:
  void load_config(const std::string& path) {
    if (path.empty()) return;
    try {
      config_ = nlohmann::json::parse(read_file(path));
    } catch (const nlohmann::json::parse_error& e) {
      throw ParseError("config " + path + ": " + e.what(), e.byte);
    }
    if (!config_.is_object()) throw ParseError("config " + path + ": must be a JSON object");
  }

  template <typename T>
  std::optional<T> get(const CLI::Option* flag, const T& flag_value, const char* env, const char* key) const {
    if (flag && flag->count() > 0) return flag_value;
    if (const char* v = std::getenv(env); v && *v) return from_string<T>(v, env);
    if (auto it = config_.find(key); it != config_.end()) {
      try {
        return it->get<T>();
      } catch (const nlohmann::json::exception&) {
        throw ParseError(std::string("config key \"") + key + "\" has the wrong type");
      }
    }
    return std::nullopt;
  }

  template <typename T>
  T get_or(const CLI::Option* flag, const T& flag_value, const char* env, const char* key, T fallback) const {
    return get(flag, flag_value, env, key).value_or(std::move(fallback));
  }

 private:
  template <typename T>
  static T from_string(const std::string& s, const char* env) {
    if constexpr (std::is_same_v<T, std::string>) {
      return s;
    } else {
      T out{};
      if (!CLI::detail::lexical_cast(s, out)) throw UsageError(std::string(env) + ": invalid value \"" + s + "\"");
      return out;
    }
  }

  nlohmann::json config_ = nlohmann::json::object();
};

void print_json(const nlohmann::ordered_json& j) { std::cout << j.dump(2) << '\n'; }

frames::FrameIndex load_frames(const fs::path& dir) {
  frames::LoadReport report;
  auto index = frames::FrameIndex::load(dir, &report);
  for (const auto& f : report.failed_files) logger().warn("event=frame_file_failed detail=\"{}\"", f);
  return index;
}

ddl::Schema load_schema(const fs::path& ddl_file) {
  return ddl::parse_ddl(read_file(ddl_file), ddl_file.filename().string());
}

std::string db_name_for(const std::string& db, const fs::path& ddl_file) {
  return db.empty() ? ddl_file.stem().string() : db;
}

std::pair<std::string, int> parse_bind(const std::string& bind) {
  auto colon = bind.rfind(':');
  if (colon == std::string::npos) throw UsageError("--bind expects host:port, got \"" + bind + "\"");
  int port = -1;
  if (!CLI::detail::lexical_cast(bind.substr(colon + 1), port) || port < 0 || port > 65535) {
    throw UsageError("--bind has an invalid port: \"" + bind + "\"");
  }
  return {bind.substr(0, colon), port};
}

int serve(const mcp::McpServer& server, const std::string& transport, const std::string& bind,
          const std::string& endpoint) {
  if (transport == "stdio") return mcp::serve_stdio(server);

  auto [host, port] = parse_bind(bind);
  // Block the stop signals before any thread starts so only the watcher
  // below receives them.
  sigset_t stop_signals;
  sigemptyset(&stop_signals);
  sigaddset(&stop_signals, SIGINT);
  sigaddset(&stop_signals, SIGTERM);
  pthread_sigmask(SIG_BLOCK, &stop_signals, nullptr);

  mcp::HttpTransport http(server, {host, port, endpoint});
  int bound = http.bind();
  std::cerr << "serving " << server.name() << " on http://" << host << ":" << bound << endpoint << std::endl;
  std::thread watcher([&] {
    int sig = 0;
    sigwait(&stop_signals, &sig);
    logger().info("event=signal signal={}", sig);
    http.stop();
  });
  http.listen();
  // listen() only returns after stop(); wake the watcher if it is still
  // waiting because the server stopped for another reason.
  pthread_kill(watcher.native_handle(), SIGTERM);
  watcher.join();
  return kExitOk;
}

void render_frames_lemma(const std::vector<frames::RolesetSummary>& hits) {
  std::size_t width = 9;
  for (const auto& h : hits) width = std::max(width, h.sense_id.size());
  for (const auto& h : hits) {
    std::string roles;
    for (const auto& r : h.roles) roles += (roles.empty() ? "" : ", ") + r.label + " " + r.description;
    std::cout << h.sense_id << std::string(width - h.sense_id.size() + 2, ' ') << h.definition << "\n"
              << std::string(width + 2, ' ') << roles << "\n";
  }
  std::cout << hits.size() << (hits.size() == 1 ? " roleset\n" : " rolesets\n");
}

void render_roleset(const frames::Roleset& r) {
  std::cout << r.sense_id << ": " << r.definition << "\n";
  if (!r.aliases.empty()) {
    std::cout << "aliases:";
    for (const auto& a : r.aliases) std::cout << ' ' << a;
    std::cout << "\n";
  }
  std::cout << "roles:\n";
  for (const auto& role : r.roles) std::cout << "  " << role.label << ": " << role.description << "\n";
  if (!r.lexlinks.empty()) {
    std::cout << "lexlinks:\n";
    for (const auto& l : r.lexlinks) std::cout << "  " << l.resource << " " << l.identifier << "\n";
  }
  for (const auto& ex : r.examples) {
    std::cout << "example" << (ex.name.empty() ? "" : " (" + ex.name + ")") << ": " << ex.text << "\n";
    for (const auto& span : ex.argument_spans) std::cout << "  " << span.label << ": " << span.text << "\n";
  }
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Map relational schemas to PropBank rolesets"};
  app.set_version_flag("--version", DDLPB_VERSION);
  app.require_subcommand(1);

  std::string log_level = "warn";
  std::string config_path;
  auto* log_opt = app.add_option("--log-level", log_level, "trace, debug, info, warn, error, critical or off");
  app.add_option("--config", config_path, "JSON file with default settings")->check(CLI::ExistingFile);

  // serve-propbank
  auto* sp = app.add_subcommand("serve-propbank", "Serve the PropBank frame index over MCP");
  std::string sp_frames, sp_transport = "stdio", sp_bind = "127.0.0.1:8811", sp_endpoint = "/mcp";
  auto* sp_frames_opt = sp->add_option("--frames", sp_frames, "Frame corpus directory");
  sp->add_option("--transport", sp_transport, "stdio or http")->check(CLI::IsMember({"stdio", "http"}));
  sp->add_option("--bind", sp_bind, "host:port for the http transport");
  sp->add_option("--endpoint", sp_endpoint, "HTTP endpoint path");

  // serve-fs
  auto* sf = app.add_subcommand("serve-fs", "Serve a sandboxed filesystem over MCP");
  std::vector<std::string> sf_allow;
  bool sf_read_only = false;
  std::string sf_transport = "stdio", sf_bind = "127.0.0.1:8812", sf_endpoint = "/mcp";
  sf->add_option("--allow", sf_allow, "Allowed directory (repeatable)")->required();
  sf->add_flag("--read-only", sf_read_only, "Reject write_file");
  sf->add_option("--transport", sf_transport, "stdio or http")->check(CLI::IsMember({"stdio", "http"}));
  sf->add_option("--bind", sf_bind, "host:port for the http transport");
  sf->add_option("--endpoint", sf_endpoint, "HTTP endpoint path");

  // map
  auto* mp = app.add_subcommand("map", "Map every table of a DDL file, resuming previous work");
  std::string mp_ddl, mp_db, mp_out, mp_frames, mp_lexicon;
  std::size_t mp_concurrency = 0, mp_max_rolesets = 0, mp_num_verbs = 0, mp_max_iterations = 3;
  double mp_min_confidence = 0.0;
  bool mp_json = false;
  mp->add_option("--ddl", mp_ddl, "DDL file")->required();
  mp->add_option("--db", mp_db, "Database name (default: DDL file stem)");
  auto* mp_out_opt = mp->add_option("--out", mp_out, "Output folder");
  auto* mp_frames_opt = mp->add_option("--frames", mp_frames, "Frame corpus directory");
  auto* mp_conc_opt = mp->add_option("--concurrency", mp_concurrency, "Mappers in flight");
  auto* mp_maxr_opt = mp->add_option("--max-rolesets", mp_max_rolesets, "Mappings kept per table");
  auto* mp_verbs_opt = mp->add_option("--num-verbs", mp_num_verbs, "Candidate verbs per table");
  mp->add_option("--min-confidence", mp_min_confidence, "Drop candidates below this confidence")
      ->check(CLI::Range(0.0, 1.0));
  mp->add_option("--max-iterations", mp_max_iterations, "Coordinate/map rounds");
  mp->add_option("--lexicon", mp_lexicon, "JSON lexicon replacing the built-in one")->check(CLI::ExistingFile);
  mp->add_flag("--json", mp_json, "Machine-readable output");

  // coordinate
  auto* co = app.add_subcommand("coordinate", "Report the mapping status of every table");
  std::string co_ddl, co_db, co_out;
  bool co_json = false;
  co->add_option("--ddl", co_ddl, "DDL file")->required();
  co->add_option("--db", co_db, "Database name (default: DDL file stem)");
  auto* co_out_opt = co->add_option("--out", co_out, "Output folder");
  co->add_flag("--json", co_json, "Machine-readable output");

  // validate
  auto* va = app.add_subcommand("validate", "Check mapping files; exit 0 only if all are VALID");
  std::string va_ddl, va_db, va_out;
  std::vector<std::string> va_tables;
  bool va_json = false, va_strict = false;
  va->add_option("--ddl", va_ddl, "DDL file")->required();
  va->add_option("--db", va_db, "Database name (default: DDL file stem)");
  auto* va_out_opt = va->add_option("--out", va_out, "Output folder");
  va->add_option("--table", va_tables, "Only these tables (repeatable)");
  va->add_flag("--strict", va_strict, "Warn about role values that are not column names");
  va->add_flag("--json", va_json, "Machine-readable output");

  // frames search
  auto* fr = app.add_subcommand("frames", "Query the frame corpus");
  fr->require_subcommand(1);
  auto* fs_cmd = fr->add_subcommand("search", "Search by lemma or sense id");
  std::string fs_frames, fs_lemma, fs_sense;
  std::size_t fs_max = frames::FrameIndex::kDefaultMaxResults;
  bool fs_no_examples = false, fs_json = false;
  auto* fs_frames_opt = fs_cmd->add_option("--frames", fs_frames, "Frame corpus directory");
  auto* lemma_opt = fs_cmd->add_option("--lemma", fs_lemma, "Lemma or alias");
  auto* sense_opt = fs_cmd->add_option("--sense-id", fs_sense, "Roleset identifier");
  lemma_opt->excludes(sense_opt);
  fs_cmd->add_option("--max-results", fs_max, "Maximum lemma hits")->check(CLI::PositiveNumber);
  fs_cmd->add_flag("--no-examples", fs_no_examples, "Omit examples from a sense lookup");
  fs_cmd->add_flag("--json", fs_json, "Machine-readable output");

  try {
    app.parse(argc, argv);
  } catch (const CLI::Success& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kExitUsage;
  }

  try {
    Settings settings;
    settings.load_config(config_path);
    set_log_level(settings.get_or(log_opt, log_level, "DDLPB_LOG_LEVEL", "log_level", std::string("warn")));

    auto frames_dir = [&](const CLI::Option* opt, const std::string& value) {
      auto dir = settings.get(opt, value, "DDLPB_FRAMES", "frames");
      if (!dir) throw UsageError("--frames is required (or set DDLPB_FRAMES)");
      return fs::path(*dir);
    };
    auto out_dir = [&](const CLI::Option* opt, const std::string& value) {
      return fs::path(settings.get_or(opt, value, "DDLPB_OUT", "out", std::string("output")));
    };

    if (*sp) {
      auto server = mcp::make_propbank_server(load_frames(frames_dir(sp_frames_opt, sp_frames)));
      return serve(server, sp_transport, sp_bind, sp_endpoint);
    }

    if (*sf) {
      mcp::FsServerConfig cfg;
      for (const auto& d : sf_allow) cfg.allowed_dirs.emplace_back(d);
      cfg.read_only = sf_read_only;
      auto server = mcp::make_fs_server(std::move(cfg));
      return serve(server, sf_transport, sf_bind, sf_endpoint);
    }

    if (*mp) {
      orchestrator::RunOptions opts;
      opts.concurrency = settings.get_or<std::size_t>(mp_conc_opt, mp_concurrency, "DDLPB_CONCURRENCY", "concurrency", 4);
      opts.mapper.max_rolesets_per_table =
          settings.get_or<std::size_t>(mp_maxr_opt, mp_max_rolesets, "DDLPB_MAX_ROLESETS", "max_rolesets", 15);
      opts.mapper.num_verbs = settings.get_or<std::size_t>(mp_verbs_opt, mp_num_verbs, "DDLPB_NUM_VERBS", "num_verbs", 8);
      opts.mapper.min_confidence = mp_min_confidence;
      opts.max_iterations = mp_max_iterations;
      orchestrator::validate(opts);

      auto index = load_frames(frames_dir(mp_frames_opt, mp_frames));
      auto lexicon = mp_lexicon.empty() ? mapper::Lexicon::builtin() : mapper::Lexicon::from_json_file(mp_lexicon);
      mapper::BaselineVerbProvider provider(index, lexicon);
      auto schema = load_schema(mp_ddl);
      auto report = orchestrator::run(schema, db_name_for(mp_db, mp_ddl), out_dir(mp_out_opt, mp_out), index,
                                      provider, opts);
      if (mp_json) {
        print_json(orchestrator::to_json(report));
      } else {
        std::cout << orchestrator::render_text(report);
      }
      return report.complete() ? kExitOk : kExitDomain;
    }

    if (*co) {
      auto report = coordinator::coordinate(load_schema(co_ddl), out_dir(co_out_opt, co_out), db_name_for(co_db, co_ddl));
      if (co_json) {
        print_json(coordinator::to_json(report));
      } else {
        std::cout << coordinator::render_text(report);
      }
      return kExitOk;
    }

    if (*va) {
      auto schema = load_schema(va_ddl);
      auto db = db_name_for(va_db, va_ddl);
      auto out = out_dir(va_out_opt, va_out);
      std::vector<const ddl::Table*> tables;
      if (va_tables.empty()) {
        for (const auto& t : schema.tables) tables.push_back(&t);
      } else {
        for (const auto& name : va_tables) {
          const auto* t = schema.find_table(name);
          if (!t) {
            std::cerr << "error: table not found: " << name << "\n";
            return kExitDomain;
          }
          tables.push_back(t);
        }
      }

      bool all_valid = true;
      nlohmann::ordered_json results = nlohmann::ordered_json::array();
      for (const auto* t : tables) {
        auto st = mapping::classify_mapping_file(out, db, t->name);
        all_valid = all_valid && st.status == mapping::Status::Valid;
        std::vector<std::string> warnings;
        if (va_strict && st.status == mapping::Status::Valid) {
          warnings = mapping::grounding_warnings(
              mapping::deserialize_mapping(read_file(mapping::mapping_path(out, db, t->name))), *t);
        }
        if (va_json) {
          results.push_back({{"table", t->name},
                             {"status", mapping::to_string(st.status)},
                             {"detail", st.detail},
                             {"warnings", warnings}});
        } else {
          std::cout << t->name << ": " << mapping::to_string(st.status) << " (" << st.detail << ")\n";
          for (const auto& w : warnings) std::cout << "  warning: " << w << "\n";
        }
      }
      if (va_json) print_json({{"db_name", db}, {"valid", all_valid}, {"tables", std::move(results)}});
      return all_valid ? kExitOk : kExitDomain;
    }

    if (*fs_cmd) {
      if (fs_lemma.empty() == fs_sense.empty()) throw UsageError("frames search needs exactly one of --lemma or --sense-id");
      auto index = load_frames(frames_dir(fs_frames_opt, fs_frames));
      if (!fs_lemma.empty()) {
        auto hits = index.search_by_lemma(fs_lemma, fs_max);
        if (fs_json) {
          nlohmann::ordered_json arr = nlohmann::ordered_json::array();
          for (const auto& h : hits) arr.push_back(frames::to_json(h));
          print_json(arr);
        } else {
          render_frames_lemma(hits);
        }
        return kExitOk;
      }
      try {
        auto r = index.search_by_sense_id(fs_sense, !fs_no_examples);
        if (fs_json) {
          print_json(frames::to_json(r));
        } else {
          render_roleset(r);
        }
      } catch (const NotFoundError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitDomain;
      }
      return kExitOk;
    }
  } catch (const UsageError& e) {
    std::cerr << "usage error: " << e.what() << "\nRun with --help for more information.\n";
    return kExitUsage;
  } catch (const Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitFatal;
  }
  return kExitOk;
}
