#include <doctest.h>

#include <httplib.h>
#include <netinet/in.h>
#include <signal.h>
#include <spawn.h>
#include <sys/socket.h>
#include <sys/wait.h>
#include <unistd.h>

#include <chrono>
#include <json.hpp>
#include <thread>

#include "ddlpb/atomic_file.hpp"
#include "mcp_support.hpp"
#include "support.hpp"

using namespace ddlpb;
using namespace ddlpb::testing;
using nlohmann::json;

namespace {

std::vector<std::string> map_args(const fs::path& out) {
  return {"map", "--ddl", avito_ddl().string(), "--out", out.string(), "--frames", frames_dir().string()};
}

std::vector<std::string> with(std::vector<std::string> base, std::initializer_list<std::string> extra) {
  base.insert(base.end(), extra);
  return base;
}

std::size_t max_mappings(const fs::path& db_dir) {
  std::size_t most = 0;
  for (const auto& [_, text] : contents(db_dir)) most = std::max(most, json::parse(text)["mappings"].size());
  return most;
}

int free_port() {
  int fd = ::socket(AF_INET, SOCK_STREAM, 0);
  sockaddr_in addr{};
  addr.sin_family = AF_INET;
  addr.sin_addr.s_addr = htonl(INADDR_LOOPBACK);
  ::bind(fd, reinterpret_cast<sockaddr*>(&addr), sizeof addr);
  socklen_t len = sizeof addr;
  ::getsockname(fd, reinterpret_cast<sockaddr*>(&addr), &len);
  ::close(fd);
  return ntohs(addr.sin_port);
}

}  // namespace

TEST_CASE("version and usage errors") {
  auto v = run_cli({"--version"});
  CHECK(v.exit_code == 0);
  CHECK(v.out.find(DDLPB_VERSION) != std::string::npos);
  CHECK(run_cli({}).exit_code == 64);
  CHECK(run_cli({"map"}).exit_code == 64);
  CHECK(run_cli({"bogus"}).exit_code == 64);
  TempDir dir;
  CHECK(run_cli({"map", "--ddl", avito_ddl().string(), "--out", dir.path().string()}).exit_code == 64);
  CHECK(run_cli({"frames", "search", "--frames", frames_dir().string()}).exit_code == 64);
  CHECK(run_cli({"frames", "search", "--frames", frames_dir().string(), "--lemma", "a", "--sense-id", "a.01"}).exit_code == 64);
}

TEST_CASE("fatal errors exit 2") {
  TempDir dir;
  write_file_atomic(dir / "bad.sql", "CREATE TABLE t (a INT");
  CHECK(run_cli({"map", "--ddl", (dir / "bad.sql").string(), "--out", dir.path().string(), "--frames",
                 frames_dir().string()})
            .exit_code == 2);
  CHECK(run_cli({"map", "--ddl", avito_ddl().string(), "--out", dir.path().string(), "--frames",
                 (dir / "nope").string()})
            .exit_code == 2);
}

TEST_CASE("map, coordinate and validate JSON goldens") {
  TempDir dir;
  auto fresh = run_cli({"coordinate", "--ddl", avito_ddl().string(), "--out", dir.path().string(), "--json"});
  CHECK(fresh.exit_code == 0);
  CHECK(fresh.out == read_file(golden_dir() / "cli_coordinate_fresh.json"));

  auto mapped = run_cli(with(map_args(dir.path()), {"--json"}));
  CHECK(mapped.exit_code == 0);
  auto report = json::parse(mapped.out);
  CHECK(report["elapsed_ms"].is_number_integer());
  report["elapsed_ms"] = 0;
  CHECK(report == json::parse(read_file(golden_dir() / "cli_map_avito.json")));

  auto valid = run_cli({"validate", "--ddl", avito_ddl().string(), "--out", dir.path().string(), "--json", "--strict"});
  CHECK(valid.exit_code == 0);
  CHECK(valid.out == read_file(golden_dir() / "cli_validate_avito.json"));

  CHECK(contents(dir / "rel-avito") == contents(golden_dir() / "mappings"));
}

TEST_CASE("text output") {
  TempDir dir;
  auto mapped = run_cli(map_args(dir.path()));
  CHECK(mapped.exit_code == 0);
  CHECK(mapped.out.find("8 tables mapped in 2 iterations") != std::string::npos);
  auto again = run_cli(map_args(dir.path()));
  CHECK(again.out.find("0 tables mapped in 1 iteration") != std::string::npos);
  auto coord = run_cli({"coordinate", "--ddl", avito_ddl().string(), "--out", dir.path().string()});
  CHECK(coord.exit_code == 0);
  CHECK(coord.out.find("PhoneRequests") != std::string::npos);
  CHECK(coord.out.find("VALID") != std::string::npos);
}

TEST_CASE("validate exit codes") {
  TempDir dir;
  auto validate = [&](std::initializer_list<std::string> extra) {
    return run_cli(with({"validate", "--ddl", avito_ddl().string(), "--out", dir.path().string()}, extra)).exit_code;
  };
  CHECK(validate({}) == 1);
  run_cli(map_args(dir.path()));
  CHECK(validate({}) == 0);
  write_file_atomic(dir / "rel-avito" / "Ads.json", "not json");
  CHECK(validate({}) == 1);
  CHECK(validate({"--table", "Users", "--table", "PhoneRequests"}) == 0);
  CHECK(validate({"--table", "Ads"}) == 1);
  CHECK(validate({"--table", "NoSuchTable"}) == 1);
}

TEST_CASE("database name defaults to the DDL file stem and can be overridden") {
  TempDir dir;
  run_cli(with(map_args(dir.path()), {"--db", "custom"}));
  CHECK(fs::exists(dir / "custom" / "Ads.json"));
  CHECK_FALSE(fs::exists(dir / "rel-avito"));
}

TEST_CASE("settings precedence: flag over environment over config file") {
  TempDir dir;
  write_file_atomic(dir / "cfg.json", R"({"max_rolesets": 2, "frames": ")" + frames_dir().string() + "\"}");
  std::vector<std::string> base = {"--config", (dir / "cfg.json").string(), "map", "--ddl", avito_ddl().string()};

  run_cli(with(base, {"--out", (dir / "a").string()}));
  CHECK(max_mappings(dir / "a" / "rel-avito") == 2);

  run_cli(with(base, {"--out", (dir / "b").string()}), {}, {{"DDLPB_MAX_ROLESETS", "1"}});
  CHECK(max_mappings(dir / "b" / "rel-avito") == 1);

  run_cli(with(base, {"--out", (dir / "c").string(), "--max-rolesets", "3"}), {}, {{"DDLPB_MAX_ROLESETS", "1"}});
  CHECK(max_mappings(dir / "c" / "rel-avito") == 3);

  run_cli({"map", "--ddl", avito_ddl().string()}, {},
          {{"DDLPB_FRAMES", frames_dir().string()}, {"DDLPB_OUT", (dir / "d").string()}});
  CHECK(fs::exists(dir / "d" / "rel-avito" / "Ads.json"));

  write_file_atomic(dir / "broken.json", "[1, 2]");
  CHECK(run_cli({"--config", (dir / "broken.json").string(), "coordinate", "--ddl", avito_ddl().string()}).exit_code == 2);
}

TEST_CASE("frames search") {
  auto text = run_cli({"frames", "search", "--frames", frames_dir().string(), "--lemma", "order"});
  CHECK(text.exit_code == 0);
  CHECK(text.out.find("order.02") != std::string::npos);
  CHECK(text.out.find("3 rolesets") != std::string::npos);

  auto golden = run_cli({"frames", "search", "--frames", frames_dir().string(), "--lemma", "order", "--json"});
  CHECK(golden.out == read_file(golden_dir() / "cli_frames_order.json"));

  auto sense = run_cli({"frames", "search", "--frames", frames_dir().string(), "--sense-id", "order.02", "--json",
                        "--no-examples"});
  CHECK(sense.exit_code == 0);
  CHECK(json::parse(sense.out)["examples"].empty());

  CHECK(run_cli({"frames", "search", "--frames", frames_dir().string(), "--sense-id", "order.99"}).exit_code == 1);
  auto none = run_cli({"frames", "search", "--frames", frames_dir().string(), "--lemma", "zzxqv", "--json"});
  CHECK(none.exit_code == 0);
  CHECK(json::parse(none.out).empty());
}

TEST_CASE("serve-propbank over stdio reproduces the golden transcript") {
  auto out = run_cli({"serve-propbank", "--frames", frames_dir().string()},
                     read_file(golden_dir() / "propbank_stdio.requests.jsonl"));
  CHECK(out.exit_code == 0);
  CHECK(transcript_diff(read_file(golden_dir() / "propbank_stdio.responses.jsonl"), out.out) == "");
}

TEST_CASE("serve-fs over stdio") {
  TempDir dir;
  write_file_atomic(dir / "note.txt", "hello\n");
  std::string input = R"({"jsonrpc":"2.0","id":1,"method":"tools/list"})" "\n"
                      R"({"jsonrpc":"2.0","id":2,"method":"tools/call","params":{"name":"read_text_file","arguments":{"path":"note.txt"}}})" "\n"
                      R"({"jsonrpc":"2.0","id":3,"method":"tools/call","params":{"name":"write_file","arguments":{"path":"x.txt","content":"x"}}})" "\n"
                      R"({"jsonrpc":"2.0","id":4,"method":"tools/call","params":{"name":"read_text_file","arguments":{"path":"/etc/hostname"}}})" "\n";
  auto out = run_cli({"serve-fs", "--allow", dir.path().string(), "--read-only"}, input);
  CHECK(out.exit_code == 0);
  auto lines = parse_lines(out.out);
  REQUIRE(lines.size() == 4);
  CHECK(lines[0]["result"]["tools"].size() == 4);
  CHECK(lines[1]["result"]["content"][0]["text"] == "hello\n");
  CHECK(lines[2]["result"]["isError"] == true);
  CHECK(lines[3]["result"]["isError"] == true);
  CHECK_FALSE(fs::exists(dir / "x.txt"));

  CHECK(run_cli({"serve-fs", "--allow", (dir / "missing").string()}).exit_code == 2);
}

TEST_CASE("serve-propbank over HTTP answers initialize and stops on SIGTERM") {
  const int port = free_port();
  const std::string bind = "127.0.0.1:" + std::to_string(port);
  std::vector<std::string> args = {cli_path().string(), "--log-level", "off", "serve-propbank", "--frames",
                                   frames_dir().string(), "--transport", "http", "--bind", bind};
  std::vector<char*> argv;
  for (auto& a : args) argv.push_back(a.data());
  argv.push_back(nullptr);
  pid_t pid = 0;
  REQUIRE(posix_spawn(&pid, argv[0], nullptr, nullptr, argv.data(), environ) == 0);

  httplib::Client client("127.0.0.1", port);
  client.set_connection_timeout(1);
  httplib::Result res;
  const std::string init =
      R"({"jsonrpc":"2.0","id":1,"method":"initialize","params":{"protocolVersion":"2025-11-25","capabilities":{}}})";
  for (int attempt = 0; attempt < 100 && !res; ++attempt) {
    res = client.Post("/mcp", init, "application/json");
    if (!res) std::this_thread::sleep_for(std::chrono::milliseconds(50));
  }
  REQUIRE(res);
  CHECK(res->status == 200);
  CHECK(res->has_header("Mcp-Session-Id"));
  CHECK(json::parse(res->body)["result"]["serverInfo"]["name"] == "propbank");

  ::kill(pid, SIGTERM);
  int status = 0;
  ::waitpid(pid, &status, 0);
  CHECK(WIFEXITED(status));
  CHECK(WEXITSTATUS(status) == 0);
}
