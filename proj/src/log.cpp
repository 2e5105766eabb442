#include "ddlpb/log.hpp"

#include <spdlog/sinks/stdout_sinks.h>
#include <spdlog/spdlog.h>

#include <string>

namespace ddlpb {

spdlog::logger& logger() {
  static std::shared_ptr<spdlog::logger> instance = [] {
    auto sink = std::make_shared<spdlog::sinks::stderr_sink_mt>();
    auto lg = std::make_shared<spdlog::logger>("ddlpb", sink);
    lg->set_pattern("%Y-%m-%dT%H:%M:%S.%e level=%l %v");
    lg->set_level(spdlog::level::warn);
    return lg;
  }();
  return *instance;
}

void set_log_level(std::string_view level) {
  logger().set_level(spdlog::level::from_str(std::string(level)));
}

}  // namespace ddlpb
