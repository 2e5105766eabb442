#pragma once

#include <memory>
#include <string_view>

#include <spdlog/logger.h>

namespace ddlpb {

// Library-wide logger. Always writes to standard error so that stdout stays
// reserved for protocol traffic and machine-readable command output.
spdlog::logger& logger();

// Accepts trace, debug, info, warn, error, critical, off.
void set_log_level(std::string_view level);

}  // namespace ddlpb
