#pragma once

#include <iosfwd>
#include <string>

#include "cardinal_cli/config.hpp"

namespace cardinal::cli {

enum class Command { density, price, bound, converge, validate };

Command parse_command(const std::string& name);

// Returns false when a validate run finished but one of its checks failed.
// Library errors propagate.
bool execute(const RunConfig& config, Command command, std::ostream& out);

// Parse, execute and map failures to exit codes: 0 success, 1 numeric
// failure, 2 configuration failure.  Errors go to err as a JSON document.
int run(const std::string& command, const std::string& config_path, const Overrides& overrides, std::ostream& out,
        std::ostream& err);

}  // namespace cardinal::cli
