// commands.hpp: the four CLI subcommands
//
// Each command returns a process exit code: 0 success, 1 validation or
// internal failure, 2 usage, configuration or I/O error.

#pragma once

#include "qhe/config.hpp"
#include "qhe/error.hpp"
#include "qhe/io.hpp"

#include <functional>
#include <ostream>

namespace qhe {

inline constexpr int kExitOk = 0;
inline constexpr int kExitFailure = 1;
inline constexpr int kExitUsage = 2;

int exit_code_for(ErrorKind kind) noexcept;

nlohmann::json steady_to_json(const RunConfig& config);

int cmd_steady(const RunConfig& config, std::ostream& out);
int cmd_sweep(const RunConfig& config, std::ostream& out);
int cmd_doe(const RunConfig& config, std::ostream& out);
int cmd_validate(const RunConfig& config, std::ostream& out);

// Runs a command, turning a thrown Error into a message on `err` and the
// matching exit code.
int run_command(const std::function<int()>& command, std::ostream& err);

// The evaluated or fixture-backed DOE pipeline without file output.
DoeReport doe_report(const RunConfig& config);

} // namespace qhe
