// config.hpp: run configuration and its key-value text format
//
// One `key = value` per line, `#` starts a comment. Keys (format version 1):
//
//   version, engine, omega10, omega20, lam, drive_freq,
//   beta_c, beta_h, g_c_res, g_h_res, g_c_det, g_h_det,
//   levels.delta_beta, levels.resonant, levels.detuning,
//   grid.omega20, grid.lam,
//   closure.mode, closure.gw_fixed, closure.width_G,
//   observables, fixture, out, format, seed
//
// Level lists are three `a:b` pairs separated by commas; grid axes are
// `min:max:count`; `auto` leaves an optional value unset.

#pragma once

#include "qhe/doe.hpp"
#include "qhe/dressed_model.hpp"
#include "qhe/kinetic_engine.hpp"
#include "qhe/sweep.hpp"

#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

namespace qhe {

enum class OutputFormat { Csv, Json };

inline constexpr int kConfigVersion = 1;

struct RunConfig {
    EngineKind engine{EngineKind::Kinetic};
    EngineSpec spec{1.0, 2.6, 0.5, std::nullopt};
    BathSpec baths{2.5, 0.5, 2.0, 2.0, 2.0, 2.0};
    FactorLevels levels;
    GridSpec grid;
    WorkChannelClosure closure;
    std::vector<Observable> observables;  // empty: every observable the engine provides
    std::string fixture;                  // "table4", a file path, or empty
    std::string out_dir{"out"};
    OutputFormat format{OutputFormat::Csv};
    std::uint64_t seed{20230324};

    bool operator==(const RunConfig&) const = default;
};

// Throws Error{InvalidConfig} naming the line and key.
RunConfig parse_config(std::string_view text, const std::string& source = "<config>");
RunConfig load_config(const std::string& path);
std::string emit_config(const RunConfig& config);

// FNV-1a of emit_config, as 16 hex digits.
std::string config_hash(const RunConfig& config);

EngineSettings engine_settings(const RunConfig& config);

// Accepts "NxM": N omega20 points by M lam points.
void apply_grid_flag(RunConfig& config, const std::string& value);

std::vector<Observable> effective_observables(const RunConfig& config);

} // namespace qhe
