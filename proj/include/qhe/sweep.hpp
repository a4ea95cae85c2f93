// sweep.hpp: (omega20, lam) grid evaluation
//
// Two kernels fill the same row-major grid (omega20 outer, lam inner):
// sweep_parallel distributes cells over OpenMP threads, sweep_serial is the
// single-threaded reference. Every cell is computed independently, so the two
// must agree bit for bit.

#pragma once

#include "qhe/dressed_model.hpp"
#include "qhe/kinetic_engine.hpp"

#include <cstddef>
#include <cstdint>
#include <functional>
#include <limits>
#include <optional>
#include <string>
#include <vector>

namespace qhe {

enum class EngineKind { Kinetic, Gkls };

const char* to_string(EngineKind kind) noexcept;
EngineKind parse_engine(const std::string& name);

struct Axis {
    std::string name;
    double min{0.0};
    double max{1.0};
    std::size_t count{1};

    bool operator==(const Axis&) const = default;

    double value(std::size_t i) const noexcept {
        if (count <= 1) return min;
        return min + (max - min) * static_cast<double>(i) / static_cast<double>(count - 1);
    }
};

struct GridSpec {
    Axis omega20{"omega20", 1.0, 5.0, 101};
    Axis lam{"lam", 0.0, 1.0, 101};

    bool operator==(const GridSpec&) const = default;

    std::size_t size() const noexcept { return omega20.count * lam.count; }
    std::size_t index(std::size_t i, std::size_t j) const noexcept { return i * lam.count + j; }
};

enum class CellStatus : std::uint8_t { Ok, Excluded };

struct CellObservables {
    double power{0.0};
    double efficiency{0.0};
    double efficacy{0.0};
    double sigma{0.0};
    double inv_eta_nd{std::numeric_limits<double>::quiet_NaN()};
    int mode{0};                 // HeatFlowMode value, 0 = unclassified
    bool engine{false};          // P > 0 at this cell
    bool efficiency_limit{false};  // lam = 0 cell carrying the lam -> 0+ efficiency
    CellStatus status{CellStatus::Ok};
};

enum class Observable { Power, Efficiency, Efficacy, Sigma, InvEtaNd, Mode };

const char* to_string(Observable obs) noexcept;
Observable parse_observable(const std::string& name);
double value_of(const CellObservables& cell, Observable obs) noexcept;

struct SweepMetadata {
    std::string engine;
    std::string config_hash;
    std::string version;
};

struct SweepGrid {
    GridSpec grid;
    std::vector<CellObservables> cells;
    SweepMetadata meta;
};

using CellFunction = std::function<CellObservables(double omega20, double lam)>;

// Both kernels rethrow the exception of the lowest failing cell index.
SweepGrid sweep_serial(const GridSpec& grid, const CellFunction& cell);
SweepGrid sweep_parallel(const GridSpec& grid, const CellFunction& cell);

struct EngineSettings {
    EngineKind engine{EngineKind::Kinetic};
    double omega10{1.0};
    std::optional<double> drive_freq;
    WorkChannelClosure closure;
};

CellObservables evaluate_cell(const EngineSettings& settings, const BathSpec& baths,
                              double omega20, double lam);

inline CellFunction make_cell_function(const EngineSettings& settings, const BathSpec& baths) {
    return [settings, baths](double omega20, double lam) {
        return evaluate_cell(settings, baths, omega20, lam);
    };
}

} // namespace qhe
