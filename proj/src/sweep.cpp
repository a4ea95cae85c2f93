// sweep.cpp: serial and OpenMP grid kernels, per-cell engine dispatch

#include "qhe/sweep.hpp"

#include "qhe/error.hpp"
#include "qhe/gkls_engine.hpp"

#include <exception>

#ifdef _OPENMP
#include <omp.h>
#endif

namespace qhe {

const char* to_string(EngineKind kind) noexcept {
    return kind == EngineKind::Kinetic ? "kinetic" : "gkls";
}

EngineKind parse_engine(const std::string& name) {
    if (name == "kinetic") return EngineKind::Kinetic;
    if (name == "gkls") return EngineKind::Gkls;
    throw Error(ErrorKind::InvalidConfig, "unknown engine '" + name + "' (expected kinetic|gkls)");
}

const char* to_string(Observable obs) noexcept {
    switch (obs) {
    case Observable::Power: return "P";
    case Observable::Efficiency: return "eta";
    case Observable::Efficacy: return "Peta";
    case Observable::Sigma: return "sigma";
    case Observable::InvEtaNd: return "inv_eta_nd";
    case Observable::Mode: return "mode";
    }
    return "?";
}

Observable parse_observable(const std::string& name) {
    for (Observable o : {Observable::Power, Observable::Efficiency, Observable::Efficacy,
                         Observable::Sigma, Observable::InvEtaNd, Observable::Mode}) {
        if (name == to_string(o)) return o;
    }
    throw Error(ErrorKind::InvalidConfig, "unknown observable '" + name + "'");
}

double value_of(const CellObservables& c, Observable obs) noexcept {
    if (c.status == CellStatus::Excluded) return std::numeric_limits<double>::quiet_NaN();
    switch (obs) {
    case Observable::Power: return c.power;
    case Observable::Efficiency: return c.efficiency;
    case Observable::Efficacy: return c.efficacy;
    case Observable::Sigma: return c.sigma;
    case Observable::InvEtaNd: return c.inv_eta_nd;
    case Observable::Mode: return static_cast<double>(c.mode);
    }
    return 0.0;
}

namespace {

SweepGrid empty_grid(const GridSpec& grid) {
    SweepGrid out;
    out.grid = grid;
    out.cells.resize(grid.size());
    return out;
}

} // namespace

SweepGrid sweep_serial(const GridSpec& grid, const CellFunction& cell) {
    SweepGrid out = empty_grid(grid);
    for (std::size_t i = 0; i < grid.omega20.count; ++i) {
        const double w = grid.omega20.value(i);
        for (std::size_t j = 0; j < grid.lam.count; ++j) {
            out.cells[grid.index(i, j)] = cell(w, grid.lam.value(j));
        }
    }
    return out;
}

SweepGrid sweep_parallel(const GridSpec& grid, const CellFunction& cell) {
    SweepGrid out = empty_grid(grid);
    const auto n = static_cast<std::ptrdiff_t>(grid.size());
    const std::size_t inner = grid.lam.count;
    std::vector<std::exception_ptr> errors(grid.size());

#pragma omp parallel for schedule(dynamic, 16)
    for (std::ptrdiff_t k = 0; k < n; ++k) {
        const auto idx = static_cast<std::size_t>(k);
        try {
            out.cells[idx] = cell(grid.omega20.value(idx / inner), grid.lam.value(idx % inner));
        } catch (...) {
            errors[idx] = std::current_exception();
        }
    }

    for (const auto& e : errors) {
        if (e) std::rethrow_exception(e);
    }
    return out;
}

namespace {

CellObservables kinetic_cell(const EngineSettings& s, const BathSpec& baths, const EngineSpec& spec) {
    CellObservables c;
    if (dressed_energies(spec).inverted_ground()) {
        c.status = CellStatus::Excluded;
        return c;
    }
    const ThermoReport r = evaluate_kinetic(spec, baths, s.closure);
    c.power = r.power;
    c.sigma = r.sigma_avg;
    c.engine = r.engine_ok;
    c.efficiency = r.efficiency;
    c.efficacy = r.efficacy;
    if (spec.lam == 0.0) {
        if (auto eta = zero_field_efficiency_limit(spec, baths, s.closure)) {
            c.efficiency = *eta;
            c.efficiency_limit = true;
        }
    }
    return c;
}

std::optional<double> gkls_zero_field_limit(const EngineSpec& spec, const BathSpec& baths) {
    constexpr double h = 1e-3;
    EngineSpec a = spec;
    EngineSpec b = spec;
    a.lam = h * spec.omega10;
    b.lam = 2.0 * h * spec.omega10;
    const GklsReport ra = evaluate_gkls(a, baths);
    const GklsReport rb = evaluate_gkls(b, baths);
    if (!ra.engine_ok || !rb.engine_ok) return std::nullopt;
    return (4.0 * ra.efficiency - rb.efficiency) / 3.0;
}

CellObservables gkls_cell(const BathSpec& baths, const EngineSpec& spec) {
    CellObservables c;
    const GklsReport r = evaluate_gkls(spec, baths);
    c.power = r.currents.power;
    c.sigma = r.entropy.sigma;
    c.engine = r.engine_ok;
    c.efficiency = r.efficiency;
    c.efficacy = r.efficacy;
    if (r.decomposition.inv_eta_nd) {
        c.inv_eta_nd = *r.decomposition.inv_eta_nd;
        c.mode = static_cast<int>(r.decomposition.mode);
    }
    if (spec.lam == 0.0) {
        if (auto eta = gkls_zero_field_limit(spec, baths)) {
            c.efficiency = *eta;
            c.efficiency_limit = true;
        }
    }
    return c;
}

} // namespace

CellObservables evaluate_cell(const EngineSettings& settings, const BathSpec& baths,
                              double omega20, double lam) {
    EngineSpec spec;
    spec.omega10 = settings.omega10;
    spec.omega20 = omega20;
    spec.lam = lam;
    spec.drive_freq = settings.drive_freq;
    return settings.engine == EngineKind::Kinetic ? kinetic_cell(settings, baths, spec)
                                                  : gkls_cell(baths, spec);
}

} // namespace qhe
