// commands.cpp: steady | sweep | doe | validate

#include "qhe/commands.hpp"

#include "qhe/error.hpp"
#include "qhe/gkls_engine.hpp"
#include "qhe/kinetic_engine.hpp"
#include "qhe/random_config.hpp"
#include "qhe/version.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <filesystem>
#include <random>

namespace qhe {

using nlohmann::json;

namespace {

std::string fixed(double v, int digits) {
    if (!std::isfinite(v)) return format_number(v);
    char buf[64];
    auto res = std::to_chars(buf, buf + sizeof buf, v, std::chars_format::fixed, digits);
    std::string s(buf, res.ptr);
    if (s.front() == '-' && s.find_first_not_of("-0.") == std::string::npos) s.erase(0, 1);
    return s;
}

std::string path_in(const RunConfig& config, const std::string& name) {
    return (std::filesystem::path(config.out_dir) / name).string();
}

json spec_json(const EngineSpec& s) {
    return {{"omega10", s.omega10}, {"omega20", s.omega20}, {"lam", s.lam},
            {"drive_freq", s.drive_freq ? json(*s.drive_freq) : json(nullptr)}};
}

json baths_json(const BathSpec& b) {
    return {{"beta_c", b.beta_c}, {"beta_h", b.beta_h}, {"g_c_res", b.g_c_res},
            {"g_h_res", b.g_h_res}, {"g_c_det", b.g_c_det}, {"g_h_det", b.g_h_det}};
}

std::string describe(const Error& e) {
    const std::string what = e.what();
    const std::string kind = to_string(e.kind());
    return what.rfind(kind, 0) == 0 ? what : kind + ": " + what;
}

double r9(double v) { return round_sig9(v); }

json optional_number(const std::optional<double>& v) { return v ? json(r9(*v)) : json(nullptr); }

} // namespace

int exit_code_for(ErrorKind kind) noexcept {
    switch (kind) {
    case ErrorKind::InvalidConfig:
    case ErrorKind::ShapeMismatch:
    case ErrorKind::Io:
    case ErrorKind::NotAnEngine:
    case ErrorKind::RangeError:
    case ErrorKind::DegenerateWidth:
        return kExitUsage;
    default:
        return kExitFailure;
    }
}

int run_command(const std::function<int()>& command, std::ostream& err) {
    try {
        return command();
    } catch (const Error& e) {
        err << "error: " << describe(e) << "\n";
        return exit_code_for(e.kind());
    } catch (const std::exception& e) {
        err << "error: " << e.what() << "\n";
        return kExitFailure;
    }
}

json steady_to_json(const RunConfig& config) {
    json j = {{"version", kVersion}, {"config_hash", config_hash(config)},
              {"engine", to_string(config.engine)}, {"spec", spec_json(config.spec)},
              {"baths", baths_json(config.baths)}};
    const double carnot = carnot_efficiency(config.baths);
    j["carnot_efficiency"] = r9(carnot);

    if (config.engine == EngineKind::Kinetic) {
        const ThermoReport r = evaluate_kinetic(config.spec, config.baths, config.closure);
        const EffectiveRates rates = effective_rates(dressed_energies(config.spec), config.baths);
        const EngineCondition cond = engine_condition(rates);
        const Leakage leak = heat_leakage(r, r.inv_coupling_eff);
        j["report"] = {
            {"power", r9(r.power)}, {"heat_in", r9(r.heat_in)}, {"heat_out", r9(r.heat_out)},
            {"efficiency", r9(r.efficiency)}, {"efficacy", r9(r.efficacy)},
            {"coupling_eff", r9(r.coupling_eff)}, {"inv_coupling_eff", r9(r.inv_coupling_eff)},
            {"leak", r9(r.leak)},
            {"leak_over_power", std::isfinite(leak.leak_over_power) ? json(r9(leak.leak_over_power)) : json(nullptr)},
            {"sigma_avg", r9(r.sigma_avg)}, {"work_rate", r9(r.work_rate)},
            {"populations", {r9(r.populations.p0), r9(r.populations.p1), r9(r.populations.p2)}},
            {"engine_ok", r.engine_ok}, {"dead_channel", r.dead_channel},
            {"engine_margin", r9(cond.margin)},
        };
    } else {
        const GklsReport r = evaluate_gkls(config.spec, config.baths);
        const auto& d = r.decomposition;
        j["report"] = {
            {"power", r9(r.currents.power)}, {"heat_in", r9(r.currents.heat_in)},
            {"heat_out", r9(r.currents.heat_out)}, {"efficiency", r9(r.efficiency)},
            {"efficacy", r9(r.efficacy)}, {"sigma", r9(r.entropy.sigma)},
            {"sigma_regularized", r.entropy.regularized}, {"engine_ok", r.engine_ok},
            {"generator_residual", r9(r.residual)},
            {"populations", {r9(r.rho(0, 0).real()), r9(r.rho(1, 1).real()), r9(r.rho(2, 2).real())}},
            {"coherence_12", {r9(r.rho(1, 2).real()), r9(r.rho(1, 2).imag())}},
        };
        j["decomposition"] = {
            {"diag_h", r9(d.diag_h)}, {"diag_c", r9(d.diag_c)},
            {"nondiag_h", r9(d.nondiag_h)}, {"nondiag_c", r9(d.nondiag_c)},
            {"inv_eta_nd", optional_number(d.inv_eta_nd)}, {"mode", static_cast<int>(d.mode)},
        };
    }
    return j;
}

int cmd_steady(const RunConfig& config, std::ostream& out) {
    const json j = steady_to_json(config);
    const auto& r = j["report"];
    auto num = [](const json& v) { return v.is_null() ? std::string("n/a") : format_number(v.get<double>()); };

    out << "engine: " << to_string(config.engine) << "\n";
    out << "omega20 = " << format_number(config.spec.omega20) << ", lam = " << format_number(config.spec.lam)
        << ", beta_c = " << format_number(config.baths.beta_c) << ", beta_h = " << format_number(config.baths.beta_h)
        << "\n";
    out << "P = " << num(r["power"]) << "\n";
    out << "Phi_h = " << num(r["heat_in"]) << "\n";
    out << "Phi_c = " << num(r["heat_out"]) << "\n";
    out << "eta = " << num(r["efficiency"]) << "  (Carnot " << num(j["carnot_efficiency"]) << ")\n";
    out << "P*eta = " << num(r["efficacy"]) << "\n";
    if (config.engine == EngineKind::Kinetic) {
        out << "sigma = " << num(r["sigma_avg"]) << "\n";
        out << "1/η^CP = " << fixed(r["inv_coupling_eff"].get<double>(), 3) << "  ("
            << num(r["inv_coupling_eff"]) << ")\n";
        out << "leak = " << num(r["leak"]) << ", leak/P = " << num(r["leak_over_power"]) << "\n";
        out << "engine margin = " << num(r["engine_margin"]) << (r["engine_ok"].get<bool>() ? " (engine)" : " (not an engine)")
            << "\n";
    } else {
        const auto& d = j["decomposition"];
        out << "sigma = " << num(r["sigma"]) << "\n";
        out << "generator residual = " << num(r["generator_residual"]) << "\n";
        out << "Phi_h^d = " << num(d["diag_h"]) << ", Phi_c^d = " << num(d["diag_c"]) << "\n";
        out << "Phi_h^nd = " << num(d["nondiag_h"]) << ", Phi_c^nd = " << num(d["nondiag_c"]) << "\n";
        out << "1/eta^nd = " << num(d["inv_eta_nd"]) << ", mode = " << d["mode"].get<int>() << "\n";
    }

    ensure_directory(config.out_dir);
    const std::string path = path_in(config, "steady.json");
    write_file(path, j.dump(2) + "\n");
    out << "wrote " << path << "\n";
    return kExitOk;
}

int cmd_sweep(const RunConfig& config, std::ostream& out) {
    const auto observables = effective_observables(config);
    if (config.engine == EngineKind::Kinetic) {
        for (Observable o : observables) {
            if (o == Observable::InvEtaNd || o == Observable::Mode) {
                throw Error(ErrorKind::InvalidConfig,
                            std::string("observable '") + to_string(o) + "' needs the gkls engine");
            }
        }
    }
    ensure_directory(config.out_dir);
    SweepGrid sweep = sweep_parallel(config.grid, make_cell_function(engine_settings(config), config.baths));
    sweep.meta = {to_string(config.engine), config_hash(config), kVersion};

    for (Observable o : observables) {
        const SweepArtifact a = make_sweep_artifact(sweep, o);
        const bool csv = config.format == OutputFormat::Csv;
        const std::string path = path_in(config, std::string("sweep_") + to_string(o) + (csv ? ".csv" : ".json"));
        write_file(path, csv ? sweep_csv(a) : sweep_to_json(a).dump(2) + "\n");
        out << "wrote " << path << "\n";
    }
    return kExitOk;
}

DoeReport doe_report(const RunConfig& config) {
    config.levels.validate();
    const DoeDesign design = build_design(config.levels);
    DoeReport report;
    std::vector<MetricRow> rows;
    if (!config.fixture.empty()) {
        rows = read_fixture(config.fixture);
        for (std::size_t k = 0; k < design.cases.size(); ++k) {
            report.results.push_back({design.cases[k], rows[k], std::nullopt});
        }
    } else {
        const EngineSettings settings = engine_settings(config);
        for (const DoeCase& c : design.cases) {
            const CaseResult r = evaluate_case(c, config.levels, config.grid, settings);
            rows.push_back(r.best);
            report.results.push_back({c, r.best, r.min_sigma});
        }
    }
    report.range = range_analysis(design, rows);
    report.anova = anova(design, rows);
    report.best = select_best(report.range, report.anova);
    return report;
}

int cmd_doe(const RunConfig& config, std::ostream& out) {
    const DoeReport report = doe_report(config);
    ensure_directory(config.out_dir);

    const std::vector<std::pair<std::string, std::pair<std::string, json>>> files{
        {"doe_results", {results_csv(report.results), results_to_json(report.results)}},
        {"doe_range", {range_csv(report.range), range_to_json(report.range)}},
        {"doe_anova", {anova_csv(report.anova), anova_to_json(report.anova)}},
        {"doe_best", {best_csv(report.best), best_to_json(report.best)}},
    };

    out << "orthogonal test results" << (config.fixture.empty() ? "" : " (fixture " + config.fixture + ")") << "\n"
        << files[0].second.first << "\n";
    out << "range analysis\n" << files[1].second.first << "\n";
    out << "analysis of variance\n" << files[2].second.first << "\n";
    out << "best combination\n" << files[3].second.first << "\n";

    for (const auto& [name, content] : files) {
        write_file(path_in(config, name + ".csv"), content.first);
        write_file(path_in(config, name + ".json"), content.second.dump(2) + "\n");
        out << "wrote " << path_in(config, name) << ".{csv,json}\n";
    }
    return kExitOk;
}

namespace {

class CheckLog {
public:
    explicit CheckLog(std::ostream& out) : out_(out) {}

    void record(bool pass, const std::string& text) {
        out_ << text << " " << (pass ? "PASS" : "FAIL") << "\n";
        failures_ += pass ? 0 : 1;
    }

    // Runs a check body; an Error counts as a failure of that check.
    void guarded(const std::string& name, const std::function<void()>& body) {
        try {
            body();
        } catch (const Error& e) {
            record(false, name + ": " + describe(e));
        }
    }

    int failures() const noexcept { return failures_; }

private:
    std::ostream& out_;
    int failures_{0};
};

} // namespace

int cmd_validate(const RunConfig& config, std::ostream& out) {
    CheckLog log(out);
    const FactorLevels& levels = config.levels;
    levels.validate();
    const DoeDesign design = build_design(levels);

    log.guarded("coupling-efficiency anchor", [&] {
        EngineSpec spec{1.0, 2.6, 0.5, std::nullopt};
        for (const auto& t : levels.delta_beta) {
            BathSpec b{t.first, t.second, 2.0, 2.0, 2.0, 2.0};
            const double inv = coupling_efficiency(dressed_energies(spec), b).inv_eta_cp;
            log.record(std::abs(inv - 1.309) <= 0.002,
                       "1/η^CP = " + fixed(inv, 3) + " (beta_c = " + format_number(t.first) +
                           ", margin " + format_number(0.002 - std::abs(inv - 1.309)) + ")");
        }
    });

    log.guarded("Carnot anchor", [&] {
        for (const auto& t : levels.delta_beta) {
            BathSpec b{t.first, t.second, 1.0, 1.0, 0.0, 0.0};
            const double c = carnot_efficiency(b);
            log.record(std::abs(c - 0.8) <= 1e-12, "η^C = " + fixed(c, 6) + " (beta_c = " + format_number(t.first) + ")");
        }
    });

    EngineSettings kinetic = engine_settings(config);
    kinetic.engine = EngineKind::Kinetic;
    for (const DoeCase& c : design.cases) {
        const std::string label = "case " + std::to_string(c.id) + ": ";
        log.guarded(label + "second law", [&] {
            const CaseResult r = evaluate_case(c, levels, config.grid, kinetic);
            log.record(r.min_sigma >= -1e-9 && r.min_sigma <= 1e-6,
                       label + "min ⟨σ̇⟩ = " + fixed(r.min_sigma, 6) + " (≥ 0)");
            const double carnot = carnot_efficiency(bath_for(c, levels));
            const double eta = r.metric(Metric::Efficiency);
            log.record(eta <= carnot + 1e-9, label + "max η = " + fixed(eta, 6) + " (≤ η^C = " +
                                                 fixed(carnot, 6) + ", margin " + format_number(carnot - eta) + ")");
        });
    }

    std::mt19937_64 rng(config.seed);
    log.guarded("kinetic first law", [&] {
        double worst_first = 0.0;
        double worst_sigma = 0.0;
        for (int k = 0; k < 1000; ++k) {
            const RandomDraw d = draw_config(rng);
            const ThermoReport r = evaluate_kinetic(d.spec, d.baths, config.closure);
            const double scale = std::max({1.0, std::abs(r.heat_in), std::abs(r.heat_out)});
            worst_first = std::max(worst_first, std::abs(r.power - r.heat_in - r.heat_out) / scale);
            const double inv_carnot = 1.0 / carnot_efficiency(d.baths);
            const double alt = (d.baths.beta_c - d.baths.beta_h) *
                               ((r.inv_coupling_eff - inv_carnot) * r.power + r.leak);
            worst_sigma = std::max(worst_sigma, std::abs(alt - r.sigma_avg) / scale);
        }
        log.record(worst_first <= 1e-12, "kinetic P = Φh + Φc over 1000 draws (max rel. residual " +
                                             format_number(worst_first) + ")");
        log.record(worst_sigma <= 1e-12, "kinetic ⟨σ̇⟩ direct vs coupling/leak form over 1000 draws (max rel. residual " +
                                             format_number(worst_sigma) + ")");
    });

    log.guarded("gkls oracle equivalence", [&] {
        double worst_res = 0.0, worst_trace = 0.0, worst_min_eig = 0.0, worst_td = 0.0, worst_first = 0.0;
        for (int k = 0; k < 20; ++k) {
            const RandomDraw d = draw_config(rng);
            const Generator gen = build_generator(d.spec, d.baths);
            const Matrix3c rho = steady_state(gen);
            const Physicality ph = physicality(rho);
            worst_res = std::max(worst_res, generator_residual(gen, rho));
            worst_trace = std::max(worst_trace, ph.trace_error);
            worst_min_eig = std::min(worst_min_eig, ph.min_eigenvalue);
            Matrix3c rho0 = Matrix3c::Zero();
            rho0(0, 0) = 1.0;
            const RelaxResult relaxed = relax_to_steady(gen, rho0, 1e6, 1e-10);
            worst_td = std::max(worst_td, trace_distance(rho, relaxed.rho));
            const HeatCurrents h = heat_currents(gen, rho);
            worst_first = std::max(worst_first, std::abs(h.power - h.heat_in - h.heat_out));
        }
        log.record(worst_res <= 1e-10, "gkls generator residual ≤ 1e-10 over 20 draws (max " + format_number(worst_res) + ")");
        log.record(worst_trace <= 1e-12, "gkls trace error ≤ 1e-12 (max " + format_number(worst_trace) + ")");
        log.record(worst_min_eig >= -1e-12, "gkls min eigenvalue ≥ -1e-12 (min " + format_number(worst_min_eig) + ")");
        log.record(worst_td <= 1e-6, "gkls trace distance to relaxation ≤ 1e-6 (max " + format_number(worst_td) + ")");
        log.record(worst_first <= 1e-12, "gkls P = Φh + Φc (max residual " + format_number(worst_first) + ")");
    });

    log.guarded("gkls plateau", [&] {
        GridSpec coarse = config.grid;
        coarse.omega20.count = 21;
        coarse.lam.count = 21;
        EngineSettings gkls = engine_settings(config);
        gkls.engine = EngineKind::Gkls;
        for (int id : {1, 6, 8}) {
            const DoeCase& c = design.cases[id - 1];
            const SweepGrid g = sweep_parallel(coarse, make_cell_function(gkls, bath_for(c, levels)));
            double lo = INFINITY, hi = -INFINITY;
            bool all_ideal = true;
            for (const auto& cell : g.cells) {
                if (!cell.engine) continue;
                lo = std::min(lo, cell.inv_eta_nd);
                hi = std::max(hi, cell.inv_eta_nd);
                all_ideal = all_ideal && cell.mode == static_cast<int>(HeatFlowMode::Ideal);
            }
            log.record(lo >= 0.45 && hi <= 0.55 && all_ideal,
                       "case " + std::to_string(id) + ": 1/η^nd in [" + fixed(lo, 6) + ", " + fixed(hi, 6) +
                           "] on 21x21 engine cells, all mode 2");
        }
    });

    out << (log.failures() == 0 ? "all checks passed" : std::to_string(log.failures()) + " check(s) failed") << "\n";
    return log.failures() == 0 ? kExitOk : kExitFailure;
}

} // namespace qhe
