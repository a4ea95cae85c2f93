// kinetic_engine.hpp: analytic steady state of the three-node dressed kinetic network
//
// Nodes are the ground state and the two dressed levels. Channels 0<->1 and
// 0<->2 carry the mixed bath rates of EffectiveRates; the 1<->2 work channel
// is symmetric with rate Gamma_w supplied by a WorkChannelClosure.

#pragma once

#include "qhe/dressed_model.hpp"

#include <optional>

namespace qhe {

enum class ClosureMode {
    Eq2Structural,  // Gamma_w = drive_freq^2 sin^2(theta) / (2 G)
    FixedRate,      // Gamma_w = gw_fixed (0 at lam = 0)
};

struct WorkChannelClosure {
    ClosureMode mode{ClosureMode::Eq2Structural};
    std::optional<double> gw_fixed;
    std::optional<double> width_G;  // default G = g1 + g2 + g1m + g2m

    bool operator==(const WorkChannelClosure&) const = default;
};

struct Populations {
    double p0{1.0};
    double p1{0.0};
    double p2{0.0};
};

struct ThermoReport {
    double power{0.0};          // P, work delivered to the field
    double heat_in{0.0};        // Phi_h, into the system from the hot bath
    double heat_out{0.0};       // Phi_c, into the system from the cold bath (negative for an engine)
    double efficiency{0.0};     // P / Phi_h when engine_ok, else 0
    double efficacy{0.0};       // P * efficiency
    double coupling_eff{0.0};   // eta^CP
    double inv_coupling_eff{0.0};
    double leak{0.0};           // Phi_h - P / eta^CP
    double sigma_avg{0.0};      // -beta_h Phi_h - beta_c Phi_c
    double work_rate{0.0};      // Gamma_w
    Populations populations;
    bool engine_ok{false};
    bool dead_channel{false};
};

double work_channel_rate(const EngineSpec& spec, const DressedFrame& frame,
                         const EffectiveRates& rates, const WorkChannelClosure& closure);

// Exact stationary distribution (matrix-tree form). Throws
// Error{DisconnectedNetwork} when every rate is zero.
Populations network_steady_state(const EffectiveRates& rates, double gw);

// Currents, power, efficiency and entropy production at a stationary point.
// coupling_eff/leak are filled from coupling_efficiency and heat_leakage.
ThermoReport cycle_observables(const EngineSpec& spec, const DressedFrame& frame,
                               const EffectiveRates& rates, const BathSpec& baths,
                               const Populations& pops, double gw);

struct CouplingEfficiency {
    double eta_cp{0.0};
    double inv_eta_cp{0.0};
    double q1{0.0};
    double q2{0.0};
    bool dead_channel{false};  // a q denominator vanished; that q was set to 0
};

// Temperature independent: only the rate coefficients and theta enter.
CouplingEfficiency coupling_efficiency(const DressedFrame& frame, const BathSpec& baths);

struct Leakage {
    double leak{0.0};
    double leak_over_power{0.0};  // +inf when P <= 0
};

Leakage heat_leakage(const ThermoReport& report, double inv_eta_cp);

// Direct form, cross-checked against the coupling-efficiency/leak form.
// Throws Error{InternalConsistency} if the two disagree beyond 1e-10.
double avg_entropy_production(const ThermoReport& report, const BathSpec& baths);

struct EngineCondition {
    double margin{0.0};  // g2m/g2 - g1m/g1
    bool is_engine{false};
};

EngineCondition engine_condition(const EffectiveRates& rates);

// Whole pipeline for one configuration. Validates inputs; throws
// Error{NotAnEngine} if beta_c < beta_h.
ThermoReport evaluate_kinetic(const EngineSpec& spec, const BathSpec& baths,
                              const WorkChannelClosure& closure = {});

// eta in the lam -> 0+ limit at fixed omega20, from a Richardson pair at
// small lam. Empty when the limit point is not an engine.
std::optional<double> zero_field_efficiency_limit(const EngineSpec& spec, const BathSpec& baths,
                                                  const WorkChannelClosure& closure = {});

} // namespace qhe
