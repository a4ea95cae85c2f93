// kinetic_engine.cpp

#include "qhe/kinetic_engine.hpp"

#include "qhe/error.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

namespace qhe {

double work_channel_rate(const EngineSpec& spec, const DressedFrame& frame,
                         const EffectiveRates& rates, const WorkChannelClosure& closure) {
    const double s = std::sin(frame.theta);
    if (spec.lam == 0.0 || s == 0.0) return 0.0;

    if (closure.mode == ClosureMode::FixedRate) {
        const double gw = closure.gw_fixed.value_or(0.0);
        if (!(gw >= 0.0)) throw Error(ErrorKind::InvalidConfig, "gw_fixed must be >= 0");
        return gw;
    }

    const double w = spec.drive_freq.value_or(frame.eps21);
    const double G = closure.width_G.value_or(rates.g1 + rates.g2 + rates.g1m + rates.g2m);
    if (!(G > 0.0)) {
        throw Error(ErrorKind::DegenerateWidth,
                    "degenerate width: G = 0 with a nonzero drive");
    }
    return w * w * s * s / (2.0 * G);
}

Populations network_steady_state(const EffectiveRates& r, double gw) {
    // k_ij: rate i -> j
    const double k10 = r.g1, k01 = r.g1m, k20 = r.g2, k02 = r.g2m;
    const double k12 = gw, k21 = gw;
    // spanning trees rooted at each node
    const double t0 = k10 * k20 + k12 * k20 + k21 * k10;
    const double t1 = k01 * k21 + k02 * k21 + k20 * k01;
    const double t2 = k02 * k12 + k01 * k12 + k10 * k02;
    const double z = t0 + t1 + t2;
    if (!(z > 0.0)) {
        throw Error(ErrorKind::DisconnectedNetwork,
                    "disconnected network: no stationary distribution");
    }
    return {t0 / z, t1 / z, t2 / z};
}

CouplingEfficiency coupling_efficiency(const DressedFrame& frame, const BathSpec& b) {
    const MixingWeights w = mixing_weights(frame.theta);
    CouplingEfficiency out;
    const double d1 = b.g_c_res * w.plus + b.g_h_det * w.minus;
    const double d2 = b.g_h_res * w.plus + b.g_c_det * w.minus;
    if (d1 > 0.0) out.q1 = b.g_h_det * w.minus / d1; else out.dead_channel = true;
    if (d2 > 0.0) out.q2 = b.g_c_det * w.minus / d2; else out.dead_channel = true;

    const double ratio = frame.eps10 / frame.eps20;
    const double denom = 1.0 - out.q2 - ratio * out.q1;
    const double carnot_like = 1.0 - ratio;
    out.eta_cp = carnot_like / denom;
    out.inv_eta_cp = carnot_like != 0.0 ? denom / carnot_like
                                        : std::numeric_limits<double>::infinity();
    return out;
}

Leakage heat_leakage(const ThermoReport& report, double inv_eta_cp) {
    Leakage out;
    out.leak = report.power == 0.0 ? report.heat_in : report.heat_in - report.power * inv_eta_cp;
    out.leak_over_power = report.power > 0.0 ? out.leak / report.power
                                             : std::numeric_limits<double>::infinity();
    return out;
}

double avg_entropy_production(const ThermoReport& r, const BathSpec& b) {
    const double direct = -b.beta_h * r.heat_in - b.beta_c * r.heat_out;
    if (b.beta_c > b.beta_h && std::isfinite(r.inv_coupling_eff)) {
        const double inv_carnot = b.beta_c / (b.beta_c - b.beta_h);
        const double via_leak = (b.beta_c - b.beta_h) *
            ((r.inv_coupling_eff - inv_carnot) * r.power + r.leak);
        const double scale = std::max({1.0, std::abs(direct),
                                       (b.beta_c - b.beta_h) * std::abs(r.heat_in)});
        if (std::abs(direct - via_leak) > 1e-10 * scale) {
            std::ostringstream msg;
            msg << "internal-consistency error: entropy production routes disagree ("
                << direct << " vs " << via_leak << ")";
            throw Error(ErrorKind::InternalConsistency, msg.str());
        }
    }
    return direct;
}

EngineCondition engine_condition(const EffectiveRates& r) {
    EngineCondition out;
    out.margin = r.g2m / r.g2 - r.g1m / r.g1;
    out.is_engine = out.margin > 0.0;
    return out;
}

ThermoReport cycle_observables(const EngineSpec& /*spec*/, const DressedFrame& frame,
                               const EffectiveRates& rates, const BathSpec& baths,
                               const Populations& p, double gw) {
    // balance of node 0; nodes 1 and 2 follow from normalization
    const double residual = rates.g1 * p.p1 + rates.g2 * p.p2 - (rates.g1m + rates.g2m) * p.p0;
    if (std::abs(residual) > 1e-12 * std::max({1.0, rates.g1, rates.g2})) {
        throw Error(ErrorKind::InternalConsistency,
                    "internal-consistency error: populations are not stationary");
    }

    const auto ch = channel_rates(frame, baths);
    // net upward flux 0 -> j carried by one bath component
    auto flux = [&](const BathComponent& c, double pj) { return c.up * p.p0 - c.down * pj; };

    ThermoReport r;
    r.populations = p;
    r.work_rate = gw;
    r.heat_in = frame.eps10 * flux(ch[0].hot, p.p1) + frame.eps20 * flux(ch[1].hot, p.p2);
    r.heat_out = frame.eps10 * flux(ch[0].cold, p.p1) + frame.eps20 * flux(ch[1].cold, p.p2);
    r.power = frame.eps21 * gw * (p.p2 - p.p1);

    const double scale = std::max(std::abs(r.heat_in), 1.0);
    if (std::abs(r.power - r.heat_in - r.heat_out) > 1e-12 * scale) {
        std::ostringstream msg;
        msg << "internal-consistency error: first law violated by "
            << (r.power - r.heat_in - r.heat_out);
        throw Error(ErrorKind::InternalConsistency, msg.str());
    }

    if (r.power > 0.0) {
        if (!(r.heat_in > 0.0)) {
            throw Error(ErrorKind::InternalConsistency,
                        "internal-consistency error: positive power without hot-bath heat");
        }
        r.engine_ok = true;
        r.efficiency = r.power / r.heat_in;
        r.efficacy = r.power * r.efficiency;
    }

    const CouplingEfficiency cp = coupling_efficiency(frame, baths);
    r.coupling_eff = cp.eta_cp;
    r.inv_coupling_eff = cp.inv_eta_cp;
    r.dead_channel = cp.dead_channel;
    r.leak = heat_leakage(r, cp.inv_eta_cp).leak;
    r.sigma_avg = avg_entropy_production(r, baths);
    return r;
}

ThermoReport evaluate_kinetic(const EngineSpec& spec, const BathSpec& baths,
                              const WorkChannelClosure& closure) {
    validate(spec);
    validate(baths);
    if (baths.beta_c < baths.beta_h) {
        throw Error(ErrorKind::NotAnEngine,
                    "not an engine configuration: beta_c < beta_h");
    }
    const DressedFrame frame = dressed_energies(spec);
    const EffectiveRates rates = effective_rates(frame, baths);
    const double gw = work_channel_rate(spec, frame, rates, closure);
    const Populations pops = network_steady_state(rates, gw);
    return cycle_observables(spec, frame, rates, baths, pops, gw);
}

std::optional<double> zero_field_efficiency_limit(const EngineSpec& spec, const BathSpec& baths,
                                                  const WorkChannelClosure& closure) {
    // eta(lam) = eta0 + c lam^2 + O(lam^4)
    constexpr double h = 1e-3;
    EngineSpec a = spec;
    EngineSpec b = spec;
    a.lam = h * spec.omega10;
    b.lam = 2.0 * h * spec.omega10;
    const ThermoReport ra = evaluate_kinetic(a, baths, closure);
    const ThermoReport rb = evaluate_kinetic(b, baths, closure);
    if (!ra.engine_ok || !rb.engine_ok) return std::nullopt;
    return (4.0 * ra.efficiency - rb.efficiency) / 3.0;
}

} // namespace qhe
