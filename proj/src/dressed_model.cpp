// dressed_model.cpp: mixing angle, dressed gaps, detailed balance and effective rates

#include "qhe/dressed_model.hpp"

#include "qhe/error.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <string>

namespace qhe {

namespace {

void require(bool ok, const std::string& message) {
    if (!ok) throw Error(ErrorKind::InvalidConfig, message);
}

bool finite(double x) { return std::isfinite(x); }

} // namespace

void validate(const EngineSpec& spec) {
    require(finite(spec.omega10) && spec.omega10 > 0.0, "omega10 must be > 0");
    require(finite(spec.omega20) && spec.omega20 >= spec.omega10, "omega20 must be >= omega10");
    require(finite(spec.lam) && spec.lam >= 0.0, "lam must be >= 0");
    if (spec.drive_freq) {
        require(finite(*spec.drive_freq) && *spec.drive_freq >= 0.0, "drive_freq must be >= 0");
    }
}

void validate(const BathSpec& b) {
    require(finite(b.beta_c) && b.beta_c > 0.0, "beta_c must be > 0");
    require(finite(b.beta_h) && b.beta_h > 0.0, "beta_h must be > 0");
    for (double g : {b.g_c_res, b.g_h_res, b.g_c_det, b.g_h_det}) {
        require(finite(g) && g >= 0.0, "dissipation coefficients must be >= 0");
    }
    require(b.g_c_res > 0.0 || b.g_h_res > 0.0,
            "at least one resonant coefficient (g_c_res, g_h_res) must be > 0");
}

void validate_engine(const BathSpec& b) {
    validate(b);
    if (!(b.beta_c > b.beta_h)) {
        throw Error(ErrorKind::NotAnEngine,
                    "not an engine configuration: beta_c must exceed beta_h");
    }
}

double mixing_angle(const EngineSpec& spec) {
    const double theta = std::atan2(2.0 * spec.lam, spec.omega20 - spec.omega10);
    return std::clamp(theta, 0.0, std::numbers::pi / 2.0);
}

DressedFrame dressed_energies(const EngineSpec& spec) {
    const double detuning = spec.omega20 - spec.omega10;
    const double split = std::sqrt(detuning * detuning + 4.0 * spec.lam * spec.lam);
    const double mean = 0.5 * (spec.omega10 + spec.omega20);
    DressedFrame frame;
    frame.theta = mixing_angle(spec);
    frame.eps10 = mean - 0.5 * split;
    frame.eps20 = mean + 0.5 * split;
    frame.eps21 = split;
    return frame;
}

MixingWeights mixing_weights(double theta) {
    const double c = std::cos(theta);
    // (1 - c)/2 = sin^2(theta/2) avoids cancellation for small theta
    const double s = std::sin(0.5 * theta);
    return {0.5 * (1.0 + c), s * s};
}

double detailed_balance_rate(double gamma, double beta, double eps) {
    if (gamma == 0.0) return 0.0;
    const double rate = gamma * std::exp(-beta * eps);
    if (!std::isfinite(rate)) {
        throw Error(ErrorKind::RangeError,
                    "detailed-balance rate overflow (beta*eps = " + std::to_string(beta * eps) + ")");
    }
    return rate;
}

std::array<ChannelRates, 2> channel_rates(const DressedFrame& frame, const BathSpec& b) {
    const MixingWeights w = mixing_weights(frame.theta);
    std::array<ChannelRates, 2> ch;
    // channel 1 (|0> - dressed 1): cold is resonant, hot is the detuning leak
    ch[0].cold.down = b.g_c_res * w.plus;
    ch[0].cold.up = detailed_balance_rate(b.g_c_res, b.beta_c, frame.eps10) * w.plus;
    ch[0].hot.down = b.g_h_det * w.minus;
    ch[0].hot.up = detailed_balance_rate(b.g_h_det, b.beta_h, frame.eps10) * w.minus;
    // channel 2 (|0> - dressed 2): hot is resonant, cold is the detuning leak
    ch[1].hot.down = b.g_h_res * w.plus;
    ch[1].hot.up = detailed_balance_rate(b.g_h_res, b.beta_h, frame.eps20) * w.plus;
    ch[1].cold.down = b.g_c_det * w.minus;
    ch[1].cold.up = detailed_balance_rate(b.g_c_det, b.beta_c, frame.eps20) * w.minus;
    return ch;
}

EffectiveRates effective_rates(const DressedFrame& frame, const BathSpec& baths) {
    const auto ch = channel_rates(frame, baths);
    return {ch[0].down(), ch[1].down(), ch[0].up(), ch[1].up()};
}

double carnot_efficiency(const BathSpec& baths) {
    if (!(baths.beta_h > 0.0) || baths.beta_c < baths.beta_h) {
        throw Error(ErrorKind::NotAnEngine,
                    "not an engine configuration: Carnot efficiency needs beta_c >= beta_h > 0");
    }
    return 1.0 - baths.beta_h / baths.beta_c;
}

double delta_beta(const BathSpec& baths, double omega10) {
    return 1.0 / (baths.beta_h * omega10) - 1.0 / (baths.beta_c * omega10);
}

} // namespace qhe
