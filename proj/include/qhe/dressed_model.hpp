// dressed_model.hpp: physical configuration and closed-form dressed-frame quantities
//
// Units: hbar = k_B = 1, every energy and rate in multiples of omega10.

#pragma once

#include <array>
#include <optional>

namespace qhe {

struct EngineSpec {
    double omega10{1.0};               // |1> - |0> gap
    double omega20{2.0};               // |2> - |0> gap
    double lam{0.0};                   // drive intensity
    std::optional<double> drive_freq;  // unset: each engine picks its own default

    bool operator==(const EngineSpec&) const = default;
};

struct BathSpec {
    double beta_c{5.0};
    double beta_h{1.0};
    double g_c_res{0.5};  // gamma_c(eps10)
    double g_h_res{0.5};  // gamma_h(eps20)
    double g_c_det{0.0};  // gamma_c(eps20)
    double g_h_det{0.0};  // gamma_h(eps10)

    bool operator==(const BathSpec&) const = default;
};

struct DressedFrame {
    double theta{0.0};
    double eps10{1.0};
    double eps20{1.0};
    double eps21{0.0};

    // eps10 <= 0 happens for lam > sqrt(omega10 * omega20); such points are
    // excluded from engine sweeps.
    bool inverted_ground() const noexcept { return eps10 <= 0.0; }
};

struct EffectiveRates {
    double g1{0.0};   // 1 -> 0
    double g2{0.0};   // 2 -> 0
    double g1m{0.0};  // 0 -> 1
    double g2m{0.0};  // 0 -> 2
};

// Weights (1 + cos theta)/2 and (1 - cos theta)/2.
struct MixingWeights {
    double plus{1.0};
    double minus{0.0};
};

// One bath's contribution to one dressed channel, already multiplied by the
// mixing weight.
struct BathComponent {
    double down{0.0};
    double up{0.0};
};

// Channel j (j = 1, 2) split into its cold and hot components.
struct ChannelRates {
    BathComponent cold;
    BathComponent hot;

    double down() const noexcept { return cold.down + hot.down; }
    double up() const noexcept { return cold.up + hot.up; }
};

// Throws Error{InvalidConfig} describing the first violated invariant.
void validate(const EngineSpec& spec);
void validate(const BathSpec& baths);
// Additionally requires beta_c > beta_h.
void validate_engine(const BathSpec& baths);

double mixing_angle(const EngineSpec& spec);
DressedFrame dressed_energies(const EngineSpec& spec);
MixingWeights mixing_weights(double theta);

// gamma * exp(-beta * eps); throws Error{RangeError} if the result overflows.
double detailed_balance_rate(double gamma, double beta, double eps);

std::array<ChannelRates, 2> channel_rates(const DressedFrame& frame, const BathSpec& baths);
EffectiveRates effective_rates(const DressedFrame& frame, const BathSpec& baths);

// 1 - beta_h / beta_c; throws Error{NotAnEngine} when beta_c < beta_h.
double carnot_efficiency(const BathSpec& baths);

// 1/(beta_h omega10) - 1/(beta_c omega10)
double delta_beta(const BathSpec& baths, double omega10 = 1.0);

} // namespace qhe
