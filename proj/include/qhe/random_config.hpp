// random_config.hpp: seeded draws inside the orthogonal-test parameter box

#pragma once

#include "qhe/dressed_model.hpp"

#include <random>

namespace qhe {

struct RandomDraw {
    EngineSpec spec;
    BathSpec baths;
};

// omega20 in [1, 5], lam in [0, 1], beta_h in [0.2, 1], beta_c in [1, 5] with
// beta_c > beta_h, resonant rates in [0.5, 2], detuning rates in [0, 2].
// Draws with an inverted dressed ground state are rejected.
inline RandomDraw draw_config(std::mt19937_64& rng) {
    auto u = [&rng](double a, double b) { return std::uniform_real_distribution<double>(a, b)(rng); };
    for (;;) {
        RandomDraw d;
        d.spec.omega10 = 1.0;
        d.spec.omega20 = u(1.0, 5.0);
        d.spec.lam = u(0.0, 1.0);
        d.baths.beta_h = u(0.2, 1.0);
        d.baths.beta_c = u(1.0, 5.0);
        d.baths.g_c_res = u(0.5, 2.0);
        d.baths.g_h_res = u(0.5, 2.0);
        d.baths.g_c_det = u(0.0, 2.0);
        d.baths.g_h_det = u(0.0, 2.0);
        if (d.baths.beta_c <= d.baths.beta_h) continue;
        if (dressed_energies(d.spec).inverted_ground()) continue;
        return d;
    }
}

} // namespace qhe
