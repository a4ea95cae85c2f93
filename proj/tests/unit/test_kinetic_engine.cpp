#include "qhe/kinetic_engine.hpp"
#include "qhe/error.hpp"
#include "qhe/random_config.hpp"

#include <catch_amalgamated.hpp>

#include <Eigen/Dense>

#include <cmath>
#include <random>

using namespace qhe;
using Catch::Approx;

namespace {

// Null vector of the 3x3 rate matrix by SVD, normalized to a distribution.
Eigen::Vector3d null_space_populations(const EffectiveRates& r, double gw) {
    Eigen::Matrix3d W;
    // column j: outflow from j, row i: inflow to i
    W << -(r.g1m + r.g2m), r.g1, r.g2,
         r.g1m, -(r.g1 + gw), gw,
         r.g2m, gw, -(r.g2 + gw);
    Eigen::JacobiSVD<Eigen::Matrix3d> svd(W, Eigen::ComputeFullV);
    Eigen::Vector3d v = svd.matrixV().col(2);
    return v / v.sum();
}

struct Currents {
    double heat_in;
    double heat_out;
};

// Bath currents straight from the per-component rates.
Currents currents_from_components(const DressedFrame& f, const BathSpec& b, const Populations& p) {
    const double c = std::cos(f.theta);
    const double wp = 0.5 * (1.0 + c), wm = 0.5 * (1.0 - c);
    auto j = [](double w, double g, double beta, double eps, double p0, double pj) {
        return w * (g * std::exp(-beta * eps) * p0 - g * pj);
    };
    const double jc1 = j(wp, b.g_c_res, b.beta_c, f.eps10, p.p0, p.p1);
    const double jh1 = j(wm, b.g_h_det, b.beta_h, f.eps10, p.p0, p.p1);
    const double jh2 = j(wp, b.g_h_res, b.beta_h, f.eps20, p.p0, p.p2);
    const double jc2 = j(wm, b.g_c_det, b.beta_c, f.eps20, p.p0, p.p2);
    return {f.eps10 * jh1 + f.eps20 * jh2, f.eps10 * jc1 + f.eps20 * jc2};
}

const EngineSpec kFig7{1.0, 2.6, 0.5, std::nullopt};
const BathSpec kUniform{2.5, 0.5, 2.0, 2.0, 2.0, 2.0};

} // namespace

TEST_CASE("work channel rate") {
    EngineSpec s{1.0, 3.0, 0.0, std::nullopt};
    const DressedFrame f0 = dressed_energies(s);
    const EffectiveRates r0 = effective_rates(f0, BathSpec{});
    CHECK(work_channel_rate(s, f0, r0, {}) == 0.0);
    CHECK(work_channel_rate(s, f0, r0, {ClosureMode::FixedRate, 0.7, std::nullopt}) == 0.0);

    EngineSpec deg{1.0, 1.0, 0.4, 1.0};
    const DressedFrame fd = dressed_energies(deg);
    const EffectiveRates rd = effective_rates(fd, BathSpec{});
    CHECK(work_channel_rate(deg, fd, rd, {ClosureMode::Eq2Structural, std::nullopt, 0.5}) == Approx(1.0));

    const DressedFrame f = dressed_energies(kFig7);
    const EffectiveRates r = effective_rates(f, kUniform);
    const double G = r.g1 + r.g2 + r.g1m + r.g2m;
    const double expected = f.eps21 * f.eps21 * std::pow(std::sin(f.theta), 2) / (2.0 * G);
    const double gw = work_channel_rate(kFig7, f, r, {});
    CHECK(gw > 0.0);
    CHECK(gw == Approx(expected).epsilon(1e-14));
    CHECK(gw == Approx(0.1044911).epsilon(1e-6));

    try {
        work_channel_rate(kFig7, f, r, {ClosureMode::Eq2Structural, std::nullopt, 0.0});
        FAIL("expected degenerate width");
    } catch (const Error& e) {
        CHECK(e.kind() == ErrorKind::DegenerateWidth);
    }
}

TEST_CASE("network steady state closed-form cases") {
    EffectiveRates r{0.8, 1.3, 0.2, 0.1};
    const Populations p = network_steady_state(r, 0.0);
    CHECK(p.p1 / p.p0 == Approx(r.g1m / r.g1));
    CHECK(p.p2 / p.p0 == Approx(r.g2m / r.g2));
    CHECK(p.p0 == Approx(1.0 / (1.0 + r.g1m / r.g1 + r.g2m / r.g2)));

    for (double gw : {0.0, 0.3, 7.0}) {
        const Populations s = network_steady_state({1.0, 1.0, 0.5, 0.5}, gw);
        CHECK(s.p0 == Approx(0.5));
        CHECK(s.p1 == Approx(0.25));
        CHECK(s.p2 == Approx(0.25));
    }

    const DressedFrame f = dressed_energies({1.0, 3.0, 0.2, std::nullopt});
    EffectiveRates z{0.5, 0.5, 0.5 * std::exp(-5.0 * f.eps10), 0.5 * std::exp(-1.0 * f.eps20)};
    const Populations q = network_steady_state(z, 0.1);
    const Eigen::Vector3d oracle = null_space_populations(z, 0.1);
    CHECK(q.p0 == Approx(oracle(0)).margin(1e-12));
    CHECK(q.p1 == Approx(oracle(1)).margin(1e-12));
    CHECK(q.p2 == Approx(oracle(2)).margin(1e-12));

    try {
        network_steady_state({0.0, 0.0, 0.0, 0.0}, 0.0);
        FAIL("expected disconnected network");
    } catch (const Error& e) {
        CHECK(e.kind() == ErrorKind::DisconnectedNetwork);
    }
}

TEST_CASE("property: matrix-tree populations agree with the SVD null space") {
    std::mt19937_64 rng(11);
    std::uniform_real_distribution<double> u(0.0, 3.0);
    for (int k = 0; k < 1000; ++k) {
        EffectiveRates r{u(rng) + 1e-3, u(rng) + 1e-3, u(rng), u(rng)};
        const double gw = k % 5 == 0 ? 0.0 : u(rng);
        const Populations p = network_steady_state(r, gw);
        const Eigen::Vector3d oracle = null_space_populations(r, gw);
        REQUIRE(std::abs(p.p0 - oracle(0)) <= 1e-10);
        REQUIRE(std::abs(p.p1 - oracle(1)) <= 1e-10);
        REQUIRE(std::abs(p.p2 - oracle(2)) <= 1e-10);
    }
}

TEST_CASE("cycle currents agree with component bookkeeping") {
    std::mt19937_64 rng(5);
    for (int k = 0; k < 200; ++k) {
        const RandomDraw d = draw_config(rng);
        const ThermoReport r = evaluate_kinetic(d.spec, d.baths);
        const DressedFrame f = dressed_energies(d.spec);
        const Currents c = currents_from_components(f, d.baths, r.populations);
        const double scale = std::max(1.0, std::abs(c.heat_in));
        REQUIRE(std::abs(r.heat_in - c.heat_in) <= 1e-12 * scale);
        REQUIRE(std::abs(r.heat_out - c.heat_out) <= 1e-12 * scale);
        REQUIRE(r.power == Approx(f.eps21 * r.work_rate * (r.populations.p2 - r.populations.p1)).margin(1e-15));
    }
}

TEST_CASE("zero detuning: efficiency is the cycle efficiency and there is no leak") {
    BathSpec b{5.0, 1.0, 0.5, 0.5, 0.0, 0.0};
    for (auto [w20, lam] : {std::pair{3.0, 0.2}, {4.0, 0.3}, {2.0, 0.1}}) {
        EngineSpec s{1.0, w20, lam, std::nullopt};
        const ThermoReport r = evaluate_kinetic(s, b);
        const DressedFrame f = dressed_energies(s);
        REQUIRE(r.engine_ok);
        CHECK(r.efficiency == Approx(1.0 - f.eps10 / f.eps20).epsilon(1e-12));
        CHECK(r.coupling_eff == Approx(1.0 - f.eps10 / f.eps20).epsilon(1e-12));
        CHECK(std::abs(r.leak) <= 1e-12 * std::abs(r.heat_in));
    }
}

TEST_CASE("coupling efficiency anchor and closed forms") {
    const DressedFrame f = dressed_energies(kFig7);
    for (auto [bc, bh] : {std::pair{5.0, 1.0}, {2.5, 0.5}, {1.0, 0.2}}) {
        BathSpec b = kUniform;
        b.beta_c = bc;
        b.beta_h = bh;
        const CouplingEfficiency c = coupling_efficiency(f, b);
        CHECK(c.inv_eta_cp == Approx(1.309).margin(0.002));
        CHECK(c.q1 == Approx((1.0 - std::cos(f.theta)) / 2.0).epsilon(1e-13));
        CHECK(c.q2 == Approx(0.07600).margin(5e-6));
    }
    // independent evaluation of the definition
    const double ratio = f.eps10 / f.eps20, q = (1.0 - std::cos(f.theta)) / 2.0;
    CHECK(coupling_efficiency(f, kUniform).inv_eta_cp == Approx((1.0 - q - ratio * q) / (1.0 - ratio)));

    const DressedFrame bare = dressed_energies({1.0, 3.0, 0.0, std::nullopt});
    const CouplingEfficiency c0 = coupling_efficiency(bare, BathSpec{5.0, 1.0, 1.0, 1.0, 0.0, 0.0});
    CHECK(c0.q1 == 0.0);
    CHECK(c0.q2 == 0.0);
    CHECK(c0.eta_cp == Approx(1.0 - 1.0 / 3.0));

    const CouplingEfficiency dead = coupling_efficiency(bare, BathSpec{5.0, 1.0, 0.0, 1.0, 0.0, 0.0});
    CHECK(dead.dead_channel);
}

TEST_CASE("heat leakage limits") {
    ThermoReport r;
    r.heat_in = 0.3;
    r.power = 0.0;
    CHECK(heat_leakage(r, 1.5).leak == 0.3);
    r.power = 0.1;
    CHECK(heat_leakage(r, 2.0).leak == Approx(0.1));
    CHECK(heat_leakage(r, 2.0).leak_over_power == Approx(1.0));
}

TEST_CASE("equal temperatures never make an engine") {
    std::mt19937_64 rng(13);
    for (int k = 0; k < 500; ++k) {
        RandomDraw d = draw_config(rng);
        d.baths.beta_h = d.baths.beta_c;
        const ThermoReport r = evaluate_kinetic(d.spec, d.baths);
        REQUIRE(r.power <= 1e-15);
        REQUIRE_FALSE(engine_condition(effective_rates(dressed_energies(d.spec), d.baths)).is_engine);
        REQUIRE(r.sigma_avg == Approx(-d.baths.beta_c * r.power).margin(1e-14));
        REQUIRE(r.sigma_avg >= -1e-15);
    }
}

TEST_CASE("engine condition") {
    BathSpec b{5.0, 1.0, 0.5, 0.5, 0.0, 0.0};
    EngineSpec s{1.0, 3.0, 0.0, std::nullopt};
    const DressedFrame f = dressed_energies(s);
    const EngineCondition c = engine_condition(effective_rates(f, b));
    CHECK(c.margin == Approx(std::exp(-1.0 * 3.0) - std::exp(-5.0 * 1.0)));
    CHECK(c.is_engine == (1.0 * 3.0 < 5.0 * 1.0));

    // degenerate bare gaps: equal mixing, so both channels see the same baths
    EngineSpec eq{1.0, 1.0, 1e-12, std::nullopt};
    BathSpec u{2.0, 1.0, 1.0, 1.0, 1.0, 1.0};
    CHECK(std::abs(engine_condition(effective_rates(dressed_energies(eq), u)).margin) <= 1e-10);
}

TEST_CASE("evaluate_kinetic rejects inverted temperatures") {
    try {
        evaluate_kinetic(kFig7, BathSpec{0.5, 2.0, 1.0, 1.0, 0.0, 0.0});
        FAIL("expected not an engine");
    } catch (const Error& e) {
        CHECK(e.kind() == ErrorKind::NotAnEngine);
        CHECK(std::string(e.what()).find("not an engine configuration") != std::string::npos);
    }
    CHECK(evaluate_kinetic({1.0, 2.6, 0.0, std::nullopt}, kUniform).power == 0.0);
}

TEST_CASE("property: first law, second law, Carnot bound, sigma forms") {
    std::mt19937_64 rng(20230324);
    for (int k = 0; k < 10000; ++k) {
        const RandomDraw d = draw_config(rng);
        const ThermoReport r = evaluate_kinetic(d.spec, d.baths);
        const double scale = std::max({1.0, std::abs(r.heat_in), std::abs(r.heat_out)});
        REQUIRE(std::abs(r.power - r.heat_in - r.heat_out) <= 1e-12 * scale);
        REQUIRE(r.sigma_avg >= -1e-9);
        if (r.engine_ok) REQUIRE(r.efficiency <= carnot_efficiency(d.baths) + 1e-9);
        const double inv_carnot = 1.0 / carnot_efficiency(d.baths);
        const double eq11 = (d.baths.beta_c - d.baths.beta_h) * ((r.inv_coupling_eff - inv_carnot) * r.power + r.leak);
        REQUIRE(std::abs(eq11 - r.sigma_avg) <= 1e-10 * scale);
        REQUIRE(avg_entropy_production(r, d.baths) == r.sigma_avg);
    }
}

TEST_CASE("property: closures change magnitudes, not signs or coupling efficiency") {
    std::mt19937_64 rng(29);
    std::uniform_real_distribution<double> u(0.01, 5.0);
    for (int k = 0; k < 1000; ++k) {
        const RandomDraw d = draw_config(rng);
        if (d.spec.lam == 0.0) continue;
        const ThermoReport a = evaluate_kinetic(d.spec, d.baths);
        const ThermoReport b = evaluate_kinetic(d.spec, d.baths, {ClosureMode::FixedRate, u(rng), std::nullopt});
        const ThermoReport c = evaluate_kinetic(d.spec, d.baths, {ClosureMode::Eq2Structural, std::nullopt, u(rng)});
        auto sign = [](double x) { return (x > 1e-14) - (x < -1e-14); };
        REQUIRE(sign(a.power) == sign(b.power));
        REQUIRE(sign(a.power) == sign(c.power));
        REQUIRE(a.inv_coupling_eff == b.inv_coupling_eff);
        REQUIRE(a.inv_coupling_eff == c.inv_coupling_eff);
        REQUIRE(sign(engine_condition(effective_rates(dressed_energies(d.spec), d.baths)).margin) == sign(a.power));
    }
}

TEST_CASE("zero-field efficiency limit") {
    BathSpec b{5.0, 1.0, 0.5, 0.5, 0.0, 0.0};
    const auto eta = zero_field_efficiency_limit({1.0, 4.0, 0.0, std::nullopt}, b);
    REQUIRE(eta.has_value());
    CHECK(*eta == Approx(0.75).epsilon(1e-9));
    CHECK_FALSE(zero_field_efficiency_limit({1.0, 6.0, 0.0, std::nullopt}, b).has_value());

    // near the reversible point the entropy production vanishes with the power
    const ThermoReport r = evaluate_kinetic({1.0, 4.999, 0.001, std::nullopt}, b);
    CHECK(std::abs(r.sigma_avg) < 1e-6);
}
