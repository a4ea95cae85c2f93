// gkls_engine.cpp

#include "qhe/gkls_engine.hpp"

#include <boost/numeric/odeint.hpp>

#include <algorithm>
#include <array>
#include <cmath>
#include <sstream>

namespace qhe {

namespace {

using cd = std::complex<double>;
constexpr cd I{0.0, 1.0};

Matrix3c outer(int i, int j) {
    Matrix3c m = Matrix3c::Zero();
    m(i, j) = 1.0;
    return m;
}

// B^T (x) A
Superop kron_t(const Matrix3c& b, const Matrix3c& a) {
    Superop out;
    for (int bi = 0; bi < 3; ++bi)
        for (int bj = 0; bj < 3; ++bj)
            out.block<3, 3>(3 * bi, 3 * bj) = b(bj, bi) * a;
    return out;
}

Superop dissipator(const Matrix3c& L, double rate) {
    const Matrix3c id = Matrix3c::Identity();
    const Matrix3c ldl = L.adjoint() * L;
    // L rho L^dag - 1/2 (L^dag L rho + rho L^dag L)
    return rate * (kron_t(L.adjoint(), L) - 0.5 * kron_t(id, ldl) - 0.5 * kron_t(ldl, id));
}

Superop commutator(const Matrix3c& h) {
    const Matrix3c id = Matrix3c::Identity();
    return -I * (kron_t(id, h) - kron_t(h, id));
}

double real_trace(const Matrix3c& m) { return m.trace().real(); }

} // namespace

Vector9c vectorize(const Matrix3c& m) {
    Vector9c v;
    for (int j = 0; j < 3; ++j)
        for (int i = 0; i < 3; ++i) v(3 * j + i) = m(i, j);
    return v;
}

Matrix3c unvectorize(const Vector9c& v) {
    Matrix3c m;
    for (int j = 0; j < 3; ++j)
        for (int i = 0; i < 3; ++i) m(i, j) = v(3 * j + i);
    return m;
}

Matrix3c Generator::apply(const Matrix3c& rho) const {
    return unvectorize(total * vectorize(rho));
}

Matrix3c Generator::apply(Bath bath, const Matrix3c& rho) const {
    return unvectorize((bath == Bath::Cold ? cold : hot) * vectorize(rho));
}

Physicality physicality(const Matrix3c& rho) {
    Physicality p;
    p.hermiticity = (rho - rho.adjoint()).cwiseAbs().maxCoeff();
    p.trace_error = std::abs(rho.trace() - cd{1.0, 0.0});
    const Matrix3c h = 0.5 * (rho + rho.adjoint());
    Eigen::SelfAdjointEigenSolver<Matrix3c> es(h, Eigen::EigenvaluesOnly);
    p.min_eigenvalue = es.eigenvalues().minCoeff();
    return p;
}

double trace_distance(const Matrix3c& a, const Matrix3c& b) {
    const Matrix3c d = a - b;
    Eigen::SelfAdjointEigenSolver<Matrix3c> es(0.5 * (d + d.adjoint()), Eigen::EigenvaluesOnly);
    return 0.5 * es.eigenvalues().cwiseAbs().sum();
}

double gkls_drive_freq(const EngineSpec& spec) {
    return spec.drive_freq.value_or(spec.omega20 - spec.omega10);
}

Generator build_generator(const EngineSpec& spec, const BathSpec& b) {
    validate(spec);
    validate(b);

    Generator gen;
    gen.drive_freq = gkls_drive_freq(spec);
    gen.lam = spec.lam;

    gen.h_rot = Matrix3c::Zero();
    gen.h_rot(1, 1) = spec.omega10;
    gen.h_rot(2, 2) = spec.omega20 - gen.drive_freq;
    gen.h_rot(1, 2) = spec.lam;
    gen.h_rot(2, 1) = spec.lam;
    gen.h_energy = gen.h_rot;
    gen.h_energy(2, 2) += gen.drive_freq;

    auto add_pair = [&](Bath bath, int level, double gamma, double beta, double gap) {
        if (gamma == 0.0) return;
        gen.jumps.push_back({bath, outer(0, level), gamma});
        gen.jumps.push_back({bath, outer(level, 0), detailed_balance_rate(gamma, beta, gap)});
    };
    add_pair(Bath::Cold, 1, b.g_c_res, b.beta_c, spec.omega10);
    add_pair(Bath::Cold, 2, b.g_c_det, b.beta_c, spec.omega20);
    add_pair(Bath::Hot, 2, b.g_h_res, b.beta_h, spec.omega20);
    add_pair(Bath::Hot, 1, b.g_h_det, b.beta_h, spec.omega10);

    gen.cold = Superop::Zero();
    gen.hot = Superop::Zero();
    for (const auto& j : gen.jumps) {
        (j.bath == Bath::Cold ? gen.cold : gen.hot) += dissipator(j.op, j.rate);
    }
    gen.total = commutator(gen.h_rot) + gen.cold + gen.hot;
    return gen;
}

double generator_residual(const Generator& gen, const Matrix3c& rho) {
    return (gen.total * vectorize(rho)).cwiseAbs().maxCoeff();
}

Matrix3c steady_state(const Generator& gen) {
    Eigen::FullPivLU<Superop> rank_check(gen.total);
    rank_check.setThreshold(1e-12);
    if (rank_check.rank() < 8) {
        throw Error(ErrorKind::NonUniqueSteadyState,
                    "non-unique steady state: generator kernel has dimension " +
                        std::to_string(9 - rank_check.rank()));
    }

    // replace the rho_00 equation by the trace constraint
    Superop a = gen.total;
    a.row(0).setZero();
    a(0, 0) = a(0, 4) = a(0, 8) = 1.0;
    Vector9c rhs = Vector9c::Zero();
    rhs(0) = 1.0;
    Eigen::FullPivLU<Superop> lu(a);
    Vector9c x = lu.solve(rhs);
    x += lu.solve(rhs - a * x);  // one refinement step

    Matrix3c rho = unvectorize(x);
    const double herm = (rho - rho.adjoint()).cwiseAbs().maxCoeff();
    if (herm > 1e-12 * std::max(1.0, rho.cwiseAbs().maxCoeff())) {
        std::ostringstream msg;
        msg << "unphysical steady state: anti-Hermitian part " << herm;
        throw Error(ErrorKind::UnphysicalSteadyState, msg.str());
    }
    rho = 0.5 * (rho + rho.adjoint());

    Eigen::SelfAdjointEigenSolver<Matrix3c> es(rho);
    const double min_eig = es.eigenvalues().minCoeff();
    if (min_eig < -1e-9) {
        std::ostringstream msg;
        msg << "unphysical steady state: eigenvalue " << min_eig;
        throw Error(ErrorKind::UnphysicalSteadyState, msg.str());
    }
    if (min_eig < -1e-12) {
        Eigen::Vector3d ev = es.eigenvalues().cwiseMax(0.0);
        rho = es.eigenvectors() * ev.asDiagonal() * es.eigenvectors().adjoint();
    }
    rho /= rho.trace();
    return rho;
}

RelaxResult relax_to_steady(const Generator& gen, const Matrix3c& rho0, double horizon,
                            double tol, const RelaxObserver& observer) {
    using State = std::array<double, 18>;
    namespace ode = boost::numeric::odeint;

    auto to_state = [](const Matrix3c& m) {
        State s;
        const Vector9c v = vectorize(m);
        for (int k = 0; k < 9; ++k) {
            s[2 * k] = v(k).real();
            s[2 * k + 1] = v(k).imag();
        }
        return s;
    };
    auto to_matrix = [](const State& s) {
        Vector9c v;
        for (int k = 0; k < 9; ++k) v(k) = cd{s[2 * k], s[2 * k + 1]};
        return unvectorize(v);
    };
    auto rhs = [&](const State& s, State& ds, double) {
        Vector9c v;
        for (int k = 0; k < 9; ++k) v(k) = cd{s[2 * k], s[2 * k + 1]};
        const Vector9c dv = gen.total * v;
        for (int k = 0; k < 9; ++k) {
            ds[2 * k] = dv(k).real();
            ds[2 * k + 1] = dv(k).imag();
        }
    };

    auto stepper = ode::make_controlled(1e-12, 1e-12, ode::runge_kutta_dopri5<State>{});

    RelaxResult out;
    State x = to_state(rho0);
    double t = 0.0;
    double dt = 1e-2;
    const double trace0 = real_trace(rho0);
    out.residual = generator_residual(gen, rho0);
    if (observer) observer(t, rho0);

    while (out.residual > tol) {
        if (t >= horizon) {
            std::ostringstream msg;
            msg << "timeout: relaxation did not converge by t = " << horizon
                << " (residual " << out.residual << ")";
            throw RelaxTimeout(msg.str(), out.residual);
        }
        dt = std::min(dt, horizon - t);
        if (stepper.try_step(rhs, x, t, dt) != ode::success) continue;
        ++out.steps;
        const Matrix3c rho = to_matrix(x);
        out.residual = generator_residual(gen, rho);
        out.max_trace_drift = std::max(out.max_trace_drift, std::abs(real_trace(rho) - trace0));
        if (observer) observer(t, rho);
    }

    out.rho = to_matrix(x);
    out.time = t;
    return out;
}

bool is_zero_power(double power, double heat_in, double heat_out) {
    return std::abs(power) <= 1e-13 * std::max({1.0, std::abs(heat_in), std::abs(heat_out)});
}

HeatCurrents heat_currents(const Generator& gen, const Matrix3c& rho) {
    HeatCurrents hc;
    hc.heat_in = real_trace(gen.apply(Bath::Hot, rho) * gen.h_energy);
    hc.heat_out = real_trace(gen.apply(Bath::Cold, rho) * gen.h_energy);
    hc.power = hc.heat_in + hc.heat_out;

    const double coherence_flux = -2.0 * gen.drive_freq * gen.lam * rho(1, 2).imag();
    const double scale = std::max({1.0, std::abs(hc.heat_in), std::abs(hc.heat_out)});
    if (std::abs(coherence_flux - hc.power) > 1e-10 * scale) {
        std::ostringstream msg;
        msg << "internal-consistency error: power " << hc.power
            << " disagrees with coherence flux " << coherence_flux;
        throw Error(ErrorKind::InternalConsistency, msg.str());
    }
    return hc;
}

EntropyRate entropy_production_rate(const Generator& gen, const Matrix3c& rho,
                                    const BathSpec& baths) {
    constexpr double floor = 1e-15;
    EntropyRate out;
    Eigen::SelfAdjointEigenSolver<Matrix3c> es(0.5 * (rho + rho.adjoint()));
    Eigen::Vector3d log_ev;
    for (int k = 0; k < 3; ++k) {
        double ev = es.eigenvalues()(k);
        if (ev < floor) {
            ev = floor;
            out.regularized = true;
        }
        log_ev(k) = std::log(ev);
    }
    const Matrix3c log_rho = es.eigenvectors() * log_ev.asDiagonal() * es.eigenvectors().adjoint();
    const Matrix3c rho_dot = gen.apply(rho);
    const double q_h = real_trace(gen.apply(Bath::Hot, rho) * gen.h_energy);
    const double q_c = real_trace(gen.apply(Bath::Cold, rho) * gen.h_energy);
    out.sigma = -real_trace(rho_dot * log_rho) - baths.beta_h * q_h - baths.beta_c * q_c;
    return out;
}

HeatDecomposition heat_decomposition(const Generator& gen, const Matrix3c& rho) {
    Eigen::SelfAdjointEigenSolver<Matrix3c> es(gen.h_rot);
    const Eigen::Vector3d e = es.eigenvalues();
    Matrix3c basis = es.eigenvectors();

    // rotate degenerate eigenspaces so rho is diagonal inside them
    const double tol = 1e-9 * std::max(1.0, e.cwiseAbs().maxCoeff());
    int start = 0;
    while (start < 3) {
        int end = start + 1;
        while (end < 3 && std::abs(e(end) - e(start)) <= tol) ++end;
        const int k = end - start;
        if (k > 1) {
            const Eigen::MatrixXcd v = basis.middleCols(start, k);
            const Eigen::MatrixXcd sub = v.adjoint() * rho * v;
            Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> sub_es(0.5 * (sub + sub.adjoint()));
            basis.middleCols(start, k) = v * sub_es.eigenvectors();
        }
        start = end;
    }

    const Matrix3c d_hot = gen.apply(Bath::Hot, rho);
    const Matrix3c d_cold = gen.apply(Bath::Cold, rho);
    HeatDecomposition dec;
    dec.basis = basis;
    for (int n = 0; n < 3; ++n) {
        const auto v = basis.col(n);
        const double energy = (v.adjoint() * gen.h_energy * v)(0, 0).real();
        dec.diag_h += (v.adjoint() * d_hot * v)(0, 0).real() * energy;
        dec.diag_c += (v.adjoint() * d_cold * v)(0, 0).real() * energy;
    }
    const double q_h = real_trace(d_hot * gen.h_energy);
    const double q_c = real_trace(d_cold * gen.h_energy);
    dec.nondiag_h = q_h - dec.diag_h;
    dec.nondiag_c = q_c - dec.diag_c;

    const double scale = std::max({1.0, std::abs(dec.diag_h), std::abs(dec.diag_c)});
    if (std::abs(dec.diag_h + dec.diag_c) > 1e-10 * scale) {
        std::ostringstream msg;
        msg << "internal-consistency error: diagonal heat does not cancel ("
            << dec.diag_h + dec.diag_c << ")";
        throw Error(ErrorKind::InternalConsistency, msg.str());
    }

    const double power = q_h + q_c;
    if (!is_zero_power(power, q_h, q_c)) {
        dec.inv_eta_nd = nondiag_efficiency(dec, power);
        if (dec.inv_eta_nd) dec.mode = classify_mode(*dec.inv_eta_nd);
    }
    return dec;
}

std::optional<double> nondiag_efficiency(const HeatDecomposition& dec, double power) {
    if (power == 0.0) return std::nullopt;
    return dec.nondiag_h / power;
}

HeatFlowMode classify_mode(double inv_eta_nd) {
    if (inv_eta_nd < 0.0) return HeatFlowMode::HotReversed;
    if (inv_eta_nd <= 1.0) return HeatFlowMode::Ideal;
    return HeatFlowMode::ColdReversed;
}

GklsReport evaluate_gkls(const EngineSpec& spec, const BathSpec& baths) {
    if (baths.beta_c < baths.beta_h) {
        throw Error(ErrorKind::NotAnEngine, "not an engine configuration: beta_c < beta_h");
    }
    const Generator gen = build_generator(spec, baths);
    GklsReport r;
    r.rho = steady_state(gen);
    r.residual = generator_residual(gen, r.rho);
    r.currents = heat_currents(gen, r.rho);
    const auto& c = r.currents;
    if (c.power > 0.0 && c.heat_in > 0.0 && !is_zero_power(c.power, c.heat_in, c.heat_out)) {
        r.engine_ok = true;
        r.efficiency = c.power / c.heat_in;
        r.efficacy = c.power * r.efficiency;
    }
    r.entropy = entropy_production_rate(gen, r.rho, baths);
    r.decomposition = heat_decomposition(gen, r.rho);
    return r;
}

} // namespace qhe
