// gkls_engine.hpp: rotating-frame GKLS generator, steady state and heat bookkeeping
//
// Density matrices are vectorized column-stacked: vec(A X B) = (B^T (x) A) vec(X).
// Bath jump operators are local (bare-basis) |0><j| and |j><0| pairs with
// detailed-balance rates at the bare gaps.

#pragma once

#include "qhe/dressed_model.hpp"
#include "qhe/error.hpp"

#include <Eigen/Dense>

#include <complex>
#include <cstddef>
#include <functional>
#include <optional>
#include <vector>

namespace qhe {

using Matrix3c = Eigen::Matrix3cd;
using Superop = Eigen::Matrix<std::complex<double>, 9, 9>;
using Vector9c = Eigen::Matrix<std::complex<double>, 9, 1>;

enum class Bath { Cold, Hot };

struct JumpOperator {
    Bath bath;
    Matrix3c op;
    double rate;
};

struct Generator {
    Superop total;     // -i[H_rot, .] + D_c + D_h
    Superop cold;      // D_c
    Superop hot;       // D_h
    std::vector<JumpOperator> jumps;
    Matrix3c h_rot;    // rotating-frame Hamiltonian
    Matrix3c h_energy; // h_rot + drive_freq |2><2|, the energy-bookkeeping operator
    double drive_freq{0.0};
    double lam{0.0};

    Matrix3c apply(const Matrix3c& rho) const;
    Matrix3c apply(Bath bath, const Matrix3c& rho) const;
};

Vector9c vectorize(const Matrix3c& m);
Matrix3c unvectorize(const Vector9c& v);

struct Physicality {
    double hermiticity{0.0};   // max |rho - rho^dagger|
    double trace_error{0.0};   // |tr rho - 1|
    double min_eigenvalue{0.0};
};

Physicality physicality(const Matrix3c& rho);

// Trace distance 1/2 ||a - b||_1.
double trace_distance(const Matrix3c& a, const Matrix3c& b);

// Default drive frequency of the numeric engine: bare resonance omega20 - omega10.
double gkls_drive_freq(const EngineSpec& spec);

Generator build_generator(const EngineSpec& spec, const BathSpec& baths);

// Solves L vec(rho) = 0 with tr rho = 1. Throws Error{NonUniqueSteadyState}
// or Error{UnphysicalSteadyState}.
Matrix3c steady_state(const Generator& gen);

// || L vec(rho) ||_inf
double generator_residual(const Generator& gen, const Matrix3c& rho);

struct RelaxResult {
    Matrix3c rho;
    double time{0.0};
    double residual{0.0};
    std::size_t steps{0};
    double max_trace_drift{0.0};
};

class RelaxTimeout : public Error {
public:
    RelaxTimeout(const std::string& what, double residual)
        : Error(ErrorKind::Timeout, what), residual_(residual) {}
    double residual() const noexcept { return residual_; }

private:
    double residual_;
};

using RelaxObserver = std::function<void(double t, const Matrix3c& rho)>;

// Integrates d rho/dt = L(rho) with an adaptive Dormand-Prince stepper
// (per-step error 1e-12 abs/rel) until ||L(rho)||_inf <= tol or t = horizon.
RelaxResult relax_to_steady(const Generator& gen, const Matrix3c& rho0, double horizon,
                            double tol, const RelaxObserver& observer = {});

struct HeatCurrents {
    double heat_in{0.0};   // Phi_h = tr(D_h[rho] H_E)
    double heat_out{0.0};  // Phi_c
    double power{0.0};     // Phi_h + Phi_c
};

// Also checks P = -2 w_d lam Im(rho_12); throws Error{InternalConsistency}.
HeatCurrents heat_currents(const Generator& gen, const Matrix3c& rho);

struct EntropyRate {
    double sigma{0.0};
    bool regularized{false};  // an eigenvalue was floored at 1e-15 for the log
};

EntropyRate entropy_production_rate(const Generator& gen, const Matrix3c& rho,
                                    const BathSpec& baths);

enum class HeatFlowMode {
    Unclassified = 0,
    HotReversed = 1,
    Ideal = 2,
    ColdReversed = 3,
};

struct HeatDecomposition {
    double diag_h{0.0};
    double diag_c{0.0};
    double nondiag_h{0.0};
    double nondiag_c{0.0};
    std::optional<double> inv_eta_nd;
    HeatFlowMode mode{HeatFlowMode::Unclassified};
    Matrix3c basis;  // columns: eigenvectors of h_rot

    double total_h() const noexcept { return diag_h + nondiag_h; }
    double total_c() const noexcept { return diag_c + nondiag_c; }
};

HeatDecomposition heat_decomposition(const Generator& gen, const Matrix3c& rho);

// 1/eta^nd = Phi^nd_h / P, empty when P vanishes.
std::optional<double> nondiag_efficiency(const HeatDecomposition& dec, double power);

HeatFlowMode classify_mode(double inv_eta_nd);

// |P| small against the heat currents it is the sum of.
bool is_zero_power(double power, double heat_in, double heat_out);

struct GklsReport {
    Matrix3c rho;
    HeatCurrents currents;
    double efficiency{0.0};
    double efficacy{0.0};
    bool engine_ok{false};
    EntropyRate entropy;
    HeatDecomposition decomposition;
    double residual{0.0};
};

GklsReport evaluate_gkls(const EngineSpec& spec, const BathSpec& baths);

} // namespace qhe
