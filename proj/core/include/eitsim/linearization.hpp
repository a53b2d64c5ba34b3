#pragma once

#include <Eigen/Dense>
#include <array>

#include "eitsim/model.hpp"
#include "eitsim/params.hpp"

namespace eitsim {

/// Fluctuation basis shared by drift, diffusion and spectrum code.  Slots
/// pair up under conjugation as (0,1), (2,3), ..., (8,9); the inversions are
/// self-paired.
struct OperatorBasis {
    static constexpr int kDim = 12;
    enum Index : int {
        kA1 = 0,
        kA1d = 1,
        kA2 = 2,
        kA2d = 3,
        kS1 = 4,
        kS1d = 5,
        kS2 = 6,
        kS2d = 7,
        kS12 = 8,
        kS12d = 9,
        kW1 = 10,
        kW2 = 11,
    };
    static const std::array<const char*, kDim>& labels();
    static int conjugate_index(int i);
};

/// Linearized fluctuation dynamics around a steady state,
///   d(dx)/dt = -A dx + B dx_in + F,
/// with vacuum inputs dx_in = (a1_in, a1_in+, a2_in, a2_in+) and atomic
/// Langevin forces F of diffusion D: <F_mu(t) F_nu(t')> = D(mu,nu) d(t-t').
struct LinearModel {
    Eigen::MatrixXcd A;  ///< 12x12; stable when all eigenvalues have Re > 0
    Eigen::MatrixXcd B;  ///< 12x4 input coupling (sqrt of the field decay rates)
    Eigen::MatrixXcd D;  ///< 12x12 atomic diffusion; field rows and columns vanish
    bool stable = false;
    double abscissa = 0.0;  ///< smallest real part over eig(A)
    PhysicalParams params;
    SteadyState ss;
};

/// Drift matrix assembled from the Heisenberg equations of the basis
/// operators, linearized around ss.  Field rows carry the published
/// cavity-damping form; atomic rows come from the operator algebra, so every
/// coupling traces back to the one Hamiltonian in operator_drift.
Eigen::MatrixXcd build_drift(const PhysicalParams& p, const SteadyState& ss);

Eigen::MatrixXcd build_input_coupling(const PhysicalParams& p);

/// Atomic diffusion matrix from the generalized Einstein relation
///   D(mu,nu) = <drift(y_mu y_nu)> - <drift(y_mu) y_nu> - <y_mu drift(y_nu)>
/// evaluated at ss with field operators replaced by their coherent means.
/// Satisfies conj(D(mu,nu)) = D(nu',mu') for conjugate slot pairs.
Eigen::MatrixXcd build_diffusion(const PhysicalParams& p, const SteadyState& ss);

struct StabilityReport {
    bool stable = false;
    double abscissa = 0.0;
    Eigen::VectorXcd eigenvalues;
};

/// Spectral abscissa test with a small negative margin so the structurally
/// marginal population-redistribution mode at zero coupling counts as stable.
StabilityReport check_stability(const Eigen::MatrixXcd& A, double rate_scale);

LinearModel build_linear_model(const PhysicalParams& p, const SteadyState& ss);

/// Convenience overload: solves for the steady state first.  Throws
/// std::runtime_error if the steady-state solve does not converge.
LinearModel build_linear_model(const PhysicalParams& p);

}  // namespace eitsim
