#pragma once

#include <Eigen/Dense>
#include <cstdint>

#include "eitsim/linearization.hpp"

namespace eitsim {

/// Real-quadrature form of the fluctuation dynamics,
///   du = -A u dt + B dW + L dV,
/// in the basis (x1, p1, x2, p2, xs1, ps1, xs2, ps2, xs12, ps12, w1, w2) with
/// x_y = y + y+ and p_y = -i(y - y+).  dW are the four unit-intensity input
/// quadrature noises, shared with the detection records; L L^T is the
/// symmetrized atomic diffusion.  Classical trajectories of this SDE carry the
/// same symmetrized second-order statistics as the operator system, which is
/// what a spectrum analyzer measures.
struct RealBasisModel {
    Eigen::MatrixXd A;
    Eigen::MatrixXd B;
    Eigen::MatrixXd L;
    double clip = 0.0;  ///< magnitude of the roundoff eigenvalue clipped from L L^T
};

/// Throws std::logic_error if the complex model is not conjugation symmetric
/// or the symmetrized diffusion is indefinite beyond roundoff.
RealBasisModel real_basis_model(const LinearModel& m);

struct OracleOptions {
    std::uint64_t seed = 0x0ddc0ffeeULL;
    int trajectories = 32;
    int segments_per_trajectory = 8;
    double cycles_per_segment = 40.0;  ///< segment length in analysis periods
    double dt_cycle_fraction = 0.005;  ///< bin length as a fraction of one period
    double dt_rate_factor = 0.05;      ///< bin length cap over the spectral radius
};

struct OracleEstimate {
    double omega = 0.0;
    Eigen::Matrix4d V = Eigen::Matrix4d::Zero();          ///< mean of Welch segments
    Eigen::Matrix4d std_error = Eigen::Matrix4d::Zero();  ///< scatter / sqrt(segments)
    long segments = 0;
    long steps_per_segment = 0;
    double dt = 0.0;
};

/// Time-domain estimate of the detected quadrature covariance at one analysis
/// frequency, for cross-checking the frequency-domain pipeline.  Simulates the
/// real-basis SDE with the exact per-bin transition kernel (matrix exponential
/// of an augmented generator for state, bin integral and input increments), so
/// the output records y_out = sqrt(gamma) y - y_in have no time-stepping bias;
/// what remains is windowing leakage and the within-bin phase approximation.
/// Trajectories start from the stationary distribution.  Deterministic for a
/// fixed seed.  Throws std::invalid_argument on an unstable model.
OracleEstimate simulate_quadrature_covariance(const LinearModel& m, double omega,
                                              const OracleOptions& opt = {});

}  // namespace eitsim
