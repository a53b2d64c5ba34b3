#pragma once

#include <Eigen/Dense>

#include "eitsim/linearization.hpp"

namespace eitsim {

/// Spectral matrix of the internal fluctuations at analysis frequency omega
/// (rad/s), in the dagger pairing:
///   P(mu,nu)(w) delta(w - w') = <dx_mu(w) dx_nu(w')^+> / 2pi
/// with dx_nu(w)^+ = dx_nu'(-w) for the conjugate slot nu'.  Hermitian and
/// positive semidefinite for a stable model.  Throws std::runtime_error
/// ("resonant singularity ...") when the drift matrix is singular at iw.
Eigen::MatrixXcd internal_spectrum(const LinearModel& m, double omega);

/// Symmetrized spectral covariance of the output quadratures
/// (X1, P1, X2, P2) = (a_out + a_out^+, -i a_out + i a_out^+) per beam, at
/// analysis frequency omega.  Includes the input-output interference terms;
/// vacuum inputs with decoupled atoms give the identity (shot noise = 1).
Eigen::Matrix4d output_quadrature_covariance(const LinearModel& m, double omega);

struct Correlations {
    double c_amp = 0.0;    ///< amplitude-quadrature correlation X1-X2
    double c_phase = 0.0;  ///< phase-quadrature correlation P1-P2
};

Correlations correlation_coefficients(const Eigen::Matrix4d& v);

}  // namespace eitsim
