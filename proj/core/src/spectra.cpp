#include "eitsim/spectra.hpp"

#include <cmath>
#include <sstream>
#include <stdexcept>

namespace eitsim {

namespace {

constexpr cplx kI{0.0, 1.0};

/// Vacuum input correlations in the transpose pairing:
/// <v_mu(w) v_nu(w')> = 2pi d(w+w') Vin(mu,nu); only <a a+> survives.
Eigen::Matrix4cd vacuum_input() {
    Eigen::Matrix4cd v = Eigen::Matrix4cd::Zero();
    v(0, 1) = 1.0;
    v(2, 3) = 1.0;
    return v;
}

/// lhs * (A - iw)^-1 through an SVD pseudo-inverse.  Exactly singular
/// directions are dropped only when lhs cannot see them; a driven resonance
/// that reaches the requested rows is a genuine pole and raises an error.
Eigen::MatrixXcd apply_inverse(const Eigen::MatrixXcd& lhs, const Eigen::MatrixXcd& a,
                               double omega) {
    const Eigen::MatrixXcd k = a - kI * omega * Eigen::MatrixXcd::Identity(a.rows(), a.cols());
    Eigen::JacobiSVD<Eigen::MatrixXcd> svd(k, Eigen::ComputeThinU | Eigen::ComputeThinV);
    const auto& sv = svd.singularValues();
    const double cutoff = 1e-12 * sv[0];

    Eigen::MatrixXcd result = Eigen::MatrixXcd::Zero(lhs.rows(), a.cols());
    for (Eigen::Index i = 0; i < sv.size(); ++i) {
        const Eigen::VectorXcd vi = svd.matrixV().col(i);
        const Eigen::VectorXcd lhs_vi = lhs * vi;
        if (sv[i] <= cutoff) {
            if (lhs_vi.norm() > 1e-8 * lhs.norm()) {
                std::ostringstream err;
                err << "resonant singularity: drift matrix is singular at analysis "
                       "frequency "
                    << omega << " rad/s";
                throw std::runtime_error(err.str());
            }
            continue;
        }
        result += (lhs_vi / sv[i]) * svd.matrixU().col(i).adjoint();
    }
    return result;
}

/// Transpose-pairing spectral matrix of a row selection:
/// rows(w) <- L M(w) with M(w) = (A - iw)^-1, giving
///   S(w) = [L M(w)] (B Vin B^T + D) [L M(-w)]^T.
Eigen::MatrixXcd selected_spectrum(const LinearModel& m, const Eigen::MatrixXcd& sel,
                                   double omega) {
    const Eigen::MatrixXcd noise =
        m.B * vacuum_input() * m.B.transpose() + m.D;
    const Eigen::MatrixXcd gp = apply_inverse(sel, m.A, omega);
    const Eigen::MatrixXcd gm = apply_inverse(sel, m.A, -omega);
    return gp * noise * gm.transpose();
}

/// Output selection a_out = sqrt(gamma) a - a_in over the four field slots.
Eigen::MatrixXcd output_selector(const PhysicalParams& p) {
    using B = OperatorBasis;
    Eigen::MatrixXcd c = Eigen::MatrixXcd::Zero(4, B::kDim);
    c(0, B::kA1) = std::sqrt(p.gamma1);
    c(1, B::kA1d) = std::sqrt(p.gamma1);
    c(2, B::kA2) = std::sqrt(p.gamma2);
    c(3, B::kA2d) = std::sqrt(p.gamma2);
    return c;
}

/// Transpose-pairing output spectrum including the interference of the
/// reflected input with the emitted field.
Eigen::Matrix4cd output_spectrum(const LinearModel& m, double omega) {
    const Eigen::Matrix4cd vin = vacuum_input();
    const Eigen::MatrixXcd c = output_selector(m.params);
    const Eigen::MatrixXcd gp = apply_inverse(c, m.A, omega);
    const Eigen::MatrixXcd gm = apply_inverse(c, m.A, -omega);

    const Eigen::MatrixXcd noise = m.B * vin * m.B.transpose() + m.D;
    Eigen::Matrix4cd s = gp * noise * gm.transpose();
    s -= gp * m.B * vin;
    s -= (gm * m.B * vin.transpose()).transpose();
    s += vin;
    return s;
}

/// Quadrature map (X1, P1, X2, P2) over (a1, a1+, a2, a2+).
Eigen::Matrix4cd quadrature_map() {
    Eigen::Matrix4cd q = Eigen::Matrix4cd::Zero();
    q(0, 0) = 1.0;
    q(0, 1) = 1.0;
    q(1, 0) = -kI;
    q(1, 1) = kI;
    q(2, 2) = 1.0;
    q(2, 3) = 1.0;
    q(3, 2) = -kI;
    q(3, 3) = kI;
    return q;
}

}  // namespace

Eigen::MatrixXcd internal_spectrum(const LinearModel& m, double omega) {
    const Eigen::MatrixXcd ident =
        Eigen::MatrixXcd::Identity(OperatorBasis::kDim, OperatorBasis::kDim);
    const Eigen::MatrixXcd s = selected_spectrum(m, ident, omega);
    // Reorder the transpose pairing onto the dagger pairing.
    Eigen::MatrixXcd p(OperatorBasis::kDim, OperatorBasis::kDim);
    for (int nu = 0; nu < OperatorBasis::kDim; ++nu) {
        p.col(nu) = s.col(OperatorBasis::conjugate_index(nu));
    }
    return p;
}

Eigen::Matrix4d output_quadrature_covariance(const LinearModel& m, double omega) {
    const Eigen::Matrix4cd q = quadrature_map();
    const Eigen::Matrix4cd sp = q * output_spectrum(m, omega) * q.transpose();
    const Eigen::Matrix4cd sm = q * output_spectrum(m, -omega) * q.transpose();
    const Eigen::Matrix4cd sym =
        0.25 * (sp + sm + sp.transpose() + sm.transpose());
    return sym.real();
}

Correlations correlation_coefficients(const Eigen::Matrix4d& v) {
    Correlations c;
    c.c_amp = v(0, 2) / std::sqrt(v(0, 0) * v(2, 2));
    c.c_phase = v(1, 3) / std::sqrt(v(1, 1) * v(3, 3));
    return c;
}

}  // namespace eitsim
