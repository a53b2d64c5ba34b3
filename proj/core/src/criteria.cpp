#include "eitsim/criteria.hpp"

#include <complex>

#include "eitsim/spectra.hpp"

namespace eitsim {

ReidResult reid_product(const Eigen::Matrix4d& v) {
    ReidResult r;
    r.eta0 = v(0, 2) / v(0, 0);
    r.eta_pi2 = -v(1, 3) / v(1, 1);
    const double var_x2 = v(2, 2) - v(0, 2) * v(0, 2) / v(0, 0);
    const double var_p2 = v(3, 3) - v(1, 3) * v(1, 3) / v(1, 1);
    r.product = var_x2 * var_p2;
    return r;
}

EprSumResult dgcz_sum(const Eigen::Matrix4d& v) {
    // var(X1 + sx X2) + var(P1 - sx P2) = tr(V) + 2 sx (V13 - V24)
    const double trace = v.trace();
    const double cross = v(0, 2) - v(1, 3);
    EprSumResult r;
    r.sign_x = cross <= 0.0 ? +1 : -1;
    r.sum = trace - 2.0 * std::abs(cross);
    return r;
}

EntanglementReport classify(const Eigen::Matrix4d& v, double omega) {
    EntanglementReport rep;
    rep.omega = omega;
    const Correlations c = correlation_coefficients(v);
    rep.c_amp = c.c_amp;
    rep.c_phase = c.c_phase;
    const ReidResult reid = reid_product(v);
    rep.reid = reid.product;
    rep.eta0 = reid.eta0;
    rep.eta_pi2 = reid.eta_pi2;
    const EprSumResult epr = dgcz_sum(v);
    rep.dgcz = epr.sum;
    rep.dgcz_sign_x = epr.sign_x;
    rep.entangled_reid = rep.reid < 1.0;
    rep.entangled_dgcz = rep.dgcz < 4.0;
    rep.depth_reid = 1.0 - rep.reid;
    rep.depth_dgcz = 1.0 - rep.dgcz / 4.0;
    return rep;
}

double uncertainty_residual(const Eigen::Matrix4d& v) {
    Eigen::Matrix4cd m = v.cast<std::complex<double>>();
    const std::complex<double> i(0.0, 1.0);
    m(0, 1) += i;
    m(1, 0) -= i;
    m(2, 3) += i;
    m(3, 2) -= i;
    Eigen::SelfAdjointEigenSolver<Eigen::Matrix4cd> es(m);
    return es.eigenvalues().minCoeff();
}

}  // namespace eitsim
