#pragma once

#include <Eigen/Dense>

namespace eitsim {

/// Reid inferred-variance product for the quadrature covariance V over
/// (X1, P1, X2, P2).  The inferred variances of beam 2 use the optimal
/// linear estimate from beam 1:
///   var_inf(X2) = V33 - V13^2/V11   at gain eta0    = V13/V11
///   var_inf(P2) = V44 - V24^2/V22   at gain eta_pi2 = -V24/V22
/// (1-based indices).  product < 1 witnesses entanglement; vacuum gives 1.
struct ReidResult {
    double product = 1.0;
    double eta0 = 0.0;
    double eta_pi2 = 0.0;
};

ReidResult reid_product(const Eigen::Matrix4d& v);

/// EPR-sum criterion: minimum over the sign pair (sx, sp) in
/// {(+1,-1), (-1,+1)} of var(X1 + sx X2) + var(P1 + sp P2).
/// sum < 4 witnesses entanglement under [x,p] = 2i; vacuum gives 4.
struct EprSumResult {
    double sum = 4.0;
    int sign_x = +1;  ///< chosen sx; sp = -sx
};

EprSumResult dgcz_sum(const Eigen::Matrix4d& v);

/// Combined evaluation of one covariance matrix.  Violation depths are
/// signed (1 - product, 1 - sum/4): positive iff the criterion is violated.
struct EntanglementReport {
    double omega = 0.0;
    double c_amp = 0.0;
    double c_phase = 0.0;
    double reid = 1.0;
    double eta0 = 0.0;
    double eta_pi2 = 0.0;
    double dgcz = 4.0;
    int dgcz_sign_x = +1;
    bool entangled_reid = false;  ///< reid < 1
    bool entangled_dgcz = false;  ///< dgcz < 4
    double depth_reid = 0.0;      ///< 1 - reid
    double depth_dgcz = 0.0;      ///< 1 - dgcz/4
};

EntanglementReport classify(const Eigen::Matrix4d& v, double omega);

/// Smallest eigenvalue of V + i*Sigma, Sigma the two-mode commutator form
/// under [x,p] = 2i (vacuum variance 1).  Physical states give >= 0 up to
/// roundoff; a genuinely negative value means V is not a quantum state.
double uncertainty_residual(const Eigen::Matrix4d& v);

}  // namespace eitsim
