#include "eitsim/linearization.hpp"

#include <stdexcept>

namespace eitsim {

namespace {

constexpr cplx kI{0.0, 1.0};

AtomicOp slot_operator(int slot) {
    using B = OperatorBasis;
    switch (slot) {
        case B::kS1:
            return AtomicOp::sigma(1, 0);
        case B::kS1d:
            return AtomicOp::sigma(0, 1);
        case B::kS2:
            return AtomicOp::sigma(2, 0);
        case B::kS2d:
            return AtomicOp::sigma(0, 2);
        case B::kS12:
            return AtomicOp::sigma(2, 1);
        case B::kS12d:
            return AtomicOp::sigma(1, 2);
        case B::kW1:
            return AtomicOp::sigma(0, 0) - AtomicOp::sigma(1, 1);
        case B::kW2:
            return AtomicOp::sigma(0, 0) - AtomicOp::sigma(2, 2);
        default:
            throw std::logic_error("slot_operator: not an atomic slot");
    }
}

struct FieldMeans {
    cplx a1, a1d, a2, a2d;
};

/// Drift with the field operators replaced by their coherent amplitudes.
AtomicOp classical_drift_op(const OperatorDrift& d, const FieldMeans& f) {
    return d.c0 + f.a1 * d.cA1 + f.a1d * d.cA1d + f.a2 * d.cA2 + f.a2d * d.cA2d;
}

/// Fluctuation of an atomic operator expanded over the atomic slots.  The
/// diagonal part is resolved onto the inversions through trace conservation:
/// d(sigma00) = (dw1+dw2)/3, d(sigma11) = (-2dw1+dw2)/3, d(sigma22) = (dw1-2dw2)/3.
void accumulate_fluctuation(const AtomicOp& op, Eigen::RowVectorXcd& row) {
    using B = OperatorBasis;
    row[B::kS1] += op.coeff(1, 0);
    row[B::kS1d] += op.coeff(0, 1);
    row[B::kS2] += op.coeff(2, 0);
    row[B::kS2d] += op.coeff(0, 2);
    row[B::kS12] += op.coeff(2, 1);
    row[B::kS12d] += op.coeff(1, 2);
    const cplx c00 = op.coeff(0, 0), c11 = op.coeff(1, 1), c22 = op.coeff(2, 2);
    row[B::kW1] += (c00 - 2.0 * c11 + c22) / 3.0;
    row[B::kW2] += (c00 + c11 - 2.0 * c22) / 3.0;
}

FieldMeans field_means(const SteadyState& ss) {
    return {ss.alpha1, std::conj(ss.alpha1), ss.alpha2, std::conj(ss.alpha2)};
}

}  // namespace

const std::array<const char*, OperatorBasis::kDim>& OperatorBasis::labels() {
    static const std::array<const char*, kDim> kLabels = {
        "a1", "a1+", "a2", "a2+", "s1", "s1+", "s2", "s2+", "s12", "s12+", "w1", "w2"};
    return kLabels;
}

int OperatorBasis::conjugate_index(int i) {
    static constexpr std::array<int, kDim> kPair = {1, 0, 3, 2, 5, 4, 7, 6, 9, 8, 10, 11};
    return kPair[static_cast<std::size_t>(i)];
}

Eigen::MatrixXcd build_drift(const PhysicalParams& p, const SteadyState& ss) {
    using B = OperatorBasis;
    Eigen::MatrixXcd jac = Eigen::MatrixXcd::Zero(B::kDim, B::kDim);

    // Field rows: damping plus the collective atomic source.
    jac(B::kA1, B::kA1) = -0.5 * p.gamma1;
    jac(B::kA1, B::kS1) = -kI * p.g1;
    jac(B::kA1d, B::kA1d) = -0.5 * p.gamma1;
    jac(B::kA1d, B::kS1d) = kI * p.g1;
    jac(B::kA2, B::kA2) = -0.5 * p.gamma2;
    jac(B::kA2, B::kS2) = -kI * p.g2;
    jac(B::kA2d, B::kA2d) = -0.5 * p.gamma2;
    jac(B::kA2d, B::kS2d) = kI * p.g2;

    const auto means = ss.sigma_means();
    const FieldMeans f = field_means(ss);

    for (int slot = B::kS1; slot <= B::kW2; ++slot) {
        const OperatorDrift d = operator_drift(slot_operator(slot), p);
        Eigen::RowVectorXcd row = Eigen::RowVectorXcd::Zero(B::kDim);
        row[B::kA1] += d.cA1.expectation(means);
        row[B::kA1d] += d.cA1d.expectation(means);
        row[B::kA2] += d.cA2.expectation(means);
        row[B::kA2d] += d.cA2d.expectation(means);
        accumulate_fluctuation(classical_drift_op(d, f), row);
        jac.row(slot) = row;
    }
    return -jac;
}

Eigen::MatrixXcd build_input_coupling(const PhysicalParams& p) {
    using B = OperatorBasis;
    Eigen::MatrixXcd input = Eigen::MatrixXcd::Zero(B::kDim, 4);
    input(B::kA1, 0) = std::sqrt(p.gamma1);
    input(B::kA1d, 1) = std::sqrt(p.gamma1);
    input(B::kA2, 2) = std::sqrt(p.gamma2);
    input(B::kA2d, 3) = std::sqrt(p.gamma2);
    return input;
}

Eigen::MatrixXcd build_diffusion(const PhysicalParams& p, const SteadyState& ss) {
    using B = OperatorBasis;
    const auto means = ss.sigma_means();
    const FieldMeans f = field_means(ss);

    std::array<AtomicOp, B::kDim> ops{};
    std::array<AtomicOp, B::kDim> drifts{};
    for (int slot = B::kS1; slot <= B::kW2; ++slot) {
        ops[static_cast<std::size_t>(slot)] = slot_operator(slot);
        drifts[static_cast<std::size_t>(slot)] =
            classical_drift_op(operator_drift(ops[static_cast<std::size_t>(slot)], p), f);
    }

    Eigen::MatrixXcd diff = Eigen::MatrixXcd::Zero(B::kDim, B::kDim);
    for (int mu = B::kS1; mu <= B::kW2; ++mu) {
        const auto& ymu = ops[static_cast<std::size_t>(mu)];
        const auto& dmu = drifts[static_cast<std::size_t>(mu)];
        for (int nu = B::kS1; nu <= B::kW2; ++nu) {
            const auto& ynu = ops[static_cast<std::size_t>(nu)];
            const auto& dnu = drifts[static_cast<std::size_t>(nu)];
            const AtomicOp pair_drift = classical_drift_op(operator_drift(ymu * ynu, p), f);
            diff(mu, nu) = pair_drift.expectation(means) - (dmu * ynu).expectation(means) -
                           (ymu * dnu).expectation(means);
        }
    }
    return diff;
}

StabilityReport check_stability(const Eigen::MatrixXcd& A, double rate_scale) {
    StabilityReport r;
    Eigen::ComplexEigenSolver<Eigen::MatrixXcd> es(A, /*computeEigenvectors=*/false);
    if (es.info() != Eigen::Success) {
        throw std::runtime_error("stability analysis: eigensolver failed");
    }
    r.eigenvalues = es.eigenvalues();
    r.abscissa = r.eigenvalues.real().minCoeff();
    // The decoupled system keeps one exactly marginal population mode; allow
    // for its roundoff image instead of calling the model unstable.
    r.stable = r.abscissa >= -1e-12 * rate_scale;
    return r;
}

LinearModel build_linear_model(const PhysicalParams& p, const SteadyState& ss) {
    LinearModel m;
    m.params = p;
    m.ss = ss;
    m.A = build_drift(p, ss);
    m.B = build_input_coupling(p);
    m.D = build_diffusion(p, ss);
    const StabilityReport rep = check_stability(m.A, std::max({p.Gamma(), p.gamma1, p.gamma2}));
    m.stable = rep.stable;
    m.abscissa = rep.abscissa;
    return m;
}

LinearModel build_linear_model(const PhysicalParams& p) {
    const SteadyState ss = solve_steady_state(p);
    if (!ss.converged) {
        throw std::runtime_error("steady-state solve did not converge");
    }
    return build_linear_model(p, ss);
}

}  // namespace eitsim
