#include "eitsim/algebra.hpp"

#include <cmath>

namespace eitsim {

namespace {
constexpr cplx kI{0.0, 1.0};
}

AtomicOp AtomicOp::identity() {
    AtomicOp op;
    op.c_[0] = 1.0;
    return op;
}

AtomicOp AtomicOp::sigma(int a, int b) {
    AtomicOp op;
    op.c_[static_cast<size_t>(idx(a, b))] = 1.0;
    return op;
}

AtomicOp AtomicOp::operator+(const AtomicOp& o) const {
    AtomicOp r;
    for (size_t i = 0; i < c_.size(); ++i) r.c_[i] = c_[i] + o.c_[i];
    return r;
}

AtomicOp AtomicOp::operator-(const AtomicOp& o) const {
    AtomicOp r;
    for (size_t i = 0; i < c_.size(); ++i) r.c_[i] = c_[i] - o.c_[i];
    return r;
}

AtomicOp& AtomicOp::operator+=(const AtomicOp& o) {
    for (size_t i = 0; i < c_.size(); ++i) c_[i] += o.c_[i];
    return *this;
}

AtomicOp AtomicOp::operator*(cplx s) const {
    AtomicOp r;
    for (size_t i = 0; i < c_.size(); ++i) r.c_[i] = c_[i] * s;
    return r;
}

AtomicOp AtomicOp::operator*(const AtomicOp& o) const {
    AtomicOp r;
    r.c_[0] = c_[0] * o.c_[0];
    // identity times sigma terms
    for (int a = 0; a < 3; ++a)
        for (int b = 0; b < 3; ++b) {
            const auto k = static_cast<size_t>(idx(a, b));
            r.c_[k] += c_[0] * o.c_[k] + c_[k] * o.c_[0];
        }
    // sigma_ab * sigma_cd = delta_bc * sigma_ad
    for (int a = 0; a < 3; ++a)
        for (int b = 0; b < 3; ++b) {
            const cplx left = c_[static_cast<size_t>(idx(a, b))];
            if (left == cplx{0.0, 0.0}) continue;
            for (int d = 0; d < 3; ++d) {
                const cplx right = o.c_[static_cast<size_t>(idx(b, d))];
                if (right == cplx{0.0, 0.0}) continue;
                r.c_[static_cast<size_t>(idx(a, d))] += left * right;
            }
        }
    return r;
}

AtomicOp AtomicOp::adjoint() const {
    AtomicOp r;
    r.c_[0] = std::conj(c_[0]);
    for (int a = 0; a < 3; ++a)
        for (int b = 0; b < 3; ++b)
            r.c_[static_cast<size_t>(idx(b, a))] =
                std::conj(c_[static_cast<size_t>(idx(a, b))]);
    return r;
}

cplx AtomicOp::expectation(const std::array<cplx, kDim>& means) const {
    cplx v{0.0, 0.0};
    for (size_t i = 0; i < means.size(); ++i) v += c_[i] * means[i];
    return v;
}

double AtomicOp::norm1() const {
    double n = 0.0;
    for (const auto& v : c_) n += std::abs(v);
    return n;
}

AtomicOp commutator(const AtomicOp& a, const AtomicOp& b) {
    return a * b - b * a;
}

OperatorDrift operator_drift(const AtomicOp& y, const PhysicalParams& p) {
    using Op = AtomicOp;
    const Op s00 = Op::sigma(0, 0);
    const Op s01 = Op::sigma(0, 1);
    const Op s10 = Op::sigma(1, 0);
    const Op s02 = Op::sigma(0, 2);
    const Op s20 = Op::sigma(2, 0);
    const Op s12 = Op::sigma(1, 2);
    const Op s21 = Op::sigma(2, 1);

    const Op h_at = s00 * cplx(-p.deltaL1) +
                    Op::sigma(2, 2) * cplx(-(p.deltaL1 - p.deltaL2));

    OperatorDrift d;
    d.c0 = kI * commutator(h_at, y);
    // radiative decay of |0> into the two ground states
    d.c0 += s01 * y * s10 * cplx(p.Gamma1) + s02 * y * s20 * cplx(p.Gamma2) -
            (s00 * y + y * s00) * cplx(0.5 * p.Gamma());
    // ground-coherence relaxation, sigma12/sigma21 components only
    d.c0 += s12 * (-p.gamma12 * y.coeff(1, 2)) + s21 * (-p.gamma12 * y.coeff(2, 1));

    d.cA1 = kI * cplx(p.g1) * commutator(s01, y);
    d.cA1d = kI * cplx(p.g1) * commutator(s10, y);
    d.cA2 = kI * cplx(p.g2) * commutator(s02, y);
    d.cA2d = kI * cplx(p.g2) * commutator(s20, y);
    return d;
}

}  // namespace eitsim
