#pragma once

#include <array>
#include <complex>

#include "eitsim/params.hpp"

namespace eitsim {

/// Complex linear combination over the closed three-level operator basis
/// { 1, sigma_ab = |a><b| : a,b in {0,1,2} }.  Products reduce exactly via
/// sigma_ab * sigma_cd = delta_bc * sigma_ad, so every polynomial in the
/// single-atom operators collapses back onto this ten-element basis.
class AtomicOp {
public:
    static constexpr int kDim = 10;

    AtomicOp() { c_.fill(cplx{0.0, 0.0}); }

    static AtomicOp identity();
    static AtomicOp sigma(int a, int b);

    /// Index helpers: slot 0 is the identity, slot 1 + 3a + b is sigma_ab.
    static constexpr int idx(int a, int b) { return 1 + 3 * a + b; }

    cplx& operator[](int i) { return c_[static_cast<size_t>(i)]; }
    const cplx& operator[](int i) const { return c_[static_cast<size_t>(i)]; }

    /// Coefficient of sigma_ab.
    cplx coeff(int a, int b) const { return c_[static_cast<size_t>(idx(a, b))]; }
    cplx coeff_identity() const { return c_[0]; }

    AtomicOp operator+(const AtomicOp& o) const;
    AtomicOp operator-(const AtomicOp& o) const;
    AtomicOp operator*(const AtomicOp& o) const;  // exact product reduction
    AtomicOp operator*(cplx s) const;
    AtomicOp& operator+=(const AtomicOp& o);

    AtomicOp adjoint() const;

    /// <y> against means of the basis operators (means[0] must be 1).
    cplx expectation(const std::array<cplx, kDim>& means) const;

    double norm1() const;

private:
    std::array<cplx, kDim> c_;
};

inline AtomicOp operator*(cplx s, const AtomicOp& op) { return op * s; }

AtomicOp commutator(const AtomicOp& a, const AtomicOp& b);

/// Heisenberg-picture drift of an atomic operator, organized by field factor:
///   d y/dt = c0 + A1*cA1 + A1^dag*cA1d + A2*cA2 + A2^dag*cA2d + noise.
/// Field operators commute with every atomic operator, so the factor order
/// carries no ambiguity.
struct OperatorDrift {
    AtomicOp c0, cA1, cA1d, cA2, cA2d;
};

/// Drift generated by the rotating-frame Hamiltonian
///   H = -deltaL1*sigma00 - (deltaL1-deltaL2)*sigma22
///       + g1*(sigma01*A1 + A1^dag*sigma10) + g2*(sigma02*A2 + A2^dag*sigma20),
/// spontaneous emission Gamma1 (|0>->|1>), Gamma2 (|0>->|2>), and a
/// phenomenological ground-coherence decay gamma12 acting on sigma12/sigma21
/// only (no population transfer and no extra optical-coherence damping).
OperatorDrift operator_drift(const AtomicOp& y, const PhysicalParams& p);

}  // namespace eitsim
