#pragma once

#include <Eigen/Dense>
#include <array>
#include <limits>
#include <optional>
#include <vector>

#include "eitsim/algebra.hpp"
#include "eitsim/params.hpp"

namespace eitsim {

/// Mean-field state, components ordered (alpha1, alpha2, s1, s2, s12, p0, p1, p2).
/// s1 = <S1->, s2 = <S2->, s12 = <S12> with S12 = |2><1|; p are populations.
using StateVec8 = Eigen::Vector<cplx, 8>;

/// Fluctuation-frame slots, ordered like the operator basis of the linearized
/// model: (a1, a1+, a2, a2+, s1, s1+, s2, s2+, s12, s12+, w1, w2).  The
/// daggered slots are independent variables here, not forced conjugates.
using StateVec12 = Eigen::Vector<cplx, 12>;

/// Semiclassical working point.
struct SteadyState {
    cplx alpha1{0.0, 0.0}, alpha2{0.0, 0.0};
    cplx s1{0.0, 0.0}, s2{0.0, 0.0}, s12{0.0, 0.0};
    double p0 = 0.0, p1 = 0.0, p2 = 0.0;
    double residual = std::numeric_limits<double>::infinity();
    bool converged = false;

    double w1() const { return p0 - p1; }
    double w2() const { return p0 - p2; }

    /// Basis-operator means for AtomicOp::expectation (slot 0 is 1).
    std::array<cplx, AtomicOp::kDim> sigma_means() const;

    /// Population closure, box bounds and the ground-coherence
    /// Cauchy-Schwarz bound |s12|^2 <= p1*p2.  Throws std::logic_error.
    void require_physical(double closure_tol = 1e-10, double cs_slack = 1e-9) const;
};

StateVec8 pack(const SteadyState& ss);
SteadyState unpack(const StateVec8& v);

/// Physical embedding of a steady state into the 12-slot fluctuation frame
/// (daggered slots filled with conjugates, w from populations).
StateVec12 embed(const SteadyState& ss);

/// Nonlinear mean-field drift of the 8 physical variables.  Population rows
/// conserve p0+p1+p2 identically.  Throws std::runtime_error("numerical
/// blowup...") on non-finite input.
StateVec8 semiclassical_drift(const PhysicalParams& p, const StateVec8& x);

/// Mean-field drift over the 12 fluctuation-frame slots treated as
/// independent complex variables (populations eliminated through closure).
/// Restricted to the physical embedding it reproduces semiclassical_drift;
/// its Jacobian at a steady state is minus the linearized drift matrix.
StateVec12 extended_drift(const PhysicalParams& p, const StateVec12& x);

/// Max-norm of the semiclassical drift plus the closure defect.
double drift_norm(const PhysicalParams& p, const SteadyState& ss);

struct NewtonOptions {
    int max_iterations = 200;
    int max_halvings = 30;
    double tol_factor = 1e-10;  ///< residual <= tol_factor*max(Gamma,gamma1,gamma2)*scale
    int ramp_steps = 8;         ///< drive-ramp stages used when no guess is given
};

/// Damped Newton on semiclassical_drift = 0 over 13 real unknowns (real and
/// imaginary parts independent, one population row replaced by the closure
/// constraint).  Without a guess the solve is continued in drive amplitude
/// from the undriven solution.  Non-convergence is reported through the
/// returned flags, not by throwing.
SteadyState solve_steady_state(const PhysicalParams& p,
                               std::optional<SteadyState> guess = std::nullopt,
                               const NewtonOptions& opt = {});

struct BranchSample {
    double drive = 0.0;        ///< common input-amplitude scale at this sample
    SteadyState state;
    double jac_sigma_min = 0.0;  ///< smallest singular value of the state Jacobian
    bool turning_point = false;
};

struct BistabilityBranch {
    std::vector<BranchSample> samples;      ///< ordered by arclength
    std::vector<std::size_t> turning_indices;
};

/// Pseudo-arclength continuation of the steady-state branch in the common
/// drive scale d: alpha_j_in = d * u_j with u the base-parameter drive
/// direction (equal scaling on both inputs).  Turning points are located by
/// tangent reversal and refined; the fold samples carry a small
/// jac_sigma_min.  Throws std::runtime_error("branch lost...") if the
/// corrector cannot proceed.
BistabilityBranch continuation_sweep(const PhysicalParams& base, double drive_min,
                                     double drive_max, int n_points);

}  // namespace eitsim
