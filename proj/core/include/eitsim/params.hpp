#pragma once

#include <complex>

namespace eitsim {

using cplx = std::complex<double>;

inline constexpr double kTwoPi = 6.283185307179586476925286766559;

/// Physical parameters of the two-field / three-level lambda medium.
///
/// Level scheme: |0> excited, |1> and |2> ground.  Field 1 drives |1>-|0>,
/// field 2 drives |2>-|0>.  All rates and frequencies are angular (rad/s).
/// The couplings g1, g2 are collective (the sqrt(N) enhancement is already
/// folded in); N_atoms is carried as metadata only.
struct PhysicalParams {
    double Gamma1 = 0.0;   ///< spontaneous emission |0> -> |1>
    double Gamma2 = 0.0;   ///< spontaneous emission |0> -> |2>
    double gamma12 = 0.0;  ///< ground-state coherence decay
    double gamma1 = 0.0;   ///< source-mode damping, field 1
    double gamma2 = 0.0;   ///< source-mode damping, field 2
    double g1 = 0.0;       ///< collective atom-field coupling, field 1
    double g2 = 0.0;       ///< collective atom-field coupling, field 2
    double deltaL1 = 0.0;  ///< laser detuning from |1>-|0>, w_L1 - w_01
    double deltaL2 = 0.0;  ///< laser detuning from |2>-|0>, w_L2 - w_02
    cplx alpha1_in{0.0, 0.0};  ///< coherent input amplitude, field 1
    cplx alpha2_in{0.0, 0.0};  ///< coherent input amplitude, field 2
    double N_atoms = 1e8;      ///< ensemble size (metadata, not used in dynamics)
    double Omega_analysis = 0.0;  ///< default analysis sideband frequency

    /// Total excited-state decay rate.
    double Gamma() const { return Gamma1 + Gamma2; }

    /// Throws std::invalid_argument on non-finite or inconsistent values.
    /// Required: gamma1, gamma2 > 0; Gamma1, Gamma2 >= 0 with Gamma1+Gamma2 > 0;
    /// gamma12 >= 0; g1, g2 >= 0.
    void validate() const;

    /// Rb87-D1-like symmetric defaults: Gamma = 2pi*6 MHz split evenly,
    /// gamma_j = 2pi*1 MHz, gamma12 = 1e-3*Gamma, resonant lasers,
    /// equal drives mapped from 2.8 mW/cm^2, analysis frequency Gamma/6.
    static PhysicalParams lambda_defaults();
};

/// Resonant Rabi frequency for a beam of intensity I (mW/cm^2) against
/// saturation intensity Isat (mW/cm^2): Omega_R = Gamma*sqrt(I/(2*Isat)).
double rabi_from_intensity(double intensity_mw_cm2, double gamma_total,
                           double isat_mw_cm2 = 1.67);

/// Input amplitude such that the *decoupled* steady field amplitude
/// alpha = 2*alpha_in/sqrt(gamma) satisfies g*alpha = Omega_R/2.
double drive_for_rabi(double omega_rabi, double g, double gamma);

}  // namespace eitsim
