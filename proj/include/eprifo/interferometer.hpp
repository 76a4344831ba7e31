#pragma once

// Differential-mode response of a signal-recycled Michelson with arm cavities.
// The signal beam sees the single-mode ponderomotive map; the idler, far detuned
// from the carrier, sees the exact sideband reflectivity of the coupled cavities.

#include "eprifo/twophoton.hpp"

#include <cstdint>
#include <optional>
#include <span>
#include <vector>

namespace eprifo {

struct IfoParams {
    double lambda0 = 1064e-9;
    double T_SRM = 0.35;
    double T_ITM = 0.014;
    // Lengths are integer numbers of half wavelengths so carrier resonance is exact.
    std::int64_t arm_half_waves = 7518796992;
    std::int64_t src_half_waves = 93984962;
    double m_mirror = 40.0;
    double I_c = 650e3;
    double delta = 0.0;           // idler detuning, rad/s
    std::int64_t dl_arm_half_waves = 0;  // q
    std::int64_t dl_src_half_waves = 0;  // p
    std::optional<double> phi_c;  // homodyne compensation; computed when unset
    double signal_angle = 0.0;    // offset of the signal LO from the phase quadrature, rad
    double idler_angle = 0.0;     // same for the idler LO

    double half_wave() const { return 0.5 * lambda0; }
    double l_arm0() const { return static_cast<double>(arm_half_waves) * half_wave(); }
    double l_src0() const { return static_cast<double>(src_half_waves) * half_wave(); }
    double l_arm() const { return static_cast<double>(arm_half_waves + dl_arm_half_waves) * half_wave(); }
    double l_src() const { return static_cast<double>(src_half_waves + dl_src_half_waves) * half_wave(); }
    double dl_arm() const { return static_cast<double>(dl_arm_half_waves) * half_wave(); }
    double dl_src() const { return static_cast<double>(dl_src_half_waves) * half_wave(); }
    double omega0() const;

    /// 4 km reference design; detuning and tunings left at zero.
    static IfoParams reference_design();
    bool operator==(const IfoParams&) const = default;
    void validate() const;
};

/// Round trip power losses inside the arm cavities and the SRC.
struct CavityLoss {
    double eps_arm = 0.0;
    double eps_src = 0.0;
    bool none() const { return eps_arm == 0.0 && eps_src == 0.0; }
    bool operator==(const CavityLoss&) const = default;
};

double gamma_itm(const IfoParams& p);
double derived_bandwidth(const IfoParams& p);
double theta_cubed(const IfoParams& p);
double kappa(const IfoParams& p, double omega);
double h_sql(const IfoParams& p, double omega);

struct SignalResponse {
    double beta = 0.0;
    double kappa = 0.0;
    double h_sql = 0.0;
    Mat2c transfer;
    cplx signal_gain;
};

SignalResponse signal_response(const IfoParams& p, double omega);

/// Frequency where K = 1.
double kappa_unity_frequency(const IfoParams& p);

struct SrcMirror {
    cplx rho;
    cplx rho_tilde;
    cplx tau;
    cplx tau_tilde;
};

/// Compound ITM+SRM mirror at idler sideband offset `omega` from the idler carrier.
SrcMirror src_effective_mirror(const IfoParams& p, double omega = 0.0, double eps_src = 0.0);

/// Exact reflectivity seen by the idler sideband at Delta + omega (omega signed).
cplx ifo_reflectivity(const IfoParams& p, double omega, const CavityLoss& loss = {});

/// Arg[tau^2 - rho rho~] - Arg[rho~] at the idler carrier, wrapped to (-pi, pi].
double compensation_phase(const IfoParams& p);
/// The compensation actually applied: p.phi_c if set, else compensation_phase(p).
double applied_compensation(const IfoParams& p);

struct IdlerResponse {
    cplx r_plus;
    cplx r_minus;
    double phi_c = 0.0;
    double phi_rot_achieved = 0.0;  // wrapped to (-pi/4, 3pi/4]
    double alpha = 0.0;
    Mat2c transfer;                 // (b1, b2) -> (B1, B2), compensation applied
    Mat2c noise;                    // vacuum added by cavity losses

    cplx r_ifo() const { return r_plus; }
};

IdlerResponse idler_response(const IfoParams& p, double omega, const CavityLoss& loss = {});
/// Overload reusing a precomputed compensation phase.
IdlerResponse idler_response(const IfoParams& p, double omega, double phi_c, const CavityLoss& loss);

double required_rotation(const IfoParams& p, double omega);

/// Quadrature transfer of a pure rotation by phi with no propagation phase.
Mat2c rotation_transfer(double phi);

/// Sideband-diagonal map to quadratures, (b+, b-^dagger) -> (b1, b2).
const Mat2c& sideband_to_quadrature();

/// Achieved rotation over an increasing grid, unwrapped from the low end.
std::vector<double> rotation_angle_profile(const IfoParams& p, std::span<const double> omegas,
                                           const CavityLoss& loss = {});

/// Rotation of an ideal single detuned cavity with bandwidth gamma_f and detuning delta_f.
double broadband_rotation(double gamma_f, double delta_f, double omega);

void unwrap_pi(std::vector<double>& phi);

}  // namespace eprifo
