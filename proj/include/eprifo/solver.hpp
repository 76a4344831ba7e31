#pragma once

// Integer design search: pick the idler detuning and half-wave length tunings so
// the interferometer acts on the idler as a filter cavity with the bandwidth and
// detuning that rotate its quadrature by arctan K.

#include "eprifo/interferometer.hpp"

#include <cstdint>
#include <vector>

namespace eprifo {

struct SolverTarget {
    double gamma_f = 0.0;  // rad/s
    double delta_f = 0.0;  // rad/s, signed
    bool weak_coupling = true;  // Theta << gamma, where the target formula holds
};

struct SolverConfig {
    int n_min = 0;
    int n_max = 10;
    int sign = -1;                 // sign of the idler detuning
    double offset_step_hz = 1e3;   // detuning offsets are integer multiples of this
    int k_window = 60;             // offsets scanned either side of the continuous seed
    std::int64_t p_max = 1000;
    std::int64_t q_max = 100000;
    double residual_tol = 1e-3;    // rad
    int refine_candidates = 8;
    double tie_tol = 1e-4;         // rad, on max_angle_err_50_300
    double band_lo_hz = 50.0;
    double band_hi_hz = 300.0;
    std::size_t grid_points = 400; // 10 Hz to 10 kHz, log spaced

    void validate() const;
    bool operator==(const SolverConfig&) const = default;
};

struct DetuningCandidate {
    int n = 0;
    int branch = 0;     // +1 or -1: sign of the arccos root
    double delta = 0.0; // rad/s
    double offset_hz = 0.0;  // |delta|/2pi - n FSR
};

struct SolverSolution {
    int n = 0;
    std::int64_t p = 0;           // SRC tuning, half waves
    std::int64_t q = 0;           // arm tuning, half waves
    double offset_hz = 0.0;
    double delta = 0.0;           // rad/s
    double dl_arm = 0.0;          // m
    double dl_src = 0.0;          // m
    double phi_c = 0.0;
    double achieved_gamma_f = 0.0;
    double achieved_delta_f = 0.0;
    double resonance_residual = 0.0;
    double max_angle_err_50_300 = 0.0;
    double max_angle_err_full = 0.0;
    double fsr_src_hz = 0.0;
    SolverTarget target;
    std::vector<double> freqs_hz;
    std::vector<double> angle_error;  // achieved minus required, rad

    double p_wavelengths() const { return 0.5 * static_cast<double>(p); }
    double q_wavelengths() const { return 0.5 * static_cast<double>(q); }
    /// Copy of `base` with the solution's detuning, tunings and compensation applied.
    IfoParams apply(const IfoParams& base) const;
};

SolverTarget target_filter_params(const IfoParams& p);

/// Compound-mirror bandwidth for SRC one-way phase phi_src (resonant extraction at phi = 0).
double bandwidth_from_phi(const IfoParams& p, double phi_src);
/// Inverse on [0, pi/2]; throws UnreachableBandwidth.
double phi_from_bandwidth(const IfoParams& p, double gamma_f);

double fsr_src_hz(const IfoParams& p);

/// Exact bandwidth of the idler resonance, from |rho~| at the idler carrier.
double achieved_bandwidth(const IfoParams& p);
/// Mod_2pi[2 (delta_f + Delta) L_arm / c + Arg rho~], wrapped to (-pi, pi].
double resonance_residual(const IfoParams& p, double delta_f);

std::vector<DetuningCandidate> solve_detuning(const IfoParams& p, const SolverTarget& target,
                                              const SolverConfig& cfg = {});

SolverSolution solve_lengths(const IfoParams& p, const SolverTarget& target,
                             const std::vector<DetuningCandidate>& candidates, const SolverConfig& cfg = {});

SolverSolution solve(const IfoParams& p, const SolverConfig& cfg = {});

/// Rotation error profile of a fully specified configuration on the solver grid.
struct AngleErrorSummary {
    double max_band = 0.0;
    double max_full = 0.0;
    std::vector<double> freqs_hz;
    std::vector<double> error;
};
AngleErrorSummary angle_error_profile(const IfoParams& p, const SolverConfig& cfg = {}, int rotation_sign = 1);

}  // namespace eprifo
