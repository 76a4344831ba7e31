#pragma once

// Loss ports and local-oscillator phase noise. Exact maps act on joint spectra;
// the first-order and closed-form expressions are kept alongside for comparison.

#include "eprifo/interferometer.hpp"
#include "eprifo/twophoton.hpp"

#include <cstdint>
#include <span>
#include <vector>

namespace eprifo {

struct LossBudget {
    double eps_arm = 0.0;   // arm round trip, power
    double eps_src = 0.0;   // SRC round trip, power
    double eps_in = 0.0;    // between source and interferometer
    double eps_read = 0.0;  // between interferometer and homodyne

    CavityLoss cavity() const { return {eps_arm, eps_src}; }
    bool operator==(const LossBudget&) const = default;
    void validate() const;
};

struct PhaseJitter {
    double xi_vs = 0.0;  // rms LO phase, signal, rad
    double xi_vi = 0.0;  // rms LO phase, idler, rad

    bool none() const { return xi_vs == 0.0 && xi_vi == 0.0; }
    bool operator==(const PhaseJitter&) const = default;
    void validate() const;
    /// True when either rms exceeds 0.1 rad, where the small-angle forms degrade.
    bool large() const { return xi_vs > 0.1 || xi_vi > 0.1; }
};

enum class LossStage { input, readout };

/// x -> sqrt(1-eps) x + sqrt(eps) n on both beams: S -> (1-eps) S + eps I.
JointSpectral4 apply_io_loss(const JointSpectral4& s, double eps);
JointSpectral4 apply_io_losses(const JointSpectral4& s, const LossBudget& lb, LossStage stage);

/// Same map restricted to the signal beam. Cross spectra scale by sqrt(1-eps).
JointSpectral4 apply_signal_loss(const JointSpectral4& s, double eps);

/// Input-referred signal-channel loss equivalent to the arm and SRC round trip losses.
double effective_signal_loss(const IfoParams& p, const LossBudget& lb);

struct CavityLossNoise {
    SpectralMatrix signal_noise;   // added to (A1, A2)
    double signal_strain = 0.0;    // A2 part referred to strain, 1/Hz
    double idler_noise = 0.0;      // added to B2
};

CavityLossNoise cavity_loss_noise(const IfoParams& p, const LossBudget& lb, double omega);

// First-order loss corrections to S_hh. `c` is cosh 2r throughout.
double delta_s_input_cond(double h2, double k, double r, double eps_in);
double delta_s_read_cond(double h2, double k, double r, double eps_r);
double delta_s_cond_large_r(double h2, double k, double eps);
double delta_s_traditional(double h2, double k, double eps_in, double eps_r);
double delta_s_traditional_equal(double h2, double k, double eps);

std::vector<double> first_order_loss_correction(const IfoParams& p, const EprSource& src, const LossBudget& lb,
                                                std::span<const double> omegas);

// Gaussian averages over a zero-mean phase of rms xi.
double jitter_mean_sin2(double xi);
double jitter_mean_cos2(double xi);
double jitter_mean_cos(double xi);

/// Closed-form jittered S_hh with ideal rotation.
double phase_jitter_closed_form(double h2, double k, double r, const PhaseJitter& pj);

struct MonteCarloEstimate {
    double mean = 0.0;
    double std_error = 0.0;
    std::uint64_t draws = 0;
    std::uint64_t seed = 0;
};

}  // namespace eprifo
