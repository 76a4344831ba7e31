#pragma once

// Conditional strain spectra: propagate the EPR pair through both channels,
// read phase quadratures and subtract the Wiener-filtered idler from the signal.

#include "eprifo/imperfections.hpp"
#include "eprifo/interferometer.hpp"
#include "eprifo/sweep.hpp"
#include "eprifo/twophoton.hpp"

#include <span>
#include <vector>

namespace eprifo {

struct FrequencyGrid {
    double f_min_hz = 10.0;
    double f_max_hz = 10e3;
    std::size_t n_points = 400;
    bool log_spaced = true;

    void validate() const;
    std::vector<double> frequencies_hz() const;
    std::vector<double> omegas() const;
    bool operator==(const FrequencyGrid&) const = default;
};

struct StrainSpectrum {
    std::vector<double> omegas;
    std::vector<double> s_hh;
    std::vector<double> s_hh_ref;        // r = 0, same interferometer and losses
    std::vector<double> improvement_db;

    std::size_t size() const { return omegas.size(); }
};

enum class RotationMode { exact, ideal };

struct PipelineOptions {
    RotationMode rotation = RotationMode::exact;
    double rotation_error = 0.0;  // added to the idler rotation, rad
    LossBudget losses{};
    PhaseJitter jitter{};
    Exec exec = Exec::parallel;
    bool operator==(const PipelineOptions&) const = default;
};

/// Output of both channels at one frequency, after readout loss.
struct ChannelPair {
    JointSpectral4 out;           // over (A1, A2, B1, B2)
    double gain2 = 0.0;           // |response of the signal readout to h|^2, 1/strain^2
    double kappa = 0.0;
    double h_sql = 0.0;
    Eigen::Vector4cd signal_w;    // nominal signal readout
    Eigen::Vector4cd idler_w;     // nominal idler readout
    Eigen::Vector4cd signal_w_perp;
    Eigen::Vector4cd idler_w_perp;
};

ChannelPair channel_pair(const IfoParams& p, const EprSource& src, double omega, const PipelineOptions& opt,
                         double phi_c);

struct ConditionalPoint {
    double s_aa = 0.0;    // signal variance before conditioning
    double s_bb = 0.0;
    cplx s_ab;
    cplx g_opt;
    double s_cond = 0.0;
    double s_hh = 0.0;
};

/// Jitter-averaged moments and the resulting conditional strain PSD at one frequency.
ConditionalPoint conditional_point(const ChannelPair& cp, const PhaseJitter& pj);

double conditional_strain(const IfoParams& p, const EprSource& src, double omega, const PipelineOptions& opt,
                          double phi_c);

StrainSpectrum conditional_strain_spectrum(const IfoParams& p, const EprSource& src,
                                           std::span<const double> omegas, const PipelineOptions& opt = {});

/// Closed form with ideal rotation and no losses.
double ideal_conditional_strain(const IfoParams& p, double r, double omega);
double unsqueezed_strain(const IfoParams& p, double omega);

/// Frequency-independent squeezing at angle zeta on the signal port alone.
double fixed_angle_strain(const IfoParams& p, double r, double zeta, double omega, const LossBudget& lb = {});
StrainSpectrum fixed_angle_spectrum(const IfoParams& p, double r, double zeta, std::span<const double> omegas,
                                    const LossBudget& lb = {});
/// Squeezing rotated to pi/2 + arctan K at every frequency.
double frequency_dependent_strain(const IfoParams& p, double r, double omega, const LossBudget& lb = {});

/// Quadratic model of a rotation error delta_phi.
double rotation_error_penalty(double h2, double k, double r, double delta_phi);
StrainSpectrum rotation_error_penalty(const IfoParams& p, const EprSource& src, double delta_phi,
                                      std::span<const double> omegas);

/// Closed-form jitter spectrum with ideal rotation.
StrainSpectrum phase_jitter_spectrum(const IfoParams& p, const EprSource& src, const PhaseJitter& pj,
                                     std::span<const double> omegas);

/// Seeded Monte-Carlo estimate of the jittered conditional variance at one frequency.
/// The filter gain is fixed to the jitter-averaged optimum; each draw samples both LO phases.
MonteCarloEstimate phase_jitter_monte_carlo(const ChannelPair& cp, const PhaseJitter& pj, std::uint64_t draws,
                                            std::uint64_t seed);

}  // namespace eprifo
