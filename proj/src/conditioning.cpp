#include "eprifo/conditioning.hpp"

#include "eprifo/constants.hpp"
#include "eprifo/errors.hpp"

#include <cmath>
#include <random>

namespace eprifo {

void FrequencyGrid::validate() const
{
    if (n_points < 2) throw Error("grid: n_points must be >= 2");
    if (!(f_min_hz > 0.0)) throw Error("grid: f_min_hz must be > 0");
    if (!(f_max_hz > f_min_hz)) throw Error("grid: f_min_hz must be < f_max_hz");
}

std::vector<double> FrequencyGrid::frequencies_hz() const
{
    validate();
    std::vector<double> f(n_points);
    const double last = static_cast<double>(n_points - 1);
    for (std::size_t i = 0; i < n_points; ++i) {
        const double t = static_cast<double>(i) / last;
        f[i] = log_spaced ? f_min_hz * std::pow(f_max_hz / f_min_hz, t) : f_min_hz + (f_max_hz - f_min_hz) * t;
    }
    f.back() = f_max_hz;
    return f;
}

std::vector<double> FrequencyGrid::omegas() const
{
    auto f = frequencies_hz();
    for (double& x : f) x *= phys::two_pi;
    return f;
}

ChannelPair channel_pair(const IfoParams& p, const EprSource& src, double omega, const PipelineOptions& opt,
                         double phi_c)
{
    const LossBudget& lb = opt.losses;
    JointSpectral4 s = epr_joint_spectrum(src);
    s = apply_io_loss(s, lb.eps_in);
    s = apply_signal_loss(s, effective_signal_loss(p, lb));

    const SignalResponse sr = signal_response(p, omega);
    Mat4c t = Mat4c::Zero();
    Mat4c n = Mat4c::Zero();
    t.block<2, 2>(0, 0) = sr.transfer;
    double idler_zeta = 0.5 * phys::pi + p.idler_angle;
    if (opt.rotation == RotationMode::ideal) {
        t.block<2, 2>(2, 2) = rotation_transfer(std::atan(sr.kappa) + opt.rotation_error);
    } else {
        const IdlerResponse ir = idler_response(p, omega, phi_c, lb.cavity());
        t.block<2, 2>(2, 2) = ir.transfer;
        n.block<2, 2>(2, 2) = ir.noise;
        // Reading the idler at pi/2 - d shifts the effective rotation by +d.
        idler_zeta -= opt.rotation_error;
    }
    s = propagate(s, t, n);
    s = apply_io_loss(s, lb.eps_read);

    const double signal_zeta = 0.5 * phys::pi + p.signal_angle;
    ChannelPair cp;
    cp.out = s;
    cp.kappa = sr.kappa;
    cp.h_sql = sr.h_sql;
    cp.gain2 = std::norm(sr.signal_gain) * (1.0 - lb.eps_read) * std::pow(std::cos(p.signal_angle), 2);
    cp.signal_w = signal_readout(signal_zeta);
    cp.signal_w_perp = signal_readout(signal_zeta + 0.5 * phys::pi);
    cp.idler_w = idler_readout(idler_zeta);
    cp.idler_w_perp = idler_readout(idler_zeta + 0.5 * phys::pi);
    return cp;
}

ConditionalPoint conditional_point(const ChannelPair& cp, const PhaseJitter& pj)
{
    ConditionalPoint out;
    const JointSpectral4& s = cp.out;
    if (pj.none()) {
        out.s_aa = s.variance(cp.signal_w);
        out.s_bb = s.variance(cp.idler_w);
        out.s_ab = s.cross(cp.signal_w, cp.idler_w);
    } else {
        out.s_aa = jitter_mean_cos2(pj.xi_vs) * s.variance(cp.signal_w) +
                   jitter_mean_sin2(pj.xi_vs) * s.variance(cp.signal_w_perp);
        out.s_bb = jitter_mean_cos2(pj.xi_vi) * s.variance(cp.idler_w) +
                   jitter_mean_sin2(pj.xi_vi) * s.variance(cp.idler_w_perp);
        out.s_ab = jitter_mean_cos(pj.xi_vs) * jitter_mean_cos(pj.xi_vi) * s.cross(cp.signal_w, cp.idler_w);
    }
    if (!(out.s_bb >= 1e-15)) throw DegenerateIdler("idler quadrature variance below 1e-15");
    out.g_opt = out.s_ab / out.s_bb;
    out.s_cond = out.s_aa - std::norm(out.s_ab) / out.s_bb;
    out.s_hh = out.s_cond / cp.gain2;
    return out;
}

double conditional_strain(const IfoParams& p, const EprSource& src, double omega, const PipelineOptions& opt,
                          double phi_c)
{
    return conditional_point(channel_pair(p, src, omega, opt, phi_c), opt.jitter).s_hh;
}

StrainSpectrum conditional_strain_spectrum(const IfoParams& p, const EprSource& src,
                                           std::span<const double> omegas, const PipelineOptions& opt)
{
    const double phc = applied_compensation(p);
    const EprSource vac(0.0, src.delta, src.theta);
    struct Pair {
        double s = 0.0, ref = 0.0;
    };
    const auto pts = map_grid(
        omegas,
        [&](double w) {
            return Pair{conditional_strain(p, src, w, opt, phc), conditional_strain(p, vac, w, opt, phc)};
        },
        opt.exec);
    StrainSpectrum out;
    out.omegas.assign(omegas.begin(), omegas.end());
    for (const Pair& x : pts) {
        out.s_hh.push_back(x.s);
        out.s_hh_ref.push_back(x.ref);
        out.improvement_db.push_back(10.0 * std::log10(x.ref / x.s));
    }
    return out;
}

double ideal_conditional_strain(const IfoParams& p, double r, double omega)
{
    const double k = kappa(p, omega);
    return std::pow(h_sql(p, omega), 2) / (2.0 * std::cosh(2.0 * r)) * (k + 1.0 / k);
}

double unsqueezed_strain(const IfoParams& p, double omega) { return ideal_conditional_strain(p, 0.0, omega); }

double fixed_angle_strain(const IfoParams& p, double r, double zeta, double omega, const LossBudget& lb)
{
    const SignalResponse sr = signal_response(p, omega);
    const Eigen::Matrix2d rot = rotation(zeta);
    const Eigen::Matrix2d d = Eigen::Vector2d(std::exp(-2.0 * r), std::exp(2.0 * r)).asDiagonal();
    Mat2c s = (rot.transpose() * d * rot).cast<cplx>();
    const double eps_in = 1.0 - (1.0 - lb.eps_in) * (1.0 - effective_signal_loss(p, lb));
    s = (1.0 - eps_in) * s + eps_in * Mat2c::Identity();
    s = sr.transfer * s * sr.transfer.adjoint();
    s = (1.0 - lb.eps_read) * s + lb.eps_read * Mat2c::Identity();
    return s(1, 1).real() / (std::norm(sr.signal_gain) * (1.0 - lb.eps_read));
}

StrainSpectrum fixed_angle_spectrum(const IfoParams& p, double r, double zeta, std::span<const double> omegas,
                                    const LossBudget& lb)
{
    StrainSpectrum out;
    out.omegas.assign(omegas.begin(), omegas.end());
    for (double w : omegas) {
        const double s = fixed_angle_strain(p, r, zeta, w, lb);
        const double ref = fixed_angle_strain(p, 0.0, zeta, w, lb);
        out.s_hh.push_back(s);
        out.s_hh_ref.push_back(ref);
        out.improvement_db.push_back(10.0 * std::log10(ref / s));
    }
    return out;
}

double frequency_dependent_strain(const IfoParams& p, double r, double omega, const LossBudget& lb)
{
    return fixed_angle_strain(p, r, 0.5 * phys::pi + std::atan(kappa(p, omega)), omega, lb);
}

double rotation_error_penalty(double h2, double k, double r, double delta_phi)
{
    const double c = std::cosh(2.0 * r);
    const double s = std::sinh(2.0 * r);
    const double base = h2 / (2.0 * c) * (k + 1.0 / k);
    return base + 0.5 * h2 * s * s / c * (k + 1.0 / k) * delta_phi * delta_phi;
}

StrainSpectrum rotation_error_penalty(const IfoParams& p, const EprSource& src, double delta_phi,
                                      std::span<const double> omegas)
{
    StrainSpectrum out;
    out.omegas.assign(omegas.begin(), omegas.end());
    for (double w : omegas) {
        const double h2 = std::pow(h_sql(p, w), 2);
        const double k = kappa(p, w);
        const double s = rotation_error_penalty(h2, k, src.r, delta_phi);
        const double ref = unsqueezed_strain(p, w);
        out.s_hh.push_back(s);
        out.s_hh_ref.push_back(ref);
        out.improvement_db.push_back(10.0 * std::log10(ref / s));
    }
    return out;
}

StrainSpectrum phase_jitter_spectrum(const IfoParams& p, const EprSource& src, const PhaseJitter& pj,
                                     std::span<const double> omegas)
{
    StrainSpectrum out;
    out.omegas.assign(omegas.begin(), omegas.end());
    for (double w : omegas) {
        const double h2 = std::pow(h_sql(p, w), 2);
        const double k = kappa(p, w);
        const double s = phase_jitter_closed_form(h2, k, src.r, pj);
        const double ref = unsqueezed_strain(p, w);
        out.s_hh.push_back(s);
        out.s_hh_ref.push_back(ref);
        out.improvement_db.push_back(10.0 * std::log10(ref / s));
    }
    return out;
}

MonteCarloEstimate phase_jitter_monte_carlo(const ChannelPair& cp, const PhaseJitter& pj, std::uint64_t draws,
                                            std::uint64_t seed)
{
    if (draws < 2) throw Error("phase_jitter_monte_carlo: need at least 2 draws");
    const ConditionalPoint avg = conditional_point(cp, pj);
    const cplx g = avg.g_opt;

    // Second moments of the four readout quadratures; each draw only mixes these.
    const JointSpectral4& s = cp.out;
    const double vaa = s.variance(cp.signal_w), vpp = s.variance(cp.signal_w_perp);
    const double vbb = s.variance(cp.idler_w), vqq = s.variance(cp.idler_w_perp);
    const double cap = s.cross(cp.signal_w, cp.signal_w_perp).real();
    const double cbq = s.cross(cp.idler_w, cp.idler_w_perp).real();
    const cplx xab = s.cross(cp.signal_w, cp.idler_w);
    const cplx xaq = s.cross(cp.signal_w, cp.idler_w_perp);
    const cplx xpb = s.cross(cp.signal_w_perp, cp.idler_w);
    const cplx xpq = s.cross(cp.signal_w_perp, cp.idler_w_perp);

    std::mt19937_64 rng(seed);
    std::normal_distribution<double> ns(0.0, pj.xi_vs);
    std::normal_distribution<double> ni(0.0, pj.xi_vi);
    double mean = 0.0, m2 = 0.0;
    for (std::uint64_t k = 0; k < draws; ++k) {
        const double xs = pj.xi_vs > 0.0 ? ns(rng) : 0.0;
        const double xi = pj.xi_vi > 0.0 ? ni(rng) : 0.0;
        const double cs = std::cos(xs), ss = std::sin(xs);
        const double ci = std::cos(xi), si = std::sin(xi);
        const double va = cs * cs * vaa + ss * ss * vpp + 2.0 * cs * ss * cap;
        const double vb = ci * ci * vbb + si * si * vqq + 2.0 * ci * si * cbq;
        const cplx x = cs * ci * xab + cs * si * xaq + ss * ci * xpb + ss * si * xpq;
        const double v = va - 2.0 * (std::conj(g) * x).real() + std::norm(g) * vb;
        const double d = v - mean;
        mean += d / static_cast<double>(k + 1);
        m2 += d * (v - mean);
    }
    const double n = static_cast<double>(draws);
    return {mean, std::sqrt(m2 / (n - 1.0) / n), draws, seed};
}

}  // namespace eprifo
