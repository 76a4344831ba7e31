#include "eprifo/imperfections.hpp"

#include "eprifo/constants.hpp"
#include "eprifo/errors.hpp"

#include <cmath>

namespace eprifo {

namespace {

void check_loss(double v, const char* name)
{
    if (!(v >= 0.0 && v < 0.5)) throw Error(std::string("LossBudget: ") + name + " must lie in [0, 0.5)");
}

}  // namespace

void LossBudget::validate() const
{
    check_loss(eps_arm, "eps_arm");
    check_loss(eps_src, "eps_src");
    check_loss(eps_in, "eps_in");
    check_loss(eps_read, "eps_read");
}

void PhaseJitter::validate() const
{
    if (!(xi_vs >= 0.0) || !(xi_vi >= 0.0)) throw Error("PhaseJitter: rms phases must be >= 0");
}

JointSpectral4 apply_io_loss(const JointSpectral4& s, double eps)
{
    if (eps == 0.0) return s;
    return JointSpectral4((1.0 - eps) * s.matrix() + eps * Mat4c::Identity());
}

JointSpectral4 apply_io_losses(const JointSpectral4& s, const LossBudget& lb, LossStage stage)
{
    return apply_io_loss(s, stage == LossStage::input ? lb.eps_in : lb.eps_read);
}

JointSpectral4 apply_signal_loss(const JointSpectral4& s, double eps)
{
    if (eps == 0.0) return s;
    Mat4c m = s.matrix();
    const double t = std::sqrt(1.0 - eps);
    m.block<2, 2>(0, 0) = (1.0 - eps) * m.block<2, 2>(0, 0) + eps * Mat2c::Identity();
    m.block<2, 2>(0, 2) *= t;
    m.block<2, 2>(2, 0) *= t;
    return JointSpectral4(m);
}

double effective_signal_loss(const IfoParams& p, const LossBudget& lb)
{
    // An arm round trip loss eps costs eps per 2L/c of storage; the signal is stored
    // for about 1/(2 gamma), so the input-referred fraction is c eps / (L gamma).
    return phys::c * lb.eps_arm / (p.l_arm0() * derived_bandwidth(p)) + lb.eps_src;
}

CavityLossNoise cavity_loss_noise(const IfoParams& p, const LossBudget& lb, double omega)
{
    CavityLossNoise out;
    out.signal_noise = SpectralMatrix{0.0, 0.0, {0.0, 0.0}};
    if (lb.eps_arm == 0.0 && lb.eps_src == 0.0) return out;

    const SignalResponse sr = signal_response(p, omega);
    const double eps = effective_signal_loss(p, lb);
    const Mat2c added = eps * sr.transfer * sr.transfer.adjoint();
    out.signal_noise = SpectralMatrix::from_matrix(added);
    out.signal_strain = out.signal_noise.s22 / std::norm(sr.signal_gain);

    const IdlerResponse ir = idler_response(p, omega, lb.cavity());
    out.idler_noise = ir.noise(1, 1).real();
    return out;
}

double delta_s_input_cond(double h2, double k, double r, double eps_in)
{
    const double c = std::cosh(2.0 * r);
    return h2 / (2.0 * c) * (k + 1.0 / k) * ((2.0 * c * c - c - 1.0) / c) * eps_in;
}

double delta_s_read_cond(double h2, double k, double r, double eps_r)
{
    const double t2 = std::pow(std::tanh(2.0 * r), 2);
    return 0.5 * h2 * (k * t2 + (1.0 + t2) / k) * eps_r;
}

double delta_s_cond_large_r(double h2, double k, double eps)
{
    return 0.5 * h2 * (2.0 / k + 1.5 * k) * 2.0 * eps;
}

double delta_s_traditional(double h2, double k, double eps_in, double eps_r)
{
    return 0.5 * h2 * ((k + 1.0 / k) * eps_in + eps_r / k);
}

double delta_s_traditional_equal(double h2, double k, double eps)
{
    return 0.5 * h2 * (2.0 / k + k) * eps;
}

std::vector<double> first_order_loss_correction(const IfoParams& p, const EprSource& src, const LossBudget& lb,
                                                std::span<const double> omegas)
{
    std::vector<double> out;
    out.reserve(omegas.size());
    for (double w : omegas) {
        const double k = kappa(p, w);
        const double h2 = std::pow(h_sql(p, w), 2);
        out.push_back(delta_s_input_cond(h2, k, src.r, lb.eps_in) + delta_s_read_cond(h2, k, src.r, lb.eps_read));
    }
    return out;
}

double jitter_mean_sin2(double xi)
{
    const double v = xi * xi;
    return 0.5 * (1.0 - std::exp(-2.0 * v));  // e^{-v} sinh v
}

double jitter_mean_cos2(double xi)
{
    const double v = xi * xi;
    return 0.5 * (1.0 + std::exp(-2.0 * v));  // e^{-v} cosh v
}

double jitter_mean_cos(double xi) { return std::exp(-0.5 * xi * xi); }

double phase_jitter_closed_form(double h2, double k, double r, const PhaseJitter& pj)
{
    const double s = pj.xi_vs * pj.xi_vs;
    const double i = pj.xi_vi * pj.xi_vi;
    const double sh4 = std::sinh(4.0 * r);
    return h2 / (2.0 * std::cosh(2.0 * r)) * ((1.0 + (s + i) * sh4) / k + (1.0 - s + i * sh4) * k);
}

}  // namespace eprifo
