#include "eprifo/interferometer.hpp"

#include "eprifo/constants.hpp"
#include "eprifo/errors.hpp"

#include <cmath>

namespace eprifo {

namespace {

constexpr cplx I{0.0, 1.0};

double wrap_to(double x, double lo, double period)
{
    // Result in (lo, lo + period].
    double y = std::fmod(x - lo, period);
    if (y <= 0.0) y += period;
    return lo + y;
}

void check_unit_interval(double v, const char* name)
{
    if (!(v > 0.0 && v <= 1.0)) throw Error(std::string("IfoParams: ") + name + " must lie in (0, 1]");
}

}  // namespace

double IfoParams::omega0() const { return phys::two_pi * phys::c / lambda0; }

IfoParams IfoParams::reference_design() { return IfoParams{}; }

void IfoParams::validate() const
{
    if (!(lambda0 > 0.0)) throw Error("IfoParams: lambda0 must be positive");
    check_unit_interval(T_SRM, "T_SRM");
    check_unit_interval(T_ITM, "T_ITM");
    if (T_ITM >= 1.0) throw Error("IfoParams: T_ITM must be < 1");
    if (arm_half_waves + dl_arm_half_waves <= 0 || src_half_waves + dl_src_half_waves <= 0)
        throw Error("IfoParams: cavity lengths must be positive");
    if (!(m_mirror > 0.0)) throw Error("IfoParams: mirror mass must be positive");
    if (!(I_c > 0.0)) throw Error("IfoParams: circulating power must be positive");
    if (!std::isfinite(delta)) throw Error("IfoParams: delta must be finite");
}

double gamma_itm(const IfoParams& p) { return phys::c * p.T_ITM / (4.0 * p.l_arm0()); }

double derived_bandwidth(const IfoParams& p)
{
    const double rs = std::sqrt(1.0 - p.T_SRM);
    return gamma_itm(p) * (1.0 + rs) / (1.0 - rs);
}

double theta_cubed(const IfoParams& p)
{
    return 8.0 * p.omega0() * p.I_c / (p.m_mirror * p.l_arm0() * phys::c);
}

double kappa(const IfoParams& p, double omega)
{
    const double g = derived_bandwidth(p);
    const double w2 = omega * omega;
    return 2.0 * theta_cubed(p) * g / (w2 * (w2 + g * g));
}

double h_sql(const IfoParams& p, double omega)
{
    const double L = p.l_arm0();
    return std::sqrt(8.0 * phys::hbar / (p.m_mirror * omega * omega * L * L));
}

SignalResponse signal_response(const IfoParams& p, double omega)
{
    if (!(omega > 0.0)) throw NonPositiveFrequency("signal_response: omega must be > 0");
    SignalResponse s;
    s.beta = std::atan(omega / derived_bandwidth(p));
    s.kappa = kappa(p, omega);
    s.h_sql = h_sql(p, omega);
    const cplx ph = std::exp(2.0 * I * s.beta);
    s.transfer << ph, 0.0, -s.kappa * ph, ph;
    s.signal_gain = std::sqrt(2.0 * s.kappa) * std::exp(I * s.beta) / s.h_sql;
    return s;
}

double kappa_unity_frequency(const IfoParams& p)
{
    // K = 1 is a quadratic in w^2: w^4 + g^2 w^2 - 2 Theta^3 g = 0.
    const double g = derived_bandwidth(p);
    const double b = g * g;
    const double w2 = 0.5 * (-b + std::sqrt(b * b + 8.0 * theta_cubed(p) * g));
    return std::sqrt(w2);
}

SrcMirror src_effective_mirror(const IfoParams& p, double omega, double eps_src)
{
    const double ri = std::sqrt(1.0 - p.T_ITM);
    const double rs = std::sqrt(1.0 - p.T_SRM);
    const double phi = (p.delta + omega) * p.l_src() / phys::c;
    const cplx e1 = std::pow(1.0 - eps_src, 0.25) * std::exp(I * phi);
    const cplx e2 = std::sqrt(1.0 - eps_src) * std::exp(2.0 * I * phi);
    const cplx d = 1.0 - ri * rs * e2;
    SrcMirror m;
    m.rho_tilde = (ri - rs * e2) / d;
    m.rho = -(rs - ri * e2) / d;
    m.tau = I * std::sqrt(p.T_SRM * p.T_ITM) * e1 / d;
    m.tau_tilde = m.tau;
    return m;
}

cplx ifo_reflectivity(const IfoParams& p, double omega, const CavityLoss& loss)
{
    const SrcMirror m = src_effective_mirror(p, omega, loss.eps_src);
    const cplx e = std::sqrt(1.0 - loss.eps_arm) * std::exp(2.0 * I * (p.delta + omega) * p.l_arm() / phys::c);
    return (m.rho + (m.tau * m.tau_tilde - m.rho * m.rho_tilde) * e) / (1.0 - m.rho_tilde * e);
}

double compensation_phase(const IfoParams& p)
{
    const SrcMirror m = src_effective_mirror(p);
    const double v = std::arg(m.tau * m.tau_tilde - m.rho * m.rho_tilde) - std::arg(m.rho_tilde);
    return wrap_to(v, -phys::pi, phys::two_pi);
}

double applied_compensation(const IfoParams& p) { return p.phi_c ? *p.phi_c : compensation_phase(p); }

const Mat2c& sideband_to_quadrature()
{
    static const Mat2c u = [] {
        Mat2c m;
        const double s = 1.0 / std::sqrt(2.0);
        m << s, s, -I * s, I * s;
        return m;
    }();
    return u;
}

Mat2c rotation_transfer(double phi)
{
    Mat2c t;
    const double c = std::cos(phi), s = std::sin(phi);
    t << c, -s, s, c;
    return t;
}

IdlerResponse idler_response(const IfoParams& p, double omega, double phi_c, const CavityLoss& loss)
{
    IdlerResponse out;
    out.phi_c = phi_c;
    out.r_plus = ifo_reflectivity(p, omega, loss);
    out.r_minus = ifo_reflectivity(p, -omega, loss);
    const cplx comp = std::exp(-I * phi_c);
    const cplx up = out.r_plus * comp;
    const cplx dn = out.r_minus * comp;
    out.phi_rot_achieved = wrap_to(0.5 * std::arg(up * dn), -0.25 * phys::pi, phys::pi);
    out.alpha = 0.5 * std::arg(up / dn);

    const Mat2c& u = sideband_to_quadrature();
    Mat2c d = Mat2c::Zero();
    d(0, 0) = up;
    d(1, 1) = std::conj(dn);
    out.transfer = u * d * u.adjoint();
    Mat2c n = Mat2c::Zero();
    n(0, 0) = std::max(0.0, 1.0 - std::norm(out.r_plus));
    n(1, 1) = std::max(0.0, 1.0 - std::norm(out.r_minus));
    out.noise = u * n * u.adjoint();
    return out;
}

IdlerResponse idler_response(const IfoParams& p, double omega, const CavityLoss& loss)
{
    if (!(omega >= 0.0)) throw NonPositiveFrequency("idler_response: omega must be >= 0");
    return idler_response(p, omega, applied_compensation(p), loss);
}

double required_rotation(const IfoParams& p, double omega)
{
    if (!(omega > 0.0)) throw NonPositiveFrequency("required_rotation: omega must be > 0");
    return std::atan(kappa(p, omega));
}

void unwrap_pi(std::vector<double>& phi)
{
    for (std::size_t i = 1; i < phi.size(); ++i) {
        const double jump = phi[i] - phi[i - 1];
        phi[i] -= phys::pi * std::round(jump / phys::pi);
    }
}

std::vector<double> rotation_angle_profile(const IfoParams& p, std::span<const double> omegas,
                                           const CavityLoss& loss)
{
    const double phc = applied_compensation(p);
    std::vector<double> out;
    out.reserve(omegas.size());
    for (double w : omegas) out.push_back(idler_response(p, w, phc, loss).phi_rot_achieved);
    unwrap_pi(out);
    return out;
}

double broadband_rotation(double gamma_f, double delta_f, double omega)
{
    auto r = [&](double w) { return cplx(gamma_f, w - delta_f) / cplx(gamma_f, -(w - delta_f)); };
    return wrap_to(0.5 * std::arg(r(omega) * r(-omega)), -0.25 * phys::pi, phys::pi);
}

}  // namespace eprifo
