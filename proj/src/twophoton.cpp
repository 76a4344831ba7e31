#include "eprifo/twophoton.hpp"

#include "eprifo/errors.hpp"

#include <cmath>
#include <numbers>

namespace eprifo {

QuadratureVector QuadratureVector::at_angle(double zeta, double omega)
{
    return {cplx{std::cos(zeta), 0.0}, cplx{std::sin(zeta), 0.0}, omega};
}

bool SpectralMatrix::is_psd(double tol) const
{
    return s11 >= -tol && s22 >= -tol && det() >= -tol;
}

Mat2c SpectralMatrix::matrix() const
{
    Mat2c m;
    m << s11, s12, std::conj(s12), s22;
    return m;
}

SpectralMatrix SpectralMatrix::from_matrix(const Mat2c& m)
{
    return {m(0, 0).real(), m(1, 1).real(), m(0, 1)};
}

SpectralMatrix JointSpectral4::signal_block() const
{
    return SpectralMatrix::from_matrix(m_.block<2, 2>(0, 0));
}

SpectralMatrix JointSpectral4::idler_block() const
{
    return SpectralMatrix::from_matrix(m_.block<2, 2>(2, 2));
}

double JointSpectral4::min_eigenvalue() const
{
    // Symmetrise first so round-off in the imaginary diagonal does not leak in.
    const Mat4c h = 0.5 * (m_ + m_.adjoint());
    Eigen::SelfAdjointEigenSolver<Mat4c> es(h, Eigen::EigenvaluesOnly);
    return es.eigenvalues().minCoeff();
}

bool JointSpectral4::is_hermitian(double tol) const
{
    return (m_ - m_.adjoint()).cwiseAbs().maxCoeff() <= tol * std::max(1.0, m_.cwiseAbs().maxCoeff());
}

double JointSpectral4::variance(const Eigen::Vector4cd& u) const
{
    return (u.transpose() * m_ * u.conjugate())(0, 0).real();
}

cplx JointSpectral4::cross(const Eigen::Vector4cd& u, const Eigen::Vector4cd& v) const
{
    return (u.transpose() * m_ * v.conjugate())(0, 0);
}

EprSource::EprSource(double r_, double delta_, double theta_) : r(r_), delta(delta_), theta(theta_)
{
    if (!(r >= 0.0) || !std::isfinite(r)) throw Error("EprSource: squeeze factor must be finite and >= 0");
}

double EprSource::mu() const { return std::cosh(r); }
double EprSource::nu() const { return std::sinh(r); }

double squeeze_db_to_r(double db) { return db * std::numbers::ln10 / 20.0; }
double squeeze_r_to_db(double r) { return 20.0 * r / std::numbers::ln10; }

EprSource EprSource::from_db(double db, double delta, double theta)
{
    return EprSource(squeeze_db_to_r(db), delta, theta);
}

double EprSource::db() const { return squeeze_r_to_db(r); }

JointSpectral4 epr_joint_spectrum(const EprSource& src)
{
    // cosh 2r and sinh 2r directly; mu^2 + nu^2 would lose digits at large r.
    const double ch = std::cosh(2.0 * src.r);
    const double sh = std::sinh(2.0 * src.r);
    Mat4c m = Mat4c::Zero();
    m(0, 0) = m(1, 1) = m(2, 2) = m(3, 3) = ch;
    m(0, 2) = m(2, 0) = sh;
    m(1, 3) = m(3, 1) = -sh;
    // Invariant under the matched (-theta, +theta) rotation, applied for bookkeeping.
    if (src.theta != 0.0) return quadrature_rotate(JointSpectral4(m), -src.theta, src.theta);
    return JointSpectral4(m);
}

Eigen::Matrix2d rotation(double phi)
{
    Eigen::Matrix2d r;
    const double c = std::cos(phi), s = std::sin(phi);
    r << c, s, -s, c;
    return r;
}

JointSpectral4 quadrature_rotate(const JointSpectral4& s, double phi_a, double phi_b)
{
    Mat4c r = Mat4c::Zero();
    r.block<2, 2>(0, 0) = rotation(phi_a).cast<cplx>();
    r.block<2, 2>(2, 2) = rotation(phi_b).cast<cplx>();
    return JointSpectral4(r * s.matrix() * r.transpose());
}

JointSpectral4 propagate(const JointSpectral4& s, const Mat4c& t, const Mat4c& added_noise)
{
    return JointSpectral4(t * s.matrix() * t.adjoint() + added_noise);
}

Eigen::Vector4cd signal_readout(double zeta)
{
    return {std::cos(zeta), std::sin(zeta), 0.0, 0.0};
}

Eigen::Vector4cd idler_readout(double zeta)
{
    return {0.0, 0.0, std::cos(zeta), std::sin(zeta)};
}

Conditioned condition_gaussian(const JointSpectral4& s, const Eigen::Vector4cd& signal_weights,
                               const Eigen::Vector4cd& idler_weights)
{
    const double sbb = s.variance(idler_weights);
    if (!(sbb >= 1e-15)) throw DegenerateIdler("idler quadrature variance below 1e-15");
    const double saa = s.variance(signal_weights);
    const cplx sab = s.cross(signal_weights, idler_weights);
    return {sab / sbb, saa - std::norm(sab) / sbb};
}

Conditioned condition_gaussian(const JointSpectral4& s, double measured_idler_angle, double read_signal_angle)
{
    return condition_gaussian(s, signal_readout(read_signal_angle), idler_readout(measured_idler_angle));
}

double residual_variance(const JointSpectral4& s, const Eigen::Vector4cd& signal_weights,
                         const Eigen::Vector4cd& idler_weights, cplx g)
{
    const double saa = s.variance(signal_weights);
    const double sbb = s.variance(idler_weights);
    const cplx sab = s.cross(signal_weights, idler_weights);
    return saa - 2.0 * (std::conj(g) * sab).real() + std::norm(g) * sbb;
}

}  // namespace eprifo
