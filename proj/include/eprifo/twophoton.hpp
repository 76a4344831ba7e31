#pragma once

// Two-photon quadrature algebra. Spectra are one-sided and normalised so that
// vacuum has unit spectral density in every quadrature.

#include <Eigen/Dense>

#include <complex>

namespace eprifo {

using cplx = std::complex<double>;
using Mat2c = Eigen::Matrix2cd;
using Mat4c = Eigen::Matrix4cd;
using Vec2c = Eigen::Vector2cd;

/// Coefficients of a linear combination of the two quadratures at one sideband.
struct QuadratureVector {
    cplx c1{1.0, 0.0};
    cplx c2{0.0, 0.0};
    double omega = 0.0;

    /// c_zeta = c1 cos(zeta) + c2 sin(zeta)
    static QuadratureVector at_angle(double zeta, double omega = 0.0);
};

struct SpectralMatrix {
    double s11 = 1.0;
    double s22 = 1.0;
    cplx s12{0.0, 0.0};

    double det() const { return s11 * s22 - std::norm(s12); }
    bool is_psd(double tol = 1e-10) const;
    Mat2c matrix() const;
    static SpectralMatrix from_matrix(const Mat2c& m);
    static SpectralMatrix vacuum() { return {}; }
};

/// Index of a quadrature inside the joint (signal, idler) basis.
enum class Quad : int { a1 = 0, a2 = 1, b1 = 2, b2 = 3 };

/// Joint 4x4 spectral density over (a1, a2, b1, b2).
class JointSpectral4 {
public:
    JointSpectral4() : m_(Mat4c::Identity()) {}
    explicit JointSpectral4(const Mat4c& m) : m_(m) {}

    const Mat4c& matrix() const { return m_; }
    cplx operator()(Quad i, Quad j) const { return m_(static_cast<int>(i), static_cast<int>(j)); }

    SpectralMatrix signal_block() const;
    SpectralMatrix idler_block() const;
    Mat2c cross_block() const { return m_.block<2, 2>(0, 2); }

    double min_eigenvalue() const;
    bool is_hermitian(double tol = 1e-12) const;

    /// Variance of u^T x where u weights the four quadratures (u may be complex).
    double variance(const Eigen::Vector4cd& u) const;
    /// Cross spectrum <u^T x, v^T x>.
    cplx cross(const Eigen::Vector4cd& u, const Eigen::Vector4cd& v) const;

    static JointSpectral4 vacuum() { return JointSpectral4{}; }

private:
    Mat4c m_;
};

struct EprSource {
    double r = 0.0;       // squeeze factor
    double delta = 0.0;   // idler detuning, rad/s
    double theta = 0.0;   // squeeze-angle reference, rad

    EprSource() = default;
    EprSource(double r_, double delta_ = 0.0, double theta_ = 0.0);

    double mu() const;
    double nu() const;
    static EprSource from_db(double db, double delta = 0.0, double theta = 0.0);
    double db() const;
    bool operator==(const EprSource&) const = default;
};

double squeeze_db_to_r(double db);
double squeeze_r_to_db(double r);

JointSpectral4 epr_joint_spectrum(const EprSource& src);

/// 2x2 rotation whose first row picks c1 cos(phi) + c2 sin(phi).
Eigen::Matrix2d rotation(double phi);

JointSpectral4 quadrature_rotate(const JointSpectral4& s, double phi_a, double phi_b);

/// Congruence S -> T S T^H + N for a block-diagonal transfer.
JointSpectral4 propagate(const JointSpectral4& s, const Mat4c& t, const Mat4c& added_noise = Mat4c::Zero());

struct Conditioned {
    cplx g_opt;
    double s_cond;
};

/// Wiener conditioning of the signal quadrature at read_signal_angle on the idler
/// quadrature at measured_idler_angle.
Conditioned condition_gaussian(const JointSpectral4& s, double measured_idler_angle, double read_signal_angle);

/// Same, on explicit quadrature weights.
Conditioned condition_gaussian(const JointSpectral4& s, const Eigen::Vector4cd& signal_weights,
                               const Eigen::Vector4cd& idler_weights);

/// Residual variance of A - g B for an arbitrary gain.
double residual_variance(const JointSpectral4& s, const Eigen::Vector4cd& signal_weights,
                         const Eigen::Vector4cd& idler_weights, cplx g);

Eigen::Vector4cd signal_readout(double zeta);
Eigen::Vector4cd idler_readout(double zeta);

}  // namespace eprifo
