#pragma once

// Independent reference constructions used only by the tests. None of these call
// into the library's closed forms.

#include <Eigen/Dense>

#include <cmath>
#include <complex>

namespace oracle {

using cplx = std::complex<double>;

/// EPR pair built from sideband Bogoliubov relations, then mapped to quadratures.
/// Sideband vector (a+, a-^dag, b+, b-^dag); every output is a combination of
/// four independent vacuum sideband inputs with unit spectral density.
inline Eigen::Matrix4cd epr_from_sidebands(double r)
{
    const double mu = std::cosh(r), nu = std::sinh(r);
    Eigen::Matrix4cd msb = Eigen::Matrix4cd::Zero();
    // a+ = mu ain+ + nu bin-^dag ; a-^dag = mu ain-^dag + nu bin+
    msb(0, 0) = mu; msb(0, 3) = nu;
    msb(1, 1) = mu; msb(1, 2) = nu;
    // b+ = mu bin+ + nu ain-^dag ; b-^dag = mu bin-^dag + nu ain+
    msb(2, 2) = mu; msb(2, 1) = nu;
    msb(3, 3) = mu; msb(3, 0) = nu;
    const double s = 1.0 / std::sqrt(2.0);
    Eigen::Matrix2cd u;
    u << s, s, cplx(0, -s), cplx(0, s);
    Eigen::Matrix4cd U = Eigen::Matrix4cd::Zero();
    U.block<2, 2>(0, 0) = u;
    U.block<2, 2>(2, 2) = u;
    const Eigen::Matrix4cd t = U * msb * U.adjoint();
    return t * t.adjoint();
}

/// Coupled-cavity reflectivity summed as explicit round trips. `phi_src` is the
/// one-way SRC phase, `phi_arm` the one-way arm phase.
inline cplx reflectivity_series(double t_srm, double t_itm, double phi_src, double phi_arm, int terms)
{
    const double ri = std::sqrt(1.0 - t_itm), rs = std::sqrt(1.0 - t_srm);
    const cplx e2 = std::polar(1.0, 2.0 * phi_src);
    const cplx loop = ri * rs * e2;
    auto geom = [&](cplx x) {
        cplx sum = 0.0, term = 1.0;
        for (int n = 0; n < terms; ++n) { sum += term; term *= x; }
        return sum;
    };
    const cplx g = geom(loop);
    const cplx rho_t = ri - t_itm * rs * e2 * g;        // from the arm side
    const cplx rho = -rs + t_srm * ri * e2 * g;         // from outside
    const cplx tau = cplx(0, 1) * std::sqrt(t_srm * t_itm) * std::polar(1.0, phi_src) * g;
    const cplx e = std::polar(1.0, 2.0 * phi_arm);
    return rho + tau * tau * e * geom(rho_t * e);
}

}  // namespace oracle
