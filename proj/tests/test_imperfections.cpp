#include "eprifo/conditioning.hpp"
#include "eprifo/errors.hpp"
#include "eprifo/imperfections.hpp"

#include <doctest.h>

#include <cmath>
#include <numbers>

using namespace eprifo;

namespace {

constexpr double two_pi = 2.0 * std::numbers::pi;

IfoParams tuned()
{
    IfoParams p = IfoParams::reference_design();
    p.dl_arm_half_waves = -99334;
    p.dl_src_half_waves = -415;
    p.delta = -two_pi * (300e3 + 5.0 * 299792458.0 / (2.0 * p.l_src()));
    return p;
}

PipelineOptions ideal(LossBudget lb = {})
{
    PipelineOptions o;
    o.rotation = RotationMode::ideal;
    o.losses = lb;
    return o;
}

}  // namespace

TEST_CASE("io loss boundaries")
{
    const JointSpectral4 s = epr_joint_spectrum(EprSource(1.3));
    CHECK((apply_io_loss(s, 0.0).matrix() - s.matrix()).cwiseAbs().maxCoeff() == 0.0);
    CHECK((apply_io_loss(s, 1.0).matrix() - Mat4c::Identity()).cwiseAbs().maxCoeff() < 1e-15);
    LossBudget lb;
    lb.eps_in = 0.1;
    lb.eps_read = 0.2;
    const JointSpectral4 a = apply_io_losses(s, lb, LossStage::input);
    CHECK(a(Quad::a1, Quad::b1).real() == doctest::Approx(0.9 * std::sinh(2.6)).epsilon(1e-14));
    CHECK(a(Quad::a1, Quad::a1).real() == doctest::Approx(0.9 * std::cosh(2.6) + 0.1).epsilon(1e-14));
    const JointSpectral4 b = apply_io_losses(s, lb, LossStage::readout);
    CHECK(b(Quad::b2, Quad::b2).real() == doctest::Approx(0.8 * std::cosh(2.6) + 0.2).epsilon(1e-14));
}

TEST_CASE("signal-only loss keeps the idler block")
{
    const JointSpectral4 s = epr_joint_spectrum(EprSource(1.3));
    const JointSpectral4 a = apply_signal_loss(s, 0.1);
    CHECK(a(Quad::b1, Quad::b1) == s(Quad::b1, Quad::b1));
    CHECK(a(Quad::a1, Quad::b1).real() == doctest::Approx(std::sqrt(0.9) * std::sinh(2.6)).epsilon(1e-14));
    CHECK(a.min_eigenvalue() > 0.0);
}

TEST_CASE("loss budget validation")
{
    LossBudget lb;
    CHECK_NOTHROW(lb.validate());
    lb.eps_in = 0.5;
    CHECK_THROWS_AS(lb.validate(), Error);
    lb.eps_in = -0.1;
    CHECK_THROWS_AS(lb.validate(), Error);
}

TEST_CASE("input loss against the first-order formula")
{
    const IfoParams p = IfoParams::reference_design();
    const EprSource src(1.727);
    for (double f : {20.0, 100.0, 2000.0}) {
        const double w = two_pi * f;
        LossBudget lb;
        lb.eps_in = 0.05;
        const double exact = conditional_strain(p, src, w, ideal(lb), 0.0) - conditional_strain(p, src, w, ideal(), 0.0);
        const double fo = delta_s_input_cond(std::pow(h_sql(p, w), 2), kappa(p, w), src.r, 0.05);
        CHECK(std::abs(exact / fo - 1) < 0.15);
    }
}

TEST_CASE("exact losses minus lossless agree with first order to O(eps^2)")
{
    const IfoParams p = IfoParams::reference_design();
    const EprSource src(1.727);
    const auto w = FrequencyGrid{}.omegas();
    for (double eps : {0.01, 0.05, 0.10}) {
        LossBudget lb;
        lb.eps_in = eps;
        lb.eps_read = eps;
        const auto fo = first_order_loss_correction(p, src, lb, w);
        for (std::size_t i = 0; i < w.size(); i += 7) {
            const double exact = conditional_strain(p, src, w[i], ideal(lb), 0.0) - conditional_strain(p, src, w[i], ideal(), 0.0);
            CHECK(std::abs(exact - fo[i]) / fo[i] < 3 * eps);
        }
    }
}

TEST_CASE("first-order formulas")
{
    CHECK(delta_s_input_cond(1, 0.5, 1.2, 0.0) == 0.0);
    CHECK(delta_s_read_cond(1, 0.5, 1.2, 0.0) == 0.0);
    // Large squeezing: conditional loss is twice the traditional one at K -> 0.
    CHECK(delta_s_cond_large_r(1, 1e-4, 0.01) / delta_s_traditional_equal(1, 1e-4, 0.01) == doctest::Approx(2.0).epsilon(1e-4));
    CHECK(delta_s_traditional(1, 0.3, 0.01, 0.01) == doctest::Approx(delta_s_traditional_equal(1, 0.3, 0.01)).epsilon(1e-14));
    // Readout share of S_cond: tanh^2 2r for K >> 1, 1 + tanh^2 2r for K << 1, each times cosh 2r eps.
    const double r = 1.727, c = std::cosh(2 * r), t2 = std::pow(std::tanh(2 * r), 2);
    const double hi = delta_s_read_cond(1, 1e4, r, 0.01) / (1 / (2 * c) * 1e4);
    const double lo = delta_s_read_cond(1, 1e-4, r, 0.01) / (1 / (2 * c) * 1e4);
    CHECK(hi == doctest::Approx(t2 * c * 0.01).epsilon(1e-6));
    CHECK(lo == doctest::Approx((1 + t2) * c * 0.01).epsilon(1e-6));
}

TEST_CASE("readout loss hurts more at high frequency")
{
    const IfoParams p = tuned();
    const EprSource src(1.727);
    PipelineOptions lossless, lossy;
    lossy.losses.eps_read = 0.05;
    const std::vector<double> w{two_pi * 20, two_pi * 5000};
    const auto a = conditional_strain_spectrum(p, src, w, lossless);
    const auto b = conditional_strain_spectrum(p, src, w, lossy);
    CHECK(a.improvement_db[1] - b.improvement_db[1] > a.improvement_db[0] - b.improvement_db[0]);
}

TEST_CASE("cavity loss noise")
{
    const IfoParams p = tuned();
    const CavityLossNoise none = cavity_loss_noise(p, {}, two_pi * 100);
    CHECK(none.signal_noise.s22 == 0.0);
    CHECK(none.idler_noise == 0.0);

    LossBudget arm;
    arm.eps_arm = 100e-6;
    CHECK(effective_signal_loss(p, arm) == doctest::Approx(0.003).epsilon(0.05));
    LossBudget lb{100e-6, 2000e-6, 0, 0};
    CHECK(effective_signal_loss(p, lb) == doctest::Approx(0.005).epsilon(0.05));

    // Signal-channel loss noise rises ponderomotively at low frequency; idler noise does not.
    const CavityLossNoise lo = cavity_loss_noise(p, lb, two_pi * 10);
    const CavityLossNoise hi = cavity_loss_noise(p, lb, two_pi * 1000);
    CHECK(lo.signal_noise.s22 / hi.signal_noise.s22 > 100);
    CHECK(lo.idler_noise < 0.2);
    CHECK(lo.idler_noise / std::max(hi.idler_noise, 1e-12) < 10);
    CHECK(lo.idler_noise > 0.0);
}

TEST_CASE("improvement never increases with loss")
{
    const IfoParams p = tuned();
    const EprSource src(1.727);
    const std::vector<double> w{two_pi * 15, two_pi * 60, two_pi * 400, two_pi * 4000};
    PipelineOptions prev;
    auto prev_s = conditional_strain_spectrum(p, src, w, prev);
    for (double e : {0.01, 0.02, 0.05, 0.1, 0.2}) {
        PipelineOptions o;
        o.losses = {e * 1e-2, e * 2e-2, e, e};
        const auto s = conditional_strain_spectrum(p, src, w, o);
        for (std::size_t i = 0; i < w.size(); ++i) CHECK(s.improvement_db[i] <= prev_s.improvement_db[i] + 1e-12);
        prev_s = s;
    }
}

TEST_CASE("gaussian phase averages")
{
    for (double xi : {0.0, 1e-3, 0.05, 0.3}) {
        const double v = xi * xi;
        CHECK(jitter_mean_sin2(xi) == doctest::Approx(std::exp(-v) * std::sinh(v)).epsilon(1e-12));
        CHECK(jitter_mean_cos2(xi) == doctest::Approx(std::exp(-v) * std::cosh(v)).epsilon(1e-12));
        CHECK(jitter_mean_sin2(xi) + jitter_mean_cos2(xi) == doctest::Approx(1.0).epsilon(1e-15));
    }
    CHECK(jitter_mean_cos(0.2) == doctest::Approx(std::exp(-0.02)).epsilon(1e-15));
}

TEST_CASE("no jitter leaves the spectrum unchanged")
{
    const IfoParams p = IfoParams::reference_design();
    const auto w = FrequencyGrid{}.omegas();
    const auto s = phase_jitter_spectrum(p, EprSource(1.727), {}, w);
    for (std::size_t i = 0; i < w.size(); ++i)
        CHECK(s.s_hh[i] == doctest::Approx(ideal_conditional_strain(p, 1.727, w[i])).epsilon(1e-14));
}

TEST_CASE("averaged jitter matches its small-angle expansion")
{
    // With ideal rotation the averaged moments give
    // S_hh = h^2/(2c) [ (1 + (s+i) sinh^2 2r)/K + (1 - s + i sinh^2 2r) K ] to first order.
    const IfoParams p = IfoParams::reference_design();
    const EprSource src(1.727);
    PipelineOptions o = ideal();
    o.jitter = {1e-3, 1e-3};
    const double sh2 = std::pow(std::sinh(2 * src.r), 2), c = std::cosh(2 * src.r);
    for (double f : {10.0, 62.0, 1000.0}) {
        const double w = two_pi * f, k = kappa(p, w), h2 = std::pow(h_sql(p, w), 2);
        const double num = conditional_strain(p, src, w, o, 0.0);
        const double ana = h2 / (2 * c) * ((1 + 2e-6 * sh2) / k + (1 - 1e-6 + 1e-6 * sh2) * k);
        const double base = ideal_conditional_strain(p, src.r, w);
        CHECK((num - base) / (ana - base) == doctest::Approx(1.0).epsilon(1e-3));
    }
}

TEST_CASE("closed-form jitter expression")
{
    const double r = 1.727, c = std::cosh(2 * r);
    const PhaseJitter pj{1e-3, 2e-3};
    const double got = phase_jitter_closed_form(2.0, 0.5, r, pj);
    const double want = 2.0 / (2 * c) * ((1 + 5e-6 * std::sinh(4 * r)) / 0.5 + (1 - 1e-6 + 4e-6 * std::sinh(4 * r)) * 0.5);
    CHECK(got == doctest::Approx(want).epsilon(1e-14));
}

TEST_CASE("Monte-Carlo jitter agrees with the averaged moments")
{
    const IfoParams p = tuned();
    const EprSource src(1.727);
    PipelineOptions o;
    o.jitter = {0.01, 0.01};
    for (double f : {15.0, 100.0, 2000.0}) {
        const ChannelPair cp = channel_pair(p, src, two_pi * f, o, applied_compensation(p));
        const double avg = conditional_point(cp, o.jitter).s_cond;
        const MonteCarloEstimate mc = phase_jitter_monte_carlo(cp, o.jitter, 100000, 42);
        CHECK(std::abs(mc.mean - avg) < 3 * mc.std_error);
        const MonteCarloEstimate again = phase_jitter_monte_carlo(cp, o.jitter, 100000, 42);
        CHECK(again.mean == mc.mean);
    }
}
