#include "eprifo/solver.hpp"

#include "eprifo/constants.hpp"
#include "eprifo/errors.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <tuple>

namespace eprifo {

namespace {

double wrap_pi(double x) { return std::remainder(x, phys::two_pi); }

struct Family {
    double obj = 0.0;
    int n = 0;
    std::int64_t k = 0;
    std::int64_t p = 0;
    std::int64_t q = 0;
    double residual = 0.0;
    double delta = 0.0;
    double gamma = 0.0;
};

double family_delta(const IfoParams& base, const SolverConfig& cfg, int n, std::int64_t k, std::int64_t p)
{
    const double l_src = static_cast<double>(base.src_half_waves + p) * base.half_wave();
    const double fsr = phys::c / (2.0 * l_src);
    return cfg.sign * phys::two_pi * (static_cast<double>(k) * cfg.offset_step_hz + n * fsr);
}

struct BandGrid {
    std::vector<double> omegas;
    std::vector<double> required;
};

BandGrid band_grid(const IfoParams& p, const SolverConfig& cfg, int rot_sign)
{
    BandGrid g;
    const double lo = 10.0, hi = 10e3;
    const auto n = cfg.grid_points;
    for (std::size_t i = 0; i < n; ++i) {
        const double f = lo * std::pow(hi / lo, static_cast<double>(i) / static_cast<double>(n - 1));
        if (f < cfg.band_lo_hz || f > cfg.band_hi_hz) continue;
        const double w = phys::two_pi * f;
        g.omegas.push_back(w);
        g.required.push_back(rot_sign * std::atan(kappa(p, w)));
    }
    return g;
}

double band_error(const IfoParams& p, const BandGrid& g)
{
    const double phc = compensation_phase(p);
    double worst = 0.0;
    for (std::size_t i = 0; i < g.omegas.size(); ++i) {
        const double phi = idler_response(p, g.omegas[i], phc, {}).phi_rot_achieved;
        worst = std::max(worst, std::abs(std::remainder(phi - g.required[i], phys::pi)));
    }
    return worst;
}

}  // namespace

void SolverConfig::validate() const
{
    if (n_min > n_max) throw Error("solver: n_min must be <= n_max");
    if (sign != 1 && sign != -1) throw Error("solver: sign must be +1 or -1");
    if (!(offset_step_hz > 0.0)) throw Error("solver: offset_step_hz must be > 0");
    if (k_window < 0 || p_max < 0 || q_max < 0) throw Error("solver: search windows must be >= 0");
    if (!(residual_tol > 0.0)) throw Error("solver: residual_tol must be > 0");
    if (refine_candidates < 1) throw Error("solver: refine_candidates must be >= 1");
    if (!(band_lo_hz < band_hi_hz)) throw Error("solver: band_lo_hz must be < band_hi_hz");
    if (grid_points < 2) throw Error("solver: grid_points must be >= 2");
}

IfoParams SolverSolution::apply(const IfoParams& base) const
{
    IfoParams p = base;
    p.delta = delta;
    p.dl_arm_half_waves = q;
    p.dl_src_half_waves = this->p;
    p.phi_c = phi_c;
    return p;
}

SolverTarget target_filter_params(const IfoParams& p)
{
    const double g = derived_bandwidth(p);
    const double th3 = theta_cubed(p);
    const double gf = std::sqrt(th3 / g);
    return {gf, -gf, std::cbrt(th3) < 0.5 * g};
}

double bandwidth_from_phi(const IfoParams& p, double phi_src)
{
    const double rs = 1.0 - p.T_SRM;
    return p.T_SRM * gamma_itm(p) / (1.0 + rs - 2.0 * std::sqrt(rs) * std::cos(2.0 * phi_src));
}

double phi_from_bandwidth(const IfoParams& p, double gamma_f)
{
    const double rs = 1.0 - p.T_SRM;
    const double arg = (1.0 + rs - p.T_SRM * gamma_itm(p) / gamma_f) / (2.0 * std::sqrt(rs));
    if (!(gamma_f > 0.0) || !(std::abs(arg) <= 1.0))
        throw UnreachableBandwidth("requested idler bandwidth lies outside the range of the SRC tuning");
    return 0.5 * std::acos(arg);
}

double fsr_src_hz(const IfoParams& p) { return phys::c / (2.0 * p.l_src()); }

double achieved_bandwidth(const IfoParams& p)
{
    const SrcMirror m = src_effective_mirror(p);
    return -phys::c / (2.0 * p.l_arm()) * std::log(std::abs(m.rho_tilde));
}

double resonance_residual(const IfoParams& p, double delta_f)
{
    const SrcMirror m = src_effective_mirror(p);
    return wrap_pi(2.0 * (delta_f + p.delta) * p.l_arm() / phys::c + std::arg(m.rho_tilde));
}

std::vector<DetuningCandidate> solve_detuning(const IfoParams& p, const SolverTarget& target,
                                              const SolverConfig& cfg)
{
    cfg.validate();
    const double phi0 = phi_from_bandwidth(p, target.gamma_f);
    const double fsr = fsr_src_hz(p);
    std::vector<DetuningCandidate> out;
    for (int n = cfg.n_min; n <= cfg.n_max; ++n) {
        for (int b : {1, -1}) {
            const double phi = n * phys::pi + b * phi0;
            if (phi <= 0.0) continue;
            DetuningCandidate c;
            c.n = n;
            c.branch = b;
            c.delta = cfg.sign * phi * phys::c / p.l_src();
            c.offset_hz = std::abs(c.delta) / phys::two_pi - n * fsr;
            out.push_back(c);
        }
    }
    return out;
}

AngleErrorSummary angle_error_profile(const IfoParams& p, const SolverConfig& cfg, int rotation_sign)
{
    AngleErrorSummary s;
    const double phc = applied_compensation(p);
    const auto n = cfg.grid_points;
    for (std::size_t i = 0; i < n; ++i) {
        const double f = 10.0 * std::pow(1e3, static_cast<double>(i) / static_cast<double>(n - 1));
        const double w = phys::two_pi * f;
        const double phi = idler_response(p, w, phc, {}).phi_rot_achieved;
        const double e = std::remainder(phi - rotation_sign * std::atan(kappa(p, w)), phys::pi);
        s.freqs_hz.push_back(f);
        s.error.push_back(e);
        s.max_full = std::max(s.max_full, std::abs(e));
        if (f >= cfg.band_lo_hz && f <= cfg.band_hi_hz) s.max_band = std::max(s.max_band, std::abs(e));
    }
    return s;
}

SolverSolution solve_lengths(const IfoParams& base, const SolverTarget& target,
                             const std::vector<DetuningCandidate>& candidates, const SolverConfig& cfg)
{
    cfg.validate();
    if (candidates.empty()) throw NoSolutionInRange("no detuning candidates", std::numeric_limits<double>::infinity());
    const double hw = base.half_wave();
    const double l_arm0 = static_cast<double>(base.arm_half_waves) * hw;

    // Stage 1: every (candidate, offset k, p) with q from the linearised resonance condition.
    struct Job {
        int n;
        std::int64_t k;
    };
    std::vector<Job> jobs;
    for (const auto& c : candidates) {
        const auto k0 = static_cast<std::int64_t>(std::llround(c.offset_hz / cfg.offset_step_hz));
        for (std::int64_t k = k0 - cfg.k_window; k <= k0 + cfg.k_window; ++k) jobs.push_back({c.n, k});
    }
    std::sort(jobs.begin(), jobs.end(), [](const Job& a, const Job& b) { return std::tie(a.n, a.k) < std::tie(b.n, b.k); });
    jobs.erase(std::unique(jobs.begin(), jobs.end(), [](const Job& a, const Job& b) { return a.n == b.n && a.k == b.k; }),
               jobs.end());

    std::vector<Family> best_per_job(jobs.size());
    std::vector<double> best_resid(jobs.size(), std::numeric_limits<double>::infinity());
    const auto nj = static_cast<std::ptrdiff_t>(jobs.size());
#pragma omp parallel for schedule(dynamic)
    for (std::ptrdiff_t j = 0; j < nj; ++j) {
        Family best;
        best.obj = std::numeric_limits<double>::infinity();
        IfoParams p = base;
        p.dl_arm_half_waves = 0;
        for (std::int64_t pp = -cfg.p_max; pp <= cfg.p_max; ++pp) {
            p.dl_src_half_waves = pp;
            p.delta = family_delta(base, cfg, jobs[j].n, jobs[j].k, pp);
            const SrcMirror m = src_effective_mirror(p);
            const double gam = -phys::c / (2.0 * l_arm0) * std::log(std::abs(m.rho_tilde));
            const double arg = std::arg(m.rho_tilde);
            const double r0 = wrap_pi(2.0 * (target.delta_f + p.delta) * l_arm0 / phys::c + arg);
            const double slope = 2.0 * (target.delta_f + p.delta) * hw / phys::c;
            const auto q = std::clamp<std::int64_t>(std::llround(-r0 / slope), -cfg.q_max, cfg.q_max);
            const double l_arm = static_cast<double>(base.arm_half_waves + q) * hw;
            const double res = wrap_pi(2.0 * (target.delta_f + p.delta) * l_arm / phys::c + arg);
            best_resid[j] = std::min(best_resid[j], std::abs(res));
            if (std::abs(res) >= cfg.residual_tol) continue;
            const double obj = std::abs(res) + std::abs(std::log(gam / target.gamma_f));
            const auto key = std::make_tuple(obj, std::llabs(q), std::llabs(pp));
            if (key < std::make_tuple(best.obj, std::llabs(best.q), std::llabs(best.p)))
                best = {obj, jobs[j].n, jobs[j].k, pp, q, res, p.delta, gam};
        }
        best_per_job[j] = best;
    }

    std::vector<Family> fams;
    for (const auto& f : best_per_job)
        if (std::isfinite(f.obj)) fams.push_back(f);
    if (fams.empty()) {
        double r = std::numeric_limits<double>::infinity();
        for (double x : best_resid) r = std::min(r, x);
        throw NoSolutionInRange("no integer tuning satisfies the resonance condition within the search ranges", r);
    }
    std::sort(fams.begin(), fams.end(), [](const Family& a, const Family& b) {
        return std::make_tuple(a.obj, std::llabs(a.q), std::llabs(a.p), a.n, a.k) <
               std::make_tuple(b.obj, std::llabs(b.q), std::llabs(b.p), b.n, b.k);
    });
    if (static_cast<int>(fams.size()) > cfg.refine_candidates) fams.resize(static_cast<std::size_t>(cfg.refine_candidates));

    // Stage 2: slide q inside the window that keeps the resonance residual feasible
    // and keep the setting with the smallest band rotation error.
    const int rot_sign = target.delta_f < 0.0 ? 1 : -1;
    const BandGrid grid = band_grid(base, cfg, rot_sign);
    struct Scored {
        double err;
        std::int64_t q;
        std::int64_t p;
        std::size_t fam;
    };
    std::vector<Scored> scored;
    for (std::size_t fi = 0; fi < fams.size(); ++fi) {
        const Family& f = fams[fi];
        IfoParams p = base;
        p.delta = f.delta;
        p.dl_src_half_waves = f.p;
        const double slope = std::abs(2.0 * (target.delta_f + f.delta) * hw / phys::c);
        const auto room = static_cast<std::int64_t>((cfg.residual_tol - std::abs(f.residual)) / slope);
        const std::int64_t lo = std::max(-cfg.q_max, f.q - room);
        const std::int64_t hi = std::min(cfg.q_max, f.q + room);
        auto eval = [&](std::int64_t q) {
            IfoParams t = p;
            t.dl_arm_half_waves = q;
            if (std::abs(resonance_residual(t, target.delta_f)) >= cfg.residual_tol) return std::numeric_limits<double>::infinity();
            return band_error(t, grid);
        };
        const std::int64_t step = std::max<std::int64_t>(1, (hi - lo) / 200);
        const std::int64_t count = (hi - lo) / step + 1;
        std::vector<double> coarse(static_cast<std::size_t>(count));
#pragma omp parallel for schedule(static)
        for (std::int64_t i = 0; i < count; ++i) coarse[static_cast<std::size_t>(i)] = eval(lo + i * step);
        std::int64_t qc = lo;
        double ec = std::numeric_limits<double>::infinity();
        for (std::int64_t i = 0; i < count; ++i)
            if (coarse[static_cast<std::size_t>(i)] < ec) { ec = coarse[static_cast<std::size_t>(i)]; qc = lo + i * step; }
        const std::int64_t flo = std::max(lo, qc - step), fhi = std::min(hi, qc + step);
        std::vector<double> fine(static_cast<std::size_t>(fhi - flo + 1));
#pragma omp parallel for schedule(static)
        for (std::int64_t q = flo; q <= fhi; ++q) fine[static_cast<std::size_t>(q - flo)] = eval(q);
        for (std::int64_t q = flo; q <= fhi; ++q) {
            const double e = fine[static_cast<std::size_t>(q - flo)];
            if (std::isfinite(e)) scored.push_back({e, q, f.p, fi});
        }
    }
    if (scored.empty())
        throw NoSolutionInRange("refinement left no feasible tuning", std::abs(fams.front().residual));

    double best_err = std::numeric_limits<double>::infinity();
    for (const auto& s : scored) best_err = std::min(best_err, s.err);
    const Scored* pick = nullptr;
    for (const auto& s : scored) {
        if (s.err > best_err + cfg.tie_tol) continue;
        if (!pick || std::make_tuple(std::llabs(s.q), std::llabs(s.p), s.err) <
                         std::make_tuple(std::llabs(pick->q), std::llabs(pick->p), pick->err))
            pick = &s;
    }

    const Family& f = fams[pick->fam];
    SolverSolution sol;
    sol.n = f.n;
    sol.p = pick->p;
    sol.q = pick->q;
    sol.offset_hz = static_cast<double>(f.k) * cfg.offset_step_hz;
    sol.delta = f.delta;
    sol.dl_arm = static_cast<double>(sol.q) * hw;
    sol.dl_src = static_cast<double>(sol.p) * hw;
    sol.target = target;

    IfoParams p = base;
    p.delta = sol.delta;
    p.dl_arm_half_waves = sol.q;
    p.dl_src_half_waves = sol.p;
    p.phi_c.reset();
    sol.phi_c = compensation_phase(p);
    sol.achieved_gamma_f = achieved_bandwidth(p);
    sol.resonance_residual = resonance_residual(p, target.delta_f);
    sol.achieved_delta_f = target.delta_f - sol.resonance_residual * phys::c / (2.0 * p.l_arm());
    sol.fsr_src_hz = fsr_src_hz(p);
    const AngleErrorSummary prof = angle_error_profile(p, cfg, rot_sign);
    sol.max_angle_err_50_300 = prof.max_band;
    sol.max_angle_err_full = prof.max_full;
    sol.freqs_hz = prof.freqs_hz;
    sol.angle_error = prof.error;
    return sol;
}

SolverSolution solve(const IfoParams& p, const SolverConfig& cfg)
{
    cfg.validate();
    SolverTarget t = target_filter_params(p);
    if (cfg.sign > 0) t.delta_f = -t.delta_f;
    return solve_lengths(p, t, solve_detuning(p, t, cfg), cfg);
}

}  // namespace eprifo
