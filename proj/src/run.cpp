#include "eprifo/run.hpp"

#include "eprifo/constants.hpp"
#include "eprifo/errors.hpp"
#include "eprifo/version.hpp"

#include <cmath>
#include <cstdio>
#include <ostream>

namespace eprifo {

void Table::add(std::string name, std::vector<double> values)
{
    if (!data.empty() && values.size() != rows()) throw Error("Table: column '" + name + "' has the wrong length");
    columns.push_back(std::move(name));
    data.push_back(std::move(values));
}

const std::vector<double>& Table::column(const std::string& name) const
{
    for (std::size_t i = 0; i < columns.size(); ++i)
        if (columns[i] == name) return data[i];
    throw Error("Table: no column '" + name + "'");
}

std::string column_suffix(double v)
{
    char buf[32];
    std::snprintf(buf, sizeof buf, "%g", v);
    return buf;
}

void write_csv(const Table& t, std::ostream& out)
{
    for (std::size_t j = 0; j < t.columns.size(); ++j) out << (j ? "," : "") << t.columns[j];
    out << "\n";
    char buf[40];
    for (std::size_t i = 0; i < t.rows(); ++i) {
        for (std::size_t j = 0; j < t.columns.size(); ++j) {
            std::snprintf(buf, sizeof buf, "%.12g", t.data[j][i]);
            out << (j ? "," : "") << buf;
        }
        out << "\n";
    }
}

nlohmann::json to_json(const SolverSolution& s)
{
    nlohmann::json j;
    j["n"] = s.n;
    j["p_half_waves"] = s.p;
    j["q_half_waves"] = s.q;
    j["p_wavelengths"] = s.p_wavelengths();
    j["q_wavelengths"] = s.q_wavelengths();
    j["offset_hz"] = s.offset_hz;
    j["delta_rad_s"] = s.delta;
    j["delta_hz"] = s.delta / phys::two_pi;
    j["fsr_src_hz"] = s.fsr_src_hz;
    j["dl_arm_m"] = s.dl_arm;
    j["dl_src_m"] = s.dl_src;
    j["phi_c_rad"] = s.phi_c;
    j["target_gamma_f_rad_s"] = s.target.gamma_f;
    j["target_delta_f_rad_s"] = s.target.delta_f;
    j["achieved_gamma_f_rad_s"] = s.achieved_gamma_f;
    j["achieved_delta_f_rad_s"] = s.achieved_delta_f;
    j["resonance_residual_rad"] = s.resonance_residual;
    j["max_angle_err_50_300_rad"] = s.max_angle_err_50_300;
    j["max_angle_err_full_rad"] = s.max_angle_err_full;
    return j;
}

RunConfig resolve_tuning(const RunConfig& c, std::optional<SolverSolution>& solution)
{
    RunConfig out = c;
    if (c.tuning == Tuning::solve || c.mode == Mode::solver) {
        solution = solve(c.ifo, c.solver);
        out.ifo = solution->apply(c.ifo);
        out.source.delta = out.ifo.delta;
    }
    return out;
}

namespace {

std::vector<double> to_hz(const std::vector<double>& omegas)
{
    std::vector<double> f(omegas);
    for (double& x : f) x /= phys::two_pi;
    return f;
}

void run_conditional(const RunConfig& c, const std::vector<double>& w, Table& t)
{
    const StrainSpectrum s = conditional_strain_spectrum(c.ifo, c.source, w, c.pipeline());
    t.add("s_hh", s.s_hh);
    t.add("s_hh_unsqueezed", s.s_hh_ref);
    t.add("improvement_db", s.improvement_db);
}

void run_rotation(const RunConfig& c, const std::vector<double>& w, Table& t)
{
    const auto achieved = rotation_angle_profile(c.ifo, w, c.losses.cavity());
    const SolverTarget tgt = target_filter_params(c.ifo);
    std::vector<double> req, err, bb;
    for (std::size_t i = 0; i < w.size(); ++i) {
        req.push_back(required_rotation(c.ifo, w[i]));
        err.push_back(achieved[i] - req.back());
        bb.push_back(broadband_rotation(tgt.gamma_f, tgt.delta_f, w[i]));
    }
    unwrap_pi(bb);
    t.add("phi_required_rad", req);
    t.add("phi_achieved_rad", achieved);
    t.add("phi_error_rad", err);
    t.add("phi_broadband_rad", bb);
}

void run_loss_sweep(const RunConfig& c, const std::vector<double>& w, Table& t)
{
    for (double eps : c.eps_values) {
        PipelineOptions o = c.pipeline();
        if (c.sweep_target != SweepTarget::readout) o.losses.eps_in = eps;
        if (c.sweep_target != SweepTarget::input) o.losses.eps_read = eps;
        const StrainSpectrum s = conditional_strain_spectrum(c.ifo, c.source, w, o);
        t.add("s_hh_eps_" + column_suffix(eps), s.s_hh);
        t.add("improvement_db_eps_" + column_suffix(eps), s.improvement_db);
    }
    std::vector<double> vac;
    for (double x : w) vac.push_back(unsqueezed_strain(c.ifo, x));
    t.add("s_hh_unsqueezed", vac);
}

void run_fixed_angle(const RunConfig& c, const std::vector<double>& w, Table& t)
{
    std::vector<double> sql, vac, fd;
    for (double x : w) {
        sql.push_back(std::pow(h_sql(c.ifo, x), 2));
        vac.push_back(fixed_angle_strain(c.ifo, 0.0, 0.0, x, c.losses));
        fd.push_back(frequency_dependent_strain(c.ifo, c.fixed_angle_squeeze_r, x, c.losses));
    }
    t.add("s_hh_sql", sql);
    t.add("s_hh_unsqueezed", vac);
    for (double z : c.zeta_values)
        t.add("s_hh_zeta_" + column_suffix(z), fixed_angle_spectrum(c.ifo, c.fixed_angle_squeeze_r, z, w, c.losses).s_hh);
    t.add("s_hh_freqdep", fd);
}

void run_jitter(const RunConfig& c, const std::vector<double>& w, Table& t)
{
    const PipelineOptions o = c.pipeline();
    const double phc = applied_compensation(c.ifo);
    struct Row {
        double clean, avg, mc, mc_err;
    };
    const auto rows = map_index(w.size(), [&](std::size_t i) {
        const ChannelPair cp = channel_pair(c.ifo, c.source, w[i], o, phc);
        const double clean = conditional_point(cp, {}).s_hh;
        const double avg = conditional_point(cp, c.jitter).s_hh;
        const MonteCarloEstimate mc = phase_jitter_monte_carlo(cp, c.jitter, c.mc_draws, c.seed + i);
        return Row{clean, avg, mc.mean / cp.gain2, mc.std_error / cp.gain2};
    });
    const StrainSpectrum closed = phase_jitter_spectrum(c.ifo, c.source, c.jitter, w);
    std::vector<double> clean, avg, mc, mce, rel_avg, rel_cf;
    for (std::size_t i = 0; i < rows.size(); ++i) {
        clean.push_back(rows[i].clean);
        avg.push_back(rows[i].avg);
        mc.push_back(rows[i].mc);
        mce.push_back(rows[i].mc_err);
        rel_avg.push_back(rows[i].avg / rows[i].clean - 1.0);
        rel_cf.push_back(closed.s_hh[i] / ideal_conditional_strain(c.ifo, c.source.r, w[i]) - 1.0);
    }
    t.add("s_hh_nojitter", clean);
    t.add("s_hh_averaged", avg);
    t.add("s_hh_closed_form", closed.s_hh);
    t.add("s_hh_monte_carlo", mc);
    t.add("s_hh_monte_carlo_stderr", mce);
    t.add("relative_correction_averaged", rel_avg);
    t.add("relative_correction_closed_form", rel_cf);
}

}  // namespace

RunOutput run(const RunConfig& cfg)
{
    cfg.validate();
    RunOutput out;
    const RunConfig c = resolve_tuning(cfg, out.solution);

    const std::vector<double> w = c.grid.omegas();
    if (c.mode == Mode::solver) {
        out.table.add("frequency_hz", out.solution->freqs_hz);
        out.table.add("phi_error_rad", out.solution->angle_error);
    } else {
        out.table.add("frequency_hz", to_hz(w));
        switch (c.mode) {
        case Mode::conditional: run_conditional(c, w, out.table); break;
        case Mode::rotation_angle: run_rotation(c, w, out.table); break;
        case Mode::loss_sweep: run_loss_sweep(c, w, out.table); break;
        case Mode::fixed_angle: run_fixed_angle(c, w, out.table); break;
        case Mode::jitter: run_jitter(c, w, out.table); break;
        case Mode::solver: break;
        }
    }

    nlohmann::json& j = out.sidecar;
    j["version"] = version;
    j["mode"] = std::string(to_string(c.mode));
    j["seed"] = c.seed;
    j["config"] = print_config(c);
    j["gamma_rad_s"] = derived_bandwidth(c.ifo);
    j["gamma_hz"] = derived_bandwidth(c.ifo) / phys::two_pi;
    j["theta_rad_s"] = std::cbrt(theta_cubed(c.ifo));
    j["gamma_f_target_rad_s"] = target_filter_params(c.ifo).gamma_f;
    j["squeeze_r"] = c.source.r;
    j["squeeze_db"] = squeeze_r_to_db(c.source.r);
    j["phi_c_applied_rad"] = applied_compensation(c.ifo);
    j["l_arm_m"] = c.ifo.l_arm();
    j["l_src_m"] = c.ifo.l_src();
    j["delta_hz"] = c.ifo.delta / phys::two_pi;
    if (out.solution) j["solution"] = to_json(*out.solution);
    return out;
}

}  // namespace eprifo
