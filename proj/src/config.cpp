#include "eprifo/config.hpp"

#include "eprifo/errors.hpp"

#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <functional>
#include <map>
#include <numbers>
#include <set>
#include <sstream>

namespace eprifo {

namespace {

std::string_view trim(std::string_view s)
{
    const auto b = s.find_first_not_of(" \t\r");
    if (b == std::string_view::npos) return {};
    const auto e = s.find_last_not_of(" \t\r");
    return s.substr(b, e - b + 1);
}

double to_double(std::string_view v, const std::string& key, int line)
{
    double x = 0.0;
    const auto* end = v.data() + v.size();
    const auto [ptr, ec] = std::from_chars(v.data(), end, x);
    if (ec != std::errc{} || ptr != end || !std::isfinite(x))
        throw ConfigError(key, "expected a finite number, got '" + std::string(v) + "'", line);
    return x;
}

std::int64_t to_int(std::string_view v, const std::string& key, int line)
{
    std::int64_t x = 0;
    const auto* end = v.data() + v.size();
    const auto [ptr, ec] = std::from_chars(v.data(), end, x);
    if (ec != std::errc{} || ptr != end) throw ConfigError(key, "expected an integer, got '" + std::string(v) + "'", line);
    return x;
}

std::uint64_t to_uint(std::string_view v, const std::string& key, int line)
{
    std::uint64_t x = 0;
    const auto* end = v.data() + v.size();
    const auto [ptr, ec] = std::from_chars(v.data(), end, x);
    if (ec != std::errc{} || ptr != end)
        throw ConfigError(key, "expected a non-negative integer, got '" + std::string(v) + "'", line);
    return x;
}

bool to_bool(std::string_view v, const std::string& key, int line)
{
    if (v == "true" || v == "1" || v == "yes") return true;
    if (v == "false" || v == "0" || v == "no") return false;
    throw ConfigError(key, "expected true or false, got '" + std::string(v) + "'", line);
}

std::vector<double> to_list(std::string_view v, const std::string& key, int line)
{
    std::vector<double> out;
    while (!v.empty()) {
        const auto comma = v.find(',');
        const auto item = trim(v.substr(0, comma));
        if (item.empty()) throw ConfigError(key, "empty list element", line);
        out.push_back(to_double(item, key, line));
        if (comma == std::string_view::npos) break;
        v.remove_prefix(comma + 1);
    }
    if (out.empty()) throw ConfigError(key, "list must not be empty", line);
    return out;
}

std::string fmt(double x)
{
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", x);
    return buf;
}

std::string fmt_list(const std::vector<double>& v)
{
    std::string s;
    for (std::size_t i = 0; i < v.size(); ++i) s += (i ? ", " : "") + fmt(v[i]);
    return s;
}

constexpr std::pair<Mode, std::string_view> kModes[] = {
    {Mode::conditional, "conditional"},   {Mode::fixed_angle, "fixed-angle"}, {Mode::rotation_angle, "rotation-angle"},
    {Mode::solver, "solver"},             {Mode::loss_sweep, "loss-sweep"},   {Mode::jitter, "jitter"},
};

}  // namespace

std::string_view to_string(Mode m)
{
    for (const auto& [k, v] : kModes)
        if (k == m) return v;
    return "conditional";
}

std::optional<Mode> parse_mode(std::string_view s)
{
    for (const auto& [k, v] : kModes)
        if (v == s) return k;
    return std::nullopt;
}

PipelineOptions RunConfig::pipeline() const
{
    PipelineOptions o;
    o.rotation = rotation;
    o.rotation_error = rotation_error;
    o.losses = losses;
    o.jitter = jitter;
    return o;
}

void RunConfig::validate() const
{
    auto wrap = [](const char* field, auto&& fn) {
        try {
            fn();
        } catch (const ConfigError&) {
            throw;
        } catch (const Error& e) {
            throw ConfigError(field, e.what());
        }
    };
    wrap("ifo", [&] { ifo.validate(); });
    wrap("losses", [&] { losses.validate(); });
    wrap("jitter", [&] { jitter.validate(); });
    wrap("grid", [&] { grid.validate(); });
    wrap("solver", [&] { solver.validate(); });
    if (!(source.r >= 0.0)) throw ConfigError("source.squeeze_r", "must be >= 0");
    if (mode == Mode::jitter && mc_draws < 2) throw ConfigError("jitter.mc_draws", "must be >= 2");
    if (!(std::abs(rotation_error) < 0.3)) throw ConfigError("pipeline.rotation_error_rad", "must satisfy |value| < 0.3");
    for (double e : eps_values)
        if (!(e >= 0.0 && e < 0.5)) throw ConfigError("sweep.eps_values", "each value must lie in [0, 0.5)");
    if (!(fixed_angle_squeeze_r >= 0.0)) throw ConfigError("fixed_angle.squeeze_r", "must be >= 0");
}

RunConfig parse_config(std::string_view text)
{
    RunConfig c;
    std::optional<double> l_arm_m, l_src_m, squeeze_db, squeeze_r, fa_db, fa_r;
    bool arm_hw = false, src_hw = false;

    using Setter = std::function<void(std::string_view, const std::string&, int)>;
    const std::map<std::string, Setter, std::less<>> keys = {
        {"run.mode", [&](auto v, auto& k, int l) {
             const auto m = parse_mode(v);
             if (!m) throw ConfigError(k, "unknown mode '" + std::string(v) + "'", l);
             c.mode = *m;
         }},
        {"run.output", [&](auto v, auto&, int) { c.output_path = std::string(v); }},
        {"run.seed", [&](auto v, auto& k, int l) { c.seed = to_uint(v, k, l); }},
        {"ifo.lambda_m", [&](auto v, auto& k, int l) { c.ifo.lambda0 = to_double(v, k, l); }},
        {"ifo.t_srm", [&](auto v, auto& k, int l) { c.ifo.T_SRM = to_double(v, k, l); }},
        {"ifo.t_itm", [&](auto v, auto& k, int l) { c.ifo.T_ITM = to_double(v, k, l); }},
        {"ifo.l_arm_half_waves", [&](auto v, auto& k, int l) { c.ifo.arm_half_waves = to_int(v, k, l); arm_hw = true; }},
        {"ifo.l_src_half_waves", [&](auto v, auto& k, int l) { c.ifo.src_half_waves = to_int(v, k, l); src_hw = true; }},
        {"ifo.l_arm_m", [&](auto v, auto& k, int l) { l_arm_m = to_double(v, k, l); }},
        {"ifo.l_src_m", [&](auto v, auto& k, int l) { l_src_m = to_double(v, k, l); }},
        {"ifo.mass_kg", [&](auto v, auto& k, int l) { c.ifo.m_mirror = to_double(v, k, l); }},
        {"ifo.power_w", [&](auto v, auto& k, int l) { c.ifo.I_c = to_double(v, k, l); }},
        {"ifo.delta_hz", [&](auto v, auto& k, int l) { c.ifo.delta = 2.0 * std::numbers::pi * to_double(v, k, l); }},
        {"ifo.delta_rad_s", [&](auto v, auto& k, int l) { c.ifo.delta = to_double(v, k, l); }},
        {"ifo.dl_arm_half_waves", [&](auto v, auto& k, int l) { c.ifo.dl_arm_half_waves = to_int(v, k, l); }},
        {"ifo.dl_src_half_waves", [&](auto v, auto& k, int l) { c.ifo.dl_src_half_waves = to_int(v, k, l); }},
        {"ifo.phi_c_rad", [&](auto v, auto& k, int l) { c.ifo.phi_c = to_double(v, k, l); }},
        {"ifo.signal_angle_rad", [&](auto v, auto& k, int l) { c.ifo.signal_angle = to_double(v, k, l); }},
        {"ifo.idler_angle_rad", [&](auto v, auto& k, int l) { c.ifo.idler_angle = to_double(v, k, l); }},
        {"ifo.tuning", [&](auto v, auto& k, int l) {
             if (v == "fixed") c.tuning = Tuning::fixed;
             else if (v == "solve") c.tuning = Tuning::solve;
             else throw ConfigError(k, "expected fixed or solve", l);
         }},
        {"source.squeeze_db", [&](auto v, auto& k, int l) { squeeze_db = to_double(v, k, l); }},
        {"source.squeeze_r", [&](auto v, auto& k, int l) { squeeze_r = to_double(v, k, l); }},
        {"source.theta_rad", [&](auto v, auto& k, int l) { c.source.theta = to_double(v, k, l); }},
        {"losses.eps_arm", [&](auto v, auto& k, int l) { c.losses.eps_arm = to_double(v, k, l); }},
        {"losses.eps_src", [&](auto v, auto& k, int l) { c.losses.eps_src = to_double(v, k, l); }},
        {"losses.eps_in", [&](auto v, auto& k, int l) { c.losses.eps_in = to_double(v, k, l); }},
        {"losses.eps_read", [&](auto v, auto& k, int l) { c.losses.eps_read = to_double(v, k, l); }},
        {"jitter.xi_vs_rad", [&](auto v, auto& k, int l) { c.jitter.xi_vs = to_double(v, k, l); }},
        {"jitter.xi_vi_rad", [&](auto v, auto& k, int l) { c.jitter.xi_vi = to_double(v, k, l); }},
        {"jitter.mc_draws", [&](auto v, auto& k, int l) { c.mc_draws = to_uint(v, k, l); }},
        {"grid.f_min_hz", [&](auto v, auto& k, int l) { c.grid.f_min_hz = to_double(v, k, l); }},
        {"grid.f_max_hz", [&](auto v, auto& k, int l) { c.grid.f_max_hz = to_double(v, k, l); }},
        {"grid.n_points", [&](auto v, auto& k, int l) { c.grid.n_points = to_uint(v, k, l); }},
        {"grid.log_spaced", [&](auto v, auto& k, int l) { c.grid.log_spaced = to_bool(v, k, l); }},
        {"pipeline.rotation", [&](auto v, auto& k, int l) {
             if (v == "exact") c.rotation = RotationMode::exact;
             else if (v == "ideal") c.rotation = RotationMode::ideal;
             else throw ConfigError(k, "expected exact or ideal", l);
         }},
        {"pipeline.rotation_error_rad", [&](auto v, auto& k, int l) { c.rotation_error = to_double(v, k, l); }},
        {"solver.n_min", [&](auto v, auto& k, int l) { c.solver.n_min = static_cast<int>(to_int(v, k, l)); }},
        {"solver.n_max", [&](auto v, auto& k, int l) { c.solver.n_max = static_cast<int>(to_int(v, k, l)); }},
        {"solver.sign", [&](auto v, auto& k, int l) { c.solver.sign = static_cast<int>(to_int(v, k, l)); }},
        {"solver.offset_step_hz", [&](auto v, auto& k, int l) { c.solver.offset_step_hz = to_double(v, k, l); }},
        {"solver.k_window", [&](auto v, auto& k, int l) { c.solver.k_window = static_cast<int>(to_int(v, k, l)); }},
        {"solver.p_max", [&](auto v, auto& k, int l) { c.solver.p_max = to_int(v, k, l); }},
        {"solver.q_max", [&](auto v, auto& k, int l) { c.solver.q_max = to_int(v, k, l); }},
        {"solver.residual_tol_rad", [&](auto v, auto& k, int l) { c.solver.residual_tol = to_double(v, k, l); }},
        {"solver.refine_candidates", [&](auto v, auto& k, int l) { c.solver.refine_candidates = static_cast<int>(to_int(v, k, l)); }},
        {"solver.tie_tol_rad", [&](auto v, auto& k, int l) { c.solver.tie_tol = to_double(v, k, l); }},
        {"solver.band_lo_hz", [&](auto v, auto& k, int l) { c.solver.band_lo_hz = to_double(v, k, l); }},
        {"solver.band_hi_hz", [&](auto v, auto& k, int l) { c.solver.band_hi_hz = to_double(v, k, l); }},
        {"solver.grid_points", [&](auto v, auto& k, int l) { c.solver.grid_points = to_uint(v, k, l); }},
        {"sweep.eps_values", [&](auto v, auto& k, int l) { c.eps_values = to_list(v, k, l); }},
        {"sweep.apply_to", [&](auto v, auto& k, int l) {
             if (v == "both") c.sweep_target = SweepTarget::both;
             else if (v == "input") c.sweep_target = SweepTarget::input;
             else if (v == "readout") c.sweep_target = SweepTarget::readout;
             else throw ConfigError(k, "expected both, input or readout", l);
         }},
        {"fixed_angle.zeta_rad", [&](auto v, auto& k, int l) { c.zeta_values = to_list(v, k, l); }},
        {"fixed_angle.squeeze_db", [&](auto v, auto& k, int l) { fa_db = to_double(v, k, l); }},
        {"fixed_angle.squeeze_r", [&](auto v, auto& k, int l) { fa_r = to_double(v, k, l); }},
    };

    std::set<std::string> seen;
    std::string section;
    int line_no = 0;
    std::size_t pos = 0;
    while (pos <= text.size()) {
        const auto nl = text.find('\n', pos);
        std::string_view line = text.substr(pos, nl == std::string_view::npos ? std::string_view::npos : nl - pos);
        pos = nl == std::string_view::npos ? text.size() + 1 : nl + 1;
        ++line_no;
        if (const auto h = line.find('#'); h != std::string_view::npos) line = line.substr(0, h);
        line = trim(line);
        if (line.empty()) continue;
        if (line.front() == '[') {
            if (line.back() != ']') throw ConfigError("", "unterminated section header", line_no);
            section = std::string(trim(line.substr(1, line.size() - 2)));
            continue;
        }
        const auto eq = line.find('=');
        if (eq == std::string_view::npos) throw ConfigError("", "expected key = value", line_no);
        const std::string key = section + "." + std::string(trim(line.substr(0, eq)));
        const auto value = trim(line.substr(eq + 1));
        const auto it = keys.find(key);
        if (it == keys.end()) throw ConfigError(key, "unknown key", line_no);
        if (!seen.insert(key).second) throw ConfigError(key, "duplicate key", line_no);
        if (value.empty() && key != "run.output") throw ConfigError(key, "missing value", line_no);
        it->second(value, key, line_no);
    }

    if (seen.contains("ifo.delta_hz") && seen.contains("ifo.delta_rad_s"))
        throw ConfigError("ifo.delta_hz", "delta_hz and delta_rad_s are mutually exclusive");
    if (squeeze_db && squeeze_r) throw ConfigError("source.squeeze_db", "squeeze_db and squeeze_r are mutually exclusive");
    if (squeeze_db) c.source.r = squeeze_db_to_r(*squeeze_db);
    if (squeeze_r) c.source.r = *squeeze_r;
    if (fa_db && fa_r) throw ConfigError("fixed_angle.squeeze_db", "squeeze_db and squeeze_r are mutually exclusive");
    if (fa_db) c.fixed_angle_squeeze_r = squeeze_db_to_r(*fa_db);
    if (fa_r) c.fixed_angle_squeeze_r = *fa_r;
    if (l_arm_m && arm_hw) throw ConfigError("ifo.l_arm_m", "l_arm_m and l_arm_half_waves are mutually exclusive");
    if (l_src_m && src_hw) throw ConfigError("ifo.l_src_m", "l_src_m and l_src_half_waves are mutually exclusive");
    if (l_arm_m) c.ifo.arm_half_waves = std::llround(*l_arm_m / c.ifo.half_wave());
    if (l_src_m) c.ifo.src_half_waves = std::llround(*l_src_m / c.ifo.half_wave());
    c.source.delta = c.ifo.delta;
    c.validate();
    return c;
}

RunConfig load_config(const std::string& path)
{
    std::ifstream in(path);
    if (!in) throw ConfigError("--config", "cannot open '" + path + "'");
    std::stringstream ss;
    ss << in.rdbuf();
    return parse_config(ss.str());
}

std::string print_config(const RunConfig& c)
{
    std::ostringstream o;
    o << "[run]\n"
      << "mode = " << to_string(c.mode) << "\n"
      << "output = " << c.output_path << "\n"
      << "seed = " << c.seed << "\n\n";
    const IfoParams& p = c.ifo;
    o << "[ifo]\n"
      << "lambda_m = " << fmt(p.lambda0) << "\n"
      << "t_srm = " << fmt(p.T_SRM) << "\n"
      << "t_itm = " << fmt(p.T_ITM) << "\n"
      << "l_arm_half_waves = " << p.arm_half_waves << "\n"
      << "l_src_half_waves = " << p.src_half_waves << "\n"
      << "mass_kg = " << fmt(p.m_mirror) << "\n"
      << "power_w = " << fmt(p.I_c) << "\n"
      << "delta_rad_s = " << fmt(p.delta) << "\n"
      << "dl_arm_half_waves = " << p.dl_arm_half_waves << "\n"
      << "dl_src_half_waves = " << p.dl_src_half_waves << "\n";
    if (p.phi_c) o << "phi_c_rad = " << fmt(*p.phi_c) << "\n";
    o << "signal_angle_rad = " << fmt(p.signal_angle) << "\n"
      << "idler_angle_rad = " << fmt(p.idler_angle) << "\n"
      << "tuning = " << (c.tuning == Tuning::solve ? "solve" : "fixed") << "\n\n";
    o << "[source]\n"
      << "squeeze_r = " << fmt(c.source.r) << "\n"
      << "theta_rad = " << fmt(c.source.theta) << "\n\n";
    o << "[losses]\n"
      << "eps_arm = " << fmt(c.losses.eps_arm) << "\n"
      << "eps_src = " << fmt(c.losses.eps_src) << "\n"
      << "eps_in = " << fmt(c.losses.eps_in) << "\n"
      << "eps_read = " << fmt(c.losses.eps_read) << "\n\n";
    o << "[jitter]\n"
      << "xi_vs_rad = " << fmt(c.jitter.xi_vs) << "\n"
      << "xi_vi_rad = " << fmt(c.jitter.xi_vi) << "\n"
      << "mc_draws = " << c.mc_draws << "\n\n";
    o << "[grid]\n"
      << "f_min_hz = " << fmt(c.grid.f_min_hz) << "\n"
      << "f_max_hz = " << fmt(c.grid.f_max_hz) << "\n"
      << "n_points = " << c.grid.n_points << "\n"
      << "log_spaced = " << (c.grid.log_spaced ? "true" : "false") << "\n\n";
    o << "[pipeline]\n"
      << "rotation = " << (c.rotation == RotationMode::ideal ? "ideal" : "exact") << "\n"
      << "rotation_error_rad = " << fmt(c.rotation_error) << "\n\n";
    const SolverConfig& s = c.solver;
    o << "[solver]\n"
      << "n_min = " << s.n_min << "\n"
      << "n_max = " << s.n_max << "\n"
      << "sign = " << s.sign << "\n"
      << "offset_step_hz = " << fmt(s.offset_step_hz) << "\n"
      << "k_window = " << s.k_window << "\n"
      << "p_max = " << s.p_max << "\n"
      << "q_max = " << s.q_max << "\n"
      << "residual_tol_rad = " << fmt(s.residual_tol) << "\n"
      << "refine_candidates = " << s.refine_candidates << "\n"
      << "tie_tol_rad = " << fmt(s.tie_tol) << "\n"
      << "band_lo_hz = " << fmt(s.band_lo_hz) << "\n"
      << "band_hi_hz = " << fmt(s.band_hi_hz) << "\n"
      << "grid_points = " << s.grid_points << "\n\n";
    o << "[sweep]\n"
      << "eps_values = " << fmt_list(c.eps_values) << "\n"
      << "apply_to = "
      << (c.sweep_target == SweepTarget::input ? "input" : c.sweep_target == SweepTarget::readout ? "readout" : "both")
      << "\n\n";
    o << "[fixed_angle]\n"
      << "zeta_rad = " << fmt_list(c.zeta_values) << "\n"
      << "squeeze_r = " << fmt(c.fixed_angle_squeeze_r) << "\n";
    return o.str();
}

}  // namespace eprifo
