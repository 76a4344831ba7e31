// epr-ifo: batch front end for the EPR interferometer noise model.
//
// Exit codes: 0 success, 1 configuration error, 2 solver found no solution,
// 3 any other failure.

#include "eprifo/errors.hpp"
#include "eprifo/run.hpp"
#include "eprifo/version.hpp"

#include <CLI11.hpp>

#include <fstream>
#include <iostream>
#include <optional>

namespace {

int write_outputs(const eprifo::RunOutput& out, const std::string& path)
{
    if (path.empty() || path == "-") {
        eprifo::write_csv(out.table, std::cout);
        return 0;
    }
    std::ofstream csv(path);
    if (!csv) {
        std::cerr << "error: cannot write '" << path << "'\n";
        return 1;
    }
    eprifo::write_csv(out.table, csv);
    std::ofstream side(path + ".json");
    side << out.sidecar.dump(2) << "\n";
    return 0;
}

template <class F>
int guarded(F&& f)
{
    try {
        return f();
    } catch (const eprifo::ConfigError& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return 1;
    } catch (const eprifo::NoSolutionInRange& e) {
        std::cerr << "no solution: " << e.what() << " (best residual " << e.best_residual() << " rad)\n";
        return 2;
    } catch (const eprifo::UnreachableBandwidth& e) {
        std::cerr << "no solution: " << e.what() << "\n";
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 3;
    }
}

}  // namespace

int main(int argc, char** argv)
{
    CLI::App app{"Quantum noise of an interferometer read out with EPR-entangled light"};
    app.set_version_flag("--version", std::string("epr-ifo ") + eprifo::version);
    app.require_subcommand(1);

    std::string config_path, out_path, mode_name;
    std::optional<std::uint64_t> seed;

    auto* run = app.add_subcommand("run", "run one job described by a config file");
    run->add_option("--config", config_path, "config file")->required();
    run->add_option("--out", out_path, "CSV output path; a .json sidecar is written next to it");
    run->add_option("--mode", mode_name, "override the mode in the config");
    run->add_option("--seed", seed, "override the RNG seed");

    std::string solve_config, solve_out;
    auto* solve = app.add_subcommand("solve", "solve for detuning and length tunings");
    solve->add_option("--config", solve_config, "config file")->required();
    solve->add_option("--out", solve_out, "also write the solution JSON here");

    try {
        app.parse(argc, argv);
    } catch (const CLI::Success& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return 1;
    }

    if (*run) {
        return guarded([&] {
            eprifo::RunConfig cfg = eprifo::load_config(config_path);
            if (!mode_name.empty()) {
                const auto m = eprifo::parse_mode(mode_name);
                if (!m) throw eprifo::ConfigError("--mode", "unknown mode '" + mode_name + "'");
                cfg.mode = *m;
            }
            if (seed) cfg.seed = *seed;
            const std::string path = out_path.empty() ? cfg.output_path : out_path;
            return write_outputs(eprifo::run(cfg), path);
        });
    }
    return guarded([&] {
        const eprifo::RunConfig cfg = eprifo::load_config(solve_config);
        const eprifo::SolverSolution sol = eprifo::solve(cfg.ifo, cfg.solver);
        const std::string text = eprifo::to_json(sol).dump(2);
        std::cout << text << "\n";
        if (!solve_out.empty()) std::ofstream(solve_out) << text << "\n";
        return 0;
    });
}
