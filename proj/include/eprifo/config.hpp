#pragma once

// Batch job description. The text format is sectioned key = value lines; every
// physical key carries its unit in the name and unknown keys are rejected.

#include "eprifo/conditioning.hpp"
#include "eprifo/imperfections.hpp"
#include "eprifo/interferometer.hpp"
#include "eprifo/solver.hpp"
#include "eprifo/twophoton.hpp"

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace eprifo {

enum class Mode { conditional, fixed_angle, rotation_angle, solver, loss_sweep, jitter };
enum class Tuning { fixed, solve };
enum class SweepTarget { both, input, readout };

std::string_view to_string(Mode m);
std::optional<Mode> parse_mode(std::string_view s);

struct RunConfig {
    Mode mode = Mode::conditional;
    std::string output_path;
    std::uint64_t seed = 20161;
    IfoParams ifo{};
    Tuning tuning = Tuning::fixed;
    EprSource source{};
    LossBudget losses{};
    PhaseJitter jitter{};
    std::uint64_t mc_draws = 100000;
    FrequencyGrid grid{};
    RotationMode rotation = RotationMode::exact;
    double rotation_error = 0.0;
    SolverConfig solver{};
    std::vector<double> eps_values{0.0, 0.01, 0.05, 0.10};
    SweepTarget sweep_target = SweepTarget::both;
    std::vector<double> zeta_values{0.0, 0.7853981633974483, 1.5707963267948966};
    double fixed_angle_squeeze_r = 0.6907755278982137;  // 6 dB

    void validate() const;
    PipelineOptions pipeline() const;
    bool operator==(const RunConfig&) const = default;
};

/// Throws ConfigError carrying the line number and the offending key.
RunConfig parse_config(std::string_view text);
RunConfig load_config(const std::string& path);

/// Canonical text form; parse_config(print_config(c)) == c.
std::string print_config(const RunConfig& c);

}  // namespace eprifo
