#pragma once

// Batch jobs behind the command line: each mode produces one CSV table and a
// JSON sidecar describing the resolved configuration.

#include "eprifo/config.hpp"
#include "eprifo/solver.hpp"

#include <json.hpp>

#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

namespace eprifo {

struct Table {
    std::vector<std::string> columns;
    std::vector<std::vector<double>> data;  // one vector per column

    void add(std::string name, std::vector<double> values);
    std::size_t rows() const { return data.empty() ? 0 : data.front().size(); }
    const std::vector<double>& column(const std::string& name) const;
};

struct RunOutput {
    Table table;
    nlohmann::json sidecar;
    std::optional<SolverSolution> solution;
};

/// Applies the solver to the interferometer when tuning = solve.
RunConfig resolve_tuning(const RunConfig& c, std::optional<SolverSolution>& solution);

RunOutput run(const RunConfig& c);

void write_csv(const Table& t, std::ostream& out);
nlohmann::json to_json(const SolverSolution& s);
std::string column_suffix(double v);

}  // namespace eprifo
