#pragma once

// Parameter sweeps: a scenario template plus a grid of JSON-pointer
// overrides, one independent run per grid point.

#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "iesp/simulation.hpp"

namespace iesp::sim {

struct GridAxis {
    std::string key;  // JSON pointer into the scenario, e.g. "/burst/wheel"
    std::vector<nlohmann::json> values;
};

// Cartesian product of the axes; the last axis varies fastest.
struct Grid {
    std::vector<GridAxis> axes;

    std::size_t size() const;
    std::vector<nlohmann::json> point(std::size_t index) const;
};

// {"axes": [{"key": "/initial_speed_kmh", "values": [80, 120]}, ...]}
Grid grid_from_json(const nlohmann::json& doc);
Grid load_grid(const std::filesystem::path& file);

struct SweepRow {
    std::size_t index = 0;
    std::vector<nlohmann::json> values;  // one per axis
    std::optional<RunMetrics> metrics;   // absent when the point failed validation
    std::optional<FaultRecord> fault;
    std::string error;                   // validation message
};

// Rows come back in grid order whatever the number of jobs; jobs = 0 uses
// the hardware concurrency.
std::vector<SweepRow> sweep(const nlohmann::json& scenario_template, const std::filesystem::path& base_dir,
                            const Grid& grid, unsigned jobs = 1);

void write_sweep_csv(std::ostream& out, const Grid& grid, const std::vector<SweepRow>& rows);

}  // namespace iesp::sim
