#include "iesp/sweep.hpp"

#include <algorithm>
#include <atomic>
#include <ostream>
#include <thread>

#include "iesp/errors.hpp"
#include "iesp/export.hpp"

namespace iesp::sim {

using nlohmann::json;

std::size_t Grid::size() const {
    if (axes.empty())
        return 0;
    std::size_t n = 1;
    for (const auto& a : axes)
        n *= a.values.size();
    return n;
}

std::vector<json> Grid::point(std::size_t index) const {
    std::vector<json> out(axes.size());
    for (std::size_t k = axes.size(); k-- > 0;) {
        const auto n = axes[k].values.size();
        out[k] = axes[k].values[index % n];
        index /= n;
    }
    return out;
}

Grid grid_from_json(const json& doc) {
    std::vector<std::string> issues;
    Grid g;
    if (!doc.is_object() || !doc.contains("axes") || !doc["axes"].is_array() || doc["axes"].empty()) {
        throw ValidationError({"/axes: expected a non-empty array of {key, values}"});
    }
    for (const auto& [key, value] : doc.items()) {
        if (key != "axes")
            issues.push_back("/" + key + ": unknown key");
    }
    const auto& axes = doc["axes"];
    for (std::size_t i = 0; i < axes.size(); ++i) {
        const std::string where = "/axes/" + std::to_string(i);
        const auto& a = axes[i];
        if (!a.is_object() || !a.contains("key") || !a["key"].is_string() || !a.contains("values") ||
            !a["values"].is_array() || a["values"].empty()) {
            issues.push_back(where + ": expected {\"key\": pointer, \"values\": [non-empty]}");
            continue;
        }
        for (const auto& [key, value] : a.items()) {
            if (key != "key" && key != "values")
                issues.push_back(where + "/" + key + ": unknown key");
        }
        GridAxis axis;
        axis.key = a["key"].get<std::string>();
        try {
            json::json_pointer ptr(axis.key);
            (void)ptr;
        } catch (const json::exception& e) {
            issues.push_back(where + "/key: " + e.what());
        }
        axis.values.assign(a["values"].begin(), a["values"].end());
        g.axes.push_back(std::move(axis));
    }
    if (!issues.empty())
        throw ValidationError(std::move(issues));
    return g;
}

Grid load_grid(const std::filesystem::path& file) {
    return grid_from_json(read_json_file(file));
}

namespace {

SweepRow run_point(const json& tmpl, const std::filesystem::path& base_dir, const Grid& grid, std::size_t index) {
    SweepRow row;
    row.index = index;
    row.values = grid.point(index);
    try {
        json doc = tmpl;
        for (std::size_t k = 0; k < grid.axes.size(); ++k)
            doc[json::json_pointer(grid.axes[k].key)] = row.values[k];
        const Scenario sc = scenario_from_json(doc, base_dir);
        const auto result = run(sc);
        row.metrics = compute_metrics(result.trace, trajectory_of(sc));
        row.fault = result.fault;
    } catch (const ConfigError& e) {
        row.error = e.what();
    } catch (const json::exception& e) {
        row.error = e.what();
    }
    return row;
}

std::string csv_cell(std::string s) {
    std::replace(s.begin(), s.end(), '\n', ' ');
    if (s.find_first_of(",\"") == std::string::npos)
        return s;
    std::string out = "\"";
    for (char c : s) {
        if (c == '"')
            out += '"';
        out += c;
    }
    return out + "\"";
}

}  // namespace

std::vector<SweepRow> sweep(const json& tmpl, const std::filesystem::path& base_dir, const Grid& grid,
                            unsigned jobs) {
    const std::size_t n = grid.size();
    if (n == 0)
        throw ConfigError("sweep: empty grid");
    if (jobs == 0)
        jobs = std::max(1u, std::thread::hardware_concurrency());
    jobs = static_cast<unsigned>(std::min<std::size_t>(jobs, n));

    std::vector<SweepRow> rows(n);
    std::atomic<std::size_t> next{0};
    auto worker = [&] {
        for (std::size_t i = next++; i < n; i = next++)
            rows[i] = run_point(tmpl, base_dir, grid, i);
    };
    if (jobs == 1) {
        worker();
    } else {
        std::vector<std::thread> pool;
        for (unsigned j = 0; j < jobs; ++j)
            pool.emplace_back(worker);
        for (auto& th : pool)
            th.join();
    }
    return rows;
}

void write_sweep_csv(std::ostream& out, const Grid& grid, const std::vector<SweepRow>& rows) {
    out << "index";
    for (const auto& a : grid.axes)
        out << ',' << csv_cell(a.key);
    out << ",status,max_abs_beta_deg,spin,spin_time_s,max_track_error_m,max_track_error_mean_m,"
           "final_track_error_mean_m,max_abs_yaw_rate_error_rad_s,message\n";
    for (const auto& r : rows) {
        out << r.index;
        for (const auto& v : r.values)
            out << ',' << csv_cell(v.is_string() ? v.get<std::string>() : v.dump());
        if (!r.metrics) {
            out << ",invalid,,,,,,,," << csv_cell(r.error) << '\n';
            continue;
        }
        const auto& m = *r.metrics;
        out << ',' << (r.fault ? "fault" : "ok") << ',' << format_number(m.max_abs_beta_deg) << ','
            << (m.spin ? 1 : 0) << ',' << (m.spin ? format_number(m.spin_time) : "") << ','
            << format_number(m.max_track_error) << ',' << format_number(m.max_track_error_mean) << ','
            << format_number(m.final_track_error_mean) << ',' << format_number(m.max_abs_yaw_rate_error) << ','
            << (r.fault ? csv_cell(r.fault->message) : "") << '\n';
    }
}

}  // namespace iesp::sim
