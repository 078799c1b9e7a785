#include "iesp/export.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <istream>
#include <ostream>
#include <sstream>

#include "iesp/errors.hpp"
#include "iesp/vec.hpp"

namespace iesp::sim {

namespace fs = std::filesystem;

std::string format_number(double v) {
    char buf[40];
    const auto res = std::to_chars(buf, buf + sizeof buf, v, std::chars_format::general, 17);
    return std::string(buf, res.ptr);
}

void write_trace_csv(std::ostream& out, const SimTrace& trace) {
    const auto& cols = trace_columns();
    for (std::size_t i = 0; i < cols.size(); ++i)
        out << (i ? "," : "") << cols[i];
    out << '\n';
    for (const auto& s : trace.samples) {
        const auto row = to_row(s);
        for (std::size_t i = 0; i < row.size(); ++i)
            out << (i ? "," : "") << format_number(row[i]);
        out << '\n';
    }
}

SimTrace read_trace_csv(std::istream& in) {
    const auto& cols = trace_columns();
    std::string line;
    if (!std::getline(in, line))
        throw ConfigError("trace csv: missing header");
    {
        std::vector<std::string> header;
        std::stringstream ss(line);
        std::string cell;
        while (std::getline(ss, cell, ','))
            header.push_back(cell);
        if (header != cols)
            throw ConfigError("trace csv: header does not match the trace columns");
    }
    SimTrace trace;
    std::size_t line_no = 1;
    while (std::getline(in, line)) {
        ++line_no;
        if (line.empty())
            continue;
        std::vector<double> row;
        const char* p = line.data();
        const char* end = line.data() + line.size();
        while (p <= end) {
            const char* comma = std::find(p, end, ',');
            double v = 0.0;
            const auto res = std::from_chars(p, comma, v);
            if (res.ec != std::errc() || res.ptr != comma)
                throw ConfigError("trace csv: bad number on line " + std::to_string(line_no));
            row.push_back(v);
            p = comma + 1;
        }
        trace.samples.push_back(from_row(row));
    }
    if (trace.samples.size() >= 2)
        trace.period = trace.samples[1].t - trace.samples[0].t;
    return trace;
}

nlohmann::json metrics_to_json(const RunMetrics& m) {
    return {
        {"max_abs_beta_deg", m.max_abs_beta_deg},
        {"spin", m.spin},
        {"spin_time_s", m.spin ? nlohmann::json(m.spin_time) : nlohmann::json(nullptr)},
        {"max_track_error_m", m.max_track_error},
        {"max_track_error_mean_m", m.max_track_error_mean},
        {"final_track_error_mean_m", m.final_track_error_mean},
        {"max_abs_yaw_rate_error_rad_s", m.max_abs_yaw_rate_error},
    };
}

namespace {

struct Series {
    std::string label;
    std::string color;
    std::vector<double> y;
};

struct Panel {
    std::string title;
    std::vector<Series> series;
};

std::ofstream open_out(const fs::path& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out)
        throw IoError("cannot write " + path.string());
    return out;
}

void close_out(std::ofstream& out, const fs::path& path) {
    out.close();
    if (!out)
        throw IoError("failed writing " + path.string());
}

void write_svg(const fs::path& path, const std::vector<double>& t, const std::vector<Panel>& panels) {
    constexpr double kWidth = 800.0, kPanelHeight = 260.0;
    constexpr double kLeft = 70.0, kRight = 20.0, kTop = 30.0, kBottom = 40.0;
    const double height = kPanelHeight * static_cast<double>(panels.size());

    auto out = open_out(path);
    out << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << kWidth << "\" height=\"" << height
        << "\" font-family=\"sans-serif\" font-size=\"12\">\n";
    out << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";

    const double t0 = t.empty() ? 0.0 : t.front();
    const double t1 = t.empty() ? 1.0 : std::max(t.back(), t0 + 1e-9);

    for (std::size_t k = 0; k < panels.size(); ++k) {
        const auto& panel = panels[k];
        const double top = kPanelHeight * static_cast<double>(k) + kTop;
        const double h = kPanelHeight - kTop - kBottom;
        const double w = kWidth - kLeft - kRight;

        double lo = 0.0, hi = 0.0;
        for (const auto& s : panel.series) {
            for (double v : s.y) {
                if (std::isfinite(v)) {
                    lo = std::min(lo, v);
                    hi = std::max(hi, v);
                }
            }
        }
        if (hi - lo < 1e-12) {
            hi += 1.0;
            lo -= 1.0;
        }
        const double pad = 0.05 * (hi - lo);
        lo -= pad;
        hi += pad;
        auto px = [&](double tv) { return kLeft + (tv - t0) / (t1 - t0) * w; };
        auto py = [&](double v) { return top + (hi - v) / (hi - lo) * h; };

        out << "<text x=\"" << kLeft << "\" y=\"" << top - 10 << "\">" << panel.title << "</text>\n";
        out << "<rect x=\"" << kLeft << "\" y=\"" << top << "\" width=\"" << w << "\" height=\"" << h
            << "\" fill=\"none\" stroke=\"black\"/>\n";
        if (lo < 0.0 && hi > 0.0) {
            out << "<line x1=\"" << kLeft << "\" x2=\"" << kLeft + w << "\" y1=\"" << py(0.0) << "\" y2=\""
                << py(0.0) << "\" stroke=\"#bbb\"/>\n";
        }
        for (int i = 0; i <= 4; ++i) {
            const double v = lo + (hi - lo) * i / 4.0;
            out << "<text x=\"" << kLeft - 5 << "\" y=\"" << py(v) + 4 << "\" text-anchor=\"end\">"
                << format_number(std::round(v * 1000.0) / 1000.0) << "</text>\n";
            const double tv = t0 + (t1 - t0) * i / 4.0;
            out << "<text x=\"" << px(tv) << "\" y=\"" << top + h + 16 << "\" text-anchor=\"middle\">"
                << format_number(std::round(tv * 100.0) / 100.0) << "</text>\n";
        }
        out << "<text x=\"" << kLeft + w / 2 << "\" y=\"" << top + h + 32 << "\" text-anchor=\"middle\">t [s]</text>\n";

        double legend_x = kLeft + w;
        for (auto it = panel.series.rbegin(); it != panel.series.rend(); ++it) {
            legend_x -= 8.0 * static_cast<double>(it->label.size()) + 30.0;
            out << "<text x=\"" << legend_x << "\" y=\"" << top - 10 << "\" fill=\"" << it->color << "\">"
                << it->label << "</text>\n";
        }
        for (const auto& s : panel.series) {
            out << "<polyline fill=\"none\" stroke=\"" << s.color << "\" stroke-width=\"1.2\" points=\"";
            for (std::size_t i = 0; i < s.y.size() && i < t.size(); ++i)
                out << px(t[i]) << ',' << py(s.y[i]) << ' ';
            out << "\"/>\n";
        }
    }
    out << "</svg>\n";
    close_out(out, path);
}

}  // namespace

std::vector<fs::path> write_plots(const SimTrace& trace, const fs::path& dir) {
    std::vector<double> t, beta, beta_ref, beta_est, r, r_ref, r_lim, err, mean;
    for (const auto& s : trace.samples) {
        t.push_back(s.t);
        beta.push_back(rad_to_deg(s.beta));
        beta_ref.push_back(rad_to_deg(s.beta_ref));
        beta_est.push_back(rad_to_deg(s.beta_est));
        r.push_back(s.yaw_rate);
        r_ref.push_back(s.yaw_rate_ref);
        r_lim.push_back(std::copysign(s.yaw_rate_limit, s.yaw_rate_ref));
        err.push_back(s.track_error);
        mean.push_back(s.track_error_mean);
    }
    const fs::path beta_svg = dir / "beta.svg";
    const fs::path yaw_svg = dir / "yaw_rate.svg";
    const fs::path err_svg = dir / "track_error.svg";
    write_svg(beta_svg, t,
              {{"slip angle [deg]", {{"beta", "#c0392b", beta}, {"estimate", "#2980b9", beta_est},
                                     {"reference", "#7f8c8d", beta_ref}}}});
    write_svg(yaw_svg, t,
              {{"yaw rate [rad/s]", {{"yaw rate", "#c0392b", r}, {"reference", "#2980b9", r_ref},
                                     {"limit", "#7f8c8d", r_lim}}}});
    write_svg(err_svg, t,
              {{"mean trajectory error [m]", {{"mean", "#2980b9", mean}}},
               {"instantaneous trajectory error [m]", {{"instantaneous", "#c0392b", err}}}});
    return {beta_svg, yaw_svg, err_svg};
}

ExportSummary export_run(const RunResult& result, const RunMetrics& metrics, const fs::path& dir, bool plots) {
    std::error_code ec;
    fs::create_directories(dir, ec);
    if (ec)
        throw IoError("cannot create " + dir.string() + ": " + ec.message());

    ExportSummary summary;
    summary.csv = dir / "trace.csv";
    {
        auto out = open_out(summary.csv);
        write_trace_csv(out, result.trace);
        close_out(out, summary.csv);
    }

    summary.metrics = dir / "metrics.json";
    {
        auto doc = metrics_to_json(metrics);
        doc["samples"] = result.trace.samples.size();
        doc["sample_period_s"] = result.trace.period;
        doc["end_of_course"] = result.end_of_course;
        doc["stopped"] = result.stopped;
        if (result.fault)
            doc["fault"] = {{"time_s", result.fault->time}, {"message", result.fault->message}};
        else
            doc["fault"] = nullptr;
        auto out = open_out(summary.metrics);
        out << doc.dump(2) << '\n';
        close_out(out, summary.metrics);
    }

    if (plots)
        summary.plots = write_plots(result.trace, dir);
    return summary;
}

}  // namespace iesp::sim
