// SPDX-License-Identifier: Apache-2.0
#include "fbmcmimo/reports.hpp"

#include <cstdio>
#include <fstream>
#include <sstream>

#include <json.hpp>

#include "fbmcmimo/errors.hpp"
#include "fbmcmimo/scenario_io.hpp"
#include "fbmcmimo/version.hpp"

namespace fbmcmimo {

namespace {

std::string fmt(double v) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

// temp-then-rename so interrupted runs cannot leave truncated tables
void write_file_atomic(const std::filesystem::path& path, const std::string& contents) {
    const std::filesystem::path tmp = path.string() + ".tmp";
    {
        std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
        if (!out) throw std::runtime_error("cannot write to '" + tmp.string() + "'");
        out << contents;
        if (!out.good()) {
            out.close();
            std::filesystem::remove(tmp);
            throw std::runtime_error("short write to '" + tmp.string() + "'");
        }
    }
    std::filesystem::rename(tmp, path);
}

// minimal line plot; deterministic text output
std::string svg_line_plot(const std::vector<double>& xs, const std::vector<double>& ys,
                          const std::string& x_label, const std::string& y_label) {
    const int width = 640, height = 440, margin = 56;
    double xmin = xs.front(), xmax = xs.back();
    double ymin = ys.front(), ymax = ys.front();
    for (double y : ys) {
        ymin = std::min(ymin, y);
        ymax = std::max(ymax, y);
    }
    if (xmax == xmin) xmax = xmin + 1.0;
    if (ymax == ymin) ymax = ymin + 1.0;
    const double pad = 0.05 * (ymax - ymin);
    ymin -= pad;
    ymax += pad;

    auto px = [&](double x) {
        return margin + (x - xmin) / (xmax - xmin) * (width - 2 * margin);
    };
    auto py = [&](double y) {
        return height - margin - (y - ymin) / (ymax - ymin) * (height - 2 * margin);
    };

    std::ostringstream svg;
    svg << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << width << "\" height=\""
        << height << "\" viewBox=\"0 0 " << width << " " << height << "\">\n";
    svg << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
    svg << "<line x1=\"" << margin << "\" y1=\"" << height - margin << "\" x2=\""
        << width - margin << "\" y2=\"" << height - margin << "\" stroke=\"black\"/>\n";
    svg << "<line x1=\"" << margin << "\" y1=\"" << margin << "\" x2=\"" << margin << "\" y2=\""
        << height - margin << "\" stroke=\"black\"/>\n";
    svg << "<polyline fill=\"none\" stroke=\"#1f77b4\" stroke-width=\"1.5\" points=\"";
    for (std::size_t i = 0; i < xs.size(); ++i) {
        if (i) svg << " ";
        svg << fmt(px(xs[i])) << "," << fmt(py(ys[i]));
    }
    svg << "\"/>\n";
    svg << "<text x=\"" << width / 2 << "\" y=\"" << height - 12
        << "\" text-anchor=\"middle\" font-size=\"13\">" << x_label << "</text>\n";
    svg << "<text x=\"14\" y=\"" << height / 2 << "\" font-size=\"13\" text-anchor=\"middle\" "
        << "transform=\"rotate(-90 14 " << height / 2 << ")\">" << y_label << "</text>\n";
    svg << "<text x=\"" << margin << "\" y=\"" << margin - 8 << "\" font-size=\"11\">ymax="
        << fmt(ymax) << "</text>\n";
    svg << "<text x=\"" << margin << "\" y=\"" << height - margin + 26 << "\" font-size=\"11\">"
        << "x: " << fmt(xmin) << " .. " << fmt(xmax) << "</text>\n";
    svg << "</svg>\n";
    return svg.str();
}

void emit_curve(const std::filesystem::path& dir, const std::string& name,
                const std::string& index_column, const std::vector<double>& values,
                const std::string& combiner, const std::string& trial_stat,
                const std::vector<std::pair<std::string, double>>& extra_columns, bool plot,
                ReportBundle& bundle) {
    std::ostringstream csv;
    csv << index_column << ",value_db,combiner,trial_stat";
    for (const auto& [col, _] : extra_columns) csv << "," << col;
    csv << "\n";
    for (std::size_t i = 0; i < values.size(); ++i) {
        csv << i << "," << fmt(values[i]) << "," << combiner << "," << trial_stat;
        for (const auto& [_, v] : extra_columns) csv << "," << fmt(v);
        csv << "\n";
    }
    const std::filesystem::path path = dir / (name + ".csv");
    write_file_atomic(path, csv.str());
    bundle.files.push_back(path);

    if (plot) {
        std::vector<double> xs(values.size());
        for (std::size_t i = 0; i < xs.size(); ++i) xs[i] = static_cast<double>(i);
        const std::filesystem::path svg_path = dir / (name + ".svg");
        write_file_atomic(svg_path, svg_line_plot(xs, values, index_column, "value_db"));
        bundle.files.push_back(svg_path);
    }
}

nlohmann::ordered_json scenario_json(const Scenario& s) {
    nlohmann::ordered_json j;
    j["experiment"] =
        s.experiment == ExperimentKind::self_equalization ? "self_equalization" : "blind_tracking";
    j["fbmc"] = {{"L", s.fbmc.num_subcarriers},
                 {"overlap", s.fbmc.overlap_factor},
                 {"symbols", s.fbmc.num_symbols},
                 {"pam_order", s.fbmc.pam_order}};
    j["channel"] = {{"delays", s.pdp.tap_delays}, {"powers", s.pdp.tap_powers}};
    j["array"] = {{"M", s.num_antennas}, {"K", s.num_users}};
    j["run"] = {{"snr_in_db", s.snr_in_db}, {"trials", s.trials}, {"seed", s.seed}};
    if (s.contamination) {
        j["contamination"] = {{"cells", s.contamination->num_cells},
                              {"cross_gains", s.contamination->cross_gains},
                              {"shared_pilots", s.contamination->shared_pilots}};
    }
    if (s.blind) {
        j["blind"] = {{"mu", s.blind->step_size},
                      {"iterations", s.blind->iterations},
                      {"block_size", s.blind->block_size},
                      {"dispersion", s.blind->dispersion_constant}};
    }
    return j;
}

void write_summary(const std::filesystem::path& dir, nlohmann::ordered_json j,
                   ReportBundle& bundle) {
    const std::filesystem::path path = dir / "summary.json";
    write_file_atomic(path, j.dump(2) + "\n");
    bundle.files.push_back(path);
}

void ensure_dir(const std::filesystem::path& dir) {
    std::error_code ec;
    std::filesystem::create_directories(dir, ec);
    if (ec) throw std::runtime_error("cannot create output directory '" + dir.string() + "'");
}

double mean_of(const std::vector<double>& v) {
    double acc = 0.0;
    for (double x : v) acc += x;
    return v.empty() ? 0.0 : acc / v.size();
}

}  // namespace

ReportBundle write_reports(const SinrReport& report, const std::filesystem::path& out_dir,
                           bool plot) {
    ensure_dir(out_dir);
    ReportBundle bundle;
    bundle.directory = out_dir;

    const std::vector<double> target(report.ensemble_mean_db[0].size(), report.target_db);
    emit_curve(out_dir, "curve_sinr_mf_mean", "subcarrier_index",
               report.ensemble_mean_db[SinrReport::kMf], "mf", "ensemble_mean", {}, plot, bundle);
    emit_curve(out_dir, "curve_sinr_mf_var", "subcarrier_index",
               report.ensemble_var_db[SinrReport::kMf], "mf", "ensemble_var", {}, plot, bundle);
    emit_curve(out_dir, "curve_sinr_mmse_mean", "subcarrier_index",
               report.ensemble_mean_db[SinrReport::kMmse], "mmse", "ensemble_mean", {}, plot,
               bundle);
    emit_curve(out_dir, "curve_sinr_mmse_var", "subcarrier_index",
               report.ensemble_var_db[SinrReport::kMmse], "mmse", "ensemble_var", {}, plot,
               bundle);
    emit_curve(out_dir, "curve_sinr_target", "subcarrier_index", target, "target", "constant", {},
               plot, bundle);

    nlohmann::ordered_json j;
    j["version"] = kVersion;
    j["scenario"] = scenario_json(report.scenario);
    j["canonical_scenario"] = canonical_scenario_text(report.scenario);
    j["target_sinr_db"] = report.target_db;
    j["aggregate"] = {
        {"mf_mean_db", mean_of(report.ensemble_mean_db[SinrReport::kMf])},
        {"mmse_mean_db", mean_of(report.ensemble_mean_db[SinrReport::kMmse])},
    };
    j["failures"] = nlohmann::ordered_json::array();
    write_summary(out_dir, std::move(j), bundle);
    return bundle;
}

ReportBundle write_reports(const TrackingReport& report, const std::filesystem::path& out_dir,
                           bool plot) {
    ensure_dir(out_dir);
    ReportBundle bundle;
    bundle.directory = out_dir;

    emit_curve(out_dir, "curve_tracking_median", "iteration", report.median_trace_db, "blind",
               "median",
               {{"mf_noisy_db", report.median_mf_noisy_db},
                {"mf_clean_db", report.median_mf_clean_db},
                {"mmse_clean_db", report.median_mmse_clean_db}},
               plot, bundle);

    nlohmann::ordered_json j;
    j["version"] = kVersion;
    j["scenario"] = scenario_json(report.scenario);
    j["canonical_scenario"] = canonical_scenario_text(report.scenario);
    j["baselines"] = {{"mf_noisy_db", report.median_mf_noisy_db},
                      {"mf_clean_db", report.median_mf_clean_db},
                      {"mmse_clean_db", report.median_mmse_clean_db}};
    j["final_median_sinr_db"] =
        report.median_trace_db.empty() ? 0.0 : report.median_trace_db.back();
    j["failures"] = nlohmann::ordered_json::array();
    write_summary(out_dir, std::move(j), bundle);
    return bundle;
}

ReportBundle write_reports(const SweepReport& report, const std::filesystem::path& out_dir,
                           bool plot) {
    ensure_dir(out_dir);
    ReportBundle bundle;
    bundle.directory = out_dir;

    nlohmann::ordered_json j;
    j["version"] = kVersion;
    j["scenario"] = scenario_json(report.base);
    j["axis"] = to_string(report.axis);
    nlohmann::ordered_json points = nlohmann::ordered_json::array();
    nlohmann::ordered_json failures = nlohmann::ordered_json::array();

    for (const SweepPoint& point : report.points) {
        const std::string label = to_string(report.axis) + "_" + fmt(point.value);
        if (point.failed()) {
            failures.push_back({{"point", label}, {"error", point.error}});
            points.push_back({{"value", point.value}, {"status", "failed"}});
            continue;
        }
        const std::filesystem::path sub = out_dir / ("point_" + label);
        ReportBundle child;
        if (const SinrReport* r = std::get_if<SinrReport>(&point.report)) {
            child = write_reports(*r, sub, plot);
        } else if (const TrackingReport* r = std::get_if<TrackingReport>(&point.report)) {
            child = write_reports(*r, sub, plot);
        }
        for (const auto& f : child.files) bundle.files.push_back(f);
        points.push_back({{"value", point.value}, {"status", "ok"}, {"dir", sub.filename().string()}});
    }
    j["points"] = points;
    j["failures"] = failures;
    write_summary(out_dir, std::move(j), bundle);
    return bundle;
}

CsvTable read_csv(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open '" + path.string() + "'");
    CsvTable table;
    std::string line;
    bool first = true;
    while (std::getline(in, line)) {
        std::vector<std::string> cells;
        std::stringstream ss(line);
        std::string cell;
        while (std::getline(ss, cell, ',')) cells.push_back(cell);
        if (first) {
            table.header = std::move(cells);
            first = false;
        } else if (!cells.empty()) {
            table.rows.push_back(std::move(cells));
        }
    }
    return table;
}

}  // namespace fbmcmimo
