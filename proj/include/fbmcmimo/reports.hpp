// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include "fbmcmimo/experiments.hpp"

namespace fbmcmimo {

struct ReportBundle {
    std::filesystem::path directory;
    std::vector<std::filesystem::path> files;
};

// Emits summary.json plus one tabular file per curve. Curve files carry a
// header row and 17-significant-digit decimals, newline-terminated; writes
// go through a temp file + rename so a failure cannot leave a truncated
// table behind. File bytes are a pure function of (report, version string).
ReportBundle write_reports(const SinrReport& report, const std::filesystem::path& out_dir,
                           bool plot = false);
ReportBundle write_reports(const TrackingReport& report, const std::filesystem::path& out_dir,
                           bool plot = false);
// Sweep bundles nest one subdirectory per axis point; failed points are
// recorded in summary.json instead of aborting the sweep.
ReportBundle write_reports(const SweepReport& report, const std::filesystem::path& out_dir,
                           bool plot = false);

struct CsvTable {
    std::vector<std::string> header;
    std::vector<std::vector<std::string>> rows;
};

CsvTable read_csv(const std::filesystem::path& path);

}  // namespace fbmcmimo
