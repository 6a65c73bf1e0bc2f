#pragma once

#include "tdcosim/metrics.hpp"

#include <json.hpp>

#include <filesystem>
#include <optional>
#include <string>
#include <vector>

namespace tdcosim {

// CSV writers: 12 significant digits, LF line endings, angles in degrees.
void write_fine_csv(const std::filesystem::path& path, const FineSeries& fine);
void write_coarse_csv(const std::filesystem::path& path, const std::vector<CoarseRecord>& coarse);
void write_verdicts_csv(const std::filesystem::path& path, const std::vector<VerdictRecord>& verdicts);

/// Writes fine.csv, coarse.csv and verdicts.csv into `dir` (created if
/// needed), skipping series the trace does not hold.
void write_trace(const std::filesystem::path& dir, const RunTrace& trace);

struct RunSummary {
    std::string scenario;
    std::string method;
    std::string detector;
    int ratio = 1;
    bool ok = true;
    std::string error;
    std::optional<TraceErrors> errors;  // vs ground truth, when computed
    std::optional<double> sfr_nmae;
    DetectorStats detection;
    double wall_seconds = 0.0;
};

RunSummary summarize(const ScenarioConfig& cfg, const RunTrace& run, const RunTrace* truth, double wall_seconds);

nlohmann::json to_json(const RunSummary& s);
std::string to_text(const RunSummary& s);

/// summary.txt and summary.json.
void write_summary(const std::filesystem::path& dir, const RunSummary& s);

std::string detector_label(const std::optional<DetectorOptions>& d);

struct CompareRow {
    std::string method;
    std::string detector;
    int ratio = 1;
    TraceErrors errors;
    DetectorStats detection;
    double improvement_f = 0.0;    // % reduction of PLL-frequency MAPE vs hold
    double improvement_dpv = 0.0;  // % reduction of DPV-output nMAE vs hold
};

/// Fixed-width ranking table, best PLL-frequency MAPE first.
std::string format_compare_table(std::vector<CompareRow> rows);
nlohmann::json to_json(const std::vector<CompareRow>& rows);

} // namespace tdcosim
