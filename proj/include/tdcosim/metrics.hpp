#pragma once

#include "tdcosim/cosim.hpp"

#include <span>
#include <vector>

namespace tdcosim {

/// Mean absolute percentage error in percent. Throws Errc::zero_actual if any
/// actual value is zero and Errc::insufficient_data on empty or unequal input.
double mape(std::span<const double> actual, std::span<const double> predicted);

/// Mean absolute error over max |actual|, as a fraction. Throws
/// Errc::undefined_normalization for an all-zero actual series.
double nmae(std::span<const double> actual, std::span<const double> predicted);

struct TraceErrors {
    double mape_v = 0.0;      // %
    double mape_theta = 0.0;  // %
    double mape_f = 0.0;      // %, PLL frequency
    double nmae_p_dpv = 0.0;  // fraction, total DPV output
    double nmae_p_fb = 0.0;   // fraction, feeder-head active power
};

/// Fine-series errors of `run` against `truth`; both must cover the same grid.
TraceErrors trace_errors(const RunTrace& truth, const RunTrace& run);

/// nMAE of delivered SFR against the request within one run. Zero when both
/// series are identically zero.
double sfr_delivery_nmae(const RunTrace& run);

struct DetectorStats {
    long long exchanges = 0;       // exchanges with verdicts
    long long outliers_v = 0;
    long long outliers_theta = 0;
    long long resets = 0;
    double stability = 1.0;        // 1 - resets / exchanges
    std::vector<double> reset_times;
};

DetectorStats detector_stats(const RunTrace& run);

} // namespace tdcosim
