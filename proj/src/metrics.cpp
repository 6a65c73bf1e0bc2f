#include "tdcosim/metrics.hpp"

#include "tdcosim/error.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <string>

namespace tdcosim {

namespace {

void check_pair(std::span<const double> a, std::span<const double> p)
{
    if (a.empty()) throw Error(Errc::insufficient_data, "error metric needs at least one sample");
    if (a.size() != p.size()) throw Error(Errc::insufficient_data, "actual and predicted lengths differ");
}

std::vector<double> degrees(const std::vector<double>& rad)
{
    std::vector<double> out(rad.size());
    std::transform(rad.begin(), rad.end(), out.begin(), [](double x) { return x * 180.0 / std::numbers::pi; });
    return out;
}

} // namespace

double mape(std::span<const double> actual, std::span<const double> predicted)
{
    check_pair(actual, predicted);
    double sum = 0.0;
    for (std::size_t i = 0; i < actual.size(); ++i) {
        if (actual[i] == 0.0) throw Error(Errc::zero_actual, "actual value is zero at index " + std::to_string(i));
        sum += std::abs(actual[i] - predicted[i]) / std::abs(actual[i]);
    }
    return sum / static_cast<double>(actual.size()) * 100.0;
}

double nmae(std::span<const double> actual, std::span<const double> predicted)
{
    check_pair(actual, predicted);
    double peak = 0.0;
    double sum = 0.0;
    for (std::size_t i = 0; i < actual.size(); ++i) {
        peak = std::max(peak, std::abs(actual[i]));
        sum += std::abs(actual[i] - predicted[i]);
    }
    if (peak == 0.0) throw Error(Errc::undefined_normalization, "actual series is identically zero");
    return sum / static_cast<double>(actual.size()) / peak;
}

TraceErrors trace_errors(const RunTrace& truth, const RunTrace& run)
{
    const FineSeries& a = truth.fine;
    const FineSeries& b = run.fine;
    TraceErrors e;
    e.mape_v = mape(a.v_hat, b.v_hat);
    e.mape_theta = mape(degrees(a.theta_hat), degrees(b.theta_hat));
    e.mape_f = mape(a.f_pcc, b.f_pcc);
    e.nmae_p_dpv = nmae(a.p_dpv, b.p_dpv);
    e.nmae_p_fb = nmae(a.p_fb, b.p_fb);
    return e;
}

double sfr_delivery_nmae(const RunTrace& run)
{
    const FineSeries& f = run.fine;
    if (std::equal(f.p_sfr_request.begin(), f.p_sfr_request.end(), f.p_sfr.begin(), f.p_sfr.end())) return 0.0;
    return nmae(f.p_sfr_request, f.p_sfr);
}

DetectorStats detector_stats(const RunTrace& run)
{
    DetectorStats s;
    for (const VerdictRecord& r : run.verdicts) {
        if (r.var == 0) {
            ++s.exchanges;
            if (r.reset) {
                ++s.resets;
                s.reset_times.push_back(r.t);
            }
        }
        if (r.outlier) ++(r.var == 0 ? s.outliers_v : s.outliers_theta);
    }
    if (s.exchanges > 0) s.stability = 1.0 - static_cast<double>(s.resets) / static_cast<double>(s.exchanges);
    return s;
}

} // namespace tdcosim
