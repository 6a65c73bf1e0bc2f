#include "tdcosim/anomaly.hpp"

#include "tdcosim/error.hpp"

#include <algorithm>
#include <cmath>
#include <string>

namespace tdcosim {

std::string_view to_string(DetectorScheme s) noexcept
{
    switch (s) {
    case DetectorScheme::StaticNormal: return "static";
    case DetectorScheme::MovingWindow: return "window";
    case DetectorScheme::EwmaRtta: return "ewma";
    }
    return "?";
}

DetectorScheme parse_scheme(std::string_view name)
{
    if (name == "static" || name == "normal") return DetectorScheme::StaticNormal;
    if (name == "window" || name == "moving_window" || name == "ma") return DetectorScheme::MovingWindow;
    if (name == "ewma" || name == "ewma_rtta") return DetectorScheme::EwmaRtta;
    throw Error(Errc::config, "unknown detector scheme '" + std::string(name) + "'");
}

double three_sigma_threshold(double mu, double sigma2, bool signed_mean) noexcept
{
    const double centre = signed_mean ? mu : std::abs(mu);
    return centre + 3.0 * std::sqrt(std::max(sigma2, 0.0));
}

double static_threshold(std::span<const double> deltas)
{
    if (deltas.empty()) throw Error(Errc::insufficient_data, "static threshold needs at least one increment");
    const double n = static_cast<double>(deltas.size());
    double sum = 0.0;
    for (double d : deltas) sum += d;
    const double mu = sum / n;
    double ss = 0.0;
    for (double d : deltas) ss += (d - mu) * (d - mu);
    return three_sigma_threshold(mu, ss / n);
}

double stability_metric(std::span<const AnomalyVerdict> verdicts)
{
    if (verdicts.empty()) throw Error(Errc::insufficient_data, "stability metric needs at least one verdict");
    const auto outliers = std::count_if(verdicts.begin(), verdicts.end(),
                                        [](const AnomalyVerdict& v) { return v.is_outlier; });
    return 1.0 - static_cast<double>(outliers) / static_cast<double>(verdicts.size());
}

double rate_limit(double prev_output, double candidate, double max_step) noexcept
{
    return std::clamp(candidate, prev_output - max_step, prev_output + max_step);
}

ThresholdDetector::ThresholdDetector(DetectorOptions opts)
    : opts_(opts), warmup_remaining_(opts.warmup)
{
    if (!(opts_.alpha_cap > 0.0 && opts_.alpha_cap <= 1.0))
        throw Error(Errc::config, "alpha_cap must lie in (0, 1]");
    if (!(opts_.c > 0.0) || !(opts_.epsilon > 0.0))
        throw Error(Errc::config, "EWMA scaling constant and epsilon must be positive");
    if (opts_.window_capacity == 0) throw Error(Errc::config, "window capacity must be positive");
    if (opts_.warmup < 0) throw Error(Errc::config, "warm-up count must be non-negative");
}

void ThresholdDetector::set_state(double mu, double sigma2) noexcept
{
    mu_ = mu;
    sigma2_ = std::max(sigma2, 0.0);
    th_ = three_sigma_threshold(mu_, sigma2_, opts_.signed_mean);
}

AnomalyVerdict ThresholdDetector::update(double delta)
{
    ++count_;
    switch (opts_.scheme) {
    case DetectorScheme::EwmaRtta: return update_ewma(delta);
    case DetectorScheme::MovingWindow: return update_window(delta);
    case DetectorScheme::StaticNormal: return update_static(delta);
    }
    return {};
}

AnomalyVerdict ThresholdDetector::verdict(double delta, double threshold)
{
    AnomalyVerdict v{false, delta, threshold, false};
    if (warmup_remaining_ > 0) {
        --warmup_remaining_;
        v.warmup = true;
        return v;
    }
    v.is_outlier = std::abs(delta) > threshold;
    return v;
}

AnomalyVerdict ThresholdDetector::update_ewma(double delta)
{
    const double th_prev = th_;
    const double sigma_prev = std::sqrt(sigma2_);
    const double alpha = std::min(opts_.alpha_cap, std::abs(delta - mu_) / (opts_.c * sigma_prev + opts_.epsilon));
    last_alpha_ = alpha;
    mu_ = alpha * delta + (1.0 - alpha) * mu_;
    const double dev = delta - mu_;
    sigma2_ = alpha * dev * dev + (1.0 - alpha) * sigma2_;
    th_ = three_sigma_threshold(mu_, sigma2_, opts_.signed_mean);
    return verdict(delta, th_prev);
}

AnomalyVerdict ThresholdDetector::update_window(double delta)
{
    window_.push_back(delta);
    window_sum_ += delta;
    if (window_.size() > opts_.window_capacity) {
        window_sum_ -= window_.front();
        window_.pop_front();
    }
    // Re-summing keeps the running sum from accumulating drift.
    if (count_ % 4096 == 0) {
        window_sum_ = 0.0;
        for (double d : window_) window_sum_ += d;
    }
    const double n = static_cast<double>(window_.size());
    mu_ = window_sum_ / n;
    double ss = 0.0;
    for (double d : window_) ss += (d - mu_) * (d - mu_);
    sigma2_ = ss / n;
    th_ = three_sigma_threshold(mu_, sigma2_, opts_.signed_mean);
    return verdict(delta, th_);
}

AnomalyVerdict ThresholdDetector::update_static(double delta)
{
    const double n = static_cast<double>(count_);
    const double d0 = delta - mu_;
    mu_ += d0 / n;
    m2_ += d0 * (delta - mu_);
    sigma2_ = m2_ / n;
    th_ = three_sigma_threshold(mu_, sigma2_, opts_.signed_mean);
    return verdict(delta, th_);
}

} // namespace tdcosim
