#pragma once

#include <cstddef>
#include <deque>
#include <span>
#include <string_view>

namespace tdcosim {

enum class DetectorScheme { StaticNormal, MovingWindow, EwmaRtta };

std::string_view to_string(DetectorScheme s) noexcept;
DetectorScheme parse_scheme(std::string_view name);

struct AnomalyVerdict {
    bool is_outlier = false;
    double delta = 0.0;      // the increment that was tested
    double threshold = 0.0;  // threshold it was tested against
    bool warmup = false;     // verdict suppressed by cold-start warm-up
};

struct DetectorOptions {
    DetectorScheme scheme = DetectorScheme::EwmaRtta;
    double alpha_cap = 0.01;
    double c = 3.0;
    double epsilon = 1e-6;
    std::size_t window_capacity = 100;
    int warmup = 10;
    /// Use the signed mean (mu + 3 sigma) instead of |mu| + 3 sigma.
    bool signed_mean = false;
};

/// Threshold at three standard deviations around the mean of increments.
/// The mean enters by magnitude so the band stays symmetric about zero and
/// still contains a drifting stream (see README, "Detector threshold").
double three_sigma_threshold(double mu, double sigma2, bool signed_mean = false) noexcept;

/// Whole-sequence threshold with population variance.
/// Throws Errc::insufficient_data on an empty sequence.
double static_threshold(std::span<const double> deltas);

/// Fraction of non-outlier verdicts. Throws Errc::insufficient_data when empty.
double stability_metric(std::span<const AnomalyVerdict> verdicts);

/// Clamps `candidate` into [prev - max_step, prev + max_step].
double rate_limit(double prev_output, double candidate, double max_step) noexcept;

/// Streaming outlier detector for one scalar increment stream.
///
/// MovingWindow and StaticNormal (expanding window) fold the new increment
/// into their statistics before testing it. EwmaRtta tests against the
/// threshold from the previous step, so a spike cannot raise its own bar.
class ThresholdDetector {
public:
    explicit ThresholdDetector(DetectorOptions opts = {});

    AnomalyVerdict update(double delta);

    double mu() const noexcept { return mu_; }
    double sigma2() const noexcept { return sigma2_; }
    double threshold() const noexcept { return th_; }
    double last_alpha() const noexcept { return last_alpha_; }
    int warmup_remaining() const noexcept { return warmup_remaining_; }
    std::size_t count() const noexcept { return count_; }
    const std::deque<double>& window() const noexcept { return window_; }
    const DetectorOptions& options() const noexcept { return opts_; }

    /// Overwrites the running EWMA statistics (used by tests to start from a
    /// known state).
    void set_state(double mu, double sigma2) noexcept;

private:
    AnomalyVerdict update_ewma(double delta);
    AnomalyVerdict update_window(double delta);
    AnomalyVerdict update_static(double delta);
    AnomalyVerdict verdict(double delta, double threshold);

    DetectorOptions opts_;
    double mu_ = 0.0;
    double sigma2_ = 0.0;
    double th_ = 0.0;
    double last_alpha_ = 0.0;
    int warmup_remaining_;
    std::size_t count_ = 0;
    std::deque<double> window_;
    double window_sum_ = 0.0;
    double m2_ = 0.0;  // Welford accumulator for the static scheme
};

} // namespace tdcosim
