#pragma once

#include "tdcosim/anomaly.hpp"
#include "tdcosim/extrapolation.hpp"

#include <optional>

namespace tdcosim {

struct BridgeOptions {
    ExtrapolatorOptions extrapolation;
    std::optional<DetectorOptions> detector;  // nullopt: never reset
    bool rate_limit = true;
    int ratio = 100;  // fine steps per coarse interval
};

struct ExchangeReport {
    bool has_verdicts = false;  // false on the very first sample
    AnomalyVerdict v;
    AnomalyVerdict theta;
    bool reset = false;
};

struct BridgeOutput {
    double v_mag;
    double theta;
};

/// Distribution-side boundary adapter.
///
/// On each coarse exchange it unwraps the angle, tests both increments and
/// either resets both buffers or pushes the sample. Between exchanges it
/// predicts (v, theta) at fine-step resolution. While a buffer refills, the
/// output may move at most TH per coarse interval when rate limiting is on.
/// With ratio 1 it is a pure pass-through apart from Lpf smoothing.
class BoundaryBridge {
public:
    explicit BoundaryBridge(BridgeOptions opts);

    ExchangeReport on_exchange(const BoundarySample& sample);
    BridgeOutput fine_step(double t_tau);

    /// Last exchanged sample with unwrapped angle.
    const BoundarySample& held() const noexcept { return held_; }
    const Extrapolator& v_stream() const noexcept { return ev_; }
    const Extrapolator& theta_stream() const noexcept { return eth_; }
    const std::optional<ThresholdDetector>& v_detector() const noexcept { return dv_; }
    const std::optional<ThresholdDetector>& theta_detector() const noexcept { return dth_; }
    bool rate_limit_active() const noexcept;

private:
    double stream_output(Extrapolator& e, double t_tau, double held_value) const;

    BridgeOptions opts_;
    Extrapolator ev_;
    Extrapolator eth_;
    std::optional<ThresholdDetector> dv_;
    std::optional<ThresholdDetector> dth_;
    BoundarySample held_{};
    bool primed_ = false;
    bool after_reset_ = false;
    double out_v_ = 0.0;
    double out_theta_ = 0.0;
};

} // namespace tdcosim
