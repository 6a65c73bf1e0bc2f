#pragma once

#include <array>
#include <cstddef>
#include <string_view>

namespace tdcosim {

/// Timestamped boundary quantities exchanged at the T&D interface.
/// `theta` is kept unwrapped once it has been ingested on the distribution side.
struct BoundarySample {
    double t = 0.0;      // s, coarse-grid timestamp
    double v_mag = 1.0;  // pu
    double theta = 0.0;  // rad
};

enum class Method { Hold, Lpf, Linear, Quadratic };

std::string_view to_string(Method m) noexcept;
Method parse_method(std::string_view name);

/// Wraps an angle into [-pi, pi].
double wrap_angle(double theta) noexcept;

/// Representative of `new_wrapped` (mod 2pi) nearest to `prev_unwrapped`.
double unwrap_angle(double prev_unwrapped, double new_wrapped) noexcept;

/// Quadratic Lagrange weights for predicting at `t_tau` from nodes ordered
/// oldest to newest. Result element m multiplies the value at `nodes[m]`.
/// Throws Errc::degenerate_nodes when two nodes coincide.
std::array<double, 3> lagrange_weights(double t_tau, const std::array<double, 3>& nodes);

struct ExtrapolatorOptions {
    Method method = Method::Quadratic;
    double lpf_alpha = 0.01;
    /// Hold until three samples are buffered again after a reset. When false
    /// the ladder is 1 sample -> Hold, 2 -> Linear, 3 -> configured method.
    bool strict_refill = true;
};

/// Rate-transition predictor for one scalar boundary stream.
///
/// Keeps the three most recent coarse samples plus the low-pass filter memory.
/// The buffer is emptied by `reset()` (on detected discontinuities) while the
/// filter memory survives, so an Lpf stream keeps filtering through events.
class Extrapolator {
public:
    struct Node {
        double t;
        double y;
    };

    explicit Extrapolator(ExtrapolatorOptions opts = {});

    /// Appends a sample; evicts the oldest beyond three.
    /// Throws Errc::monotonicity unless `t` is newer than the newest buffered node.
    void push(double t, double y);

    /// Clears the buffer and refill counter, keeps the filter memory.
    void reset() noexcept;

    /// Predicted value at `t_tau`. `held_input` is the coarse value currently
    /// held by the fine-rate consumer; only Lpf reads it.
    /// Throws Errc::not_primed when a buffer-based method has no samples.
    double predict(double t_tau, double held_input);

    /// Method actually used for the next prediction given the buffer fill.
    Method effective_method() const noexcept;

    std::size_t size() const noexcept { return size_; }
    int refill_count() const noexcept { return refill_count_; }
    double lpf_prev() const noexcept { return lpf_prev_; }
    void set_lpf_prev(double v) noexcept
    {
        lpf_prev_ = v;
        lpf_primed_ = true;
    }
    const ExtrapolatorOptions& options() const noexcept { return opts_; }

    /// Buffered nodes, oldest first.
    const Node& node(std::size_t i) const { return buf_[i]; }

private:
    ExtrapolatorOptions opts_;
    std::array<Node, 3> buf_{};
    std::size_t size_ = 0;
    int refill_count_ = 0;
    double lpf_prev_ = 0.0;
    bool lpf_primed_ = false;
};

} // namespace tdcosim
