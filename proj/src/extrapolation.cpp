#include "tdcosim/extrapolation.hpp"

#include "tdcosim/error.hpp"

#include <cmath>
#include <numbers>
#include <string>

namespace tdcosim {

namespace {
constexpr double kTwoPi = 2.0 * std::numbers::pi;
}

std::string_view to_string(Method m) noexcept
{
    switch (m) {
    case Method::Hold: return "hold";
    case Method::Lpf: return "lpf";
    case Method::Linear: return "linear";
    case Method::Quadratic: return "quadratic";
    }
    return "?";
}

Method parse_method(std::string_view name)
{
    if (name == "hold" || name == "zoh") return Method::Hold;
    if (name == "lpf") return Method::Lpf;
    if (name == "linear") return Method::Linear;
    if (name == "quadratic") return Method::Quadratic;
    throw Error(Errc::config, "unknown extrapolation method '" + std::string(name) + "'");
}

double wrap_angle(double theta) noexcept
{
    double w = std::remainder(theta, kTwoPi);
    // remainder() maps odd multiples of pi to -pi or +pi; both are in range.
    return w;
}

double unwrap_angle(double prev_unwrapped, double new_wrapped) noexcept
{
    const double turns = std::round((prev_unwrapped - new_wrapped) / kTwoPi);
    if (turns == 0.0) return new_wrapped;
    return new_wrapped + turns * kTwoPi;
}

std::array<double, 3> lagrange_weights(double t_tau, const std::array<double, 3>& nodes)
{
    const double t0 = nodes[0], t1 = nodes[1], t2 = nodes[2];
    if (t0 == t1 || t1 == t2 || t0 == t2)
        throw Error(Errc::degenerate_nodes, "lagrange nodes must be pairwise distinct");

    // Work on the time axis scaled to the oldest spacing: nodes 0, 1, s2.
    // Decimal timestamps on a regular grid then give exact weights, and the
    // node evaluations give exact indicator weights.
    const double h = t1 - t0;
    const double s = (t_tau - t0) / h;
    const double s2 = (t2 - t0) / h;
    return {
        ((s - 1.0) * (s - s2)) / s2,
        (s * (s - s2)) / (1.0 - s2),
        (s * (s - 1.0)) / (s2 * (s2 - 1.0)),
    };
}

Extrapolator::Extrapolator(ExtrapolatorOptions opts) : opts_(opts)
{
    if (!(opts_.lpf_alpha > 0.0 && opts_.lpf_alpha <= 1.0))
        throw Error(Errc::config, "lpf_alpha must lie in (0, 1]");
}

void Extrapolator::push(double t, double y)
{
    if (size_ > 0 && !(t > buf_[size_ - 1].t))
        throw Error(Errc::monotonicity, "sample timestamp " + std::to_string(t) +
                                            " not after newest buffered " +
                                            std::to_string(buf_[size_ - 1].t));
    if (size_ == buf_.size()) {
        buf_[0] = buf_[1];
        buf_[1] = buf_[2];
        buf_[2] = {t, y};
    } else {
        buf_[size_++] = {t, y};
    }
    ++refill_count_;
}

void Extrapolator::reset() noexcept
{
    size_ = 0;
    refill_count_ = 0;
}

Method Extrapolator::effective_method() const noexcept
{
    const Method m = opts_.method;
    if (m == Method::Hold || m == Method::Lpf) return m;
    if (size_ >= 3) return m;
    if (opts_.strict_refill || size_ < 2) return Method::Hold;
    return Method::Linear;
}

double Extrapolator::predict(double t_tau, double held_input)
{
    if (opts_.method == Method::Lpf) {
        if (!lpf_primed_) set_lpf_prev(held_input);
        lpf_prev_ = opts_.lpf_alpha * held_input + (1.0 - opts_.lpf_alpha) * lpf_prev_;
        return lpf_prev_;
    }
    if (size_ == 0) throw Error(Errc::not_primed, "extrapolation buffer is empty");

    const Node& newest = buf_[size_ - 1];
    switch (effective_method()) {
    case Method::Hold:
        return newest.y;
    case Method::Linear: {
        const Node& prev = buf_[size_ - 2];
        const double slope = (newest.y - prev.y) / (newest.t - prev.t);
        return newest.y + slope * (t_tau - newest.t);
    }
    case Method::Quadratic: {
        const auto w = lagrange_weights(t_tau, {buf_[0].t, buf_[1].t, buf_[2].t});
        // Sum of weights is one, so predict as a correction to the newest
        // value: constants are reproduced exactly and y(t_t) = y_t bit-for-bit.
        return newest.y + w[0] * (buf_[0].y - newest.y) + w[1] * (buf_[1].y - newest.y);
    }
    case Method::Lpf:
        break;
    }
    return newest.y;
}

} // namespace tdcosim
