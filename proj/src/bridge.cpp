#include "tdcosim/bridge.hpp"

#include "tdcosim/error.hpp"

#include <algorithm>

namespace tdcosim {

BoundaryBridge::BoundaryBridge(BridgeOptions opts)
    : opts_(opts), ev_(opts.extrapolation), eth_(opts.extrapolation)
{
    if (opts_.ratio < 1) throw Error(Errc::config, "bridge ratio must be a positive integer");
    if (opts_.detector) {
        dv_.emplace(*opts_.detector);
        dth_.emplace(*opts_.detector);
    }
}

bool BoundaryBridge::rate_limit_active() const noexcept
{
    return opts_.rate_limit && after_reset_ && opts_.ratio > 1 && ev_.refill_count() < 3;
}

ExchangeReport BoundaryBridge::on_exchange(const BoundarySample& sample)
{
    ExchangeReport report;
    if (!primed_) {
        held_ = sample;
        ev_.push(sample.t, sample.v_mag);
        eth_.push(sample.t, sample.theta);
        out_v_ = sample.v_mag;
        out_theta_ = sample.theta;
        primed_ = true;
        return report;
    }

    BoundarySample s = sample;
    s.theta = unwrap_angle(held_.theta, sample.theta);
    if (!(s.t > held_.t)) throw Error(Errc::monotonicity, "exchange timestamps must increase");

    if (dv_) {
        report.has_verdicts = true;
        report.v = dv_->update(s.v_mag - held_.v_mag);
        report.theta = dth_->update(s.theta - held_.theta);
        report.reset = report.v.is_outlier || report.theta.is_outlier;
    }
    held_ = s;
    if (report.reset) {
        after_reset_ = true;
        ev_.reset();
        eth_.reset();
    } else {
        ev_.push(s.t, s.v_mag);
        eth_.push(s.t, s.theta);
    }
    return report;
}

double BoundaryBridge::stream_output(Extrapolator& e, double t_tau, double held_value) const
{
    if (e.size() == 0 && e.options().method != Method::Lpf) return held_value;
    return e.predict(t_tau, held_value);
}

BridgeOutput BoundaryBridge::fine_step(double t_tau)
{
    if (!primed_) throw Error(Errc::not_primed, "no boundary sample exchanged yet");
    double v = stream_output(ev_, t_tau, held_.v_mag);
    double th = stream_output(eth_, t_tau, held_.theta);
    if (rate_limit_active()) {
        const double r = static_cast<double>(opts_.ratio);
        v = rate_limit(out_v_, v, dv_->threshold() / r);
        th = rate_limit(out_theta_, th, dth_->threshold() / r);
    }
    v = std::max(v, 0.0);
    out_v_ = v;
    out_theta_ = th;
    return {v, th};
}

} // namespace tdcosim
