#include "tdcosim/cosim.hpp"

#include "tdcosim/error.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <string>

namespace tdcosim {

int timestep_ratio(double t_t, double t_d)
{
    if (!(t_d > 0.0) || !(t_t >= t_d))
        throw Error(Errc::config, "need t_t >= t_d > 0");
    const double r = t_t / t_d;
    const double rounded = std::round(r);
    if (std::abs(r - rounded) > 1e-9 * rounded)
        throw Error(Errc::config, "t_t / t_d = " + std::to_string(r) + " is not an integer");
    return static_cast<int>(rounded);
}

long long coarse_steps(const ScenarioConfig& cfg)
{
    return static_cast<long long>(std::llround(cfg.duration / cfg.t_t));
}

void validate(const ScenarioConfig& cfg)
{
    (void)timestep_ratio(cfg.t_t, cfg.t_d);
    if (!(cfg.duration > 0.0)) throw Error(Errc::config, "duration must be positive");
    if (coarse_steps(cfg) < 1) throw Error(Errc::config, "duration shorter than one coarse step");
    if (!(cfg.lpf_alpha > 0.0 && cfg.lpf_alpha <= 1.0)) throw Error(Errc::config, "lpf_alpha must lie in (0, 1]");
    if (std::abs(cfg.pll.f0 - cfg.transmission.f0) > 0.0 || std::abs(cfg.distribution.f0 - cfg.transmission.f0) > 0.0)
        throw Error(Errc::config, "nominal frequency must agree across pll, transmission and distribution");
    validate(cfg.distribution);
}

ScenarioConfig ground_truth_config(const ScenarioConfig& cfg)
{
    ScenarioConfig gt = cfg;
    gt.name = cfg.name + "-ground-truth";
    gt.t_t = cfg.t_d;
    gt.method = Method::Hold;
    gt.detector.reset();
    return gt;
}

BridgeOptions bridge_options(const ScenarioConfig& cfg)
{
    BridgeOptions b;
    b.extrapolation.method = cfg.method;
    b.extrapolation.lpf_alpha = cfg.lpf_alpha;
    b.extrapolation.strict_refill = cfg.strict_refill;
    b.detector = cfg.detector;
    if (b.detector && b.detector->scheme == DetectorScheme::MovingWindow) {
        // The configured capacity is counted at the 10 ms reference step, so
        // the window keeps its length in seconds when T_T changes.
        const double span = static_cast<double>(b.detector->window_capacity) * kWindowReferenceStep;
        b.detector->window_capacity = static_cast<std::size_t>(std::max(1LL, std::llround(span / cfg.t_t)));
    }
    b.rate_limit = cfg.rate_limit_enabled;
    b.ratio = timestep_ratio(cfg.t_t, cfg.t_d);
    return b;
}

Feedback initial_feedback(const ScenarioConfig& cfg)
{
    return feeder_step(cfg.distribution, cfg.transmission.v_nominal, cfg.distribution.f0, 0.0).feedback;
}

void FineSeries::reserve(std::size_t n)
{
    for (auto* v : {&t, &v_hat, &theta_hat, &f_pcc, &p_dpv, &p_pfr, &p_sfr, &p_sfr_request, &p_fb, &q_fb, &p_avail})
        v->reserve(n);
    plant_p_dpv.reserve(n * static_cast<std::size_t>(n_plants));
}

TransmissionNode::TransmissionNode(const ScenarioConfig& cfg)
    : tx_(cfg.transmission, cfg.events, cfg.t_t, initial_feedback(cfg), cfg.seed)
{
}

TxToDx TransmissionNode::record(const TxOutput& out, double p_fb, RunTrace* trace)
{
    if (trace) {
        trace->coarse.push_back({out.sample.t, out.sample.v_mag, out.sample.theta, out.f_sys, out.ace,
                                 out.p_sfr_total_mw, out.p_sfr_request_kw, p_fb});
    }
    return {out.sample.t, out.sample.v_mag, out.sample.theta, out.p_sfr_request_kw};
}

TxToDx TransmissionNode::start(RunTrace* trace)
{
    const TxOutput out = tx_.initial();
    return record(out, std::nan(""), trace);
}

TxToDx TransmissionNode::advance(const Feedback& fb, RunTrace* trace)
{
    const TxOutput out = tx_.step(fb);
    return record(out, fb.p_kw, trace);
}

DistributionNode::DistributionNode(const ScenarioConfig& cfg)
    : feeder_(cfg.distribution),
      ratio_(timestep_ratio(cfg.t_t, cfg.t_d)),
      t_d_(cfg.t_d),
      omega0_(2.0 * std::numbers::pi * cfg.pll.f0),
      bridge_(bridge_options(cfg)),
      pll_(cfg.pll)
{
}

Feedback DistributionNode::process(const TxToDx& msg, RunTrace* trace)
{
    const ExchangeReport rep = bridge_.on_exchange({msg.t, msg.v_mag, msg.theta});
    if (!started_) {
        // Start the PLL locked onto the first boundary angle.
        pll_ = SrfPll(pll_.options(), bridge_.held().theta);
        started_ = true;
    }
    if (trace) {
        if (rep.has_verdicts) {
            trace->verdicts.push_back({msg.t, 0, rep.v.delta, rep.v.threshold, rep.v.is_outlier, rep.v.warmup, rep.reset});
            trace->verdicts.push_back(
                {msg.t, 1, rep.theta.delta, rep.theta.threshold, rep.theta.is_outlier, rep.theta.warmup, rep.reset});
        }
        if (rep.reset) ++trace->resets;
    }

    for (int j = 0; j < ratio_; ++j) {
        const double tau = msg.t + static_cast<double>(j) * t_d_;
        const BridgeOutput b = bridge_.fine_step(tau);
        const double f_pcc = pll_.step(synthesize_abc(b.v_mag, b.theta, omega0_, tau), t_d_);
        feeder_step(feeder_, b.v_mag, f_pcc, msg.p_sfr_request_kw, step_out_);
        if (trace) {
            FineSeries& fs = trace->fine;
            fs.t.push_back(tau);
            fs.v_hat.push_back(b.v_mag);
            fs.theta_hat.push_back(b.theta);
            fs.f_pcc.push_back(f_pcc);
            fs.p_dpv.push_back(step_out_.p_dpv);
            fs.p_pfr.push_back(step_out_.p_pfr);
            fs.p_sfr.push_back(step_out_.p_sfr_delivered);
            fs.p_sfr_request.push_back(step_out_.p_sfr_request);
            fs.p_fb.push_back(step_out_.feedback.p_kw);
            fs.q_fb.push_back(step_out_.feedback.q_kvar);
            fs.p_avail.push_back(step_out_.feedback.p_avail_kw);
            for (const auto& p : step_out_.plants) fs.plant_p_dpv.push_back(p.p_dpv);
        }
    }
    return step_out_.feedback;
}

RunTrace run(const ScenarioConfig& cfg)
{
    validate(cfg);
    const long long steps = coarse_steps(cfg);
    const int ratio = timestep_ratio(cfg.t_t, cfg.t_d);

    RunTrace trace;
    trace.fine.n_plants = static_cast<int>(cfg.distribution.plants.size());
    trace.fine.reserve(static_cast<std::size_t>(steps) * static_cast<std::size_t>(ratio));
    trace.coarse.reserve(static_cast<std::size_t>(steps));

    TransmissionNode tx(cfg);
    DistributionNode dx(cfg);
    try {
        TxToDx msg = tx.start(&trace);
        for (long long k = 0;; ++k) {
            const Feedback fb = dx.process(msg, &trace);
            if (k + 1 >= steps) break;
            msg = tx.advance(fb, &trace);
        }
    } catch (const Error& e) {
        if (e.code() != Errc::collapse) throw;
        trace.ok = false;
        trace.error = e.what();
    }
    return trace;
}

} // namespace tdcosim
