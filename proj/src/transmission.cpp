#include "tdcosim/transmission.hpp"

#include "tdcosim/error.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <string>

namespace tdcosim {

namespace {
constexpr double kTwoPi = 2.0 * std::numbers::pi;
constexpr int kStatesPerGen = 3;  // delta, omega, pm
} // namespace

std::string_view to_string(EventKind k) noexcept
{
    switch (k) {
    case EventKind::ThreePhaseFault: return "fault";
    case EventKind::FaultClear: return "fault_clear";
    case EventKind::GenTrip: return "gen_trip";
    case EventKind::LoadStep: return "load_step";
    }
    return "?";
}

EventKind parse_event_kind(std::string_view name)
{
    if (name == "fault" || name == "three_phase_fault") return EventKind::ThreePhaseFault;
    if (name == "fault_clear" || name == "clear") return EventKind::FaultClear;
    if (name == "gen_trip" || name == "trip") return EventKind::GenTrip;
    if (name == "load_step") return EventKind::LoadStep;
    throw Error(Errc::config, "unknown event kind '" + std::string(name) + "'");
}

Agc::Agc(AgcParams params) : params_(std::move(params)) {}

double Agc::step(double ace_now, double dt)
{
    ace_integral_ += ace_now * dt;
    return -(params_.kp * ace_now + params_.ki * ace_integral_);
}

double system_frequency(std::span<const GeneratorState> gens, double f0)
{
    double sum = 0.0;
    int n = 0;
    for (const auto& g : gens) {
        if (!g.online) continue;
        sum += g.omega;
        ++n;
    }
    if (n == 0) throw Error(Errc::collapse, "no generator online");
    // omega_i [rad/s] / 2pi == f0 * omega_pu
    return f0 * (sum / n);
}

double ace(double f_sys, double f0, double bias_b) noexcept { return 10.0 * bias_b * (f_sys - f0); }

std::vector<double> allocate_sfr(double p_sfr_total, std::span<const double> participation)
{
    double sum = 0.0;
    for (double b : participation) {
        if (b < 0.0) throw Error(Errc::config, "participation factors must be non-negative");
        sum += b;
    }
    if (participation.empty() || std::abs(sum - 1.0) > 1e-9)
        throw Error(Errc::config, "participation factors must sum to 1 (got " + std::to_string(sum) + ")");
    std::vector<double> shares;
    shares.reserve(participation.size());
    for (double b : participation) shares.push_back(b * p_sfr_total);
    return shares;
}

long long TransmissionSystem::event_step(double t, double dt) noexcept
{
    return static_cast<long long>(std::ceil(t / dt - 1e-9));
}

TransmissionSystem::TransmissionSystem(TransmissionParams params, std::vector<GridEvent> events, double dt,
                                       const Feedback& initial_feedback, unsigned long long noise_seed)
    : params_(std::move(params)), events_(std::move(events)), dt_(dt), agc_(params_.agc), rng_(noise_seed)
{
    if (!(dt_ > 0.0)) throw Error(Errc::config, "transmission timestep must be positive");
    if (params_.generators.empty()) throw Error(Errc::config, "at least one generator is required");
    if (!(params_.s_base_mva > 0.0) || !(params_.f0 > 0.0))
        throw Error(Errc::config, "system base and nominal frequency must be positive");
    if (params_.noise_v_std < 0.0 || params_.noise_theta_std < 0.0)
        throw Error(Errc::config, "noise standard deviations must be non-negative");

    const std::size_t n = params_.generators.size();
    for (const auto& g : params_.generators) {
        if (!(g.inertia_m > 0.0) || !(g.droop_r > 0.0) || !(g.governor_tg > 0.0) || !(g.swing_coupling > 0.0))
            throw Error(Errc::config, "generator '" + g.name + "' needs positive M, R, Tg and K");
        if (g.damping_d < 0.0) throw Error(Errc::config, "generator damping must be non-negative");
        if (dt_ > std::min(g.governor_tg, g.inertia_m) / 10.0)
            throw Error(Errc::config, "timestep exceeds min(Tg, M)/10 for generator '" + g.name + "'");
    }
    if (params_.agc.enabled) {
        if (params_.agc.participation.size() != n + 1)
            throw Error(Errc::config, "AGC participation needs one factor per generator plus the feeder");
        (void)allocate_sfr(0.0, params_.agc.participation);
    }

    if (!(params_.load_voltage_exponent >= 0.0 && params_.load_voltage_exponent <= 2.0))
        throw Error(Errc::config, "load voltage exponent must lie in [0, 2]");

    std::stable_sort(events_.begin(), events_.end(),
                     [](const GridEvent& a, const GridEvent& b) { return a.t < b.t; });
    for (const auto& e : events_) {
        if (e.t < 0.0) throw Error(Errc::config, "event time must be non-negative");
        if (e.kind == EventKind::ThreePhaseFault && !(e.magnitude >= 0.0 && e.magnitude < 1.0))
            throw Error(Errc::config, "fault residual voltage must lie in [0, 1)");
        if (e.kind == EventKind::ThreePhaseFault && e.magnitude == 0.0 && params_.load_voltage_exponent < 1.0)
            throw Error(Errc::config, "a zero-residual fault needs a load voltage exponent of at least 1");
        if (e.kind == EventKind::GenTrip) {
            if (e.target < 0 || static_cast<std::size_t>(e.target) >= n)
                throw Error(Errc::config, "generator trip targets unknown unit " + std::to_string(e.target));
            const double mw = params_.generators[e.target].p_dispatch * params_.s_base_mva;
            if (e.magnitude != 0.0 && std::abs(e.magnitude - mw) > 1e-6 * std::max(1.0, mw))
                throw Error(Errc::config, "trip magnitude " + std::to_string(e.magnitude) +
                                              " MW does not match unit dispatch " + std::to_string(mw) + " MW");
        }
        event_steps_.push_back(event_step(e.t, dt_));
    }

    // Equilibrium: delta_L = 0, every unit carries its dispatch.
    gens_.reserve(n);
    double dispatch = 0.0;
    for (const auto& gp : params_.generators) {
        GeneratorState g;
        g.params = gp;
        g.delta = gp.p_dispatch / (gp.swing_coupling * params_.v_nominal);
        gens_.push_back(g);
        dispatch += gp.p_dispatch;
    }
    const double fb_pu = initial_feedback.p_kw / 1000.0 / params_.s_base_mva;
    p_load_base_ = dispatch - fb_pu;
    p_net_ = p_load_base_ + fb_pu;
    p_net0_ = p_net_;
    v_ = params_.v_nominal;
    solve_network();
    // Mechanical power is set from the solved electrical power so the initial
    // state is an exact fixed point of the discrete dynamics.
    p_set_.resize(n);
    for (std::size_t i = 0; i < n; ++i) {
        gens_[i].pm = gens_[i].pe;
        gens_[i].p_ref = gens_[i].pe;
        p_set_[i] = gens_[i].pe;
    }
    x_.resize(n * kStatesPerGen);
    k1_ = k2_ = k3_ = k4_ = tmp_ = x_;
}

double TransmissionSystem::load_term() const noexcept
{
    // sum(pe) = P_net * V^np with pe_i = V*K_i*(delta_i - delta_L).
    const double np = params_.load_voltage_exponent;
    if (np == 2.0) return p_net_ * v_;
    return p_net_ * std::pow(v_, np - 1.0);
}

void TransmissionSystem::solve_network()
{
    double k_sum = 0.0, k_delta = 0.0;
    for (const auto& g : gens_) {
        if (!g.online) continue;
        k_sum += g.params.swing_coupling;
        k_delta += g.params.swing_coupling * g.delta;
    }
    if (k_sum == 0.0) throw Error(Errc::collapse, "no generator online");
    delta_l_ = (k_delta - load_term()) / k_sum;
    for (auto& g : gens_) g.pe = g.online ? v_ * g.params.swing_coupling * (g.delta - delta_l_) : 0.0;
}

void TransmissionSystem::load_states(std::vector<double>& x) const
{
    for (std::size_t i = 0; i < gens_.size(); ++i) {
        x[kStatesPerGen * i + 0] = gens_[i].delta;
        x[kStatesPerGen * i + 1] = gens_[i].omega;
        x[kStatesPerGen * i + 2] = gens_[i].pm;
    }
}

void TransmissionSystem::store_states(const std::vector<double>& x)
{
    for (std::size_t i = 0; i < gens_.size(); ++i) {
        gens_[i].delta = x[kStatesPerGen * i + 0];
        gens_[i].omega = x[kStatesPerGen * i + 1];
        gens_[i].pm = x[kStatesPerGen * i + 2];
    }
}

void TransmissionSystem::derivatives(const std::vector<double>& x, std::vector<double>& dx) const
{
    const double omega_b = kTwoPi * params_.f0;
    double k_sum = 0.0, k_delta = 0.0;
    for (std::size_t i = 0; i < gens_.size(); ++i) {
        if (!gens_[i].online) continue;
        k_sum += gens_[i].params.swing_coupling;
        k_delta += gens_[i].params.swing_coupling * x[kStatesPerGen * i];
    }
    const double delta_l = (k_delta - load_term()) / k_sum;
    for (std::size_t i = 0; i < gens_.size(); ++i) {
        const auto& g = gens_[i];
        const std::size_t o = kStatesPerGen * i;
        if (!g.online) {
            dx[o] = dx[o + 1] = dx[o + 2] = 0.0;
            continue;
        }
        const double dw = x[o + 1] - 1.0;
        const double pe = v_ * g.params.swing_coupling * (x[o] - delta_l);
        dx[o] = omega_b * dw;
        dx[o + 1] = (x[o + 2] - pe - g.params.damping_d * dw) / g.params.inertia_m;
        dx[o + 2] = (g.p_ref - x[o + 2] - dw / g.params.droop_r) / g.params.governor_tg;
    }
}

void TransmissionSystem::apply_events()
{
    for (std::size_t k = 0; k < events_.size(); ++k) {
        if (event_steps_[k] != step_) continue;
        const auto& e = events_[k];
        switch (e.kind) {
        case EventKind::ThreePhaseFault:
            fault_active_ = true;
            fault_residual_ = e.magnitude;
            break;
        case EventKind::FaultClear:
            fault_active_ = false;
            break;
        case EventKind::GenTrip: {
            auto& g = gens_[e.target];
            if (g.online) {
                g.online = false;
                g.pm = g.pe = 0.0;
                tripped_support_ += g.params.voltage_support;
            }
            break;
        }
        case EventKind::LoadStep:
            load_steps_ += e.magnitude / params_.s_base_mva;
            break;
        }
    }
}

TxOutput TransmissionSystem::make_output()
{
    f_sys_ = system_frequency(gens_, params_.f0);
    ace_ = ace(f_sys_, params_.f0, params_.agc.bias_b);
    p_sfr_total_mw_ = params_.agc.enabled ? agc_.step(ace_, dt_) : 0.0;

    TxOutput out;
    out.sample.t = time();
    out.sample.v_mag = v_;
    double theta = delta_l_ + params_.angle_offset;
    if (params_.noise_v_std > 0.0) out.sample.v_mag = std::max(0.0, v_ + params_.noise_v_std * normal_(rng_));
    if (params_.noise_theta_std > 0.0) theta += params_.noise_theta_std * normal_(rng_);
    out.sample.theta = wrap_angle(theta);
    out.f_sys = f_sys_;
    out.ace = ace_;
    out.p_sfr_total_mw = p_sfr_total_mw_;
    out.p_sfr_request_kw = params_.agc.enabled ? params_.agc.participation.back() * p_sfr_total_mw_ * 1000.0 : 0.0;
    return out;
}

TxOutput TransmissionSystem::initial()
{
    if (initialised_) throw Error(Errc::config, "initial() called twice");
    initialised_ = true;
    apply_events();
    p_net_ = p_net0_ + load_steps_;
    v_ = fault_active_ ? fault_residual_
                       : params_.v_nominal - tripped_support_ -
                             params_.load_voltage_sensitivity * (p_net_ - p_net0_);
    solve_network();
    return make_output();
}

TxOutput TransmissionSystem::step(const Feedback& feedback)
{
    if (!initialised_) (void)initial();

    p_net_ = p_load_base_ + load_steps_ + feedback.p_kw / 1000.0 / params_.s_base_mva;
    if (!fault_active_)
        v_ = params_.v_nominal - tripped_support_ - params_.load_voltage_sensitivity * (p_net_ - p_net0_);

    if (params_.agc.enabled) {
        for (std::size_t i = 0; i < gens_.size(); ++i)
            gens_[i].p_ref = p_set_[i] + params_.agc.participation[i] * p_sfr_total_mw_ / params_.s_base_mva;
    }

    // Classical RK4 with network algebra re-solved inside every stage.
    const std::size_t n = x_.size();
    load_states(x_);
    derivatives(x_, k1_);
    for (std::size_t i = 0; i < n; ++i) tmp_[i] = x_[i] + 0.5 * dt_ * k1_[i];
    derivatives(tmp_, k2_);
    for (std::size_t i = 0; i < n; ++i) tmp_[i] = x_[i] + 0.5 * dt_ * k2_[i];
    derivatives(tmp_, k3_);
    for (std::size_t i = 0; i < n; ++i) tmp_[i] = x_[i] + dt_ * k3_[i];
    derivatives(tmp_, k4_);
    for (std::size_t i = 0; i < n; ++i) x_[i] += dt_ / 6.0 * (k1_[i] + 2.0 * k2_[i] + 2.0 * k3_[i] + k4_[i]);
    store_states(x_);

    ++step_;
    apply_events();
    p_net_ = p_load_base_ + load_steps_ + feedback.p_kw / 1000.0 / params_.s_base_mva;
    v_ = fault_active_ ? fault_residual_
                       : params_.v_nominal - tripped_support_ -
                             params_.load_voltage_sensitivity * (p_net_ - p_net0_);
    solve_network();
    return make_output();
}

} // namespace tdcosim
