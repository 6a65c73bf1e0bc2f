#pragma once

#include "tdcosim/extrapolation.hpp"

#include <numbers>
#include <random>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace tdcosim {

/// Machine data on the system MVA base.
struct GeneratorParams {
    std::string name;
    double inertia_m = 10.0;       // s, 2H
    double damping_d = 2.0;        // pu power / pu speed
    double droop_r = 0.05;         // pu speed / pu power
    double governor_tg = 0.5;      // s
    double swing_coupling = 10.0;  // pu power / rad to the load bus
    double p_dispatch = 1.0;       // pu initial set point
    double voltage_support = 0.0;  // pu boundary-voltage drop when this unit trips
};

struct GeneratorState {
    GeneratorParams params;
    double omega = 1.0;  // pu speed
    double pm = 0.0;     // pu mechanical power
    double pe = 0.0;     // pu electrical power
    double delta = 0.0;  // rad rotor angle in the synchronous frame
    double p_ref = 0.0;  // pu governor set point (dispatch + SFR share)
    bool online = true;
};

struct AgcParams {
    bool enabled = false;
    double bias_b = 20.0;  // MW per 0.1 Hz
    double kp = 0.0;
    double ki = 0.05;      // 1/s
    /// One share per generator (in order) followed by the distribution
    /// feeder's DPV aggregate. Must sum to one.
    std::vector<double> participation;
};

/// PI secondary control of the area control error.
///
/// Sign convention: a negative ACE (under-frequency) produces a positive
/// generation-increase request, i.e. request = -(kp*ACE + ki*integral(ACE)).
class Agc {
public:
    explicit Agc(AgcParams params = {});
    /// Accumulates `ace_now*dt` and returns the total SFR request in MW.
    double step(double ace_now, double dt);
    double ace_integral() const noexcept { return ace_integral_; }
    const AgcParams& params() const noexcept { return params_; }

private:
    AgcParams params_;
    double ace_integral_ = 0.0;
};

enum class EventKind { ThreePhaseFault, FaultClear, GenTrip, LoadStep };

std::string_view to_string(EventKind k) noexcept;
EventKind parse_event_kind(std::string_view name);

struct GridEvent {
    EventKind kind = EventKind::LoadStep;
    double t = 0.0;
    /// ThreePhaseFault: residual boundary voltage in pu, [0, 1).
    /// LoadStep: MW added to the net load. GenTrip: MW the unit was carrying
    /// (checked against its dispatch when non-zero).
    double magnitude = 0.0;
    int target = -1;  // generator index for GenTrip
};

struct TransmissionParams {
    double f0 = 60.0;
    double s_base_mva = 100.0;
    double v_nominal = 1.0;
    /// pu boundary-voltage change per pu net-load change.
    double load_voltage_sensitivity = 0.0;
    /// Exponent of the bulk load's voltage dependence: 0 constant power,
    /// 1 constant current, 2 constant impedance.
    double load_voltage_exponent = 2.0;
    double angle_offset = -18.5 * std::numbers::pi / 180.0;  // rad, static power-flow angle
    std::vector<GeneratorParams> generators;
    AgcParams agc;
    /// Optional Gaussian measurement noise on the exchanged boundary sample.
    double noise_v_std = 0.0;      // pu
    double noise_theta_std = 0.0;  // rad
};

/// Feedback from the distribution feeder head.
struct Feedback {
    double p_kw = 0.0;
    double q_kvar = 0.0;
    double p_avail_kw = 0.0;
};

struct TxOutput {
    BoundarySample sample;       // theta wrapped to [-pi, pi]
    double p_sfr_request_kw = 0.0;
    double f_sys = 60.0;
    double ace = 0.0;
    double p_sfr_total_mw = 0.0;
};

/// Mean generator electrical frequency in Hz over online units.
/// Throws Errc::collapse when no unit is online.
double system_frequency(std::span<const GeneratorState> gens, double f0);

/// Area control error 10*B*(f_sys - f0), in MW.
double ace(double f_sys, double f0, double bias_b) noexcept;

/// Splits a total SFR request by participation factors.
/// Throws Errc::config unless the factors are non-negative and sum to one.
std::vector<double> allocate_sfr(double p_sfr_total, std::span<const double> participation);

/// Reduced-order transmission surrogate.
///
/// N machines with swing and first-order governor dynamics share a common
/// load bus that is also the T&D boundary. Electrical power follows the
/// linearised coupling pe_i = V*K_i*(delta_i - delta_L); the load-bus angle
/// delta_L is the algebraic solution of sum(pe_i) = P_net*V^np, np being
/// `load_voltage_exponent`. A fault pins V to its residual, a trip removes the unit and its
/// coupling, and a load step changes P_net. States advance with classical
/// fixed-step RK4; AGC dispatch happens every step.
class TransmissionSystem {
public:
    /// `initial_feedback` sets the equilibrium: the bulk load is chosen so the
    /// dispatch exactly balances load plus feeder demand.
    TransmissionSystem(TransmissionParams params, std::vector<GridEvent> events, double dt,
                       const Feedback& initial_feedback, unsigned long long noise_seed = 0);

    /// Output at t = 0 (events scheduled at t = 0 applied).
    TxOutput initial();

    /// Integrates one step with `feedback` held over it, applies events due at
    /// the new time, and returns the new boundary output.
    /// Throws Errc::collapse when no generator remains online.
    TxOutput step(const Feedback& feedback);

    double time() const noexcept { return static_cast<double>(step_) * dt_; }
    long long step_index() const noexcept { return step_; }
    double dt() const noexcept { return dt_; }
    double boundary_voltage() const noexcept { return v_; }
    double load_bus_angle() const noexcept { return delta_l_; }
    double net_load_pu() const noexcept { return p_net_; }
    bool fault_active() const noexcept { return fault_active_; }
    const std::vector<GeneratorState>& generators() const noexcept { return gens_; }
    const Agc& agc() const noexcept { return agc_; }
    const TransmissionParams& params() const noexcept { return params_; }

    /// Step index at which an event time takes effect on a grid of spacing dt.
    static long long event_step(double t, double dt) noexcept;

private:
    void apply_events();
    double load_term() const noexcept;
    void solve_network();
    void derivatives(const std::vector<double>& x, std::vector<double>& dx) const;
    void load_states(std::vector<double>& x) const;
    void store_states(const std::vector<double>& x);
    TxOutput make_output();

    TransmissionParams params_;
    std::vector<GridEvent> events_;
    std::vector<long long> event_steps_;
    double dt_;
    long long step_ = 0;
    std::vector<GeneratorState> gens_;
    Agc agc_;
    double p_load_base_ = 0.0;  // pu, bulk load excluding feeder and steps
    double load_steps_ = 0.0;   // pu
    double p_net_ = 0.0;        // pu
    double p_net0_ = 0.0;
    double v_ = 1.0;
    double delta_l_ = 0.0;
    bool fault_active_ = false;
    double fault_residual_ = 0.0;
    double tripped_support_ = 0.0;
    double p_sfr_total_mw_ = 0.0;
    double f_sys_ = 60.0;
    double ace_ = 0.0;
    bool initialised_ = false;
    std::mt19937_64 rng_;
    std::normal_distribution<double> normal_{0.0, 1.0};
    std::vector<double> p_set_;  // pu governor set points before SFR
    std::vector<double> x_, k1_, k2_, k3_, k4_, tmp_;
};

} // namespace tdcosim
