#pragma once

#include "tdcosim/bridge.hpp"
#include "tdcosim/distribution.hpp"
#include "tdcosim/pll.hpp"
#include "tdcosim/transmission.hpp"

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

namespace tdcosim {

struct ScenarioConfig {
    std::string name = "scenario";
    double t_t = 0.01;     // s, transmission (coarse) step
    double t_d = 0.0001;   // s, distribution (fine) step
    double duration = 60.0;
    Method method = Method::Quadratic;
    double lpf_alpha = 0.01;
    std::optional<DetectorOptions> detector = DetectorOptions{};
    bool strict_refill = true;
    bool rate_limit_enabled = false;
    PllOptions pll;
    TransmissionParams transmission;
    FeederParams distribution;
    std::vector<GridEvent> events;
    std::uint64_t seed = 1;
    std::string output_dir = "out";
};

/// Fine steps per coarse step. Throws Errc::config unless t_t/t_d is a
/// positive integer (relative tolerance 1e-9).
int timestep_ratio(double t_t, double t_d);

/// Number of coarse exchanges in the run.
long long coarse_steps(const ScenarioConfig& cfg);

/// Checks all config invariants; throws Errc::config.
void validate(const ScenarioConfig& cfg);

/// Same scenario with T_T = T_D and a hold bridge with no detector.
ScenarioConfig ground_truth_config(const ScenarioConfig& cfg);

/// Coarse step at which a moving-window capacity is specified.
inline constexpr double kWindowReferenceStep = 0.01;

/// Bridge options implied by a scenario. A moving-window capacity is
/// rescaled so the window spans the same time at any T_T.
BridgeOptions bridge_options(const ScenarioConfig& cfg);

/// Feeder feedback at nominal voltage and frequency with no SFR; both sides
/// use it to start from the same equilibrium.
Feedback initial_feedback(const ScenarioConfig& cfg);

struct CoarseRecord {
    double t;
    double v;
    double theta;  // rad, as exchanged (wrapped)
    double f_sys;
    double ace;
    double p_sfr_total;      // MW
    double p_sfr_request;    // kW sent to the feeder
    double p_fb_consumed;    // kW feedback used to reach this sample
};

struct VerdictRecord {
    double t;
    int var;  // 0 = v_mag, 1 = theta
    double delta;
    double th;
    bool outlier;
    bool warmup;
    bool reset;
};

/// Struct-of-arrays fine-rate series.
struct FineSeries {
    std::vector<double> t, v_hat, theta_hat, f_pcc, p_dpv, p_pfr, p_sfr, p_sfr_request, p_fb, q_fb, p_avail;
    std::vector<double> plant_p_dpv;  // row-major, n_plants per fine step
    int n_plants = 0;

    std::size_t size() const noexcept { return t.size(); }
    void reserve(std::size_t n);
};

struct RunTrace {
    std::vector<CoarseRecord> coarse;
    FineSeries fine;
    std::vector<VerdictRecord> verdicts;
    int resets = 0;
    bool ok = true;
    std::string error;
};

/// Message contents of one coarse exchange, transmission to distribution.
struct TxToDx {
    double t;
    double v_mag;
    double theta;
    double p_sfr_request_kw;
    bool operator==(const TxToDx&) const = default;
};

/// Transmission half of the lockstep loop.
class TransmissionNode {
public:
    explicit TransmissionNode(const ScenarioConfig& cfg);

    /// Sample at t = 0.
    TxToDx start(RunTrace* trace);
    /// Advances one coarse step using the previous interval's feedback.
    TxToDx advance(const Feedback& fb, RunTrace* trace);

    const TransmissionSystem& system() const noexcept { return tx_; }

private:
    TxToDx record(const TxOutput& out, double p_fb, RunTrace* trace);
    TransmissionSystem tx_;
};

/// Distribution half: bridge, waveform synthesis, PLL and feeder.
class DistributionNode {
public:
    explicit DistributionNode(const ScenarioConfig& cfg);

    /// Consumes one exchange, runs the R fine steps of the interval and
    /// returns the feedback latched for the next transmission step.
    Feedback process(const TxToDx& msg, RunTrace* trace);

    const BoundaryBridge& bridge() const noexcept { return bridge_; }
    const SrfPll& pll() const noexcept { return pll_; }
    int ratio() const noexcept { return ratio_; }

private:
    const FeederParams feeder_;
    int ratio_;
    double t_d_;
    double omega0_;
    BoundaryBridge bridge_;
    SrfPll pll_;
    bool started_ = false;
    FeederStep step_out_;
};

/// Single-process lockstep run. Config violations throw; a transmission
/// collapse ends the run with `ok == false` and a partial trace.
RunTrace run(const ScenarioConfig& cfg);

} // namespace tdcosim
