#pragma once

namespace tdcosim {

struct ThreePhaseSample {
    double va = 0.0;
    double vb = 0.0;
    double vc = 0.0;
};

/// Balanced, peak-normalised three-phase set at phase omega0*tau + theta;
/// phases b and c lag a by 2pi/3 and 4pi/3.
ThreePhaseSample synthesize_abc(double v_mag, double theta, double omega0, double tau) noexcept;

struct PllOptions {
    double kp = 180.0;   // rad/s per unit q-axis error
    double ki = 3200.0;  // rad/s^2 per unit
    double f0 = 60.0;
    double amplitude_floor = 0.1;  // pu
    double filter_tau = 0.01;      // s, output frequency filter; 0 disables
};

/// Synchronous-reference-frame PLL with amplitude-normalised q-axis error.
class SrfPll {
public:
    /// `theta0` is the initial estimated electrical angle; the loop starts
    /// locked at nominal frequency.
    explicit SrfPll(PllOptions opts = {}, double theta0 = 0.0);

    /// Advances the loop by `dt` and returns the filtered frequency estimate in Hz.
    double step(const ThreePhaseSample& s, double dt);

    double theta_hat() const noexcept { return theta_hat_; }
    double omega_hat() const noexcept { return omega_hat_; }
    double integrator() const noexcept { return integrator_; }
    double frequency() const noexcept { return f_filtered_; }
    double last_error() const noexcept { return last_error_; }
    const PllOptions& options() const noexcept { return opts_; }

private:
    PllOptions opts_;
    double omega0_;
    double integrator_ = 0.0;
    double theta_hat_;
    double omega_hat_;
    double f_filtered_;
    double last_error_ = 0.0;
    double cached_dt_ = -1.0;
    double filter_gain_ = 1.0;
};

} // namespace tdcosim
