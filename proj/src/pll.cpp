#include "tdcosim/pll.hpp"

#include "tdcosim/error.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

namespace tdcosim {

namespace {
constexpr double kTwoPi = 2.0 * std::numbers::pi;
constexpr double kSqrt3 = std::numbers::sqrt3;
} // namespace

ThreePhaseSample synthesize_abc(double v_mag, double theta, double omega0, double tau) noexcept
{
    const double phase = omega0 * tau + theta;
    return {
        v_mag * std::cos(phase),
        v_mag * std::cos(phase - kTwoPi / 3.0),
        v_mag * std::cos(phase - 2.0 * kTwoPi / 3.0),
    };
}

SrfPll::SrfPll(PllOptions opts, double theta0)
    : opts_(opts),
      omega0_(kTwoPi * opts.f0),
      theta_hat_(theta0),
      omega_hat_(omega0_),
      f_filtered_(opts.f0)
{
    if (!(opts_.kp > 0.0) || !(opts_.ki > 0.0)) throw Error(Errc::config, "PLL gains must be positive");
    if (!(opts_.amplitude_floor > 0.0)) throw Error(Errc::config, "PLL amplitude floor must be positive");
    if (opts_.filter_tau < 0.0) throw Error(Errc::config, "PLL filter time constant must be non-negative");
}

double SrfPll::step(const ThreePhaseSample& s, double dt)
{
    if (dt != cached_dt_) {
        cached_dt_ = dt;
        filter_gain_ = opts_.filter_tau > 0.0 ? -std::expm1(-dt / opts_.filter_tau) : 1.0;
    }

    // Amplitude-invariant Clarke transform.
    const double v_alpha = (2.0 * s.va - s.vb - s.vc) / 3.0;
    const double v_beta = (s.vb - s.vc) / kSqrt3;

    // Park rotation onto the estimated angle.
    const double c = std::cos(theta_hat_);
    const double sn = std::sin(theta_hat_);
    const double vd = v_alpha * c + v_beta * sn;
    const double vq = -v_alpha * sn + v_beta * c;

    const double amplitude = std::max(std::hypot(vd, vq), opts_.amplitude_floor);
    const double e = vq / amplitude;
    last_error_ = e;

    integrator_ += opts_.ki * e * dt;
    omega_hat_ = omega0_ + opts_.kp * e + integrator_;
    theta_hat_ += omega_hat_ * dt;

    const double f_raw = omega_hat_ / kTwoPi;
    f_filtered_ += filter_gain_ * (f_raw - f_filtered_);
    return f_filtered_;
}

} // namespace tdcosim
