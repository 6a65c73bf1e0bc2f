#include "support.hpp"
#include "tdcosim/pll.hpp"

#include <cmath>
#include <numbers>

using namespace tdcosim;

namespace {

constexpr double kPi = std::numbers::pi;
constexpr double kW0 = 2 * kPi * 60.0;
constexpr double kDt = 1e-4;

} // namespace

TEST_SUITE("pll") {

TEST_CASE("synthesis geometry")
{
    const auto s = synthesize_abc(1.0, 0.0, kW0, 0.0);
    CHECK(s.va == doctest::Approx(1.0));
    CHECK(s.vb == doctest::Approx(-0.5));
    CHECK(s.vc == doctest::Approx(-0.5));
    const auto z = synthesize_abc(0.0, 0.3, kW0, 0.1);
    CHECK(z.va == 0.0);
    CHECK(z.vb == 0.0);
    CHECK(z.vc == 0.0);
    CHECK(std::abs(synthesize_abc(1.0, kPi / 2, kW0, 0.0).va) < 1e-12);
    for (int i = 0; i < 1000; ++i) {
        const double tau = i * 3.7e-4, th = 0.01 * i - 3.0, v = 0.2 + 0.001 * i;
        const auto x = synthesize_abc(v, th, kW0, tau);
        CHECK(std::abs(x.va + x.vb + x.vc) < 1e-9);
        CHECK(x.va == doctest::Approx(v * std::cos(kW0 * tau + th)));
        CHECK(x.vb == doctest::Approx(v * std::cos(kW0 * tau + th - 2 * kPi / 3)));
    }
}

TEST_CASE("locks onto a nominal input")
{
    SrfPll pll({}, 0.2);
    double f = 0.0;
    double prev_theta = pll.theta_hat();
    for (int i = 0; i < 5000; ++i) {
        f = pll.step(synthesize_abc(1.0, 0.2, kW0, i * kDt), kDt);
        CHECK(pll.theta_hat() > prev_theta);
        prev_theta = pll.theta_hat();
    }
    CHECK(std::abs(f - 60.0) < 1e-4);
}

TEST_CASE("pulls in from a phase offset")
{
    SrfPll pll({}, 0.0);
    double f = 0.0;
    for (int i = 0; i < 5000; ++i) f = pll.step(synthesize_abc(1.0, 0.7, kW0, i * kDt), kDt);
    CHECK(std::abs(f - 60.0) < 1e-4);
    CHECK(std::abs(pll.last_error()) < 1e-4);
}

TEST_CASE("re-locks after a frequency step")
{
    SrfPll pll({}, 0.0);
    double theta = 0.0;
    double f = 0.0;
    const int n = 30000;
    for (int i = 0; i < n; ++i) {
        const double f_in = i < 5000 ? 60.0 : 59.9;
        theta += 2 * kPi * (f_in - 60.0) * kDt;
        f = pll.step(synthesize_abc(1.0, theta, kW0, (i + 1) * kDt), kDt);
    }
    CHECK(std::abs(f - 59.9) < 1e-3);
}

TEST_CASE("zero amplitude stays finite")
{
    SrfPll pll;
    double f = 0.0;
    for (int i = 0; i < 1000; ++i) f = pll.step(synthesize_abc(0.0, 0.0, kW0, i * kDt), kDt);
    CHECK(std::isfinite(f));
    CHECK(std::isfinite(pll.theta_hat()));
}

TEST_CASE("deterministic")
{
    SrfPll a({}, 0.1), b({}, 0.1);
    for (int i = 0; i < 3000; ++i) {
        const auto s = synthesize_abc(0.9 + 0.1 * std::sin(i * 0.01), 0.1 + 1e-4 * i, kW0, i * kDt);
        CHECK(a.step(s, kDt) == b.step(s, kDt));
    }
}

}
