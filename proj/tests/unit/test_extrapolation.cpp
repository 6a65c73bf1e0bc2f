#include "support.hpp"
#include "tdcosim/extrapolation.hpp"

#include <cmath>
#include <numbers>
#include <random>

using namespace tdcosim;

namespace {

constexpr double kPi = std::numbers::pi;
constexpr double kDeg = kPi / 180.0;

// Textbook Lagrange basis, written out independently of the library.
double basis(double t, double a, double b, double c) { return (t - b) * (t - c) / ((a - b) * (a - c)); }

} // namespace

TEST_SUITE("extrapolation") {

TEST_CASE("unwrap picks the nearest representative")
{
    CHECK(unwrap_angle(3.10, -3.10) == doctest::Approx(-3.10 + 2 * kPi).epsilon(1e-12));
    CHECK(unwrap_angle(3.10, -3.10) == doctest::Approx(3.1832).epsilon(1e-4));
    CHECK(unwrap_angle(0.0, 0.5) == 0.5);
    CHECK(unwrap_angle(-3.10, 3.10) == doctest::Approx(-3.1832).epsilon(1e-4));
}

TEST_CASE("unwrap round trip and distance bound")
{
    std::mt19937_64 rng(7);
    std::uniform_real_distribution<double> prev(-50.0, 50.0), w(-kPi, kPi);
    for (int i = 0; i < 10000; ++i) {
        const double p = prev(rng), x = w(rng);
        const double u = unwrap_angle(p, x);
        CHECK(std::abs(u - p) <= kPi + 1e-12);
        const double back = wrap_angle(u);
        // +pi and -pi are the same angle.
        const double diff = std::remainder(back - x, 2 * kPi);
        CHECK(std::abs(diff) < 1e-12);
    }
}

TEST_CASE("lagrange weights, worked example")
{
    const auto w = lagrange_weights(0.025, {0.0, 0.010, 0.020});
    CHECK(w[0] == doctest::Approx(0.375).epsilon(1e-14));
    CHECK(w[1] == doctest::Approx(-1.25).epsilon(1e-14));
    CHECK(w[2] == doctest::Approx(1.875).epsilon(1e-14));
    const auto at_newest = lagrange_weights(0.020, {0.0, 0.010, 0.020});
    CHECK(at_newest[0] == 0.0);
    CHECK(at_newest[1] == 0.0);
    CHECK(at_newest[2] == 1.0);
    const auto at_mid = lagrange_weights(0.010, {0.0, 0.010, 0.020});
    CHECK(at_mid[0] == 0.0);
    CHECK(at_mid[1] == 1.0);
    CHECK(at_mid[2] == 0.0);
}

TEST_CASE("lagrange weights reject coincident nodes")
{
    CHECK(throws_code([] { (void)lagrange_weights(0.03, {0.0, 0.01, 0.01}); }, Errc::degenerate_nodes));
}

TEST_CASE("lagrange weights match the basis oracle and sum to one")
{
    std::mt19937_64 rng(11);
    std::uniform_real_distribution<double> u(0.001, 0.05);
    for (int i = 0; i < 2000; ++i) {
        const double a = u(rng);
        const double b = a + u(rng);
        const double c = b + u(rng);
        const double t = c + u(rng);
        const auto w = lagrange_weights(t, {a, b, c});
        CHECK(std::abs(w[0] + w[1] + w[2] - 1.0) < 1e-12);
        CHECK(w[0] == doctest::Approx(basis(t, a, b, c)).epsilon(1e-10));
        CHECK(w[1] == doctest::Approx(basis(t, b, a, c)).epsilon(1e-10));
        CHECK(w[2] == doctest::Approx(basis(t, c, a, b)).epsilon(1e-10));
    }
}

TEST_CASE("quadratic angle example")
{
    Extrapolator e({Method::Quadratic});
    e.push(0.0, -18.5 * kDeg);
    e.push(0.010, -18.3 * kDeg);
    e.push(0.020, -18.0 * kDeg);
    const double deg = e.predict(0.025, 0.0) / kDeg;
    CHECK(std::abs(deg - (-17.8125)) < 1e-9);
    CHECK(std::abs(deg - (-17.81)) < 0.01);
}

TEST_CASE("buffer keeps three samples and rejects stale timestamps")
{
    Extrapolator e;
    e.push(0.0, 1.0);
    CHECK(e.size() == 1);
    CHECK(e.refill_count() == 1);
    e.push(0.01, 2.0);
    e.push(0.02, 3.0);
    e.push(0.03, 4.0);
    CHECK(e.size() == 3);
    CHECK(e.node(0).t == 0.01);
    CHECK(e.node(2).y == 4.0);
    CHECK(throws_code([&] { e.push(0.03, 5.0); }, Errc::monotonicity));
}

TEST_CASE("empty buffer is not primed")
{
    Extrapolator e({Method::Linear});
    CHECK(throws_code([&] { (void)e.predict(0.0, 1.0); }, Errc::not_primed));
}

TEST_CASE("linear and lpf examples")
{
    Extrapolator lin({Method::Linear, 0.01, false});
    lin.push(0.0, 1.0);
    lin.push(0.010, 2.0);
    CHECK(lin.predict(0.015, 0.0) == doctest::Approx(2.5).epsilon(1e-12));

    Extrapolator lpf({Method::Lpf, 0.01});
    lpf.set_lpf_prev(0.0);
    CHECK(lpf.predict(0.0, 1.0) == doctest::Approx(0.01).epsilon(1e-14));
    CHECK(lpf.lpf_prev() == doctest::Approx(0.01).epsilon(1e-14));
}

TEST_CASE("hold returns the newest sample")
{
    Extrapolator e({Method::Hold});
    e.push(0.0, 1.0);
    e.push(0.01, 1.5);
    CHECK(e.predict(0.017, 99.0) == 1.5);
}

TEST_CASE("constant buffer predicts the constant")
{
    Extrapolator e({Method::Quadratic});
    for (double t : {0.0, 0.01, 0.02}) e.push(t, 0.731);
    for (double t : {0.02, 0.025, 0.1, 3.0}) CHECK(std::abs(e.predict(t, 0.0) - 0.731) < 1e-12);
}

TEST_CASE("reset and refill ladder")
{
    SUBCASE("strict refill holds until three samples")
    {
        Extrapolator e({Method::Quadratic, 0.01, true});
        for (double t : {0.0, 0.01, 0.02}) e.push(t, t * t);
        CHECK(e.effective_method() == Method::Quadratic);
        e.reset();
        CHECK(e.size() == 0);
        CHECK(e.refill_count() == 0);
        e.push(0.03, 5.0);
        CHECK(e.effective_method() == Method::Hold);
        CHECK(e.predict(0.035, 0.0) == 5.0);
        e.push(0.04, 6.0);
        CHECK(e.effective_method() == Method::Hold);
        e.push(0.05, 8.0);
        CHECK(e.effective_method() == Method::Quadratic);
    }
    SUBCASE("graduated ladder")
    {
        Extrapolator e({Method::Quadratic, 0.01, false});
        e.push(0.0, 1.0);
        CHECK(e.effective_method() == Method::Hold);
        e.push(0.01, 2.0);
        CHECK(e.effective_method() == Method::Linear);
        CHECK(e.predict(0.015, 0.0) == doctest::Approx(2.5));
        e.push(0.02, 3.5);
        CHECK(e.effective_method() == Method::Quadratic);
    }
    SUBCASE("lpf memory survives a reset")
    {
        Extrapolator e({Method::Lpf, 0.5});
        e.push(0.0, 1.0);
        e.set_lpf_prev(0.0);
        (void)e.predict(0.0, 1.0);
        e.reset();
        CHECK(e.lpf_prev() == doctest::Approx(0.5));
    }
}

TEST_CASE("quadratic reproduces quadratics")
{
    std::mt19937_64 rng(3);
    std::uniform_real_distribution<double> coef(-10.0, 10.0), gap(0.001, 0.02);
    for (int i = 0; i < 1000; ++i) {
        const double a = coef(rng), b = coef(rng), c = coef(rng);
        auto y = [&](double t) { return a * t * t + b * t + c; };
        Extrapolator e({Method::Quadratic});
        double t = gap(rng);
        for (int k = 0; k < 3; ++k) {
            e.push(t, y(t));
            t += gap(rng);
        }
        const double tau = e.node(2).t + gap(rng);
        const double want = y(tau);
        CHECK(std::abs(e.predict(tau, 0.0) - want) <= 1e-9 * std::max(1.0, std::abs(want)));
        // Prediction at the newest node is the newest value.
        CHECK(e.predict(e.node(2).t, 0.0) == doctest::Approx(e.node(2).y).epsilon(1e-15));
    }
}

TEST_CASE("linear reproduces affine signals")
{
    std::mt19937_64 rng(5);
    std::uniform_real_distribution<double> coef(-5.0, 5.0), gap(0.001, 0.02);
    for (int i = 0; i < 1000; ++i) {
        const double a = coef(rng), b = coef(rng);
        Extrapolator e({Method::Linear, 0.01, false});
        const double t0 = gap(rng), t1 = t0 + gap(rng);
        e.push(t0, a * t0 + b);
        e.push(t1, a * t1 + b);
        const double tau = t1 + gap(rng);
        CHECK(std::abs(e.predict(tau, 0.0) - (a * tau + b)) < 1e-12);
    }
}

TEST_CASE("quadratic extrapolation error is third order")
{
    auto max_err = [](double h) {
        Extrapolator e({Method::Quadratic});
        const double t0 = 0.3;
        for (int k = 0; k < 3; ++k) e.push(t0 + k * h, std::sin(2 * kPi * (t0 + k * h)));
        double worst = 0.0;
        const double tn = t0 + 2 * h;
        for (int j = 0; j <= 100; ++j) {
            const double tau = tn + h * j / 100.0;
            worst = std::max(worst, std::abs(e.predict(tau, 0.0) - std::sin(2 * kPi * tau)));
        }
        return worst;
    };
    const double hs[] = {0.020, 0.010, 0.005, 0.0025};
    for (int i = 0; i + 1 < 4; ++i) {
        const double ratio = max_err(hs[i]) / max_err(hs[i + 1]);
        CHECK(ratio >= 6.0);
        CHECK(ratio <= 10.0);
    }
}

TEST_CASE("method names")
{
    for (Method m : {Method::Hold, Method::Lpf, Method::Linear, Method::Quadratic})
        CHECK(parse_method(to_string(m)) == m);
    CHECK(parse_method("zoh") == Method::Hold);
    CHECK(throws_code([] { (void)parse_method("cubic"); }, Errc::config));
}

}
