#include "support.hpp"
#include "tdcosim/anomaly.hpp"

#include <cmath>
#include <random>
#include <vector>

using namespace tdcosim;

namespace {

DetectorOptions no_warmup(DetectorScheme s)
{
    DetectorOptions o;
    o.scheme = s;
    o.warmup = 0;
    return o;
}

} // namespace

TEST_SUITE("anomaly") {

TEST_CASE("static threshold examples")
{
    const std::vector<double> ones{1, 1, 1, 1};
    CHECK(static_threshold(ones) == doctest::Approx(1.0).epsilon(1e-15));
    const std::vector<double> step{0, 0, 0, 4};
    CHECK(static_threshold(step) == doctest::Approx(1.0 + 3.0 * std::sqrt(3.0)).epsilon(1e-14));
    CHECK(static_threshold(step) == doctest::Approx(6.196).epsilon(1e-4));
    CHECK(throws_code([] { (void)static_threshold(std::vector<double>{}); }, Errc::insufficient_data));
}

TEST_CASE("moving window examples")
{
    SUBCASE("flat window")
    {
        auto o = no_warmup(DetectorScheme::MovingWindow);
        o.window_capacity = 3;
        ThresholdDetector d(o);
        (void)d.update(1.0);
        (void)d.update(1.0);
        const auto v = d.update(1.0);
        CHECK(v.threshold == doctest::Approx(1.0));
        CHECK_FALSE(v.is_outlier);
    }
    SUBCASE("spike in a zero window")
    {
        auto o = no_warmup(DetectorScheme::MovingWindow);
        o.window_capacity = 3;
        ThresholdDetector d(o);
        for (int i = 0; i < 3; ++i) (void)d.update(0.0);
        const auto v = d.update(4.0);
        CHECK(d.window().size() == 3);
        CHECK(d.mu() == doctest::Approx(4.0 / 3.0));
        CHECK(d.sigma2() == doctest::Approx(32.0 / 9.0));
        CHECK(v.threshold == doctest::Approx(6.99).epsilon(1e-3));
        CHECK_FALSE(v.is_outlier);
    }
    SUBCASE("fifo eviction")
    {
        auto o = no_warmup(DetectorScheme::MovingWindow);
        o.window_capacity = 2;
        ThresholdDetector d(o);
        for (double x : {1.0, 2.0, 3.0}) (void)d.update(x);
        REQUIRE(d.window().size() == 2);
        CHECK(d.window()[0] == 2.0);
        CHECK(d.window()[1] == 3.0);
    }
}

TEST_CASE("ewma worked example")
{
    ThresholdDetector d(no_warmup(DetectorScheme::EwmaRtta));
    const auto v = d.update(0.2);
    CHECK(d.last_alpha() == doctest::Approx(0.01));
    CHECK(d.mu() == doctest::Approx(0.002).epsilon(1e-12));
    CHECK(d.sigma2() == doctest::Approx(3.9204e-4).epsilon(1e-10));
    CHECK(d.threshold() == doctest::Approx(0.06140).epsilon(1e-4));
    // Tested against the threshold before the update, which starts at zero.
    CHECK(v.threshold == 0.0);
    CHECK(v.is_outlier);
}

TEST_CASE("ewma: delta equal to the mean leaves the state alone")
{
    ThresholdDetector d(no_warmup(DetectorScheme::EwmaRtta));
    d.set_state(0.05, 1e-4);
    const double th = d.threshold();
    (void)d.update(0.05);
    CHECK(d.last_alpha() == 0.0);
    CHECK(d.mu() == 0.05);
    CHECK(d.sigma2() == 1e-4);
    CHECK(d.threshold() == th);
}

TEST_CASE("ewma: alpha is capped")
{
    ThresholdDetector d(no_warmup(DetectorScheme::EwmaRtta));
    d.set_state(0.0, 1e-6);
    (void)d.update(1e3);
    CHECK(d.last_alpha() == 0.01);
}

TEST_CASE("ewma invariants under random streams")
{
    std::mt19937_64 rng(21);
    std::normal_distribution<double> n(0.0, 1.0);
    std::uniform_real_distribution<double> scale(1e-4, 10.0);
    for (int run = 0; run < 50; ++run) {
        ThresholdDetector d(no_warmup(DetectorScheme::EwmaRtta));
        const double s = scale(rng);
        double lo = 0.0, hi = 0.0;  // hull of mu0 and every delta
        for (int i = 0; i < 500; ++i) {
            const double x = s * n(rng) + (i % 97 == 0 ? 50 * s : 0.0);
            lo = std::min(lo, x);
            hi = std::max(hi, x);
            const double th_prev = d.threshold();
            const auto v = d.update(x);
            CHECK(d.last_alpha() >= 0.0);
            CHECK(d.last_alpha() <= 0.01);
            CHECK(d.sigma2() >= 0.0);
            CHECK(d.mu() >= lo - 1e-15);
            CHECK(d.mu() <= hi + 1e-15);
            CHECK(v.threshold == th_prev);
            CHECK(v.is_outlier == (std::abs(x) > v.threshold));
        }
    }
}

TEST_CASE("ewma constant stream converges without outliers")
{
    ThresholdDetector d(no_warmup(DetectorScheme::EwmaRtta));
    d.set_state(0.0, 1e-4);
    const double k = 0.02;
    double prev_gap = std::abs(k - d.mu());
    bool fired_late = false;
    for (int i = 0; i < 2000; ++i) {
        const auto v = d.update(k);
        const double gap = std::abs(k - d.mu());
        CHECK(gap <= prev_gap);
        prev_gap = gap;
        if (i > 0 && std::abs(k) <= v.threshold && v.is_outlier) fired_late = true;
    }
    CHECK_FALSE(fired_late);
}

TEST_CASE("verdict definition holds for every scheme after warm-up")
{
    std::mt19937_64 rng(4);
    std::normal_distribution<double> n(0.0, 0.01);
    for (auto s : {DetectorScheme::StaticNormal, DetectorScheme::MovingWindow, DetectorScheme::EwmaRtta}) {
        DetectorOptions o;
        o.scheme = s;
        o.window_capacity = 20;
        ThresholdDetector d(o);
        for (int i = 0; i < 400; ++i) {
            const double x = n(rng) + (i == 200 ? 1.0 : 0.0);
            const auto v = d.update(x);
            if (i < o.warmup) {
                CHECK(v.warmup);
                CHECK_FALSE(v.is_outlier);
            } else {
                CHECK(v.is_outlier == (std::abs(x) > v.threshold));
            }
        }
    }
}

TEST_CASE("static scheme matches the batch formula")
{
    std::mt19937_64 rng(8);
    std::uniform_real_distribution<double> u(-1.0, 1.0);
    ThresholdDetector d(no_warmup(DetectorScheme::StaticNormal));
    std::vector<double> seen;
    for (int i = 0; i < 300; ++i) {
        seen.push_back(u(rng));
        const auto v = d.update(seen.back());
        CHECK(v.threshold == doctest::Approx(static_threshold(seen)).epsilon(1e-10));
    }
}

TEST_CASE("stability metric")
{
    auto make = [](int outliers, int total) {
        std::vector<AnomalyVerdict> v(static_cast<std::size_t>(total));
        for (int i = 0; i < outliers; ++i) v[static_cast<std::size_t>(i * (total / outliers))].is_outlier = true;
        return v;
    };
    CHECK(stability_metric(make(3, 6000)) == doctest::Approx(0.9995).epsilon(1e-12));
    CHECK(stability_metric(make(15, 6000)) == doctest::Approx(0.9975).epsilon(1e-12));
    CHECK(stability_metric(std::vector<AnomalyVerdict>(17)) == 1.0);
    CHECK(throws_code([] { (void)stability_metric(std::vector<AnomalyVerdict>{}); }, Errc::insufficient_data));

    std::mt19937_64 rng(99);
    std::bernoulli_distribution b(0.05);
    for (int run = 0; run < 100; ++run) {
        std::vector<AnomalyVerdict> v(1 + run * 13);
        int count = 0;
        for (auto& x : v) {
            x.is_outlier = b(rng);
            count += x.is_outlier ? 1 : 0;
        }
        CHECK(stability_metric(v) == 1.0 - static_cast<double>(count) / static_cast<double>(v.size()));
    }
}

TEST_CASE("rate limit examples")
{
    CHECK(rate_limit(0.0, 5.0, 1.0) == 1.0);
    CHECK(rate_limit(0.0, 0.5, 1.0) == 0.5);
    CHECK(rate_limit(2.0, -7.0, 3.0) == -1.0);
}

TEST_CASE("detectors are independent per variable")
{
    ThresholdDetector a, b;
    for (int i = 0; i < 50; ++i) (void)a.update(0.01 * i);
    CHECK(b.count() == 0);
    CHECK(b.mu() == 0.0);
    CHECK(b.threshold() == 0.0);
}

TEST_CASE("detector option validation and names")
{
    DetectorOptions o;
    o.alpha_cap = 0.0;
    CHECK(throws_code([&] { ThresholdDetector d(o); }, Errc::config));
    CHECK(parse_scheme("ewma_rtta") == DetectorScheme::EwmaRtta);
    CHECK(parse_scheme("moving_window") == DetectorScheme::MovingWindow);
    CHECK(parse_scheme("normal") == DetectorScheme::StaticNormal);
    CHECK(throws_code([] { (void)parse_scheme("cusum"); }, Errc::config));
}

}
