#include "support.hpp"
#include "tdcosim/transmission.hpp"

#include <cmath>
#include <numbers>
#include <random>
#include <vector>

using namespace tdcosim;

namespace {

GeneratorParams gen(double m, double d, double r, double tg, double k, double p)
{
    GeneratorParams g;
    g.name = "g";
    g.inertia_m = m;
    g.damping_d = d;
    g.droop_r = r;
    g.governor_tg = tg;
    g.swing_coupling = k;
    g.p_dispatch = p;
    return g;
}

GeneratorState at_hz(double f)
{
    GeneratorState g;
    g.omega = f / 60.0;
    return g;
}

const Feedback kFb{950.0, 600.0, 200.0};

} // namespace

TEST_SUITE("transmission") {

TEST_CASE("system frequency examples")
{
    std::vector<GeneratorState> g(3, at_hz(60.0));
    CHECK(system_frequency(g, 60.0) == doctest::Approx(60.0).epsilon(1e-15));
    g = {at_hz(59.9), at_hz(60.1)};
    CHECK(system_frequency(g, 60.0) == doctest::Approx(60.0).epsilon(1e-14));
    g = {at_hz(59.8), at_hz(60.0), at_hz(60.1)};
    CHECK(system_frequency(g, 60.0) == doctest::Approx(59.9667).epsilon(1e-5));
    for (auto& x : g) x.online = false;
    CHECK(throws_code([&] { (void)system_frequency(g, 60.0); }, Errc::collapse));
}

TEST_CASE("ace examples")
{
    CHECK(ace(60.0, 60.0, 37.0) == 0.0);
    CHECK(ace(59.95, 60.0, 100.0) == doctest::Approx(-50.0).epsilon(1e-10));
    CHECK(ace(60.05, 60.0, 100.0) == doctest::Approx(50.0).epsilon(1e-10));
}

TEST_CASE("agc examples")
{
    Agc zero({true, 20.0, 0.3, 0.1, {1.0}});
    for (int i = 0; i < 100; ++i) CHECK(zero.step(0.0, 0.01) == 0.0);

    Agc p_only({true, 20.0, 1.0, 0.0, {1.0}});
    CHECK(p_only.step(-50.0, 0.01) == doctest::Approx(50.0));

    Agc i_only({true, 20.0, 0.0, 0.1, {1.0}});
    double out = 0.0;
    for (int i = 0; i < 1000; ++i) out = i_only.step(-10.0, 0.01);
    CHECK(out == doctest::Approx(10.0).epsilon(1e-9));
}

TEST_CASE("allocate sfr")
{
    const std::vector<double> one{1.0}, split{0.3, 0.7}, bad{0.5, 0.6};
    CHECK(allocate_sfr(10, one)[0] == 10);
    const auto s = allocate_sfr(10, split);
    CHECK(s[0] == doctest::Approx(3));
    CHECK(s[1] == doctest::Approx(7));
    for (double x : allocate_sfr(0, split)) CHECK(x == 0.0);
    CHECK(throws_code([&] { (void)allocate_sfr(1, bad); }, Errc::config));

    std::mt19937_64 rng(2);
    std::uniform_real_distribution<double> u(0.0, 1.0), tot(-500.0, 500.0);
    for (int i = 0; i < 500; ++i) {
        std::vector<double> beta(1 + i % 6);
        double sum = 0.0;
        for (auto& b : beta) sum += (b = u(rng));
        for (auto& b : beta) b /= sum;
        double norm = 0.0;
        for (double b : beta) norm += b;
        if (std::abs(norm - 1.0) > 1e-9) continue;
        const double t = tot(rng);
        double back = 0.0;
        for (double x : allocate_sfr(t, beta)) back += x;
        CHECK(std::abs(back - t) < 1e-9);
    }
}

TEST_CASE("equilibrium is a fixed point")
{
    TransmissionParams p;
    p.generators = {gen(10, 2, 0.05, 0.5, 10, 1.0), gen(8, 1, 0.04, 0.4, 6, 0.7), gen(4, 1, 0.05, 0.3, 5, 0.2)};
    TransmissionSystem tx(p, {}, 0.01, kFb);
    const TxOutput o0 = tx.initial();
    CHECK(o0.f_sys == 60.0);
    for (int k = 0; k < 3000; ++k) {
        const TxOutput o = tx.step(kFb);
        CHECK(std::abs(o.f_sys - 60.0) < 1e-12);
        CHECK(o.sample.v_mag == o0.sample.v_mag);
        CHECK(std::abs(o.sample.theta - o0.sample.theta) < 1e-12);
        for (const auto& g : tx.generators()) {
            CHECK(std::abs(g.omega - 1.0) < 1e-12);
            CHECK(std::abs(g.pm - g.pe) < 1e-12);
        }
    }
    CHECK(o0.sample.theta == doctest::Approx(p.angle_offset).epsilon(1e-12));
}

TEST_CASE("40 MW trip settles on the droop line")
{
    // Remaining unit: 1/R = 12 pu on 1000 MVA = 200 MW/Hz, no damping.
    TransmissionParams p;
    p.s_base_mva = 1000.0;
    p.generators = {gen(10, 0, 1.0 / 12.0, 0.5, 10, 0.5), gen(2, 0, 0.05, 0.5, 4, 0.04)};
    TransmissionSystem tx(p, {{EventKind::GenTrip, 1.0, 40.0, 1}}, 0.01, kFb);
    (void)tx.initial();
    double f_min = 60.0, f = 60.0;
    for (int k = 0; k < 3000; ++k) {
        f = tx.step(kFb).f_sys;
        f_min = std::min(f_min, f);
        if (tx.time() < 1.5) CHECK(f <= 60.0 + 1e-12);
    }
    CHECK(f == doctest::Approx(59.8).epsilon(1e-6));
    CHECK(f_min < 59.8);
}

TEST_CASE("droop law for random systems")
{
    std::mt19937_64 rng(31);
    std::uniform_real_distribution<double> m(4, 12), d(0, 3), r(0.03, 0.08), tg(0.2, 0.8), k(4, 12), dp(10, 60);
    for (int run = 0; run < 10; ++run) {
        TransmissionParams p;
        double stiff = 0.0;
        for (int i = 0; i < 3; ++i) {
            p.generators.push_back(gen(m(rng), d(rng), r(rng), tg(rng), k(rng), 1.0));
            stiff += 1.0 / p.generators.back().droop_r + p.generators.back().damping_d;
        }
        const double step_mw = dp(rng);
        double tg_max = 0.0;
        for (const auto& g : p.generators) tg_max = std::max(tg_max, g.governor_tg);
        TransmissionSystem tx(p, {{EventKind::LoadStep, 0.5, step_mw, -1}}, 0.01, kFb);
        (void)tx.initial();
        double f = 60.0;
        // Swing modes ring longer than the governors; 30 s is well past both.
        for (int s = 0; s < 3050; ++s) f = tx.step(kFb).f_sys;
        CHECK(tx.time() > 0.5 + 5 * tg_max);
        const double expected = -(step_mw / p.s_base_mva) / stiff * 60.0;
        CHECK((f - 60.0) == doctest::Approx(expected).epsilon(0.02));
    }
}

TEST_CASE("agc restores frequency after a trip")
{
    TransmissionParams p;
    p.s_base_mva = 1000.0;
    p.generators = {gen(10, 2, 0.05, 0.5, 10, 0.5), gen(8, 2, 0.05, 0.5, 8, 0.4), gen(2, 1, 0.05, 0.5, 4, 0.04)};
    // Bias near the natural response (about 73 MW per 0.1 Hz).
    p.agc = {true, 70.0, 0.0, 0.25, {0.5, 0.5, 0.0, 0.0}};
    TransmissionSystem tx(p, {{EventKind::GenTrip, 5.0, 40.0, 2}}, 0.01, kFb);
    (void)tx.initial();
    double f = 60.0;
    while (tx.time() < 35.0 - 1e-9) f = tx.step(kFb).f_sys;
    CHECK(std::abs(f - 60.0) < 1e-3);
}

TEST_CASE("fault holds the residual for exactly the cleared window")
{
    TransmissionParams p;
    p.generators = {gen(10, 2, 0.05, 0.5, 10, 1.0), gen(8, 2, 0.05, 0.5, 8, 0.5)};
    for (double dt : {0.01, 0.005, 0.004, 0.002}) {
        TransmissionSystem tx(p, {{EventKind::ThreePhaseFault, 1.0, 0.3, -1}, {EventKind::FaultClear, 1.08, 0, -1}},
                              dt, kFb);
        (void)tx.initial();
        int faulted = 0;
        for (int k = 0; k < static_cast<int>(2.0 / dt); ++k) {
            const auto o = tx.step(kFb);
            if (o.sample.v_mag == 0.3) ++faulted;
        }
        CHECK(faulted == static_cast<int>(std::ceil(0.08 / dt - 1e-9)));
    }
}

TEST_CASE("tripping every unit collapses the system")
{
    TransmissionParams p;
    p.generators = {gen(10, 2, 0.05, 0.5, 10, 1.0)};
    TransmissionSystem tx(p, {{EventKind::GenTrip, 0.05, 0.0, 0}}, 0.01, kFb);
    (void)tx.initial();
    bool collapsed = false;
    try {
        for (int k = 0; k < 10; ++k) (void)tx.step(kFb);
    } catch (const Error& e) {
        collapsed = e.code() == Errc::collapse;
    }
    CHECK(collapsed);
}

TEST_CASE("configuration checks")
{
    TransmissionParams p;
    p.generators = {gen(10, 2, 0.05, 0.05, 10, 1.0)};
    CHECK(throws_code([&] { TransmissionSystem tx(p, {}, 0.01, kFb); }, Errc::config));
    p.generators = {gen(10, 2, 0.05, 0.5, 10, 1.0)};
    CHECK(throws_code([&] { TransmissionSystem tx(p, {{EventKind::ThreePhaseFault, 1, 1.2, -1}}, 0.01, kFb); },
                      Errc::config));
    CHECK(throws_code([&] { TransmissionSystem tx(p, {{EventKind::GenTrip, 1, 40.0, 0}}, 0.01, kFb); },
                      Errc::config));
    CHECK(throws_code([&] { TransmissionSystem tx(p, {{EventKind::GenTrip, 1, 0.0, 3}}, 0.01, kFb); },
                      Errc::config));
    p.agc = {true, 20, 0, 0.1, {0.5, 0.4}};
    CHECK(throws_code([&] { TransmissionSystem tx(p, {}, 0.01, kFb); }, Errc::config));
}

TEST_CASE("event names")
{
    for (auto k : {EventKind::ThreePhaseFault, EventKind::FaultClear, EventKind::GenTrip, EventKind::LoadStep})
        CHECK(parse_event_kind(to_string(k)) == k);
    CHECK(throws_code([] { (void)parse_event_kind("islanding"); }, Errc::config));
}

}
