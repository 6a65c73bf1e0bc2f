#pragma once

#include "tdcosim/error.hpp"

#include <doctest.h>

namespace test {

// True when `fn` throws tdcosim::Error with the given code.
template <class F>
bool throws_code(F&& fn, tdcosim::Errc code)
{
    try {
        fn();
    } catch (const tdcosim::Error& e) {
        return e.code() == code;
    }
    return false;
}

} // namespace test

using test::throws_code;

#include "tdcosim/scenario.hpp"

namespace test {

// Standard system over 3 s with the fault at 1 s and the trip at 2 s.
inline tdcosim::ScenarioConfig short_scenario(bool agc = false)
{
    tdcosim::ScenarioConfig cfg = tdcosim::standard_scenario(agc);
    cfg.duration = 3.0;
    for (auto& e : cfg.events) {
        if (e.kind == tdcosim::EventKind::ThreePhaseFault) e.t = 1.0;
        if (e.kind == tdcosim::EventKind::FaultClear) e.t = 1.08;
        if (e.kind == tdcosim::EventKind::GenTrip) e.t = 2.0;
    }
    return cfg;
}

} // namespace test
