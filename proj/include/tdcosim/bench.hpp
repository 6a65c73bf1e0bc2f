#pragma once

#include "tdcosim/bridge.hpp"

#include <optional>

namespace tdcosim {

struct BenchResult {
    Method method = Method::Quadratic;
    std::optional<DetectorOptions> detector;
    int ratio = 100;
    long long fine_steps = 0;
    double ns_per_fine_step = 0.0;  // exchange cost amortised over the interval
    double budget_fraction = 0.0;   // of one fine timestep
};

/// Times the boundary bridge alone (detector, buffer, prediction) on a
/// synthetic smooth boundary stream. Machine dependent.
BenchResult bench_bridge(Method method, std::optional<DetectorOptions> detector, int ratio, double t_d,
                         long long exchanges);

} // namespace tdcosim
