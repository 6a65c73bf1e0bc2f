#include "tdcosim/bench.hpp"

#include <chrono>
#include <cmath>

namespace tdcosim {

BenchResult bench_bridge(Method method, std::optional<DetectorOptions> detector, int ratio, double t_d,
                         long long exchanges)
{
    BridgeOptions opts;
    opts.extrapolation.method = method;
    opts.detector = detector;
    opts.ratio = ratio;
    BoundaryBridge bridge(opts);
    const double t_t = t_d * ratio;

    volatile double sink = 0.0;
    const auto start = std::chrono::steady_clock::now();
    for (long long k = 0; k < exchanges; ++k) {
        const double t = static_cast<double>(k) * t_t;
        bridge.on_exchange({t, 1.0 + 0.01 * std::sin(3.0 * t), -0.32 + 0.05 * std::sin(2.0 * t)});
        for (int j = 0; j < ratio; ++j) {
            const BridgeOutput out = bridge.fine_step(t + j * t_d);
            sink = sink + out.v_mag + out.theta;
        }
    }
    const double elapsed = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();

    BenchResult r;
    r.method = method;
    r.detector = detector;
    r.ratio = ratio;
    r.fine_steps = exchanges * ratio;
    r.ns_per_fine_step = elapsed * 1e9 / static_cast<double>(r.fine_steps);
    r.budget_fraction = r.ns_per_fine_step * 1e-9 / t_d;
    return r;
}

} // namespace tdcosim
