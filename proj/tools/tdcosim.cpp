// tdcosim: two-rate transmission/distribution co-simulation driver.

#include "tdcosim/bench.hpp"
#include "tdcosim/error.hpp"
#include "tdcosim/report.hpp"
#include "tdcosim/scenario.hpp"
#include "tdcosim/wire.hpp"

#include <CLI11.hpp>

#include <charconv>
#include <chrono>
#include <cstdio>
#include <fstream>
#include <iostream>

using namespace tdcosim;

namespace {

constexpr int kOk = 0;
constexpr int kRuntime = 1;
constexpr int kUsage = 2;

struct Common {
    std::string scenario;
    std::string method;
    std::string detector;
    std::string out;
    double t_t = 0.0;
};

void add_common(CLI::App* cmd, Common& c)
{
    cmd->add_option("-s,--scenario", c.scenario, "Scenario JSON file")->required();
    cmd->add_option("-m,--method", c.method, "hold | lpf | linear | quadratic");
    cmd->add_option("-d,--detector", c.detector, "none | static | window | ewma");
    cmd->add_option("-o,--out", c.out, "Output directory (default: scenario output.dir)");
    cmd->add_option("--t-t", c.t_t, "Override the transmission timestep in seconds");
}

std::optional<DetectorOptions> detector_from(const std::string& name, const std::optional<DetectorOptions>& base)
{
    if (name == "none") return std::nullopt;
    DetectorOptions o = base.value_or(DetectorOptions{});
    o.scheme = parse_scheme(name);
    return o;
}

ScenarioConfig load(const Common& c)
{
    ScenarioConfig cfg = load_scenario(c.scenario);
    if (!c.method.empty()) cfg.method = parse_method(c.method);
    if (!c.detector.empty()) cfg.detector = detector_from(c.detector, cfg.detector);
    if (c.t_t > 0.0) cfg.t_t = c.t_t;
    if (!c.out.empty()) cfg.output_dir = c.out;
    validate(cfg);
    return cfg;
}

double seconds_since(std::chrono::steady_clock::time_point t0)
{
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

std::vector<int> parse_ratios(const std::string& list)
{
    std::vector<int> out;
    std::size_t pos = 0;
    while (pos < list.size()) {
        const std::size_t comma = list.find(',', pos);
        const std::string item = list.substr(pos, comma == std::string::npos ? std::string::npos : comma - pos);
        int r = 0;
        const auto [end, ec] = std::from_chars(item.data(), item.data() + item.size(), r);
        if (ec != std::errc{} || end != item.data() + item.size() || r < 1)
            throw Error(Errc::config, "bad ratio '" + item + "'");
        out.push_back(r);
        if (comma == std::string::npos) break;
        pos = comma + 1;
    }
    return out;
}

int cmd_run(const Common& c, bool ground_truth, bool skip_truth)
{
    ScenarioConfig cfg = load(c);
    if (ground_truth) cfg = ground_truth_config(cfg);

    const auto t0 = std::chrono::steady_clock::now();
    const RunTrace trace = run(cfg);
    const double wall = seconds_since(t0);

    std::optional<RunTrace> truth;
    if (!ground_truth && !skip_truth && trace.ok) truth = run(ground_truth_config(cfg));

    write_trace(cfg.output_dir, trace);
    const RunSummary s = summarize(cfg, trace, truth ? &*truth : nullptr, wall);
    write_summary(cfg.output_dir, s);
    std::cout << to_text(s);
    return trace.ok ? kOk : kRuntime;
}

CompareRow make_row(const ScenarioConfig& cfg, const RunTrace& truth, const RunTrace& r, const TraceErrors& hold)
{
    CompareRow row;
    row.method = std::string(to_string(cfg.method));
    row.detector = detector_label(cfg.detector);
    row.ratio = timestep_ratio(cfg.t_t, cfg.t_d);
    row.errors = trace_errors(truth, r);
    row.detection = detector_stats(r);
    row.improvement_f = hold.mape_f > 0.0 ? (1.0 - row.errors.mape_f / hold.mape_f) * 100.0 : 0.0;
    row.improvement_dpv = hold.nmae_p_dpv > 0.0 ? (1.0 - row.errors.nmae_p_dpv / hold.nmae_p_dpv) * 100.0 : 0.0;
    return row;
}

void run_bench(const ScenarioConfig& cfg, nlohmann::json& report)
{
    const int ratio = timestep_ratio(cfg.t_t, cfg.t_d);
    std::printf("\nbridge cost per fine step (ratio %d, t_d %g s)\n", ratio, cfg.t_d);
    std::printf("%-10s %-8s %12s %12s\n", "method", "detector", "ns/step", "budget(%)");
    nlohmann::json rows = nlohmann::json::array();
    for (Method m : {Method::Hold, Method::Lpf, Method::Linear, Method::Quadratic}) {
        for (bool with_det : {false, true}) {
            const std::optional<DetectorOptions> det =
                with_det ? std::optional<DetectorOptions>(DetectorOptions{}) : std::nullopt;
            (void)bench_bridge(m, det, ratio, cfg.t_d, 200);  // warm-up
            const BenchResult b = bench_bridge(m, det, ratio, cfg.t_d, 6000);
            std::printf("%-10s %-8s %12.2f %12.4f\n", std::string(to_string(m)).c_str(),
                        detector_label(det).c_str(), b.ns_per_fine_step, b.budget_fraction * 100.0);
            rows.push_back({{"method", std::string(to_string(m))},
                            {"detector", detector_label(det)},
                            {"ns_per_fine_step", b.ns_per_fine_step},
                            {"budget_percent", b.budget_fraction * 100.0}});
        }
    }
    report["bench"] = rows;
}

int cmd_compare(const Common& c, const std::string& ratios, bool bench)
{
    const ScenarioConfig base = load(c);
    const std::vector<int> sweep = parse_ratios(ratios);
    const auto t0 = std::chrono::steady_clock::now();
    const RunTrace truth = run(ground_truth_config(base));
    if (!truth.ok) {
        std::cerr << "ground truth failed: " << truth.error << "\n";
        return kRuntime;
    }

    std::vector<CompareRow> rows;
    auto hold_errors = [&](ScenarioConfig cfg) {
        cfg.method = Method::Hold;
        cfg.detector.reset();
        return trace_errors(truth, run(cfg));
    };

    if (sweep.empty()) {
        const TraceErrors hold = hold_errors(base);
        for (Method m : {Method::Hold, Method::Lpf, Method::Linear, Method::Quadratic}) {
            for (const char* d : {"none", "static", "window", "ewma"}) {
                ScenarioConfig cfg = base;
                cfg.method = m;
                cfg.detector = detector_from(d, base.detector);
                const RunTrace r = run(cfg);
                if (!r.ok) {
                    std::cerr << to_string(m) << "/" << d << " failed: " << r.error << "\n";
                    return kRuntime;
                }
                rows.push_back(make_row(cfg, truth, r, hold));
            }
        }
    } else {
        for (int ratio : sweep) {
            ScenarioConfig cfg = base;
            cfg.t_t = base.t_d * ratio;
            validate(cfg);
            const TraceErrors hold = hold_errors(cfg);
            const RunTrace r = run(cfg);
            if (!r.ok) {
                std::cerr << "ratio " << ratio << " failed: " << r.error << "\n";
                return kRuntime;
            }
            rows.push_back(make_row(cfg, truth, r, hold));
        }
    }

    std::cout << "scenario " << base.name << " (ground truth: T_T = T_D = " << base.t_d << " s)\n";
    std::cout << format_compare_table(rows);
    nlohmann::json report;
    report["scenario"] = base.name;
    report["rows"] = to_json(rows);
    if (bench) run_bench(base, report);
    report["wall_seconds"] = seconds_since(t0);

    std::filesystem::create_directories(base.output_dir);
    std::ofstream(std::filesystem::path(base.output_dir) / "compare.json", std::ios::binary) << report.dump(2) << '\n';
    return kOk;
}

int finish_node(const ScenarioConfig& cfg, const RunTrace& trace, const char* role, double wall)
{
    write_trace(cfg.output_dir, trace);
    const RunSummary s = summarize(cfg, trace, nullptr, wall);
    write_summary(cfg.output_dir, s);
    if (!trace.ok) {
        std::cerr << role << ": run ended early: " << trace.error << "\n";
        return kRuntime;
    }
    std::cout << role << ": completed " << (trace.coarse.empty() ? trace.fine.size() : trace.coarse.size())
              << (trace.coarse.empty() ? " fine steps" : " exchanges") << " in " << wall << " s\n";
    return kOk;
}

int cmd_serve_tx(const Common& c, const std::string& host, std::uint16_t port)
{
    const ScenarioConfig cfg = load(c);
    wire::Listener listener(host, port);
    std::cout << "tx: listening on " << host << ":" << listener.port() << std::endl;
    wire::Session session(listener.accept());
    const auto t0 = std::chrono::steady_clock::now();
    const RunTrace trace = wire::run_tx_node(cfg, session);
    return finish_node(cfg, trace, "tx", seconds_since(t0));
}

int cmd_serve_dx(const Common& c, const std::string& host, std::uint16_t port, int retry_ms)
{
    const ScenarioConfig cfg = load(c);
    wire::Session session(wire::connect_to(host, port, retry_ms));
    const auto t0 = std::chrono::steady_clock::now();
    const RunTrace trace = wire::run_dx_node(cfg, session);
    return finish_node(cfg, trace, "dx", seconds_since(t0));
}

} // namespace

int main(int argc, char** argv)
{
    CLI::App app{"Two-rate transmission/distribution co-simulation"};
    app.require_subcommand(1);

    Common common;
    bool ground_truth = false;
    bool skip_truth = false;
    std::string ratios;
    bool bench = false;
    std::string host = "127.0.0.1";
    std::uint16_t port = 0;
    int retry_ms = 0;

    auto* run_cmd = app.add_subcommand("run", "Run one scenario and write traces plus a summary");
    add_common(run_cmd, common);
    run_cmd->add_flag("--ground-truth", ground_truth, "Force T_T = T_D with a hold bridge");
    run_cmd->add_flag("--no-truth", skip_truth, "Skip the ground-truth run used for error metrics");

    auto* cmp_cmd = app.add_subcommand("compare", "Rank methods and detectors against ground truth");
    add_common(cmp_cmd, common);
    cmp_cmd->add_option("--ratios", ratios, "Comma-separated T_T/T_D ratios for a sensitivity sweep");
    cmp_cmd->add_flag("--bench", bench, "Also time the bridge per fine step");

    auto* tx_cmd = app.add_subcommand("serve-tx", "Run the transmission node and wait for a distribution peer");
    add_common(tx_cmd, common);
    tx_cmd->add_option("--host", host, "Bind address");
    tx_cmd->add_option("-p,--port", port, "TCP port (0 picks a free one)");

    auto* dx_cmd = app.add_subcommand("serve-dx", "Run the distribution node against a transmission peer");
    add_common(dx_cmd, common);
    dx_cmd->add_option("--host", host, "Transmission node address");
    dx_cmd->add_option("-p,--port", port, "TCP port")->required();
    dx_cmd->add_option("--retry-ms", retry_ms, "Keep retrying a refused connection this long");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int rc = app.exit(e);
        return rc == 0 ? kOk : kUsage;
    }

    try {
        if (*run_cmd) return cmd_run(common, ground_truth, skip_truth);
        if (*cmp_cmd) return cmd_compare(common, ratios, bench);
        if (*tx_cmd) return cmd_serve_tx(common, host, port);
        if (*dx_cmd) return cmd_serve_dx(common, host, port, retry_ms);
    } catch (const Error& e) {
        std::cerr << "tdcosim: " << e.what() << "\n";
        if (e.code() == Errc::config) return kUsage;
        if (e.code() == Errc::io && !std::filesystem::exists(common.scenario)) return kUsage;
        return kRuntime;
    } catch (const std::exception& e) {
        std::cerr << "tdcosim: " << e.what() << "\n";
        return kRuntime;
    }
    return kUsage;
}
