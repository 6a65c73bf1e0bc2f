#include "tdcosim/scenario.hpp"

#include "tdcosim/error.hpp"

#include <cmath>
#include <fstream>
#include <numbers>

namespace tdcosim {

using nlohmann::json;

namespace {

constexpr double deg = std::numbers::pi / 180.0;

GeneratorParams machine(std::string name, double m, double d, double r, double tg, double k, double dispatch,
                        double support)
{
    GeneratorParams g;
    g.name = std::move(name);
    g.inertia_m = m;
    g.damping_d = d;
    g.droop_r = r;
    g.governor_tg = tg;
    g.swing_coupling = k;
    g.p_dispatch = dispatch;
    g.voltage_support = support;
    return g;
}

template <class T>
void read(const json& j, const char* key, T& into)
{
    if (j.contains(key)) into = j.at(key).get<T>();
}

const json& section(const json& doc, const char* key)
{
    static const json empty = json::object();
    if (!doc.contains(key)) return empty;
    const json& s = doc.at(key);
    if (!s.is_object()) throw Error(Errc::config, std::string("section '") + key + "' must be an object");
    return s;
}

} // namespace

ScenarioConfig standard_scenario(bool agc)
{
    ScenarioConfig c;
    c.name = agc ? "standard-agc" : "standard";
    c.t_t = 0.01;
    c.t_d = 0.0001;
    c.duration = 60.0;

    TransmissionParams& tx = c.transmission;
    tx.generators = {
        machine("G1", 60.0, 40.0, 0.04, 1.0, 8.0, 6.0, 0.0),
        machine("G2", 50.0, 33.0, 0.045, 1.0, 6.0, 5.0, 0.0),
        machine("G3", 4.0, 8.0, 0.05, 0.5, 4.0, 0.4, 0.01),
    };
    tx.load_voltage_exponent = 0.0;
    tx.load_voltage_sensitivity = 0.02;
    tx.agc.enabled = agc;
    tx.agc.bias_b = 20.0;  // MW per 0.1 Hz, the natural response of the two large units
    tx.agc.kp = 0.0;
    tx.agc.ki = 0.25;
    tx.agc.participation = {0.55, 0.449, 0.0, 0.001};

    DpvPlant a;
    a.name = "PV1";
    a.p_mpp = 750.0;
    a.reserve = 120.0;
    a.droop_d = droop_for_reserve(a.reserve, a.db_uf, 0.3);
    a.sfr_share = 0.6;
    DpvPlant b;
    b.name = "PV2";
    b.p_mpp = 500.0;
    b.reserve = 80.0;
    b.droop_d = droop_for_reserve(b.reserve, b.db_uf, 0.3);
    b.sfr_share = 0.4;
    c.distribution.plants = {a, b};

    c.events = {
        {EventKind::ThreePhaseFault, 20.0, 0.8, -1},
        {EventKind::FaultClear, 20.08, 0.0, -1},
        {EventKind::GenTrip, 40.0, 40.0, 2},
    };
    return c;
}

ScenarioConfig scenario_from_json(const json& doc)
try {
    if (!doc.is_object()) throw Error(Errc::config, "scenario must be a JSON object");
    ScenarioConfig c;
    read(doc, "name", c.name);
    read(doc, "seed", c.seed);

    const json& ts = section(doc, "timesteps");
    read(ts, "t_t", c.t_t);
    read(ts, "t_d", c.t_d);
    read(ts, "duration", c.duration);

    const json& m = section(doc, "method");
    if (m.contains("name")) c.method = parse_method(m.at("name").get<std::string>());
    read(m, "lpf_alpha", c.lpf_alpha);
    read(m, "strict_refill", c.strict_refill);
    read(m, "rate_limit", c.rate_limit_enabled);

    const json& d = section(doc, "detector");
    const std::string scheme = d.value("scheme", std::string("ewma"));
    if (scheme == "none") {
        c.detector.reset();
    } else {
        DetectorOptions o;
        o.scheme = parse_scheme(scheme);
        read(d, "alpha_cap", o.alpha_cap);
        read(d, "c", o.c);
        read(d, "epsilon", o.epsilon);
        read(d, "window", o.window_capacity);
        read(d, "warmup", o.warmup);
        read(d, "signed_mean", o.signed_mean);
        c.detector = o;
    }

    const json& p = section(doc, "pll");
    read(p, "kp", c.pll.kp);
    read(p, "ki", c.pll.ki);
    read(p, "amplitude_floor", c.pll.amplitude_floor);
    read(p, "filter_tau", c.pll.filter_tau);

    const json& t = section(doc, "transmission");
    TransmissionParams& tx = c.transmission;
    read(t, "f0", tx.f0);
    read(t, "s_base_mva", tx.s_base_mva);
    read(t, "v_nominal", tx.v_nominal);
    read(t, "load_voltage_sensitivity", tx.load_voltage_sensitivity);
    read(t, "load_voltage_exponent", tx.load_voltage_exponent);
    if (t.contains("angle_offset_deg")) tx.angle_offset = t.at("angle_offset_deg").get<double>() * deg;
    read(t, "noise_v_std", tx.noise_v_std);
    if (t.contains("noise_theta_std_deg")) tx.noise_theta_std = t.at("noise_theta_std_deg").get<double>() * deg;
    if (t.contains("generators")) {
        for (const json& g : t.at("generators")) {
            GeneratorParams gp;
            read(g, "name", gp.name);
            read(g, "inertia_m", gp.inertia_m);
            read(g, "damping_d", gp.damping_d);
            read(g, "droop_r", gp.droop_r);
            read(g, "governor_tg", gp.governor_tg);
            read(g, "swing_coupling", gp.swing_coupling);
            read(g, "p_dispatch", gp.p_dispatch);
            read(g, "voltage_support", gp.voltage_support);
            tx.generators.push_back(gp);
        }
    }
    const json& a = section(t, "agc");
    read(a, "enabled", tx.agc.enabled);
    read(a, "bias_b", tx.agc.bias_b);
    read(a, "kp", tx.agc.kp);
    read(a, "ki", tx.agc.ki);
    read(a, "participation", tx.agc.participation);

    const json& f = section(doc, "distribution");
    c.distribution.f0 = tx.f0;
    c.pll.f0 = tx.f0;
    read(f, "p_load_kw", c.distribution.p_load_kw);
    read(f, "q_load_kvar", c.distribution.q_load_kvar);
    if (f.contains("plants")) {
        for (const json& pj : f.at("plants")) {
            DpvPlant pl;
            read(pj, "name", pl.name);
            read(pj, "p_mpp", pl.p_mpp);
            read(pj, "reserve", pl.reserve);
            read(pj, "p_min", pl.p_min);
            read(pj, "db_uf", pl.db_uf);
            read(pj, "db_of", pl.db_of);
            pl.droop_d = droop_for_reserve(pl.reserve, pl.db_uf, 0.3, tx.f0);
            read(pj, "droop_d", pl.droop_d);
            read(pj, "sfr_share", pl.sfr_share);
            c.distribution.plants.push_back(pl);
        }
    }

    if (doc.contains("events")) {
        for (const json& e : doc.at("events")) {
            GridEvent ev;
            ev.kind = parse_event_kind(e.at("kind").get<std::string>());
            ev.t = e.at("t").get<double>();
            read(e, "magnitude", ev.magnitude);
            read(e, "target", ev.target);
            c.events.push_back(ev);
        }
    }

    const json& o = section(doc, "output");
    read(o, "dir", c.output_dir);

    validate(c);
    return c;
} catch (const json::exception& e) {
    throw Error(Errc::config, std::string("scenario: ") + e.what());
}

json scenario_to_json(const ScenarioConfig& c)
{
    json doc;
    doc["name"] = c.name;
    doc["seed"] = c.seed;
    doc["timesteps"] = {{"t_t", c.t_t}, {"t_d", c.t_d}, {"duration", c.duration}};
    doc["method"] = {{"name", std::string(to_string(c.method))},
                     {"lpf_alpha", c.lpf_alpha},
                     {"strict_refill", c.strict_refill},
                     {"rate_limit", c.rate_limit_enabled}};
    if (c.detector) {
        const DetectorOptions& o = *c.detector;
        doc["detector"] = {{"scheme", std::string(to_string(o.scheme))},
                           {"alpha_cap", o.alpha_cap},
                           {"c", o.c},
                           {"epsilon", o.epsilon},
                           {"window", o.window_capacity},
                           {"warmup", o.warmup},
                           {"signed_mean", o.signed_mean}};
    } else {
        doc["detector"] = {{"scheme", "none"}};
    }
    doc["pll"] = {{"kp", c.pll.kp},
                  {"ki", c.pll.ki},
                  {"amplitude_floor", c.pll.amplitude_floor},
                  {"filter_tau", c.pll.filter_tau}};

    const TransmissionParams& tx = c.transmission;
    json gens = json::array();
    for (const auto& g : tx.generators) {
        gens.push_back({{"name", g.name},
                        {"inertia_m", g.inertia_m},
                        {"damping_d", g.damping_d},
                        {"droop_r", g.droop_r},
                        {"governor_tg", g.governor_tg},
                        {"swing_coupling", g.swing_coupling},
                        {"p_dispatch", g.p_dispatch},
                        {"voltage_support", g.voltage_support}});
    }
    doc["transmission"] = {{"f0", tx.f0},
                           {"s_base_mva", tx.s_base_mva},
                           {"v_nominal", tx.v_nominal},
                           {"load_voltage_sensitivity", tx.load_voltage_sensitivity},
                           {"load_voltage_exponent", tx.load_voltage_exponent},
                           {"angle_offset_deg", tx.angle_offset / deg},
                           {"noise_v_std", tx.noise_v_std},
                           {"noise_theta_std_deg", tx.noise_theta_std / deg},
                           {"generators", gens},
                           {"agc",
                            {{"enabled", tx.agc.enabled},
                             {"bias_b", tx.agc.bias_b},
                             {"kp", tx.agc.kp},
                             {"ki", tx.agc.ki},
                             {"participation", tx.agc.participation}}}};

    json plants = json::array();
    for (const auto& p : c.distribution.plants) {
        plants.push_back({{"name", p.name},
                          {"p_mpp", p.p_mpp},
                          {"reserve", p.reserve},
                          {"p_min", p.p_min},
                          {"droop_d", p.droop_d},
                          {"db_uf", p.db_uf},
                          {"db_of", p.db_of},
                          {"sfr_share", p.sfr_share}});
    }
    doc["distribution"] = {{"p_load_kw", c.distribution.p_load_kw},
                           {"q_load_kvar", c.distribution.q_load_kvar},
                           {"plants", plants}};

    json events = json::array();
    for (const auto& e : c.events) {
        json ej = {{"kind", std::string(to_string(e.kind))}, {"t", e.t}, {"magnitude", e.magnitude}};
        if (e.kind == EventKind::GenTrip) ej["target"] = e.target;
        events.push_back(ej);
    }
    doc["events"] = events;
    doc["output"] = {{"dir", c.output_dir}};
    return doc;
}

ScenarioConfig load_scenario(const std::filesystem::path& path)
{
    std::ifstream in(path);
    if (!in) throw Error(Errc::io, "cannot open scenario file " + path.string());
    json doc;
    try {
        in >> doc;
    } catch (const json::exception& e) {
        throw Error(Errc::config, path.string() + ": " + e.what());
    }
    return scenario_from_json(doc);
}

void save_scenario(const ScenarioConfig& cfg, const std::filesystem::path& path)
{
    std::ofstream out(path);
    if (!out) throw Error(Errc::io, "cannot write " + path.string());
    out << scenario_to_json(cfg).dump(2) << '\n';
}

} // namespace tdcosim
