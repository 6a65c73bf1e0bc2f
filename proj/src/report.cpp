#include "tdcosim/report.hpp"

#include "tdcosim/error.hpp"

#include <algorithm>
#include <cstdio>
#include <fstream>
#include <numbers>
#include <sstream>

namespace tdcosim {

namespace {

constexpr double kDeg = 180.0 / std::numbers::pi;

class CsvFile {
public:
    explicit CsvFile(const std::filesystem::path& path) : out_(path, std::ios::binary)
    {
        if (!out_) throw Error(Errc::io, "cannot write " + path.string());
    }

    void header(const char* h) { out_ << h << '\n'; }

    CsvFile& num(double v)
    {
        char buf[32];
        const int n = std::snprintf(buf, sizeof buf, "%.12g", v);
        sep();
        out_.write(buf, n);
        return *this;
    }

    CsvFile& text(const char* s)
    {
        sep();
        out_ << s;
        return *this;
    }

    void end()
    {
        out_ << '\n';
        first_ = true;
    }

private:
    void sep()
    {
        if (!first_) out_ << ',';
        first_ = false;
    }

    std::ofstream out_;
    bool first_ = true;
};

std::string pct(double v)
{
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.6g", v);
    return buf;
}

} // namespace

void write_fine_csv(const std::filesystem::path& path, const FineSeries& f)
{
    CsvFile csv(path);
    csv.header("t,v_hat,theta_hat,f_pcc,p_dpv,p_pfr,p_sfr,p_fb,q_fb,p_avail");
    for (std::size_t i = 0; i < f.size(); ++i) {
        csv.num(f.t[i]).num(f.v_hat[i]).num(f.theta_hat[i] * kDeg).num(f.f_pcc[i]).num(f.p_dpv[i]).num(f.p_pfr[i]);
        csv.num(f.p_sfr[i]).num(f.p_fb[i]).num(f.q_fb[i]).num(f.p_avail[i]);
        csv.end();
    }
}

void write_coarse_csv(const std::filesystem::path& path, const std::vector<CoarseRecord>& coarse)
{
    CsvFile csv(path);
    csv.header("t,v,theta,f_sys,ace,p_sfr_total");
    for (const auto& c : coarse) {
        csv.num(c.t).num(c.v).num(c.theta * kDeg).num(c.f_sys).num(c.ace).num(c.p_sfr_total);
        csv.end();
    }
}

void write_verdicts_csv(const std::filesystem::path& path, const std::vector<VerdictRecord>& verdicts)
{
    CsvFile csv(path);
    csv.header("t,var,delta,th,outlier,reset");
    for (const auto& v : verdicts) {
        const double scale = v.var == 1 ? kDeg : 1.0;
        csv.num(v.t).text(v.var == 1 ? "theta" : "v_mag").num(v.delta * scale).num(v.th * scale);
        csv.num(v.outlier ? 1 : 0).num(v.reset ? 1 : 0);
        csv.end();
    }
}

void write_trace(const std::filesystem::path& dir, const RunTrace& trace)
{
    std::filesystem::create_directories(dir);
    if (trace.fine.size() > 0) write_fine_csv(dir / "fine.csv", trace.fine);
    if (!trace.coarse.empty()) write_coarse_csv(dir / "coarse.csv", trace.coarse);
    if (!trace.verdicts.empty()) write_verdicts_csv(dir / "verdicts.csv", trace.verdicts);
}

std::string detector_label(const std::optional<DetectorOptions>& d)
{
    return d ? std::string(to_string(d->scheme)) : std::string("none");
}

RunSummary summarize(const ScenarioConfig& cfg, const RunTrace& run, const RunTrace* truth, double wall_seconds)
{
    RunSummary s;
    s.scenario = cfg.name;
    s.method = std::string(to_string(cfg.method));
    s.detector = detector_label(cfg.detector);
    s.ratio = timestep_ratio(cfg.t_t, cfg.t_d);
    s.ok = run.ok;
    s.error = run.error;
    s.wall_seconds = wall_seconds;
    s.detection = detector_stats(run);
    if (run.fine.size() > 0) {
        try {
            s.sfr_nmae = sfr_delivery_nmae(run);
        } catch (const Error&) {
        }
    }
    if (truth && run.ok && truth->ok && truth->fine.size() == run.fine.size()) s.errors = trace_errors(*truth, run);
    return s;
}

nlohmann::json to_json(const RunSummary& s)
{
    nlohmann::json j;
    j["scenario"] = s.scenario;
    j["method"] = s.method;
    j["detector"] = s.detector;
    j["ratio"] = s.ratio;
    j["ok"] = s.ok;
    if (!s.ok) j["error"] = s.error;
    if (s.errors) {
        j["mape"] = {{"v_mag", s.errors->mape_v}, {"theta", s.errors->mape_theta}, {"f_pll", s.errors->mape_f}};
        j["nmae"] = {{"p_dpv", s.errors->nmae_p_dpv * 100.0}, {"p_fb", s.errors->nmae_p_fb * 100.0}};
    }
    if (s.sfr_nmae) j["nmae"]["p_sfr_delivery"] = *s.sfr_nmae * 100.0;
    j["outliers"] = {{"v_mag", s.detection.outliers_v}, {"theta", s.detection.outliers_theta}};
    j["resets"] = s.detection.resets;
    j["reset_times"] = s.detection.reset_times;
    j["stability"] = s.detection.stability;
    j["wall_seconds"] = s.wall_seconds;
    return j;
}

std::string to_text(const RunSummary& s)
{
    std::ostringstream o;
    o << "scenario   " << s.scenario << "\n";
    o << "method     " << s.method << "  detector " << s.detector << "  ratio " << s.ratio << "\n";
    o << "status     " << (s.ok ? "ok" : "FAILED: " + s.error) << "\n";
    if (s.errors) {
        o << "MAPE (%)   v_mag " << pct(s.errors->mape_v) << "  theta " << pct(s.errors->mape_theta) << "  f_pll "
          << pct(s.errors->mape_f) << "\n";
        o << "nMAE (%)   p_dpv " << pct(s.errors->nmae_p_dpv * 100.0) << "  p_fb " << pct(s.errors->nmae_p_fb * 100.0)
          << "\n";
    }
    if (s.sfr_nmae) o << "SFR delivery nMAE (%) " << pct(*s.sfr_nmae * 100.0) << "\n";
    o << "outliers   v_mag " << s.detection.outliers_v << "  theta " << s.detection.outliers_theta << "\n";
    o << "resets     " << s.detection.resets;
    if (!s.detection.reset_times.empty()) {
        o << "  at";
        for (double t : s.detection.reset_times) o << ' ' << pct(t);
    }
    o << "\n";
    o << "stability  " << pct(s.detection.stability) << "\n";
    o << "wall time  " << pct(s.wall_seconds) << " s\n";
    return o.str();
}

void write_summary(const std::filesystem::path& dir, const RunSummary& s)
{
    std::filesystem::create_directories(dir);
    std::ofstream txt(dir / "summary.txt", std::ios::binary);
    std::ofstream js(dir / "summary.json", std::ios::binary);
    if (!txt || !js) throw Error(Errc::io, "cannot write summary into " + dir.string());
    txt << to_text(s);
    js << to_json(s).dump(2) << '\n';
}

std::string format_compare_table(std::vector<CompareRow> rows)
{
    std::stable_sort(rows.begin(), rows.end(),
                     [](const CompareRow& a, const CompareRow& b) { return a.errors.mape_f < b.errors.mape_f; });
    std::ostringstream o;
    char line[256];
    std::snprintf(line, sizeof line, "%-4s %-10s %-13s %6s %12s %12s %12s %12s %10s %10s %7s\n", "rank", "method",
                  "detector", "ratio", "MAPE_V(%)", "MAPE_th(%)", "MAPE_f(%)", "nMAE_PV(%)", "impr_f(%)",
                  "impr_PV(%)", "resets");
    o << line;
    int rank = 1;
    for (const auto& r : rows) {
        std::snprintf(line, sizeof line, "%-4d %-10s %-13s %6d %12.4e %12.4e %12.4e %12.4e %10.2f %10.2f %7lld\n",
                      rank++, r.method.c_str(), r.detector.c_str(), r.ratio, r.errors.mape_v, r.errors.mape_theta,
                      r.errors.mape_f, r.errors.nmae_p_dpv * 100.0, r.improvement_f, r.improvement_dpv,
                      r.detection.resets);
        o << line;
    }
    return o.str();
}

nlohmann::json to_json(const std::vector<CompareRow>& rows)
{
    nlohmann::json arr = nlohmann::json::array();
    for (const auto& r : rows) {
        arr.push_back({{"method", r.method},
                       {"detector", r.detector},
                       {"ratio", r.ratio},
                       {"mape_v", r.errors.mape_v},
                       {"mape_theta", r.errors.mape_theta},
                       {"mape_f", r.errors.mape_f},
                       {"nmae_p_dpv", r.errors.nmae_p_dpv * 100.0},
                       {"nmae_p_fb", r.errors.nmae_p_fb * 100.0},
                       {"improvement_f", r.improvement_f},
                       {"improvement_dpv", r.improvement_dpv},
                       {"resets", r.detection.resets},
                       {"outliers_theta", r.detection.outliers_theta},
                       {"stability", r.detection.stability}});
    }
    return arr;
}

} // namespace tdcosim
