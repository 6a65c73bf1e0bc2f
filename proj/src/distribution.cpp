#include "tdcosim/distribution.hpp"

#include "tdcosim/error.hpp"

#include <algorithm>
#include <cmath>

namespace tdcosim {

double droop_for_reserve(double reserve_kw, double deadband_hz, double full_deviation_hz, double f0)
{
    if (!(full_deviation_hz > deadband_hz))
        throw Error(Errc::config, "full-deployment deviation must exceed the deadband");
    return reserve_kw * f0 / (full_deviation_hz - deadband_hz);
}

void validate(const DpvPlant& p)
{
    if (p.reserve < 0.0 || p.droop_d < 0.0 || p.db_uf < 0.0 || p.db_of < 0.0)
        throw Error(Errc::config, "plant '" + p.name + "': reserve, droop and deadbands must be non-negative");
    if (!(0.0 <= p.p_min && p.p_min <= p.p_base() && p.p_base() <= p.p_mpp))
        throw Error(Errc::config, "plant '" + p.name + "': need 0 <= p_min <= p_base <= p_mpp");
    if (p.sfr_share < 0.0) throw Error(Errc::config, "plant '" + p.name + "': sfr_share must be non-negative");
}

void validate(const FeederParams& f)
{
    if (f.p_load_kw < 0.0) throw Error(Errc::config, "feeder load must be non-negative");
    double share = 0.0;
    for (const auto& p : f.plants) {
        validate(p);
        share += p.sfr_share;
    }
    if (!f.plants.empty() && std::abs(share - 1.0) > 1e-9)
        throw Error(Errc::config, "plant sfr_share values must sum to 1");
}

double dpv_pfr(double f_pcc, const DpvPlant& plant, double f0) noexcept
{
    const double uf_edge = f0 - plant.db_uf;
    const double of_edge = f0 + plant.db_of;
    if (f_pcc < uf_edge) return (uf_edge - f_pcc) / f0 * plant.droop_d;
    if (f_pcc > of_edge) return (of_edge - f_pcc) / f0 * plant.droop_d;
    return 0.0;
}

double dpv_reference(const DpvPlant& plant, double p_pfr, double p_sfr) noexcept
{
    return std::max(plant.p_base() + p_pfr + p_sfr, plant.p_min);
}

double dpv_output(double p_ref, const DpvPlant& plant) noexcept
{
    return std::max(std::min(p_ref, plant.p_mpp), plant.p_min);
}

void feeder_step(const FeederParams& feeder, double v_mag, double f_pcc, double p_sfr_request_kw, FeederStep& out)
{
    out.plants.resize(feeder.plants.size());
    out.p_dpv = out.p_pfr = out.p_sfr_request = out.p_sfr_delivered = 0.0;
    double p_avail = 0.0;
    for (std::size_t i = 0; i < feeder.plants.size(); ++i) {
        const DpvPlant& plant = feeder.plants[i];
        PlantOutput& po = out.plants[i];
        po.p_pfr = dpv_pfr(f_pcc, plant, feeder.f0);
        po.p_sfr_request = plant.sfr_share * p_sfr_request_kw;
        po.p_dpv = dpv_output(dpv_reference(plant, po.p_pfr, po.p_sfr_request), plant);
        // SFR is dispatched by the operator and takes the headroom first;
        // PFR absorbs whatever the output limits cut off.
        po.p_sfr_delivered = std::clamp(po.p_sfr_request, plant.p_min - plant.p_base(), plant.p_mpp - plant.p_base());
        out.p_dpv += po.p_dpv;
        out.p_pfr += po.p_pfr;
        out.p_sfr_request += po.p_sfr_request;
        out.p_sfr_delivered += po.p_sfr_delivered;
        p_avail += plant.p_mpp - po.p_dpv;
    }
    const double v2 = v_mag * v_mag;
    out.feedback.p_kw = feeder.p_load_kw * v2 - out.p_dpv;
    out.feedback.q_kvar = feeder.q_load_kvar * v2;
    out.feedback.p_avail_kw = p_avail;
}

FeederStep feeder_step(const FeederParams& feeder, double v_mag, double f_pcc, double p_sfr_request_kw)
{
    FeederStep out;
    feeder_step(feeder, v_mag, f_pcc, p_sfr_request_kw, out);
    return out;
}

} // namespace tdcosim
