#pragma once

#include "tdcosim/transmission.hpp"

#include <string>
#include <vector>

namespace tdcosim {

/// One DPV plant at the PCC. Powers in kW, frequencies in Hz.
struct DpvPlant {
    std::string name;
    double p_mpp = 1250.0;
    double reserve = 200.0;
    double p_min = 0.0;
    double droop_d = 45454.545454545456;  // kW/Hz, full reserve at 0.3 Hz deviation
    double db_uf = 0.036;
    double db_of = 0.036;
    double sfr_share = 1.0;  // fraction of the feeder's SFR request

    double p_base() const noexcept { return p_mpp - reserve; }
};

/// Droop gain that deploys the whole reserve at `full_deviation_hz`.
double droop_for_reserve(double reserve_kw, double deadband_hz, double full_deviation_hz, double f0 = 60.0);

/// Validates the plant invariants; throws Errc::config.
void validate(const DpvPlant& plant);

/// Deadband droop response; positive below the under-frequency edge.
double dpv_pfr(double f_pcc, const DpvPlant& plant, double f0 = 60.0) noexcept;

/// Base + PFR + SFR, floored at p_min.
double dpv_reference(const DpvPlant& plant, double p_pfr, double p_sfr) noexcept;

/// Reference clamped into [p_min, p_mpp].
double dpv_output(double p_ref, const DpvPlant& plant) noexcept;

struct PlantOutput {
    double p_dpv = 0.0;
    double p_pfr = 0.0;            // droop demand
    double p_sfr_request = 0.0;    // this plant's share of the request
    double p_sfr_delivered = 0.0;  // part of the request actually produced
};

struct FeederParams {
    double f0 = 60.0;
    double p_load_kw = 2000.0;
    double q_load_kvar = 600.0;
    std::vector<DpvPlant> plants;
};

struct FeederStep {
    Feedback feedback;
    std::vector<PlantOutput> plants;
    double p_dpv = 0.0;
    double p_pfr = 0.0;
    double p_sfr_request = 0.0;
    double p_sfr_delivered = 0.0;
};

void validate(const FeederParams& feeder);

/// Lumped feeder head: constant-impedance load plus DPV injections.
/// The SFR request is split by each plant's `sfr_share`.
void feeder_step(const FeederParams& feeder, double v_mag, double f_pcc, double p_sfr_request_kw,
                 FeederStep& out);

FeederStep feeder_step(const FeederParams& feeder, double v_mag, double f_pcc, double p_sfr_request_kw);

} // namespace tdcosim
