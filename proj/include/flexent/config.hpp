#pragma once

#include <cstdint>
#include <functional>
#include <map>
#include <string>

#include "flexent/flexgrid.hpp"
#include "flexent/sourcesim.hpp"
#include "flexent/tomography.hpp"

namespace flexent {

// Every physical and numerical default in one place, overridable from a
// flat key=value file and from --set flags. Calibration note: the rate,
// singles and visibility defaults are chosen so the simulated experiment
// reproduces the headline numbers (diagonal CAR ~100, F ~0.98,
// R_I ~1.2 kebits/s per channel) without accidental subtraction.
struct Config {
    // flex-grid
    double pump_thz = 383.0;
    double width_ghz = 25.0;
    int count = 150;
    double c_band_low_thz = 191.325;
    double c_band_high_thz = 196.150;
    int c_ports = 9;
    double l_band_low_thz = 186.075;
    double l_band_high_thz = 191.075;
    int l_ports = 20;
    double adjacent_leakage = 0.012;
    double extinction_floor = 0.0;

    // source state
    double alpha_re = 0.7071067811865476;
    double alpha_im = 0.0;
    double beta_re = 0.7071067811865476;
    double beta_im = 0.0;
    double visibility = 0.9766688;
    std::string local_rotation = "random"; // random | identity
    double coincidence_window_s = 1e-9;

    // JSI raster scan rates
    double jsi_pair_rate = 1400.0;
    double jsi_pair_rate_backward = 1595.0;
    double jsi_singles_rate = 118915.0;
    double jsi_integration_s = 1.0;

    // tomography acquisition rates
    double tomo_pair_rate = 1430.0;
    double tomo_singles_rate = 35000.0;
    double tomo_integration_s = 10.0;

    // MCMC
    int mcmc_samples = 20000;
    int mcmc_burn_in = 5000;
    int mcmc_thinning = 1;
    double mcmc_beta = 0.1;

    void validate() const;
};

// Visit (key, kind, pointer) for every field; single source of truth for
// parsing, overrides and manifest dumps.
enum class FieldKind { Double, Int, String };
void for_each_config_field(
    Config& cfg,
    const std::function<void(const std::string&, FieldKind, void*)>& fn);

Config default_config();

// Defaults overlaid with the file's key=value pairs ('#' comments allowed).
Config load_config_file(const std::string& path);

// One "key=value" override, as given to --set.
void apply_override(Config& cfg, const std::string& assignment);

// Current values as an ordered key->value map (manifest / diffing).
std::map<std::string, std::string> config_to_map(const Config& cfg);

// ---- derived objects -------------------------------------------------

WssSpec c_wss(const Config& cfg);
WssSpec l_wss(const Config& cfg);

// Source as seen by the JSI scan (forward or backward pump direction).
SourceModel jsi_source(const Config& cfg, bool backward, std::uint64_t seed);

// Source as seen by the tomography acquisition.
SourceModel tomo_source(const Config& cfg, std::uint64_t seed);

McmcConfig mcmc_config(const Config& cfg, std::uint64_t chain_seed);

} // namespace flexent
