#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <utility>

#include "flexent/counts.hpp"
#include "flexent/flexgrid.hpp"
#include "flexent/qcore.hpp"
#include "flexent/rng.hpp"

namespace flexent {

// Entangled-pair source as seen by the detectors. The emitted two-qubit
// state is v|ψ⟩⟨ψ| + (1-v)I/4 with |ψ⟩ = α|HH⟩ + β|VV⟩, conjugated by a
// per-channel local unitary U_A ⊗ U_B. Detector efficiency, dark counts
// and dead time are folded into the effective rates.
struct SourceModel {
    Complex alpha{1.0 / 1.4142135623730951, 0.0};
    Complex beta{1.0 / 1.4142135623730951, 0.0};
    double visibility = 1.0;

    // Per-channel Haar rotations derived from this seed; if instead an
    // explicit pair is set it applies to every channel; default identity.
    std::optional<std::uint64_t> local_rotation_seed;
    std::optional<std::pair<ComplexMatrix, ComplexMatrix>> explicit_rotation;

    double pair_rate = 0.0;      // true coincidences/s per channel
    double singles_rate_s = 0.0; // counts/s, signal arm
    double singles_rate_i = 0.0; // counts/s, idler arm
    double coincidence_window_s = 1e-9;
    double pump_power_mw = 0.0; // metadata only

    void validate() const;
};

enum class JsiPattern { Banded, Full };

JsiPattern jsi_pattern_from_label(const std::string& label);

// Uniform accidental-coincidence rate singles_s * singles_i * tau.
double accidental_rate(const SourceModel& m);

// The local rotation applied on channel k under `m`'s rotation policy.
std::pair<ComplexMatrix, ComplexMatrix> local_rotation(const SourceModel& m, int k);

// Two-qubit state of channel k (rotation applied).
DensityMatrix channel_state(const SourceModel& m, int k);

// Poisson counts for the given analyzer settings on channel k; mean per
// setting is t*(pair_rate*Tr[Πρ] + accidental_rate). Requires the full
// 36-setting complement, all distinct.
std::vector<CountRecord> simulate_counts(const SourceModel& m, int k,
                                         std::span<const MeasurementSetting> settings,
                                         double integration_s, Rng& rng);

// Raster scan over (signal channel, idler channel) cells. "Banded" visits
// the energy-matched diagonal, two sidebands either side, and one random
// far point per row; "full" visits every cell. Coincidence mean at (i,j)
// is t*(pair_rate*Σ_m w_c(i-m)*w_l(j-m) + accidental_rate) with w the
// filter_weight of the respective WSS.
JsiScan simulate_jsi(const SourceModel& m, const std::vector<ChannelPair>& plan,
                     const WssSpec& c_wss, const WssSpec& l_wss,
                     JsiPattern pattern, double integration_s, Rng& rng);

// CAR = C / (S_s * S_i * tau / T): coincidences over the accidentals
// implied by the measured singles.
double car(std::uint64_t coincidences, std::uint64_t singles_s,
           std::uint64_t singles_i, double window_s, double integration_s);

} // namespace flexent
