#pragma once

#include <vector>

namespace flexent {

// Wavelength-selective switch: passband [band_low, band_high] (THz),
// output port budget, and the three-level filter leakage model.
struct WssSpec {
    double band_low_thz = 0.0;
    double band_high_thz = 0.0;
    int port_count = 1;
    double adjacent_leakage = 0.012; // power fraction passed at |offset| = 1
    double extinction_floor = 0.0;   // power fraction passed at |offset| >= 2

    void validate() const;
};

// One energy-matched signal/idler slot pair. signal_thz + idler_thz
// reconstructs the pump frequency exactly (bitwise) because the idler is
// computed as pump - signal, which is exact in IEEE doubles for operands
// within a factor of two of each other (Sterbenz).
struct ChannelPair {
    int k = 0; // 1-based, k = 1 nearest degeneracy
    double signal_thz = 0.0;
    double idler_thz = 0.0;
    double width_ghz = 25.0;
};

// True iff (f - 193.1 THz) is an integer multiple of 25 GHz within 1e-9.
bool itu_aligned(double f_thz);

// Power fraction leaked from a channel `offset` slots away:
// 1 at offset 0, adjacent_leakage at |offset| 1, extinction_floor beyond.
double filter_weight(const WssSpec& spec, long channel_offset);

// Energy-matched plan: signal_k = anchor + k*width with the anchor chosen
// as the grid frequency keeping every signal in the C WSS passband and
// every idler in the L WSS passband while placing pair 1 nearest
// degeneracy (ties toward the higher anchor).
std::vector<ChannelPair> build_channel_plan(double pump_thz, double width_ghz,
                                            int count, const WssSpec& c_wss,
                                            const WssSpec& l_wss);

} // namespace flexent
