#include "flexent/flexgrid.hpp"

#include <cmath>
#include <cstdint>
#include <sstream>
#include <string>

#include "flexent/errors.hpp"

namespace flexent {

namespace {

constexpr double kGridOriginThz = 193.1;
constexpr double kGridStepThz = 0.025;
constexpr double kAlignTol = 1e-9;

double grid_freq(std::int64_t n) { return kGridOriginThz + static_cast<double>(n) * kGridStepThz; }

bool near_integer(double r, double* rounded = nullptr) {
    const double n = std::round(r);
    if (rounded) *rounded = n;
    return std::abs(r - n) <= kAlignTol;
}

std::string thz(double f) {
    std::ostringstream os;
    os.precision(6);
    os << std::fixed << f;
    return os.str();
}

} // namespace

void WssSpec::validate() const {
    if (!(band_low_thz < band_high_thz))
        throw ValidationError("WssSpec: band_low must be below band_high");
    if (port_count < 1)
        throw ValidationError("WssSpec: port_count must be at least 1");
    if (!(extinction_floor >= 0.0 && extinction_floor < adjacent_leakage &&
          adjacent_leakage < 1.0))
        throw ValidationError(
            "WssSpec: need 0 <= extinction_floor < adjacent_leakage < 1");
}

bool itu_aligned(double f_thz) {
    if (!(f_thz > 0.0))
        throw ValidationError("itu_aligned: frequency must be positive");
    return near_integer((f_thz - kGridOriginThz) / kGridStepThz);
}

double filter_weight(const WssSpec& spec, long channel_offset) {
    const long mag = std::labs(channel_offset);
    if (mag == 0) return 1.0;
    if (mag == 1) return spec.adjacent_leakage;
    return spec.extinction_floor;
}

std::vector<ChannelPair> build_channel_plan(double pump_thz, double width_ghz,
                                            int count, const WssSpec& c_wss,
                                            const WssSpec& l_wss) {
    c_wss.validate();
    l_wss.validate();
    if (count < 1) throw ValidationError("build_channel_plan: count must be >= 1");
    if (!(pump_thz > 0.0) || !std::isfinite(pump_thz))
        throw ValidationError("build_channel_plan: pump frequency must be positive");

    double slots = 0.0;
    if (!(width_ghz > 0.0) || !near_integer(width_ghz / 25.0, &slots) || slots < 1.0)
        throw ValidationError(
            "build_channel_plan: width must be a positive multiple of 25 GHz "
            "(channel centers would leave the 25 GHz grid)");
    const auto w_slots = static_cast<std::int64_t>(slots);
    const double w = static_cast<double>(w_slots) * kGridStepThz;

    // Idlers land on the grid only if the pump sits on the doubled grid.
    if (!near_integer((pump_thz - 2.0 * kGridOriginThz) / kGridStepThz))
        throw ValidationError(
            "build_channel_plan: pump " + thz(pump_thz) +
            " THz is incompatible with the 25 GHz grid (pump - 386.2 THz "
            "must be a multiple of 0.025 THz)");

    // signal_k = anchor + k*w must stay in the C passband and
    // idler_k = pump - signal_k in the L passband; k = 1 and k = count bind.
    const double lo_c = c_wss.band_low_thz - w;
    const double lo_l = pump_thz - l_wss.band_high_thz - w;
    const double hi_c = c_wss.band_high_thz - static_cast<double>(count) * w;
    const double hi_l = pump_thz - l_wss.band_low_thz - static_cast<double>(count) * w;
    const double a_min = std::max(lo_c, lo_l);
    const double a_max = std::min(hi_c, hi_l);

    const auto n_min = static_cast<std::int64_t>(
        std::ceil((a_min - kGridOriginThz) / kGridStepThz - kAlignTol));
    const auto n_max = static_cast<std::int64_t>(
        std::floor((a_max - kGridOriginThz) / kGridStepThz + kAlignTol));

    if (n_min > n_max) {
        const std::string lo_name = (lo_c >= lo_l)
            ? "C-band lower bound " + thz(c_wss.band_low_thz) + " THz"
            : "L-band upper bound " + thz(l_wss.band_high_thz) + " THz";
        const std::string hi_name = (hi_c <= hi_l)
            ? "C-band upper bound " + thz(c_wss.band_high_thz) + " THz"
            : "L-band lower bound " + thz(l_wss.band_low_thz) + " THz";
        throw InfeasiblePlanError(
            "no feasible anchor for " + std::to_string(count) + " x " +
            thz(w) + " THz channels: " + lo_name +
            " requires anchor >= " + thz(a_min) + " THz while " + hi_name +
            " requires anchor <= " + thz(a_max) + " THz");
    }

    // Pair 1 nearest degeneracy: anchor as close to pump/2 - w as the
    // feasible window allows, ties resolved toward the higher frequency.
    const double target = pump_thz / 2.0 - w;
    // half-up with a nudge so exact ties resolve upward regardless of
    // rounding dust in the division (ties arise for every odd pump index)
    auto n_anchor = static_cast<std::int64_t>(
        std::floor((target - kGridOriginThz) / kGridStepThz + 0.5 + 1e-9));
    n_anchor = std::max(n_min, std::min(n_max, n_anchor));

    std::vector<ChannelPair> plan;
    plan.reserve(static_cast<std::size_t>(count));
    for (int k = 1; k <= count; ++k) {
        const double signal = grid_freq(n_anchor + static_cast<std::int64_t>(k) * w_slots);
        // exact for operands within 2x of each other, so signal + idler
        // reconstructs the pump bitwise
        const double idler = pump_thz - signal;
        plan.push_back({k, signal, idler, width_ghz});
    }
    return plan;
}

} // namespace flexent
