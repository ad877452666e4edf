#pragma once

#include <array>
#include <cstdint>
#include <string>
#include <vector>

#include "flexent/qcore.hpp"

namespace flexent {

// Polarization analyzer settings. Conventions:
//   H=(1,0)  V=(0,1)  D=(H+V)/√2  A=(H−V)/√2  R=(H+iV)/√2  L=(H−iV)/√2
enum class Analyzer : int { H = 0, V, D, A, R, L };

Analyzer analyzer_from_label(const std::string& label);
const char* analyzer_label(Analyzer a);

// Single-qubit analyzer ket.
ComplexVector analyzer_ket(Analyzer a);

struct MeasurementSetting {
    Analyzer a; // signal-side analyzer
    Analyzer b; // idler-side analyzer
    bool operator==(const MeasurementSetting&) const = default;
};

// The 36 two-sided settings, signal analyzer varying slowest:
// (H,H),(H,V),...,(H,L),(V,H),...,(L,L).
std::array<MeasurementSetting, 36> all_settings();

// Rank-1 projector |a⟩⟨a| ⊗ |b⟩⟨b|, dim 4.
ComplexMatrix projector(const MeasurementSetting& s);

struct CountRecord {
    int channel = 0;
    MeasurementSetting setting{Analyzer::H, Analyzer::H};
    std::uint64_t counts = 0;
    double integration_s = 1.0;
};

struct JsiEntry {
    int sig_ch = 0;
    int idl_ch = 0;
    std::uint64_t coinc = 0;
    std::uint64_t singles_s = 0;
    std::uint64_t singles_i = 0;
    double integration_s = 1.0;
};

struct JsiScan {
    std::vector<JsiEntry> entries;
    std::string pattern; // "banded" or "full"
};

} // namespace flexent
