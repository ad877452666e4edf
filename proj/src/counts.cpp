#include "flexent/counts.hpp"

#include <cmath>

#include "flexent/errors.hpp"

namespace flexent {

Analyzer analyzer_from_label(const std::string& label) {
    if (label == "H") return Analyzer::H;
    if (label == "V") return Analyzer::V;
    if (label == "D") return Analyzer::D;
    if (label == "A") return Analyzer::A;
    if (label == "R") return Analyzer::R;
    if (label == "L") return Analyzer::L;
    throw UsageError("unknown analyzer label: '" + label + "' (expected H,V,D,A,R,L)");
}

const char* analyzer_label(Analyzer a) {
    switch (a) {
        case Analyzer::H: return "H";
        case Analyzer::V: return "V";
        case Analyzer::D: return "D";
        case Analyzer::A: return "A";
        case Analyzer::R: return "R";
        case Analyzer::L: return "L";
    }
    throw UsageError("unknown analyzer enum value");
}

ComplexVector analyzer_ket(Analyzer a) {
    const double r = 1.0 / std::sqrt(2.0);
    ComplexVector v(2);
    switch (a) {
        case Analyzer::H: v << Complex(1, 0), Complex(0, 0); break;
        case Analyzer::V: v << Complex(0, 0), Complex(1, 0); break;
        case Analyzer::D: v << Complex(r, 0), Complex(r, 0); break;
        case Analyzer::A: v << Complex(r, 0), Complex(-r, 0); break;
        case Analyzer::R: v << Complex(r, 0), Complex(0, r); break;
        case Analyzer::L: v << Complex(r, 0), Complex(0, -r); break;
    }
    return v;
}

std::array<MeasurementSetting, 36> all_settings() {
    std::array<MeasurementSetting, 36> out{};
    int idx = 0;
    for (int a = 0; a < 6; ++a)
        for (int b = 0; b < 6; ++b)
            out[static_cast<std::size_t>(idx++)] = {static_cast<Analyzer>(a),
                                                    static_cast<Analyzer>(b)};
    return out;
}

ComplexMatrix projector(const MeasurementSetting& s) {
    const ComplexVector ka = analyzer_ket(s.a);
    const ComplexVector kb = analyzer_ket(s.b);
    ComplexVector k(4);
    k << ka(0) * kb(0), ka(0) * kb(1), ka(1) * kb(0), ka(1) * kb(1);
    return k * k.adjoint();
}

} // namespace flexent
