#include "flexent/sourcesim.hpp"

#include <algorithm>
#include <cmath>
#include <set>

#include "flexent/errors.hpp"

namespace flexent {

void SourceModel::validate() const {
    const double norm2 = std::norm(alpha) + std::norm(beta);
    if (std::abs(norm2 - 1.0) > 1e-12)
        throw ValidationError("SourceModel: |alpha|^2 + |beta|^2 must be 1 within 1e-12");
    if (!(visibility >= 0.0 && visibility <= 1.0))
        throw ValidationError("SourceModel: visibility must lie in [0,1]");
    if (pair_rate < 0.0 || singles_rate_s < 0.0 || singles_rate_i < 0.0)
        throw ValidationError("SourceModel: rates must be nonnegative");
    if (!(coincidence_window_s > 0.0))
        throw ValidationError("SourceModel: coincidence window must be positive");
    if (explicit_rotation) {
        const auto& [ua, ub] = *explicit_rotation;
        if (ua.rows() != 2 || ua.cols() != 2 || ub.rows() != 2 || ub.cols() != 2)
            throw DimensionError("SourceModel: rotation unitaries must be 2x2");
        const double da = (ua.adjoint() * ua - ComplexMatrix::Identity(2, 2)).cwiseAbs().maxCoeff();
        const double db = (ub.adjoint() * ub - ComplexMatrix::Identity(2, 2)).cwiseAbs().maxCoeff();
        if (da > 1e-10 || db > 1e-10)
            throw ValidationError("SourceModel: explicit rotation is not unitary");
    }
}

JsiPattern jsi_pattern_from_label(const std::string& label) {
    if (label == "banded") return JsiPattern::Banded;
    if (label == "full") return JsiPattern::Full;
    throw UsageError("unknown JSI pattern '" + label + "' (expected banded|full)");
}

double accidental_rate(const SourceModel& m) {
    return m.singles_rate_s * m.singles_rate_i * m.coincidence_window_s;
}

std::pair<ComplexMatrix, ComplexMatrix> local_rotation(const SourceModel& m, int k) {
    if (m.explicit_rotation) return *m.explicit_rotation;
    if (m.local_rotation_seed) {
        Rng ra = Rng::for_stream(*m.local_rotation_seed, stream::kRotationA,
                                 static_cast<std::uint64_t>(k));
        Rng rb = Rng::for_stream(*m.local_rotation_seed, stream::kRotationB,
                                 static_cast<std::uint64_t>(k));
        return {sample_haar_unitary(ra, 2), sample_haar_unitary(rb, 2)};
    }
    return {ComplexMatrix::Identity(2, 2), ComplexMatrix::Identity(2, 2)};
}

DensityMatrix channel_state(const SourceModel& m, int k) {
    m.validate();
    ComplexVector psi(4);
    psi << m.alpha, Complex(0, 0), Complex(0, 0), m.beta;
    ComplexMatrix rho = m.visibility * (psi * psi.adjoint()) +
                        ((1.0 - m.visibility) / 4.0) * ComplexMatrix::Identity(4, 4);
    const auto [ua, ub] = local_rotation(m, k);
    const ComplexMatrix u = kron(ua, ub);
    rho = u * rho * u.adjoint();
    return DensityMatrix(0.5 * (rho + rho.adjoint()));
}

std::vector<CountRecord> simulate_counts(const SourceModel& m, int k,
                                         std::span<const MeasurementSetting> settings,
                                         double integration_s, Rng& rng) {
    m.validate();
    if (!(integration_s > 0.0))
        throw ValidationError("simulate_counts: integration time must be positive");
    if (settings.size() != 36)
        throw ValidationError("simulate_counts: expected the full 36-setting complement");
    std::set<std::pair<int, int>> seen;
    for (const auto& s : settings)
        seen.emplace(static_cast<int>(s.a), static_cast<int>(s.b));
    if (seen.size() != 36)
        throw ValidationError("simulate_counts: settings must be distinct");

    const DensityMatrix rho = channel_state(m, k);
    const double acc = accidental_rate(m);

    std::vector<CountRecord> out;
    out.reserve(settings.size());
    for (const auto& s : settings) {
        const double p = (projector(s) * rho.matrix()).trace().real();
        const double mean = integration_s * (m.pair_rate * std::max(0.0, p) + acc);
        out.push_back({k, s, rng.poisson(mean), integration_s});
    }
    return out;
}

JsiScan simulate_jsi(const SourceModel& m, const std::vector<ChannelPair>& plan,
                     const WssSpec& c_wss, const WssSpec& l_wss,
                     JsiPattern pattern, double integration_s, Rng& rng) {
    m.validate();
    c_wss.validate();
    l_wss.validate();
    if (plan.empty()) throw ValidationError("simulate_jsi: empty channel plan");
    if (!(integration_s > 0.0))
        throw ValidationError("simulate_jsi: integration time must be positive");

    const int n = static_cast<int>(plan.size());
    const double acc = accidental_rate(m);
    const double t = integration_s;

    auto scan_point = [&](int i, int j) {
        // leakage from every energy-matched pair m into cell (i, j)
        double weight = 0.0;
        for (int c = std::max(1, std::min(i, j) - 2); c <= std::min(n, std::max(i, j) + 2); ++c)
            weight += filter_weight(c_wss, i - c) * filter_weight(l_wss, j - c);
        if (c_wss.extinction_floor > 0.0 || l_wss.extinction_floor > 0.0) {
            // the window above misses floor*floor cross terms; fall back to
            // the exact sum when the floors make them nonzero
            weight = 0.0;
            for (int c = 1; c <= n; ++c)
                weight += filter_weight(c_wss, i - c) * filter_weight(l_wss, j - c);
        }
        const double mean = t * (m.pair_rate * weight + acc);
        JsiEntry e;
        e.sig_ch = i;
        e.idl_ch = j;
        e.coinc = rng.poisson(mean);
        e.singles_s = rng.poisson(m.singles_rate_s * t);
        e.singles_i = rng.poisson(m.singles_rate_i * t);
        e.integration_s = t;
        return e;
    };

    JsiScan scan;
    if (pattern == JsiPattern::Full) {
        scan.pattern = "full";
        scan.entries.reserve(static_cast<std::size_t>(n) * static_cast<std::size_t>(n));
        for (int i = 1; i <= n; ++i)
            for (int j = 1; j <= n; ++j) scan.entries.push_back(scan_point(i, j));
        return scan;
    }

    scan.pattern = "banded";
    for (int i = 1; i <= n; ++i) {
        for (int j = std::max(1, i - 2); j <= std::min(n, i + 2); ++j)
            scan.entries.push_back(scan_point(i, j));
        // one random far point per row, uniform over |j - i| > 2
        std::vector<int> far;
        far.reserve(static_cast<std::size_t>(n));
        for (int j = 1; j <= n; ++j)
            if (std::abs(j - i) > 2) far.push_back(j);
        if (!far.empty()) {
            const int j = far[static_cast<std::size_t>(rng.uniform_index(far.size()))];
            scan.entries.push_back(scan_point(i, j));
        }
    }
    return scan;
}

double car(std::uint64_t coincidences, std::uint64_t singles_s,
           std::uint64_t singles_i, double window_s, double integration_s) {
    if (singles_s == 0 || singles_i == 0)
        throw ValidationError("car: undefined for zero singles");
    if (!(window_s > 0.0) || !(integration_s > 0.0))
        throw ValidationError("car: window and integration time must be positive");
    const double accidentals = static_cast<double>(singles_s) *
                               static_cast<double>(singles_i) * window_s / integration_s;
    return static_cast<double>(coincidences) / accidentals;
}

} // namespace flexent
