#include "flexent/tomography.hpp"

#include <algorithm>
#include <cmath>
#include <set>
#include <sstream>

#include "flexent/errors.hpp"
#include "flexent/rng.hpp"

namespace flexent {

namespace {

ComplexMatrix ginibre_from_reals(const double* x) {
    ComplexMatrix g(4, 4);
    for (int i = 0; i < 4; ++i)
        for (int j = 0; j < 4; ++j) {
            const int base = 2 * (4 * i + j);
            g(i, j) = Complex(x[base], x[base + 1]);
        }
    return g;
}

// setting ket |a⟩⊗|b⟩ for fast Tr[Πρ] = ⟨k|ρ|k⟩
ComplexVector setting_ket(const MeasurementSetting& s) {
    const ComplexVector ka = analyzer_ket(s.a);
    const ComplexVector kb = analyzer_ket(s.b);
    ComplexVector k(4);
    k << ka(0) * kb(0), ka(0) * kb(1), ka(1) * kb(0), ka(1) * kb(1);
    return k;
}

struct LikelihoodData {
    std::vector<ComplexVector> kets;
    std::vector<double> counts;
    double total = 0.0;
};

LikelihoodData prepare(const std::vector<CountRecord>& counts) {
    LikelihoodData d;
    d.kets.reserve(counts.size());
    d.counts.reserve(counts.size());
    for (const auto& r : counts) {
        d.kets.push_back(setting_ket(r.setting));
        d.counts.push_back(static_cast<double>(r.counts));
        d.total += static_cast<double>(r.counts);
    }
    return d;
}

// profile-likelihood value at rho: N0 set to its conditional maximizer
double profiled_loglike(const LikelihoodData& d, const ComplexMatrix& rho) {
    if (d.total == 0.0) return 0.0; // likelihood constant: prior-only chain
    double t_sum = 0.0;
    std::vector<double> p(d.kets.size());
    for (std::size_t j = 0; j < d.kets.size(); ++j) {
        const double pj =
            std::max(0.0, (d.kets[j].adjoint() * rho * d.kets[j])(0, 0).real());
        p[j] = pj;
        t_sum += pj;
    }
    const double n0 = d.total / t_sum;
    const double eps = 1e-12 * n0;
    double ll = 0.0;
    for (std::size_t j = 0; j < p.size(); ++j) {
        const double mu = n0 * p[j] + eps;
        ll += (d.counts[j] > 0.0 ? d.counts[j] * std::log(mu) : 0.0) - mu;
    }
    return ll;
}

} // namespace

void McmcConfig::validate() const {
    if (n_samples <= 0) throw ValidationError("McmcConfig: n_samples must be positive");
    if (burn_in < 0) throw ValidationError("McmcConfig: burn_in must be nonnegative");
    if (thinning < 1) throw ValidationError("McmcConfig: thinning must be >= 1");
    if (!(beta > 0.0 && beta <= 1.0))
        throw ValidationError("McmcConfig: beta must lie in (0,1]");
}

double log_likelihood(const std::vector<CountRecord>& counts,
                      const DensityMatrix& rho, double n0) {
    if (counts.empty())
        throw ValidationError("log_likelihood: need at least one setting");
    if (!(n0 > 0.0) || !std::isfinite(n0))
        throw ValidationError("log_likelihood: scale N0 must be positive");
    const double eps = 1e-12 * n0;
    double ll = 0.0;
    for (const auto& r : counts) {
        const ComplexVector k = setting_ket(r.setting);
        const double p = std::max(0.0, (k.adjoint() * rho.matrix() * k)(0, 0).real());
        const double mu = n0 * p + eps;
        const auto n = static_cast<double>(r.counts);
        ll += (n > 0.0 ? n * std::log(mu) : 0.0) - mu;
    }
    return ll;
}

DensityMatrix params_to_state(std::span<const double, 64> x) {
    for (const double v : x)
        if (!std::isfinite(v))
            throw ValidationError("params_to_state: non-finite parameter");
    const ComplexMatrix g = ginibre_from_reals(x.data());
    const ComplexMatrix g2 = ginibre_from_reals(x.data() + 32);
    return bures_from_ginibre_pair(g, g2);
}

double effective_sample_size(const std::vector<double>& series) {
    const auto n = static_cast<long>(series.size());
    if (n < 4) return static_cast<double>(n);
    double mean = 0.0;
    for (const double v : series) mean += v;
    mean /= static_cast<double>(n);

    auto gamma = [&](long lag) {
        double s = 0.0;
        for (long t = 0; t + lag < n; ++t)
            s += (series[static_cast<std::size_t>(t)] - mean) *
                 (series[static_cast<std::size_t>(t + lag)] - mean);
        return s / static_cast<double>(n);
    };

    // zero variance means a stuck chain: one effective draw, not n.
    // (the same limit the estimator reaches when roundoff leaves g0 > 0)
    const double g0 = gamma(0);
    if (g0 <= 0.0) return 1.0;

    // Geyer initial positive sequence on paired autocorrelations
    double tau = 0.0;
    const long max_pair = std::min<long>(n / 2 - 1, 5000);
    for (long m = 0; m <= max_pair; ++m) {
        const double pair = (gamma(2 * m) + gamma(2 * m + 1)) / g0;
        if (pair <= 0.0) break;
        tau += pair;
    }
    const double iact = std::max(1.0, 2.0 * tau - 1.0);
    return static_cast<double>(n) / iact;
}

PosteriorSummary infer_posterior(const std::vector<CountRecord>& counts,
                                 const McmcConfig& config) {
    config.validate();
    if (counts.empty()) throw ValidationError("infer_posterior: no count records");
    std::set<std::pair<int, int>> seen;
    for (const auto& r : counts)
        seen.emplace(static_cast<int>(r.setting.a), static_cast<int>(r.setting.b));
    if (seen.size() != 36) {
        std::ostringstream os;
        os << "infer_posterior: incomplete tomography — " << seen.size()
           << " of 36 analyzer settings present";
        throw ValidationError(os.str());
    }

    const LikelihoodData data = prepare(counts);

    struct Walker {
        std::array<double, 64> x;
        DensityMatrix state;
        double ll;
        double beta;
    };

    auto make_walker = [&](Rng& rng) {
        std::array<double, 64> x{};
        for (double& v : x) v = rng.normal();
        DensityMatrix s = params_to_state(x);
        const double ll = profiled_loglike(data, s.matrix());
        return Walker{x, std::move(s), ll, config.beta};
    };

    auto step = [&](Walker& w, Rng& rng) {
        std::array<double, 64> prop{};
        const double keep = std::sqrt(1.0 - w.beta * w.beta);
        for (std::size_t i = 0; i < 64; ++i)
            prop[i] = keep * w.x[i] + w.beta * rng.normal();
        DensityMatrix cand = params_to_state(prop);
        const double cand_ll = profiled_loglike(data, cand.matrix());
        const double log_a = cand_ll - w.ll;
        if (log_a >= 0.0 || rng.uniform() < std::exp(log_a)) {
            w.x = prop;
            w.state = std::move(cand);
            w.ll = cand_ll;
            return true;
        }
        return false;
    };

    // burn-in leg with windowed step-size adaptation toward 20-40% acceptance
    auto adapt_leg = [&](Walker& w, Rng& rng, int iters) {
        const int window = 200;
        int accepted_in_window = 0;
        for (int it = 0; it < iters; ++it) {
            if (step(w, rng)) ++accepted_in_window;
            if ((it + 1) % window == 0) {
                const double rate = static_cast<double>(accepted_in_window) / window;
                if (rate < 0.2)
                    w.beta *= 0.6;
                else if (rate > 0.4)
                    w.beta *= 1.4;
                w.beta = std::min(w.beta, 1.0);
                accepted_in_window = 0;
            }
        }
    };

    // The latent parameterization folds state space, so the likelihood
    // pulled back to the 64 Gaussians is multimodal and a single adapted
    // chain can commit to a poor basin with no practical escape route.
    // Anneal a few scouts from independent prior draws and keep the best
    // basin before spending the long chain. With a flat likelihood every
    // scout ties and the first wins.
    constexpr int kScouts = 4;
    Rng scout_rng = Rng::for_stream(config.seed, stream::kChain, 1);
    Walker best = make_walker(scout_rng);
    adapt_leg(best, scout_rng, config.burn_in);
    for (int s = 1; s < kScouts; ++s) {
        Rng r = Rng::for_stream(config.seed, stream::kChain,
                                static_cast<std::uint64_t>(1 + s));
        Walker w = make_walker(r);
        adapt_leg(w, r, config.burn_in);
        if (w.ll > best.ll) best = std::move(w);
    }

    Rng rng = Rng::for_stream(config.seed, stream::kChain);
    Walker w = std::move(best);
    adapt_leg(w, rng, config.burn_in);

    const PureState bell = bell_phi_plus();
    ComplexMatrix sum = ComplexMatrix::Zero(4, 4);
    std::vector<double> fidelities;
    fidelities.reserve(static_cast<std::size_t>(config.n_samples / config.thinning) + 1);
    long accepted = 0;
    for (int it = 0; it < config.n_samples; ++it) {
        if (step(w, rng)) ++accepted;
        if ((it + 1) % config.thinning == 0) {
            sum += w.state.matrix();
            fidelities.push_back(fidelity_with_pure(bell, w.state));
        }
    }
    if (fidelities.empty())
        throw ValidationError("infer_posterior: thinning retained no samples");

    ComplexMatrix mean = sum / static_cast<double>(fidelities.size());
    mean = 0.5 * (mean + mean.adjoint());
    mean /= mean.trace().real();

    double f_mean = 0.0;
    for (const double f : fidelities) f_mean += f;
    f_mean /= static_cast<double>(fidelities.size());
    double f_var = 0.0;
    for (const double f : fidelities) f_var += (f - f_mean) * (f - f_mean);
    f_var /= static_cast<double>(fidelities.size());

    PosteriorSummary out{DensityMatrix(mean),
                         f_mean,
                         std::sqrt(f_var),
                         static_cast<double>(accepted) / config.n_samples,
                         effective_sample_size(fidelities),
                         w.beta,
                         {}};
    if (out.acceptance_rate < 0.05 || out.acceptance_rate > 0.9) {
        std::ostringstream os;
        os.precision(3);
        os << "acceptance rate " << out.acceptance_rate
           << " outside [0.05, 0.9] after step-size tuning";
        out.warning = os.str();
    }
    return out;
}

} // namespace flexent
