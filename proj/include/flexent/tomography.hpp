#pragma once

#include <array>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "flexent/counts.hpp"
#include "flexent/qcore.hpp"

namespace flexent {

struct McmcConfig {
    int n_samples = 20000; // post burn-in iterations
    int burn_in = 5000;
    int thinning = 1;
    double beta = 0.1; // pCN step, auto-tuned during burn-in
    std::uint64_t seed = 0;

    void validate() const;
};

struct PosteriorSummary {
    DensityMatrix mean_state;  // Bayesian mean over retained samples
    double fidelity_mean = 0.0; // posterior mean of <Phi+|rho|Phi+>
    double fidelity_std = 0.0;
    double acceptance_rate = 0.0;
    double n_effective = 0.0; // ESS of the fidelity series
    double beta_final = 0.0;
    std::string warning; // empty when diagnostics are clean
};

// Poissonian log-likelihood ℓ = Σ_j [n_j ln μ_j − μ_j] with
// μ_j = N₀·Tr(Π_j ρ) + 1e-12·N₀ (floor keeps the log finite).
double log_likelihood(const std::vector<CountRecord>& counts,
                      const DensityMatrix& rho, double n0);

// Bures-measure reparameterization: 32 reals fill a Ginibre matrix
// (row-major, re before im), 32 more fill a second Ginibre whose QR gives
// the Haar unitary. Standard-normal inputs induce the Bures prior.
DensityMatrix params_to_state(std::span<const double, 64> x);

// Preconditioned Crank-Nicolson chain over the 64 latent Gaussians.
// The Poisson scale N₀ is profiled out per proposal (conditional
// maximizer Σn / ΣTr(Π ρ)). Several short scout runs from independent
// prior draws pick the starting basin (the latent parameterization is
// multimodal) before the reported chain runs: burn_in steps of step-size
// adaptation per leg, then n_samples retained. Requires all 36 settings
// present.
PosteriorSummary infer_posterior(const std::vector<CountRecord>& counts,
                                 const McmcConfig& config);

// Effective sample size from the Geyer initial-positive-sequence
// autocorrelation estimator.
double effective_sample_size(const std::vector<double>& series);

} // namespace flexent
