#pragma once

#include <string>
#include <utility>
#include <vector>

#include "flexent/qcore.hpp"

namespace flexent {

enum class Direction { AtoB, BtoA };

// Overlap ⟨Φ⁺|ρ|Φ⁺⟩.
double fidelity_to_bell(const DensityMatrix& rho);

struct FefResult {
    double value = 0.0; // fully entangled fraction
    ComplexMatrix u_a;  // rotations that align rho with Φ⁺:
    ComplexMatrix u_b;  // fidelity_to_bell((U_A⊗U_B) ρ (U_A⊗U_B)†) = value
};

// Maximal Bell overlap over local unitaries, found by multi-start
// Nelder-Mead over the 6-angle parameterization (identity start included,
// so value ≥ fidelity_to_bell always). Throws NonConvergenceError carrying
// the best value found if the simplex fails to collapse within budget.
FefResult fully_entangled_fraction(const DensityMatrix& rho);

// Same, with explicit search budget (n_starts random restarts on top of
// the identity start, max_iter function evaluations per simplex stage).
FefResult fully_entangled_fraction_opt(const DensityMatrix& rho, int n_starts,
                                       int max_iter);

// E_N = log2 ||ρ^{T_B}||_1, in ebits.
double log_negativity(const DensityMatrix& rho);

// I_{A→B} = S(ρ_B) − S(ρ_AB) (and mirrored), in ebits.
double coherent_information(const DensityMatrix& rho, Direction direction);

// Entangled-bit rates (R_N, R_I) = (r·E_N, r·max(0, max_dir I)); the
// distillable-rate interval is [R_I, R_N].
std::pair<double, double> ebr(const DensityMatrix& rho, double r_coinc);

// Per-channel record tying the tomography output to rates.
struct EntanglementReport {
    int k = 0;
    double fidelity = 0.0; // fully entangled fraction of the mean state
    ComplexMatrix u_a;     // aligning rotations from the FEF search
    ComplexMatrix u_b;
    double e_n = 0.0;
    double i_ab = 0.0; // signed; negative values are clamped only in rates
    double i_ba = 0.0;
    double car = 0.0; // NaN when no JSI data was supplied
    double r_coinc = 0.0;
    double r_n = 0.0;
    double r_i = 0.0;
};

// Report row for a reconstructed channel state.
EntanglementReport build_report(int k, const DensityMatrix& rho, double r_coinc,
                                double car_value);

} // namespace flexent
