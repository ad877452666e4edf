#pragma once

#include <Eigen/Dense>
#include <complex>
#include <utility>

#include "flexent/rng.hpp"

namespace flexent {

using Complex = std::complex<double>;
using ComplexMatrix = Eigen::MatrixXcd;
using ComplexVector = Eigen::VectorXcd;
using RealVector = Eigen::VectorXd;

enum class Subsystem { A, B };

// ------------------------------------------------------------------
// states
// ------------------------------------------------------------------

// Normalized state vector, dim 2 or 4. Basis order is fixed globally:
// H,V for one qubit and HH,HV,VH,VV (signal ⊗ idler) for two.
class PureState {
public:
    explicit PureState(ComplexVector amplitudes);
    const ComplexVector& amplitudes() const { return amp_; }
    Eigen::Index dim() const { return amp_.size(); }

private:
    ComplexVector amp_;
};

// Hermitian, unit-trace, positive-semidefinite matrix (within tolerances:
// Hermitian 1e-10, trace 1e-10, min eigenvalue >= -1e-9). Construction
// validates; use clipped() to repair states outside the PSD tolerance —
// repair is never silent.
class DensityMatrix {
public:
    explicit DensityMatrix(ComplexMatrix m);

    const ComplexMatrix& matrix() const { return m_; }
    Eigen::Index dim() const { return m_.rows(); }
    Complex operator()(Eigen::Index i, Eigen::Index j) const { return m_(i, j); }

    // Projection back onto valid states: symmetrize, zero negative
    // eigenvalues, renormalize the trace.
    static DensityMatrix clipped(const ComplexMatrix& m);

    static DensityMatrix pure(const PureState& psi);

private:
    ComplexMatrix m_;
};

PureState bell_phi_plus(); // (|HH> + |VV>)/sqrt(2)

// ------------------------------------------------------------------
// linear algebra
// ------------------------------------------------------------------

// Eigenvalues ascending with matching eigenvectors in columns.
// Requires Hermitian input within 1e-9.
std::pair<RealVector, ComplexMatrix> hermitian_eigen(const ComplexMatrix& m);

ComplexMatrix kron(const ComplexMatrix& a, const ComplexMatrix& b);

// Transpose of subsystem A (rows/cols 0-1 block index) or B. Dim 4 only.
// The matrix overload exists because the partial transpose of a state is
// generally not a state (negative eigenvalues flag entanglement).
ComplexMatrix partial_transpose(const ComplexMatrix& m, Subsystem subsystem);
ComplexMatrix partial_transpose(const DensityMatrix& rho, Subsystem subsystem);

// Reduce to the kept subsystem. Dim 4 in, dim 2 out.
DensityMatrix partial_trace(const DensityMatrix& rho, Subsystem keep);

// Base-2 von Neumann entropy in bits; eigenvalues <= 1e-12 contribute 0.
double von_neumann_entropy(const DensityMatrix& rho);

// Sum of absolute eigenvalues. Requires Hermitian input.
double trace_norm(const ComplexMatrix& m);

// (1/2)·||a - b||_1 for Hermitian a, b.
double trace_distance(const ComplexMatrix& a, const ComplexMatrix& b);

double fidelity_with_pure(const PureState& psi, const DensityMatrix& rho);

// ------------------------------------------------------------------
// random-matrix sampling
// ------------------------------------------------------------------

// Entries i.i.d. standard complex normal; draw order is row-major,
// real part before imaginary part (relied on by the Bures
// reparameterization in tomography).
ComplexMatrix sample_ginibre(Rng& rng, int dim);

// QR with R-diagonal phase correction (Mezzadri) — Haar-distributed.
ComplexMatrix haar_unitary_from_ginibre(const ComplexMatrix& g);
ComplexMatrix sample_haar_unitary(Rng& rng, int dim);

// rho = (I+U) G G† (I+U†) / Tr[...] with G Ginibre, U Haar. Dim 4.
DensityMatrix bures_from_ginibre_pair(const ComplexMatrix& g,
                                      const ComplexMatrix& g_for_unitary);
DensityMatrix sample_bures(Rng& rng);

} // namespace flexent
