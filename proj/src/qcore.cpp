#include "flexent/qcore.hpp"

#include <cmath>

#include "flexent/errors.hpp"

namespace flexent {

namespace {

constexpr double kHermTol = 1e-10;
constexpr double kTraceTol = 1e-10;
constexpr double kMinEigTol = -1e-9;
constexpr double kEigenHermTol = 1e-9;

double hermiticity_defect(const ComplexMatrix& m) {
    return (m - m.adjoint()).cwiseAbs().maxCoeff();
}

void require_square(const ComplexMatrix& m, const char* who) {
    if (m.rows() != m.cols())
        throw DimensionError(std::string(who) + ": matrix must be square");
    if (!m.allFinite())
        throw ValidationError(std::string(who) + ": non-finite entries");
}

} // namespace

// ------------------------------------------------------------------
// states
// ------------------------------------------------------------------

PureState::PureState(ComplexVector amplitudes) : amp_(std::move(amplitudes)) {
    if (amp_.size() != 2 && amp_.size() != 4)
        throw DimensionError("PureState: dimension must be 2 or 4");
    if (!amp_.allFinite())
        throw ValidationError("PureState: non-finite amplitude");
    if (std::abs(amp_.norm() - 1.0) > 1e-12)
        throw ValidationError("PureState: norm must be 1 within 1e-12");
}

DensityMatrix::DensityMatrix(ComplexMatrix m) : m_(std::move(m)) {
    if (m_.rows() != m_.cols() || (m_.rows() != 2 && m_.rows() != 4))
        throw DimensionError("DensityMatrix: dimension must be 2 or 4");
    if (!m_.allFinite())
        throw ValidationError("DensityMatrix: non-finite entries");
    if (hermiticity_defect(m_) > kHermTol)
        throw ValidationError("DensityMatrix: not Hermitian within 1e-10");
    if (std::abs(m_.trace().real() - 1.0) > kTraceTol ||
        std::abs(m_.trace().imag()) > kTraceTol)
        throw ValidationError("DensityMatrix: trace must be 1 within 1e-10");
    Eigen::SelfAdjointEigenSolver<ComplexMatrix> es(m_, Eigen::EigenvaluesOnly);
    if (es.eigenvalues().minCoeff() < kMinEigTol)
        throw ValidationError("DensityMatrix: minimum eigenvalue below -1e-9");
}

DensityMatrix DensityMatrix::clipped(const ComplexMatrix& m) {
    require_square(m, "DensityMatrix::clipped");
    const ComplexMatrix h = 0.5 * (m + m.adjoint());
    Eigen::SelfAdjointEigenSolver<ComplexMatrix> es(h);
    RealVector lam = es.eigenvalues().cwiseMax(0.0);
    const double total = lam.sum();
    if (total <= 0.0)
        throw ValidationError("DensityMatrix::clipped: no positive eigenvalue mass");
    lam /= total;
    const ComplexMatrix out = es.eigenvectors() * lam.asDiagonal().toDenseMatrix().cast<Complex>() *
                              es.eigenvectors().adjoint();
    // renormalized spectrum is exactly valid; construct through the validator
    return DensityMatrix(0.5 * (out + out.adjoint()));
}

DensityMatrix DensityMatrix::pure(const PureState& psi) {
    const ComplexVector& a = psi.amplitudes();
    ComplexMatrix m = a * a.adjoint();
    // exact Hermitian symmetrization guards against rounding in the outer product
    return DensityMatrix(0.5 * (m + m.adjoint()));
}

PureState bell_phi_plus() {
    ComplexVector v(4);
    const double r = 1.0 / std::sqrt(2.0);
    v << Complex(r, 0), Complex(0, 0), Complex(0, 0), Complex(r, 0);
    return PureState(v);
}

// ------------------------------------------------------------------
// linear algebra
// ------------------------------------------------------------------

std::pair<RealVector, ComplexMatrix> hermitian_eigen(const ComplexMatrix& m) {
    require_square(m, "hermitian_eigen");
    if (hermiticity_defect(m) > kEigenHermTol)
        throw ValidationError("hermitian_eigen: input not Hermitian within 1e-9");
    Eigen::SelfAdjointEigenSolver<ComplexMatrix> es(0.5 * (m + m.adjoint()));
    if (es.info() != Eigen::Success)
        throw ValidationError("hermitian_eigen: eigensolver failed");
    return {es.eigenvalues(), es.eigenvectors()};
}

ComplexMatrix kron(const ComplexMatrix& a, const ComplexMatrix& b) {
    ComplexMatrix out(a.rows() * b.rows(), a.cols() * b.cols());
    for (Eigen::Index i = 0; i < a.rows(); ++i)
        for (Eigen::Index j = 0; j < a.cols(); ++j)
            out.block(i * b.rows(), j * b.cols(), b.rows(), b.cols()) = a(i, j) * b;
    return out;
}

ComplexMatrix partial_transpose(const ComplexMatrix& m, Subsystem subsystem) {
    if (m.rows() != 4 || m.cols() != 4)
        throw DimensionError("partial_transpose: requires a 4x4 matrix");
    ComplexMatrix out(4, 4);
    // index (2a+b, 2a'+b'): transpose of A swaps a<->a', of B swaps b<->b'
    for (int a = 0; a < 2; ++a)
        for (int b = 0; b < 2; ++b)
            for (int ap = 0; ap < 2; ++ap)
                for (int bp = 0; bp < 2; ++bp) {
                    if (subsystem == Subsystem::A)
                        out(2 * a + b, 2 * ap + bp) = m(2 * ap + b, 2 * a + bp);
                    else
                        out(2 * a + b, 2 * ap + bp) = m(2 * a + bp, 2 * ap + b);
                }
    return out;
}

ComplexMatrix partial_transpose(const DensityMatrix& rho, Subsystem subsystem) {
    return partial_transpose(rho.matrix(), subsystem);
}

DensityMatrix partial_trace(const DensityMatrix& rho, Subsystem keep) {
    if (rho.dim() != 4)
        throw DimensionError("partial_trace: requires a dim-4 state");
    const ComplexMatrix& m = rho.matrix();
    ComplexMatrix out = ComplexMatrix::Zero(2, 2);
    for (int i = 0; i < 2; ++i)
        for (int j = 0; j < 2; ++j)
            for (int t = 0; t < 2; ++t) {
                if (keep == Subsystem::A)
                    out(i, j) += m(2 * i + t, 2 * j + t);
                else
                    out(i, j) += m(2 * t + i, 2 * t + j);
            }
    return DensityMatrix(0.5 * (out + out.adjoint()));
}

double von_neumann_entropy(const DensityMatrix& rho) {
    const auto [lam, vecs] = hermitian_eigen(rho.matrix());
    (void)vecs;
    double s = 0.0;
    for (Eigen::Index i = 0; i < lam.size(); ++i) {
        const double p = lam(i);
        if (p > 1e-12) s -= p * std::log2(p);
    }
    return s;
}

double trace_norm(const ComplexMatrix& m) {
    const auto [lam, vecs] = hermitian_eigen(m);
    (void)vecs;
    return lam.cwiseAbs().sum();
}

double trace_distance(const ComplexMatrix& a, const ComplexMatrix& b) {
    if (a.rows() != b.rows() || a.cols() != b.cols())
        throw DimensionError("trace_distance: shape mismatch");
    return 0.5 * trace_norm(a - b);
}

double fidelity_with_pure(const PureState& psi, const DensityMatrix& rho) {
    if (psi.dim() != rho.dim())
        throw DimensionError("fidelity_with_pure: dimension mismatch");
    const Complex v = (psi.amplitudes().adjoint() * rho.matrix() * psi.amplitudes())(0, 0);
    return v.real();
}

// ------------------------------------------------------------------
// random-matrix sampling
// ------------------------------------------------------------------

ComplexMatrix sample_ginibre(Rng& rng, int dim) {
    if (dim < 1) throw DimensionError("sample_ginibre: dim must be positive");
    ComplexMatrix g(dim, dim);
    for (int i = 0; i < dim; ++i)
        for (int j = 0; j < dim; ++j) {
            const double re = rng.normal();
            const double im = rng.normal();
            g(i, j) = Complex(re, im);
        }
    return g;
}

ComplexMatrix haar_unitary_from_ginibre(const ComplexMatrix& g) {
    require_square(g, "haar_unitary_from_ginibre");
    Eigen::HouseholderQR<ComplexMatrix> qr(g);
    ComplexMatrix q = qr.householderQ();
    const ComplexMatrix r = qr.matrixQR().triangularView<Eigen::Upper>();
    // phase-correct columns so the distribution is exactly Haar
    for (Eigen::Index j = 0; j < q.cols(); ++j) {
        const Complex d = r(j, j);
        const double mag = std::abs(d);
        q.col(j) *= (mag > 0.0) ? d / mag : Complex(1.0, 0.0);
    }
    return q;
}

ComplexMatrix sample_haar_unitary(Rng& rng, int dim) {
    return haar_unitary_from_ginibre(sample_ginibre(rng, dim));
}

DensityMatrix bures_from_ginibre_pair(const ComplexMatrix& g,
                                      const ComplexMatrix& g_for_unitary) {
    if (g.rows() != 4 || g.cols() != 4 || g_for_unitary.rows() != 4 ||
        g_for_unitary.cols() != 4)
        throw DimensionError("bures_from_ginibre_pair: dim 4 only");
    const ComplexMatrix u = haar_unitary_from_ginibre(g_for_unitary);
    const ComplexMatrix a = (ComplexMatrix::Identity(4, 4) + u) * g;
    ComplexMatrix rho = a * a.adjoint();
    rho /= rho.trace();
    return DensityMatrix(0.5 * (rho + rho.adjoint()));
}

DensityMatrix sample_bures(Rng& rng) {
    const ComplexMatrix g = sample_ginibre(rng, 4);
    const ComplexMatrix g2 = sample_ginibre(rng, 4);
    return bures_from_ginibre_pair(g, g2);
}

} // namespace flexent
