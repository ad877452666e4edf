#pragma once
// Independent reference implementations used to cross-check library results.
// Everything here is written element-by-element from the defining formulas
// and deliberately shares no code paths with the library.

#include <algorithm>
#include <cmath>
#include <optional>
#include <vector>

#include <Eigen/Dense>
#include <Eigen/SVD>

#include "flexent/qcore.hpp"

namespace oracle {

using flexent::Complex;
using flexent::ComplexMatrix;

inline Eigen::VectorXd eig_vals(const ComplexMatrix& m) {
    Eigen::SelfAdjointEigenSolver<ComplexMatrix> es(m, Eigen::EigenvaluesOnly);
    return es.eigenvalues();
}

// trace norm from singular values rather than eigenvalues
inline double trace_norm_svd(const ComplexMatrix& m) {
    Eigen::JacobiSVD<ComplexMatrix> svd(m);
    return svd.singularValues().sum();
}

// partial transposes by explicit 2x2x2x2 index bookkeeping
inline ComplexMatrix transpose_b(const ComplexMatrix& m) {
    ComplexMatrix out(4, 4);
    for (int a = 0; a < 2; ++a)
        for (int b = 0; b < 2; ++b)
            for (int ap = 0; ap < 2; ++ap)
                for (int bp = 0; bp < 2; ++bp)
                    out(2 * a + bp, 2 * ap + b) = m(2 * a + b, 2 * ap + bp);
    return out;
}

inline ComplexMatrix transpose_a(const ComplexMatrix& m) {
    ComplexMatrix out(4, 4);
    for (int a = 0; a < 2; ++a)
        for (int b = 0; b < 2; ++b)
            for (int ap = 0; ap < 2; ++ap)
                for (int bp = 0; bp < 2; ++bp)
                    out(2 * ap + b, 2 * a + bp) = m(2 * a + b, 2 * ap + bp);
    return out;
}

// reduced states by explicit index sums
inline ComplexMatrix reduce_keep_a(const ComplexMatrix& m) {
    ComplexMatrix out = ComplexMatrix::Zero(2, 2);
    for (int a = 0; a < 2; ++a)
        for (int ap = 0; ap < 2; ++ap)
            for (int b = 0; b < 2; ++b) out(a, ap) += m(2 * a + b, 2 * ap + b);
    return out;
}

inline ComplexMatrix reduce_keep_b(const ComplexMatrix& m) {
    ComplexMatrix out = ComplexMatrix::Zero(2, 2);
    for (int b = 0; b < 2; ++b)
        for (int bp = 0; bp < 2; ++bp)
            for (int a = 0; a < 2; ++a) out(b, bp) += m(2 * a + b, 2 * a + bp);
    return out;
}

inline double entropy_bits(const ComplexMatrix& m) {
    double s = 0.0;
    const Eigen::VectorXd vals = eig_vals(m);
    for (Eigen::Index i = 0; i < vals.size(); ++i)
        if (vals(i) > 1e-12) s -= vals(i) * std::log2(vals(i));
    return s;
}

// fully entangled fraction as the largest eigenvalue of Re(rho) expressed in
// the magic basis {Phi+, i Phi-, i Psi+, Psi-} (basis order HH,HV,VH,VV)
inline double fef_magic(const ComplexMatrix& rho) {
    const Complex i(0.0, 1.0);
    const double r = 1.0 / std::sqrt(2.0);
    ComplexMatrix e = ComplexMatrix::Zero(4, 4); // columns = magic kets
    e(0, 0) = r;
    e(3, 0) = r;
    e(0, 1) = i * r;
    e(3, 1) = -i * r;
    e(1, 2) = i * r;
    e(2, 2) = i * r;
    e(1, 3) = r;
    e(2, 3) = -r;
    const ComplexMatrix m = e.adjoint() * rho * e;
    Eigen::Matrix4d re = m.real();
    const Eigen::Matrix4d sym = 0.5 * (re + re.transpose());
    Eigen::SelfAdjointEigenSolver<Eigen::Matrix4d> es(sym, Eigen::EigenvaluesOnly);
    return es.eigenvalues().maxCoeff();
}

// Werner family v|Phi+><Phi+| + (1-v) I/4 and its closed forms
inline ComplexMatrix werner(double v) {
    ComplexMatrix rho = ((1.0 - v) / 4.0) * ComplexMatrix::Identity(4, 4);
    rho(0, 0) += v / 2.0;
    rho(0, 3) += v / 2.0;
    rho(3, 0) += v / 2.0;
    rho(3, 3) += v / 2.0;
    return rho;
}

inline double werner_fidelity(double v) { return (1.0 + 3.0 * v) / 4.0; }

inline double werner_log_negativity(double v) {
    return std::log2(std::max(1.0, (1.0 + 3.0 * v) / 2.0));
}

inline double werner_entropy(double v) {
    const double lam0 = (1.0 + 3.0 * v) / 4.0;
    const double lam = (1.0 - v) / 4.0;
    double s = 0.0;
    if (lam0 > 1e-12) s -= lam0 * std::log2(lam0);
    if (lam > 1e-12) s -= 3.0 * lam * std::log2(lam);
    return s;
}

inline double werner_coherent_info(double v) { return 1.0 - werner_entropy(v); }

// exhaustive grid-anchor scan against all per-channel passband constraints;
// among feasible anchors picks the one nearest pump/2 - width (ties upward)
struct AnchorScan {
    bool feasible = false;
    double anchor = 0.0;
};

inline AnchorScan anchor_scan(double pump_thz, double width_thz, int count,
                              double c_lo, double c_hi, double l_lo, double l_hi) {
    constexpr double tol = 1e-9;
    const double target = pump_thz / 2.0 - width_thz;
    AnchorScan best;
    double best_dist = 0.0;
    for (long n = -1200; n <= 400; ++n) {
        const double anchor = 193.1 + 0.025 * static_cast<double>(n);
        bool ok = true;
        for (int k = 1; k <= count && ok; ++k) {
            const double sig = anchor + width_thz * k;
            const double idl = pump_thz - sig;
            ok = sig >= c_lo - tol && sig <= c_hi + tol && idl >= l_lo - tol &&
                 idl <= l_hi + tol;
        }
        if (!ok) continue;
        const double dist = std::abs(anchor - target);
        // strictly closer wins; at a tie the larger anchor wins
        if (!best.feasible || dist < best_dist - 1e-12 ||
            (std::abs(dist - best_dist) <= 1e-12 && anchor > best.anchor)) {
            best.feasible = true;
            best.anchor = anchor;
            best_dist = dist;
        }
    }
    return best;
}

} // namespace oracle
