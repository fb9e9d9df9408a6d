#pragma once

#include <algorithm>
#include <cmath>
#include <numeric>
#include <vector>

#include <Eigen/Dense>

#include "farscope/types.hpp"

namespace farscope {

using CMatrix = Eigen::MatrixXcd;
using CVector = Eigen::VectorXcd;
using RVector = Eigen::VectorXd;

namespace detail {

// Cyclic-by-rows Jacobi for complex Hermitian matrices. Deterministic sweep
// order, so repeated runs are bitwise identical. Returns unsorted eigenpairs;
// callers impose ordering conventions.
inline void jacobi_hermitian(CMatrix a, RVector& values, CMatrix& vectors,
                             int max_sweeps = 40) {
    const auto n = a.rows();
    vectors = CMatrix::Identity(n, n);
    values.resize(n);
    if (n == 1) {
        values(0) = a(0, 0).real();
        return;
    }
    const double fro = a.norm();
    const double stop = 1e-15 * (fro > 0.0 ? fro : 1.0);

    for (int sweep = 0; sweep < max_sweeps; ++sweep) {
        double off = 0.0;
        for (Eigen::Index p = 0; p < n; ++p)
            for (Eigen::Index q = p + 1; q < n; ++q) off += std::norm(a(p, q));
        off = std::sqrt(2.0 * off);
        if (off <= stop) {
            for (Eigen::Index i = 0; i < n; ++i) values(i) = a(i, i).real();
            return;
        }
        for (Eigen::Index p = 0; p < n; ++p) {
            for (Eigen::Index q = p + 1; q < n; ++q) {
                const cplx apq = a(p, q);
                const double r = std::abs(apq);
                if (r == 0.0) continue;
                const cplx phase = apq / r;
                const double app = a(p, p).real();
                const double aqq = a(q, q).real();
                const double tau = (aqq - app) / (2.0 * r);
                // smaller-magnitude root of t^2 - 2*tau*t - 1 = 0
                const double t = (tau >= 0.0)
                                     ? -1.0 / (tau + std::hypot(1.0, tau))
                                     : 1.0 / (-tau + std::hypot(1.0, tau));
                const double c = 1.0 / std::hypot(1.0, t);
                const double s = t * c;
                const cplx sp = s * phase;        // rotation column entries
                const cplx spc = s * std::conj(phase);

                for (Eigen::Index i = 0; i < n; ++i) {
                    const cplx aip = a(i, p);
                    const cplx aiq = a(i, q);
                    a(i, p) = c * aip + spc * aiq;
                    a(i, q) = -sp * aip + c * aiq;
                }
                for (Eigen::Index i = 0; i < n; ++i) {
                    const cplx api = a(p, i);
                    const cplx aqi = a(q, i);
                    a(p, i) = c * api + sp * aqi;
                    a(q, i) = -spc * api + c * aqi;
                }
                a(p, q) = 0.0;
                a(q, p) = 0.0;
                a(p, p) = cplx(a(p, p).real(), 0.0);
                a(q, q) = cplx(a(q, q).real(), 0.0);

                for (Eigen::Index i = 0; i < n; ++i) {
                    const cplx vip = vectors(i, p);
                    const cplx viq = vectors(i, q);
                    vectors(i, p) = c * vip + spc * viq;
                    vectors(i, q) = -sp * vip + c * viq;
                }
            }
        }
    }
    throw NumericError("jacobi_hermitian: no convergence within sweep cap");
}

} // namespace detail

// spectral norm via the eigenvalues of A^H A; intended for the small
// direction-space matrices (M x M), not the volume systems
inline double spectral_norm(const CMatrix& a) {
    if (a.size() == 0) return 0.0;
    const CMatrix g = a.adjoint() * a;
    RVector vals;
    CMatrix vecs;
    detail::jacobi_hermitian(g, vals, vecs);
    const double lmax = vals.maxCoeff();
    return lmax > 0.0 ? std::sqrt(lmax) : 0.0;
}

} // namespace farscope
