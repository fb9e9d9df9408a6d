#pragma once

// Reconstruction core: Hermitian spectral machinery for the sharp operator
// |Re F| + |Im F|, the Picard-series indicator, and the numerical check of
// the discrete identity (2 pi / M) F = H* T^{-1} H.

#include <algorithm>
#include <numeric>
#include <string>
#include <vector>

#include "farscope/farfield_operator.hpp"
#include "farscope/forward_solver.hpp"
#include "farscope/linalg.hpp"
#include "farscope/scene.hpp"
#include "farscope/types.hpp"

namespace farscope {

struct EigenSystem {
    RVector values;   // real, descending
    CMatrix vectors;  // orthonormal columns, phase-normalized
    std::string source;
};

// ReF = (F + F^H)/2, ImF = (F - F^H)/(2i); both Hermitian by construction.
inline std::pair<CMatrix, CMatrix> hermitian_parts(const CMatrix& f) {
    if (f.rows() != f.cols())
        throw std::invalid_argument("hermitian_parts: matrix must be square");
    const CMatrix fh = f.adjoint();
    CMatrix re = 0.5 * (f + fh);
    CMatrix im = (f - fh) / cplx(0.0, 2.0);
    return {std::move(re), std::move(im)};
}

// Eigendecomposition of a Hermitian matrix by cyclic Jacobi rotations.
// Ordering: values descending; exact ties broken by comparing the
// phase-normalized vectors lexicographically. Each vector is normalized so
// its first component of magnitude > 1e-10 is positive real.
inline EigenSystem hermitian_eig(const CMatrix& a, std::string source = {}) {
    if (a.rows() != a.cols())
        throw std::invalid_argument("hermitian_eig: matrix must be square");
    const double amax = a.cwiseAbs().maxCoeff();
    if ((a - a.adjoint()).cwiseAbs().maxCoeff() > 1e-12 * (amax > 0.0 ? amax : 1.0))
        throw std::invalid_argument("hermitian_eig: matrix is not Hermitian");

    EigenSystem es;
    es.source = std::move(source);
    detail::jacobi_hermitian(a, es.values, es.vectors);

    const auto n = a.rows();
    for (Eigen::Index j = 0; j < n; ++j) {
        for (Eigen::Index i = 0; i < n; ++i) {
            const cplx v = es.vectors(i, j);
            if (std::abs(v) > 1e-10) {
                es.vectors.col(j) *= std::conj(v) / std::abs(v);
                break;
            }
        }
    }
    std::vector<Eigen::Index> order(static_cast<size_t>(n));
    std::iota(order.begin(), order.end(), 0);
    std::sort(order.begin(), order.end(), [&](Eigen::Index p, Eigen::Index q) {
        if (es.values(p) != es.values(q)) return es.values(p) > es.values(q);
        for (Eigen::Index i = 0; i < n; ++i) {
            const cplx vp = es.vectors(i, p), vq = es.vectors(i, q);
            if (vp.real() != vq.real()) return vp.real() < vq.real();
            if (vp.imag() != vq.imag()) return vp.imag() < vq.imag();
        }
        return false;
    });
    EigenSystem sorted;
    sorted.source = es.source;
    sorted.values.resize(n);
    sorted.vectors.resize(n, n);
    for (Eigen::Index j = 0; j < n; ++j) {
        sorted.values(j) = es.values(order[static_cast<size_t>(j)]);
        sorted.vectors.col(j) = es.vectors.col(order[static_cast<size_t>(j)]);
    }
    return sorted;
}

// Operator absolute value |A| = sum |lambda| psi psi^H (spectral, not
// entrywise).
inline CMatrix operator_abs(const CMatrix& a) {
    const EigenSystem es = hermitian_eig(a);
    CMatrix out = CMatrix::Zero(a.rows(), a.cols());
    for (Eigen::Index j = 0; j < a.rows(); ++j)
        out += std::abs(es.values(j)) *
               (es.vectors.col(j) * es.vectors.col(j).adjoint());
    return out;
}

struct SharpSystem {
    CMatrix f_sharp;   // |Re F| + |Im F|, Hermitian PSD
    EigenSystem eig;
};

inline SharpSystem sharp(const CMatrix& f) {
    auto [re, im] = hermitian_parts(f);
    SharpSystem s;
    s.f_sharp = operator_abs(re) + operator_abs(im);
    // enforce exact Hermiticity before the final decomposition
    s.f_sharp = 0.5 * (s.f_sharp + CMatrix(s.f_sharp.adjoint()));
    s.eig = hermitian_eig(s.f_sharp, "sharp");
    return s;
}

// phi_z component r: e^{-ik xhat_r . z}
inline CVector test_function(double k, Vec2 z, const std::vector<Vec2>& directions) {
    CVector phi(static_cast<Eigen::Index>(directions.size()));
    for (size_t r = 0; r < directions.size(); ++r) {
        const double phase = -k * dot(directions[r], z);
        phi(static_cast<Eigen::Index>(r)) = cplx(std::cos(phase), std::sin(phase));
    }
    return phi;
}

inline constexpr double default_eigen_cutoff = 1e-12;

// W(z) = [ sum_p (1/lambda_p) | sum_q phi_{z,q} conj(psi_{p,q}) |^2 ]^{-1},
// the sum restricted to lambda_p > cutoff * lambda_max. Returns 0 when phi_z
// is orthogonal to every retained mode.
inline double indicator(const EigenSystem& eig, double k, Vec2 z,
                        const std::vector<Vec2>& directions,
                        double cutoff = default_eigen_cutoff) {
    if (cutoff < 0.0) throw std::invalid_argument("indicator: cutoff must be >= 0");
    const Eigen::Index m = eig.values.size();
    if (m == 0) throw NumericError("indicator: empty spectrum");
    const double lmax = eig.values(0);
    if (!(lmax > 0.0))
        throw NumericError("indicator: degenerate spectrum (no positive eigenvalue)");
    const CVector phi = test_function(k, z, directions);
    double s = 0.0;
    bool any = false;
    for (Eigen::Index p = 0; p < m; ++p) {
        const double lam = eig.values(p);
        if (!(lam > cutoff * lmax)) continue;
        any = true;
        const cplx inner = (eig.vectors.col(p).conjugate().array() * phi.array()).sum();
        s += std::norm(inner) / lam;
    }
    if (!any)
        throw NumericError("indicator: all eigenvalues fall below the cutoff");
    return s > 0.0 ? 1.0 / s : 0.0;
}

struct Window {
    double x0 = 0, x1 = 0, y0 = 0, y1 = 0;
};

// Indicator sampled on window nodes x0 + i dx (dx = extent/(n-1)); node
// convention keeps sample points coincident when the resolution is refined
// n -> 2n-1. Values row-major, row iy from y0 upward.
struct IndicatorField {
    Window window;
    int nx = 0, ny = 0;
    double cutoff = default_eigen_cutoff;
    std::vector<double> values; // nx*ny, row-major

    double dx() const { return nx > 1 ? (window.x1 - window.x0) / (nx - 1) : 0.0; }
    double dy() const { return ny > 1 ? (window.y1 - window.y0) / (ny - 1) : 0.0; }
    Vec2 node(int ix, int iy) const {
        return {window.x0 + ix * dx(), window.y0 + iy * dy()};
    }
    double at(int ix, int iy) const {
        return values[static_cast<size_t>(iy) * static_cast<size_t>(nx) +
                      static_cast<size_t>(ix)];
    }
};

inline IndicatorField indicator_field(const EigenSystem& eig, double k,
                                      const Window& window, int nx, int ny,
                                      const std::vector<Vec2>& directions,
                                      double cutoff = default_eigen_cutoff) {
    if (nx < 16 || ny < 16)
        throw std::invalid_argument("indicator_field: resolution must be at least 16x16");
    if (!(window.x1 > window.x0) || !(window.y1 > window.y0))
        throw std::invalid_argument("indicator_field: empty window");
    IndicatorField f;
    f.window = window;
    f.nx = nx;
    f.ny = ny;
    f.cutoff = cutoff;
    f.values.resize(static_cast<size_t>(nx) * static_cast<size_t>(ny));
    for (int iy = 0; iy < ny; ++iy)
        for (int ix = 0; ix < nx; ++ix)
            f.values[static_cast<size_t>(iy) * static_cast<size_t>(nx) +
                     static_cast<size_t>(ix)] =
                indicator(eig, k, f.node(ix, iy), directions, cutoff);
    return f;
}

// Assembles the incident-operator and data-operator discretizations on the
// shared grid and reports ||F_op - H* T^{-1} H||_F / ||F_op||_F, where
// F_op = (2 pi / M) F carries the direction-quadrature weight. Exact at the
// discrete level up to solver roundoff because both sides share the kernel
// matrix.
inline double verify_factorization(const RefractiveScene& scene,
                                   const SolverGrid& grid, double k, int m) {
    if (grid.size() == 0) throw GeometryError("verify_factorization: empty grid");
    for (const auto& nv : grid.n)
        if (std::abs(nv - cplx(1.0, 0.0)) < 1e-14)
            throw std::invalid_argument(
                "verify_factorization: n = 1 on some cell, 1/(k^2 (n-1)) undefined");

    const FarFieldMatrix f = assemble_F(scene, grid, m);
    const auto dirs = f.directions();
    const int n = grid.size();
    const double wdir = 2.0 * pi / m;

    CMatrix hmat(n, m);        // H[c,s] = (2 pi / M) e^{ik y_c . d_s}
    CMatrix hstar(m, n);       // H*[r,c] = h^2 e^{-ik d_r . y_c}
    for (int c = 0; c < n; ++c) {
        for (int s = 0; s < m; ++s) {
            const double phase = k * dot(grid.centers[static_cast<size_t>(c)],
                                         dirs[static_cast<size_t>(s)]);
            hmat(c, s) = wdir * cplx(std::cos(phase), std::sin(phase));
            hstar(s, c) = grid.cell_area * cplx(std::cos(phase), -std::sin(phase));
        }
    }

    CMatrix t = -detail::kernel_matrix(grid, k);
    for (int c = 0; c < n; ++c)
        t(c, c) += 1.0 / (k * k * (grid.n[static_cast<size_t>(c)] - cplx(1.0, 0.0)));

    Eigen::PartialPivLU<CMatrix> tlu(t);
    if (!(tlu.rcond() > 1e-14))
        throw NumericError("verify_factorization: middle operator singular at this "
                           "resolution, rcond=" + std::to_string(tlu.rcond()));
    const CMatrix product = hstar * tlu.solve(hmat);
    const CMatrix f_op = wdir * f.entries;
    return (f_op - product).norm() / f_op.norm();
}

} // namespace farscope
