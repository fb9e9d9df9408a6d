#pragma once

// Volume-integral (Nystrom) solver for the scattering problem, one dense
// factorization per grid, one triangular solve per incident direction, plus
// the separation-of-variables oracle for penetrable disks.
//
// Far-field convention used throughout the project:
//   u_s(x) ~ e^{i pi/4}/sqrt(8 pi k) * e^{ikr}/sqrt(r) * uinf(xhat),
// so
//   uinf(xhat) = k^2 * integral over D of e^{-ik xhat.y} (n(y)-1) u(y) dy.

#include <cmath>
#include <complex>
#include <vector>

#include "farscope/linalg.hpp"
#include "farscope/scene.hpp"
#include "farscope/special_functions.hpp"
#include "farscope/types.hpp"

namespace farscope {

// Integral of the kernel (i/4) H^(1)_0(k|y|) over the disk of the same area
// as a grid cell (radius h/sqrt(pi)); regularizes the diagonal of the kernel
// matrix. Closed form from d/dr[r J1(kr)] = kr J0(kr) and its Y counterpart:
//   (i pi R / 2k) H^(1)_1(kR) - 1/k^2.
inline cplx self_cell_integral(double k, double h) {
    if (!(k > 0.0) || !(h > 0.0))
        throw std::invalid_argument("self_cell_integral: k and h must be positive");
    const double r = h / std::sqrt(pi);
    const cplx h1 = hankel1(1, k * r);
    return cplx(0.0, pi * r / (2.0 * k)) * h1 - cplx(1.0 / (k * k), 0.0);
}

namespace detail {

// Cell-to-cell kernel matrix: h^2 * (i/4) H^(1)_0(k d) off the diagonal, the
// equal-area-disk self integral on it. Complex symmetric by construction.
// diag_scale is a test-only sabotage hook used by the validation suite.
inline CMatrix kernel_matrix(const SolverGrid& grid, double k,
                             double diag_scale = 1.0) {
    const int n = grid.size();
    CMatrix v(n, n);
    const cplx diag = diag_scale * self_cell_integral(k, grid.h);
    const double w = grid.cell_area;
    for (int c = 0; c < n; ++c) {
        v(c, c) = diag;
        for (int cc = c + 1; cc < n; ++cc) {
            const double d = norm(grid.centers[static_cast<size_t>(c)] -
                                  grid.centers[static_cast<size_t>(cc)]);
            const cplx phi = cplx(0.0, 0.25) * hankel1(0, k * d);
            v(c, cc) = w * phi;
            v(cc, c) = v(c, cc);
        }
    }
    return v;
}

} // namespace detail

struct LSSystem {
    double k = 0.0;
    double h = 0.0;
    std::vector<Vec2> centers;
    CVector contrast;                 // n(y_c) - 1 per cell
    CMatrix kernel;                   // V, kept for the factorization check
    CMatrix matrix;                   // A = I - k^2 V diag(n-1), for residuals
    Eigen::PartialPivLU<CMatrix> lu;
    double rcond = 0.0;
};

struct FieldSolution {
    Vec2 direction;      // incident direction, unit vector
    double k = 0.0;
    CVector u;           // total field at cell centers
    double residual = 0.0;
};

namespace detail {

inline LSSystem assemble_ls_impl(const SolverGrid& grid, double k,
                                 double diag_scale) {
    if (grid.size() == 0) throw GeometryError("assemble_ls: empty grid");
    const int n = grid.size();
    LSSystem sys;
    sys.k = k;
    sys.h = grid.h;
    sys.centers = grid.centers;
    sys.contrast.resize(n);
    for (int c = 0; c < n; ++c)
        sys.contrast(c) = grid.n[static_cast<size_t>(c)] - cplx(1.0, 0.0);
    sys.kernel = kernel_matrix(grid, k, diag_scale);
    sys.matrix = CMatrix::Identity(n, n) -
                 (k * k) * sys.kernel * sys.contrast.asDiagonal();
    sys.lu.compute(sys.matrix);
    sys.rcond = sys.lu.rcond();
    if (!(sys.rcond > 1e-14))
        throw NumericError("assemble_ls: system numerically singular, rcond=" +
                           std::to_string(sys.rcond));
    return sys;
}

} // namespace detail

inline LSSystem assemble_ls(const SolverGrid& grid, double k) {
    return detail::assemble_ls_impl(grid, k, 1.0);
}

inline CVector incident_plane_wave(const std::vector<Vec2>& points, double k, Vec2 d) {
    CVector ui(static_cast<Eigen::Index>(points.size()));
    for (size_t c = 0; c < points.size(); ++c) {
        const double phase = k * dot(points[c], d);
        ui(static_cast<Eigen::Index>(c)) = cplx(std::cos(phase), std::sin(phase));
    }
    return ui;
}

// Solve A u = rhs and report the relative residual; the solve contract is
// residual < 1e-12, checked here rather than assumed.
inline CVector solve_rhs(const LSSystem& sys, const CVector& rhs, double* residual = nullptr) {
    const CVector u = sys.lu.solve(rhs);
    const double rn = rhs.norm();
    const double res = rn > 0.0 ? (sys.matrix * u - rhs).norm() / rn : 0.0;
    if (residual) *residual = res;
    if (!(res < 1e-12))
        throw NumericError("solve: residual " + std::to_string(res) +
                           " exceeds contract 1e-12 (rcond=" +
                           std::to_string(sys.rcond) + ")");
    return u;
}

inline FieldSolution solve_incidence(const LSSystem& sys, Vec2 d) {
    FieldSolution sol;
    sol.direction = d;
    sol.k = sys.k;
    const CVector ui = incident_plane_wave(sys.centers, sys.k, d);
    sol.u = solve_rhs(sys, ui, &sol.residual);
    return sol;
}

// uinf(xhat_r) = k^2 sum_c h^2 e^{-ik xhat_r . y_c} (n(y_c)-1) u(y_c)
inline CVector far_field(const SolverGrid& grid, const FieldSolution& sol,
                         const std::vector<Vec2>& observation_directions) {
    const int n = grid.size();
    const double k = sol.k;
    const double w = k * k * grid.cell_area;
    CVector out(static_cast<Eigen::Index>(observation_directions.size()));
    for (size_t r = 0; r < observation_directions.size(); ++r) {
        cplx acc = 0.0;
        for (int c = 0; c < n; ++c) {
            const double phase = -k * dot(observation_directions[r],
                                          grid.centers[static_cast<size_t>(c)]);
            acc += cplx(std::cos(phase), std::sin(phase)) *
                   (grid.n[static_cast<size_t>(c)] - cplx(1.0, 0.0)) * sol.u(c);
        }
        out(static_cast<Eigen::Index>(r)) = w * acc;
    }
    return out;
}

// -----------------------------------------------------------------------
// Mie oracle: plane-wave scattering by a homogeneous penetrable disk.
// Interior wavenumber k1 = k sqrt(n) with the principal branch (Im >= 0).
// Far field in the project convention: uinf(theta) = -4i sum_m a_m e^{im theta}
// with theta the angle between xhat and d.
// -----------------------------------------------------------------------
class MieDisk {
  public:
    MieDisk(double radius, cplx n_const, double k, double tail_tol = 1e-12,
            int order_cap = 80)
        : a_(radius), n_(n_const), k_(k) {
        if (!(radius > 0.0) || !(k > 0.0))
            throw std::invalid_argument("MieDisk: radius and k must be positive");
        if (n_const.imag() < 0.0)
            throw std::invalid_argument("MieDisk: Im(n) must be nonnegative");
        k1_ = k * std::sqrt(n_const);
        if (k1_.imag() < 0.0) k1_ = -k1_;

        const double x = k * radius;
        // H_m(ka) by upward recurrence (stable: Y grows with order)
        std::vector<cplx> hm;
        hm.push_back(hankel1(0, x));
        hm.push_back(hankel1(1, x));
        scatter_.clear();
        interior_.clear();
        double tail = 0.0;
        for (int m = 0;; ++m) {
            if (m >= 2) hm.push_back((2.0 * (m - 1) / x) * hm[m - 1] - hm[m - 2]);
            const cplx jm = bessel_j(m, cplx(x, 0.0));
            const cplx jm_prev = (m == 0) ? -bessel_j(1, cplx(x, 0.0))
                                          : bessel_j(m - 1, cplx(x, 0.0));
            const cplx hm_prev = (m == 0) ? -hm[1] : hm[m - 1];
            const cplx jim = bessel_j(m, k1_ * a_);
            const cplx jim_prev = (m == 0) ? -bessel_j(1, k1_ * a_)
                                           : bessel_j(m - 1, k1_ * a_);
            // C'_m(z) = C_{m-1}(z) - (m/z) C_m(z)
            const cplx djm = jm_prev - (static_cast<double>(m) / x) * jm;
            const cplx dhm = hm_prev - (static_cast<double>(m) / x) * hm[static_cast<size_t>(m)];
            const cplx djim = jim_prev - (static_cast<double>(m) / (k1_ * a_)) * jim;
            const cplx num = k1_ * djim * jm - k_ * djm * jim;
            const cplx den = k1_ * djim * hm[static_cast<size_t>(m)] - k_ * dhm * jim;
            const cplx am = -num / den;
            scatter_.push_back(am);
            interior_.push_back(jim == cplx(0.0, 0.0)
                                    ? cplx(0.0, 0.0)
                                    : (jm + am * hm[static_cast<size_t>(m)]) / jim);

            tail = std::abs(am);
            if (m >= 2 && tail < tail_tol &&
                std::abs(scatter_[static_cast<size_t>(m - 1)]) < tail_tol)
                break;
            if (m >= order_cap)
                throw NumericError("MieDisk: series did not reach tail tolerance by order cap");
        }
    }

    int order() const { return static_cast<int>(scatter_.size()) - 1; }

    cplx far_field(Vec2 xhat, Vec2 d) const {
        const double theta = std::atan2(std::abs(cross(xhat, d)), dot(xhat, d));
        cplx s = scatter_[0];
        for (size_t m = 1; m < scatter_.size(); ++m)
            s += 2.0 * scatter_[m] * std::cos(static_cast<double>(m) * theta);
        return cplx(0.0, -4.0) * s;
    }

    // total field inside the disk (|p| < radius), incident direction d
    cplx interior(Vec2 p, Vec2 d) const {
        const double r = norm(p);
        const double theta = std::atan2(p.y, p.x) - std::atan2(d.y, d.x);
        cplx acc = 0.0;
        cplx im_pow(1.0, 0.0); // i^m
        for (size_t m = 0; m < interior_.size(); ++m) {
            const cplx term = im_pow * interior_[m] * bessel_j(static_cast<int>(m), k1_ * r) *
                              std::cos(static_cast<double>(m) * theta);
            acc += (m == 0) ? term : 2.0 * term;
            im_pow *= cplx(0.0, 1.0);
        }
        return acc;
    }

  private:
    double a_;
    cplx n_;
    double k_;
    cplx k1_;
    std::vector<cplx> scatter_;   // a_m
    std::vector<cplx> interior_;  // c_m
};

inline cplx mie_far_field(double radius, cplx n_const, double k, Vec2 xhat, Vec2 d) {
    return MieDisk(radius, n_const, k).far_field(xhat, d);
}

} // namespace farscope
