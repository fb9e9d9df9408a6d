#pragma once

// Cylinder functions J_p (complex argument), Y_0/Y_1 and H^(1)_0/H^(1)_1
// (positive real argument). Coverage is deliberately minimal: exactly what the
// Green's-function kernel, the self-cell integral and the Mie oracle need.
// Accuracy target is 1e-10; downstream discretization error dominates.

#include <cmath>
#include <complex>
#include <stdexcept>
#include <vector>

#include "farscope/types.hpp"

namespace farscope {

// Below the switch the ascending series are summed (in long double, so the
// alternating-series cancellation stays far under the 1e-10 target); at and
// above it the Hankel asymptotic expansion is truncated at its smallest term,
// whose size at x = 12 is ~6e-12 relative. The overlap is cross-checked in
// the test suite.
inline constexpr double series_asymptotic_switch = 12.0;

inline constexpr int max_bessel_order = 60;
inline constexpr double max_bessel_argument = 100.0;

namespace detail {

inline constexpr long double euler_gamma_l =
    0.57721566490153286060651209008240243104L;

using lcplx = std::complex<long double>;

// ascending Maclaurin series with term-ratio stopping; fine for any complex z
// away from the real-axis cancellation region (handled by callers)
inline lcplx bessel_j_series(int p, lcplx z) {
    lcplx t(1.0L, 0.0L);
    for (int i = 1; i <= p; ++i) t *= z / (2.0L * i);
    lcplx sum = t;
    const lcplx w = -z * z / 4.0L;
    const long double eps = 1e-22L;
    int small_streak = 0;
    for (int m = 1; m <= 500; ++m) {
        t *= w / (static_cast<long double>(m) * (m + p));
        sum += t;
        if (std::abs(t) <= eps * (std::abs(sum) + 1e-300L)) {
            if (++small_streak >= 2) break;
        } else {
            small_streak = 0;
        }
    }
    return sum;
}

// H^(1)_p(x) for x >= series_asymptotic_switch, p in {0,1}: the standard
// large-argument expansion summed to its smallest term
inline cplx hankel1_asymptotic(int p, double x) {
    const long double mu = 4.0L * p * p;
    const lcplx iovx(0.0L, 1.0L / static_cast<long double>(x));
    lcplx term(1.0L, 0.0L);
    lcplx sum = term;
    long double prev = 1.0L;
    for (int k = 0; k < 60; ++k) {
        const long double num = mu - (2.0L * k + 1.0L) * (2.0L * k + 1.0L);
        term *= num / (8.0L * (k + 1)) * iovx;
        const long double mag = std::abs(term);
        if (mag >= prev) break;
        sum += term;
        prev = mag;
        if (mag < 1e-20L * std::abs(sum)) break;
    }
    const long double xl = x;
    const long double phase = xl - p * (pi / 2.0L) - pi / 4.0L;
    const long double amp = std::sqrt(2.0L / (pi * xl));
    const lcplx h = amp * lcplx(std::cos(phase), std::sin(phase)) * sum;
    return {static_cast<double>(h.real()), static_cast<double>(h.imag())};
}

// J_p(x) for real x >= series_asymptotic_switch and p >= 2 by backward
// recurrence, normalized with J_0 + 2*sum_{m even} J_m = 1
inline double bessel_j_miller(int p, double x) {
    const int mstart = std::max(p, static_cast<int>(std::ceil(x))) + 42;
    std::vector<long double> v(static_cast<size_t>(mstart) + 2, 0.0L);
    v[static_cast<size_t>(mstart) + 1] = 0.0L;
    v[static_cast<size_t>(mstart)] = 1e-30L;
    for (int m = mstart; m >= 1; --m) {
        v[static_cast<size_t>(m) - 1] =
            (2.0L * m / x) * v[static_cast<size_t>(m)] - v[static_cast<size_t>(m) + 1];
        if (std::abs(v[static_cast<size_t>(m) - 1]) > 1e250L) {
            for (auto& w : v) w *= 1e-250L;
        }
    }
    long double s = v[0];
    for (int m = 2; m <= mstart; m += 2) s += 2.0L * v[static_cast<size_t>(m)];
    return static_cast<double>(v[static_cast<size_t>(p)] / s);
}

inline double bessel_y0_series(double x) {
    const long double xl = x;
    const long double q = xl * xl / 4.0L;
    const long double j0 = bessel_j_series(0, lcplx(xl, 0.0L)).real();
    long double t = 1.0L;   // (x^2/4)^m / (m!)^2
    long double hm = 0.0L;  // harmonic number
    long double acc = 0.0L;
    long double sign = 1.0L;
    for (int m = 1; m <= 500; ++m) {
        t *= q / (static_cast<long double>(m) * m);
        hm += 1.0L / m;
        acc += sign * hm * t;
        sign = -sign;
        if (hm * t < 1e-22L * (std::abs(acc) + 1e-300L)) break;
    }
    const long double y0 =
        (2.0L / pi) * ((std::log(xl / 2.0L) + euler_gamma_l) * j0 + acc);
    return static_cast<double>(y0);
}

inline double bessel_y1_series(double x) {
    const long double xl = x;
    const long double q = xl * xl / 4.0L;
    const long double j1 = bessel_j_series(1, lcplx(xl, 0.0L)).real();
    // sum_k (-1)^k (psi(k+1)+psi(k+2)) (x/2)^(2k+1) / (k!(k+1)!)
    long double u = xl / 2.0L;
    long double psisum = -2.0L * euler_gamma_l + 1.0L; // psi(1)+psi(2)
    long double acc = psisum * u;
    long double sign = -1.0L;
    long double hk = 0.0L, hk1 = 1.0L;
    for (int k = 1; k <= 500; ++k) {
        u *= q / (static_cast<long double>(k) * (k + 1));
        hk += 1.0L / k;
        hk1 += 1.0L / (k + 1);
        psisum = -2.0L * euler_gamma_l + hk + hk1;
        acc += sign * psisum * u;
        sign = -sign;
        if (std::abs(psisum) * u < 1e-22L * (std::abs(acc) + 1e-300L)) break;
    }
    const long double y1 = (2.0L / pi) * std::log(xl / 2.0L) * j1 -
                           2.0L / (pi * xl) - acc / pi;
    return static_cast<double>(y1);
}

} // namespace detail

// J_order(z), orders 0..60, |z| <= 100. Genuinely complex arguments (and small
// real ones) go through the Maclaurin series; large real arguments switch to
// the asymptotic/backward-recurrence forms to dodge the series cancellation.
inline cplx bessel_j(int order, cplx z) {
    if (order < 0 || order > max_bessel_order)
        throw std::domain_error("bessel_j: order out of range 0.." +
                                std::to_string(max_bessel_order));
    if (!std::isfinite(z.real()) || !std::isfinite(z.imag()))
        throw std::domain_error("bessel_j: non-finite argument");
    if (std::abs(z) > max_bessel_argument)
        throw std::domain_error("bessel_j: |z| exceeds supported range");

    if (z.imag() == 0.0) {
        const double x = std::abs(z.real());
        if (x >= series_asymptotic_switch) {
            double v;
            if (order <= 1)
                v = detail::hankel1_asymptotic(order, x).real();
            else
                v = detail::bessel_j_miller(order, x);
            if (z.real() < 0.0 && (order % 2) == 1) v = -v; // J_p(-x) = (-1)^p J_p(x)
            return {v, 0.0};
        }
    }
    const auto s = detail::bessel_j_series(
        order, detail::lcplx(static_cast<long double>(z.real()),
                             static_cast<long double>(z.imag())));
    return {static_cast<double>(s.real()), static_cast<double>(s.imag())};
}

// Y_order(x), order 0 or 1, x > 0
inline double bessel_y(int order, double x) {
    if (order < 0 || order > 1)
        throw std::domain_error("bessel_y: only orders 0 and 1 are supported");
    if (!std::isfinite(x) || x <= 0.0)
        throw std::domain_error("bessel_y: argument must be positive (logarithmic singularity at 0)");
    if (x >= series_asymptotic_switch)
        return detail::hankel1_asymptotic(order, x).imag();
    return order == 0 ? detail::bessel_y0_series(x) : detail::bessel_y1_series(x);
}

// H^(1)_order(x) = J_order(x) + i Y_order(x), order 0 or 1, x > 0
inline cplx hankel1(int order, double x) {
    if (order < 0 || order > 1)
        throw std::domain_error("hankel1: only orders 0 and 1 are supported");
    if (!std::isfinite(x) || x <= 0.0)
        throw std::domain_error("hankel1: argument must be positive");
    if (x >= series_asymptotic_switch) return detail::hankel1_asymptotic(order, x);
    const double j = bessel_j(order, cplx(x, 0.0)).real();
    const double y = bessel_y(order, x);
    return {j, y};
}

} // namespace farscope
