#pragma once

#include <cmath>
#include <complex>
#include <stdexcept>
#include <string>

namespace farscope {

using cplx = std::complex<double>;

inline constexpr double pi = 3.141592653589793238462643383279502884;

struct Vec2 {
    double x = 0.0;
    double y = 0.0;
};

inline Vec2 operator+(Vec2 a, Vec2 b) { return {a.x + b.x, a.y + b.y}; }
inline Vec2 operator-(Vec2 a, Vec2 b) { return {a.x - b.x, a.y - b.y}; }
inline Vec2 operator*(double s, Vec2 a) { return {s * a.x, s * a.y}; }
inline double dot(Vec2 a, Vec2 b) { return a.x * b.x + a.y * b.y; }
inline double cross(Vec2 a, Vec2 b) { return a.x * b.y - a.y * b.x; }
inline double norm(Vec2 a) { return std::hypot(a.x, a.y); }

// Bad option/parameter in a config file, preset, or scene definition.
struct ConfigError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Degenerate or inconsistent geometry (empty grid, bad curve).
struct GeometryError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Malformed data file; messages carry line numbers where possible.
struct FormatError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Numerical failure: singular system, non-convergence, degenerate spectrum.
struct NumericError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

} // namespace farscope
