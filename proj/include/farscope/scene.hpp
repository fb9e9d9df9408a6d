#pragma once

// Scatterer geometry: parametrized boundary curves, the two-region split,
// the piecewise refractive index and the uniform solver grid.

#include <cmath>
#include <cstdint>
#include <string>
#include <vector>

#include "farscope/types.hpp"

namespace farscope {

enum class CurveKind { kite, rounded_square, rounded_triangle, disk };

inline std::string to_string(CurveKind k) {
    switch (k) {
        case CurveKind::kite: return "kite";
        case CurveKind::rounded_square: return "rounded_square";
        case CurveKind::rounded_triangle: return "rounded_triangle";
        case CurveKind::disk: return "disk";
    }
    return "?";
}

struct BoundingBox {
    double xmin = 0, xmax = 0, ymin = 0, ymax = 0;
};

struct BoundaryCurve {
    CurveKind kind = CurveKind::disk;
    double radius = 1.0;        // disk only
    Vec2 center_offset{0.0, 0.0};
    int vertex_count = 512;
    std::vector<Vec2> polyline; // closed, vertices at equispaced parameter values

    BoundingBox bbox() const {
        BoundingBox b{polyline[0].x, polyline[0].x, polyline[0].y, polyline[0].y};
        for (const auto& p : polyline) {
            b.xmin = std::min(b.xmin, p.x);
            b.xmax = std::max(b.xmax, p.x);
            b.ymin = std::min(b.ymin, p.y);
            b.ymax = std::max(b.ymax, p.y);
        }
        return b;
    }
};

inline Vec2 curve_point(CurveKind kind, double radius, double t) {
    switch (kind) {
        case CurveKind::kite:
            return {std::cos(t) + 0.65 * std::cos(2.0 * t) - 0.65, 1.5 * std::sin(t)};
        case CurveKind::rounded_square: {
            const double c = std::cos(t), s = std::sin(t);
            return {0.5 * (c * c * c + c), 0.5 * (s * s * s + s)};
        }
        case CurveKind::rounded_triangle: {
            const double r = 2.0 + 0.3 * std::cos(3.0 * t);
            return {r * std::cos(t), r * std::sin(t)};
        }
        case CurveKind::disk:
            return {radius * std::cos(t), radius * std::sin(t)};
    }
    return {};
}

inline BoundaryCurve build_curve(CurveKind kind, int vertex_count,
                                 double radius = 1.0, Vec2 center_offset = {0.0, 0.0}) {
    if (vertex_count < 64)
        throw std::invalid_argument("build_curve: vertex_count must be >= 64");
    if (kind == CurveKind::disk && !(radius > 0.0))
        throw std::invalid_argument("build_curve: disk radius must be positive");
    BoundaryCurve c;
    c.kind = kind;
    c.radius = radius;
    c.center_offset = center_offset;
    c.vertex_count = vertex_count;
    c.polyline.reserve(static_cast<size_t>(vertex_count));
    for (int j = 0; j < vertex_count; ++j) {
        const double t = 2.0 * pi * j / vertex_count;
        c.polyline.push_back(curve_point(kind, radius, t) + center_offset);
    }
    return c;
}

namespace detail {

inline double point_segment_distance(Vec2 p, Vec2 a, Vec2 b) {
    const Vec2 ab = b - a;
    const double len2 = dot(ab, ab);
    double t = len2 > 0.0 ? dot(p - a, ab) / len2 : 0.0;
    t = std::clamp(t, 0.0, 1.0);
    return norm(p - (a + t * ab));
}

} // namespace detail

// Even-odd ray-crossing test against the polyline. Points within 1e-9 of an
// edge count as inside, so boundary hits classify deterministically.
inline bool contains(const BoundaryCurve& curve, Vec2 p) {
    const auto& v = curve.polyline;
    const size_t n = v.size();
    for (size_t i = 0; i < n; ++i) {
        if (detail::point_segment_distance(p, v[i], v[(i + 1) % n]) <= 1e-9)
            return true;
    }
    bool inside = false;
    for (size_t i = 0; i < n; ++i) {
        const Vec2 a = v[i];
        const Vec2 b = v[(i + 1) % n];
        if ((a.y > p.y) != (b.y > p.y)) {
            const double xint = a.x + (b.x - a.x) * (p.y - a.y) / (b.y - a.y);
            if (p.x < xint) inside = !inside;
        }
    }
    return inside;
}

enum class SplitAxis { x1, x2 };

// Half-plane predicate defining the first region: D1 is where
// sign * (selected coordinate) > 0.
struct HalfPlaneSplit {
    SplitAxis axis = SplitAxis::x2;
    int sign = +1;

    bool in_first_region(Vec2 p) const {
        const double c = (axis == SplitAxis::x1) ? p.x : p.y;
        return sign > 0 ? c > 0.0 : c < 0.0;
    }
};

struct RefractiveScene {
    BoundaryCurve boundary;
    HalfPlaneSplit split;
    cplx n1{1.0, 0.0};
    cplx n2{1.0, 0.0};
    double k = 1.0;
    double contrast_floor = 0.0;
};

// Validates the medium assumptions at construction: absorption nonnegative in
// both regions, and the real-part contrast at least the configured floor.
inline RefractiveScene make_scene(BoundaryCurve boundary, HalfPlaneSplit split,
                                  cplx n1, cplx n2, double k,
                                  double contrast_floor = 0.0) {
    if (!(k > 0.0)) throw ConfigError("scene: wavenumber k must be positive");
    if (n1.imag() < 0.0 || n2.imag() < 0.0)
        throw ConfigError("scene: Im(n) must be nonnegative in both regions");
    if (std::abs(n1.real() - 1.0) < contrast_floor ||
        std::abs(n2.real() - 1.0) < contrast_floor)
        throw ConfigError("scene: |Re(n)-1| below the contrast floor " +
                          std::to_string(contrast_floor));
    return RefractiveScene{std::move(boundary), split, n1, n2, k, contrast_floor};
}

enum class Region : std::uint8_t { d1 = 1, d2 = 2 };

inline cplx refractive_index(const RefractiveScene& scene, Vec2 p) {
    if (!contains(scene.boundary, p)) return {1.0, 0.0};
    return scene.split.in_first_region(p) ? scene.n1 : scene.n2;
}

// Uniform cells covering D; a cell belongs to D iff its center does. Centers
// sit on the half-integer lattice anchored at the origin, so symmetric
// scatterers produce symmetric grids regardless of the bounding box.
struct SolverGrid {
    double h = 0.0;
    double cell_area = 0.0; // h^2
    std::vector<Vec2> centers;
    std::vector<Region> region;
    std::vector<cplx> n;
    std::vector<std::string> warnings;

    int size() const { return static_cast<int>(centers.size()); }
};

inline SolverGrid discretize(const RefractiveScene& scene, double h) {
    if (!(h > 0.0)) throw std::invalid_argument("discretize: h must be positive");
    const double wavelength = 2.0 * pi / scene.k;
    const double cpw = wavelength / h;
    if (cpw < 8.0)
        throw std::invalid_argument(
            "discretize: fewer than 8 cells per wavelength (got " +
            std::to_string(cpw) + ")");

    SolverGrid g;
    g.h = h;
    g.cell_area = h * h;
    if (cpw < 10.0)
        g.warnings.push_back("coarse grid: " + std::to_string(cpw) +
                             " cells per wavelength (recommend >= 10)");

    const BoundingBox b = scene.boundary.bbox();
    const auto lo_index = [h](double lo) {
        return static_cast<long>(std::ceil((lo - h) / h - 0.5));
    };
    const auto hi_index = [h](double hi) {
        return static_cast<long>(std::floor((hi + h) / h - 0.5));
    };
    const long ix0 = lo_index(b.xmin), ix1 = hi_index(b.xmax);
    const long iy0 = lo_index(b.ymin), iy1 = hi_index(b.ymax);

    for (long iy = iy0; iy <= iy1; ++iy) {       // row-major by center coordinates
        for (long ix = ix0; ix <= ix1; ++ix) {
            const Vec2 c{(ix + 0.5) * h, (iy + 0.5) * h};
            if (!contains(scene.boundary, c)) continue;
            const bool first = scene.split.in_first_region(c);
            g.centers.push_back(c);
            g.region.push_back(first ? Region::d1 : Region::d2);
            g.n.push_back(first ? scene.n1 : scene.n2);
        }
    }
    if (g.centers.empty())
        throw GeometryError("discretize: no cell center falls inside the scatterer");
    return g;
}

} // namespace farscope
