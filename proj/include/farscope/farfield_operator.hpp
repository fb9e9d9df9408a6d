#pragma once

// The measured-data object: the M x M matrix of far-field values over
// equidistant observation/incidence directions, its noise model, and the
// bit-exact FFMAT text format.

#include <cinttypes>
#include <cstdint>
#include <cstdio>
#include <cstring>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include "farscope/forward_solver.hpp"
#include "farscope/linalg.hpp"
#include "farscope/rng.hpp"
#include "farscope/scene.hpp"
#include "farscope/types.hpp"

namespace farscope {

inline constexpr const char* farfield_convention = "uinf.k2contrast.v1";

// xhat_r = (cos 2 pi r / M, sin 2 pi r / M); M even keeps the set closed
// under the antipode map r -> r + M/2.
inline std::vector<Vec2> direction_set(int m) {
    std::vector<Vec2> d(static_cast<size_t>(m));
    for (int r = 0; r < m; ++r) {
        const double t = 2.0 * pi * r / m;
        d[static_cast<size_t>(r)] = {std::cos(t), std::sin(t)};
    }
    return d;
}

struct FarFieldMatrix {
    int m = 0;
    double k = 0.0;
    CMatrix entries;          // entry(r, s) = uinf(xhat_r; d_s)
    std::string convention = farfield_convention;
    std::string provenance;   // "synthetic:<hash>" or "loaded:<name>"

    std::vector<Vec2> directions() const { return direction_set(m); }
};

struct NoiseSpec {
    double delta = 0.0;       // relative noise level, in [0, 1)
    std::uint64_t seed = 0;
};

namespace detail {

inline std::uint64_t fnv1a(const std::string& s) {
    std::uint64_t h = 1469598103934665603ULL;
    for (unsigned char ch : s) {
        h ^= ch;
        h *= 1099511628211ULL;
    }
    return h;
}

inline std::string scene_fingerprint(const RefractiveScene& scene,
                                     const SolverGrid& grid, int m) {
    char buf[512];
    std::snprintf(buf, sizeof(buf),
                  "%s;r=%.17g;ox=%.17g;oy=%.17g;v=%d;axis=%d;sign=%d;"
                  "n1=%.17g,%.17g;n2=%.17g,%.17g;k=%.17g;h=%.17g;M=%d",
                  to_string(scene.boundary.kind).c_str(), scene.boundary.radius,
                  scene.boundary.center_offset.x, scene.boundary.center_offset.y,
                  scene.boundary.vertex_count,
                  scene.split.axis == SplitAxis::x1 ? 1 : 2, scene.split.sign,
                  scene.n1.real(), scene.n1.imag(), scene.n2.real(),
                  scene.n2.imag(), scene.k, grid.h, m);
    char hex[32];
    std::snprintf(hex, sizeof(hex), "%016" PRIx64, fnv1a(buf));
    return hex;
}

} // namespace detail

// Column s holds the far field of the plane wave with direction d_s, sampled
// at all observation directions. One factorization, M triangular solves.
inline FarFieldMatrix assemble_F(const RefractiveScene& scene,
                                 const SolverGrid& grid, int m) {
    if (m < 8 || m % 2 != 0)
        throw std::invalid_argument("assemble_F: M must be even and >= 8");
    const auto dirs = direction_set(m);
    const LSSystem sys = assemble_ls(grid, scene.k);

    FarFieldMatrix f;
    f.m = m;
    f.k = scene.k;
    f.entries.resize(m, m);
    f.provenance = "synthetic:" + detail::scene_fingerprint(scene, grid, m);
    for (int s = 0; s < m; ++s) {
        const FieldSolution sol = solve_incidence(sys, dirs[static_cast<size_t>(s)]);
        f.entries.col(s) = far_field(grid, sol, dirs);
    }
    return f;
}

// || F - P F^T P ||_2 / ||F||_2 with P the antipode permutation
// r -> (r + M/2) mod M. Exact (up to roundoff) for synthetic data because the
// kernel matrix is complex symmetric.
inline double reciprocity_defect(const FarFieldMatrix& f) {
    if (f.m % 2 != 0)
        throw std::invalid_argument("reciprocity_defect: M must be even");
    const int m = f.m;
    CMatrix g(m, m);
    for (int r = 0; r < m; ++r)
        for (int s = 0; s < m; ++s)
            g(r, s) = f.entries((s + m / 2) % m, (r + m / 2) % m);
    const double denom = spectral_norm(f.entries);
    if (denom == 0.0) return 0.0;
    return spectral_norm(f.entries - g) / denom;
}

// F_delta = F + delta * X / ||X||_2 * ||F||_2, X filled with independent
// uniform [-1,1] real and imaginary parts from the pinned generator
// (row-major, real part first).
inline FarFieldMatrix add_noise(const FarFieldMatrix& f, const NoiseSpec& spec) {
    if (!(spec.delta >= 0.0) || spec.delta >= 1.0)
        throw std::invalid_argument("add_noise: delta must lie in [0, 1)");
    if (spec.delta == 0.0) return f;
    const double fnorm = spectral_norm(f.entries);
    if (fnorm == 0.0)
        throw std::invalid_argument("add_noise: zero matrix with positive delta");

    Xoshiro256pp rng(spec.seed);
    CMatrix x(f.m, f.m);
    for (int r = 0; r < f.m; ++r)
        for (int s = 0; s < f.m; ++s) {
            const double re = rng.uniform_pm1();
            const double im = rng.uniform_pm1();
            x(r, s) = cplx(re, im);
        }
    const double xnorm = spectral_norm(x);
    FarFieldMatrix out = f;
    out.entries = f.entries + (spec.delta * fnorm / xnorm) * x;
    return out;
}

// ---------------------------------------------------------------------
// FFMAT v1 text format. Line 1: magic. Line 2: metadata. Lines 3..M+2: one
// matrix row per line, entries as "<re> <im>" with 17 significant digits
// (lossless round trip for doubles).
// ---------------------------------------------------------------------

namespace detail {

inline std::string format_g17(double v) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

inline double parse_double(const std::string& tok, int line_no, const char* what) {
    char* end = nullptr;
    const double v = std::strtod(tok.c_str(), &end);
    if (end == nullptr || *end != '\0')
        throw FormatError("line " + std::to_string(line_no) + ": bad " + what +
                          " token '" + tok + "'");
    if (!std::isfinite(v))
        throw FormatError("line " + std::to_string(line_no) + ": non-finite " +
                          std::string(what));
    return v;
}

} // namespace detail

inline void save_F(const FarFieldMatrix& f, const std::string& path) {
    std::ofstream out(path);
    if (!out) throw FormatError("save_F: cannot open '" + path + "' for writing");
    out << "FFMAT v1\n";
    out << "M=" << f.m << " k=" << detail::format_g17(f.k)
        << " convention=" << f.convention << " provenance=" << f.provenance << "\n";
    for (int r = 0; r < f.m; ++r) {
        for (int s = 0; s < f.m; ++s) {
            if (s) out << ' ';
            out << detail::format_g17(f.entries(r, s).real()) << ' '
                << detail::format_g17(f.entries(r, s).imag());
        }
        out << '\n';
    }
    if (!out) throw FormatError("save_F: write failure on '" + path + "'");
}

inline FarFieldMatrix load_F(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw FormatError("load_F: cannot open '" + path + "'");
    std::string line;

    if (!std::getline(in, line)) throw FormatError("line 1: empty file");
    if (line != "FFMAT v1")
        throw FormatError("line 1: expected 'FFMAT v1', got '" + line + "'");

    if (!std::getline(in, line)) throw FormatError("line 2: missing header");
    FarFieldMatrix f;
    {
        std::istringstream hs(line);
        std::string tok;
        bool got_m = false, got_k = false, got_conv = false, got_prov = false;
        while (hs >> tok) {
            const auto eq = tok.find('=');
            if (eq == std::string::npos)
                throw FormatError("line 2: malformed field '" + tok + "'");
            const std::string key = tok.substr(0, eq);
            const std::string val = tok.substr(eq + 1);
            if (key == "M") {
                char* end = nullptr;
                const long mval = std::strtol(val.c_str(), &end, 10);
                if (end == nullptr || *end != '\0' || mval <= 0)
                    throw FormatError("line 2: bad M value '" + val + "'");
                f.m = static_cast<int>(mval);
                got_m = true;
            } else if (key == "k") {
                f.k = detail::parse_double(val, 2, "k");
                got_k = true;
            } else if (key == "convention") {
                f.convention = val;
                got_conv = true;
            } else if (key == "provenance") {
                f.provenance = val;
                got_prov = true;
            } else {
                throw FormatError("line 2: unknown field '" + key + "'");
            }
        }
        if (!got_m || !got_k || !got_conv || !got_prov)
            throw FormatError("line 2: header must carry M, k, convention, provenance");
    }
    if (f.m < 8 || f.m % 2 != 0)
        throw FormatError("line 2: M must be even and >= 8, got " + std::to_string(f.m));
    if (!(f.k > 0.0)) throw FormatError("line 2: k must be positive");

    f.entries.resize(f.m, f.m);
    for (int r = 0; r < f.m; ++r) {
        const int line_no = 3 + r;
        if (!std::getline(in, line))
            throw FormatError("row " + std::to_string(r) + " missing (file ends at line " +
                              std::to_string(line_no - 1) + ")");
        std::istringstream ls(line);
        std::string tok;
        for (int s = 0; s < f.m; ++s) {
            if (!(ls >> tok))
                throw FormatError("line " + std::to_string(line_no) + ": row " +
                                  std::to_string(r) + " truncated at column " +
                                  std::to_string(s));
            const double re = detail::parse_double(tok, line_no, "entry");
            if (!(ls >> tok))
                throw FormatError("line " + std::to_string(line_no) + ": row " +
                                  std::to_string(r) + " missing imaginary part at column " +
                                  std::to_string(s));
            const double im = detail::parse_double(tok, line_no, "entry");
            f.entries(r, s) = cplx(re, im);
        }
        if (ls >> tok)
            throw FormatError("line " + std::to_string(line_no) + ": trailing data '" +
                              tok + "'");
    }
    return f;
}

} // namespace farscope
