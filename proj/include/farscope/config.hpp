#pragma once

// Flat key-value run configuration: parsing with aggregated error reporting,
// the three experiment presets, and a stable config hash carried by every
// artifact a run writes.

#include <cinttypes>
#include <cstdint>
#include <cstdio>
#include <map>
#include <sstream>
#include <string>
#include <vector>

#include "farscope/factorization.hpp"
#include "farscope/scene.hpp"
#include "farscope/types.hpp"

namespace farscope {

struct RunConfig {
    std::string preset;   // empty unless built from a preset

    CurveKind curve = CurveKind::disk;
    double radius = 1.0;
    int vertices = 512;
    Vec2 offset{0.0, 0.0};
    SplitAxis split_axis = SplitAxis::x2;
    int split_sign = +1;          // D1 = {sign * coord > 0}
    cplx n1{2.0, 2.0};
    cplx n2{0.5, 2.0};
    double contrast_floor = 0.01;

    double k = 5.0;
    int m = 64;
    double cells_per_wavelength = 12.0;
    double h_explicit = 0.0;      // overrides cells_per_wavelength when > 0

    std::vector<double> deltas;   // noise levels in addition to the clean run
    std::uint64_t seed = 1;

    bool window_auto = true;
    Window window;
    int nx = 64, ny = 64;
    double cutoff = default_eigen_cutoff;

    std::string out_dir = "out";

    double grid_h() const {
        return h_explicit > 0.0 ? h_explicit : (2.0 * pi / k) / cells_per_wavelength;
    }
};

inline RefractiveScene scene_from_config(const RunConfig& cfg) {
    BoundaryCurve curve = build_curve(cfg.curve, cfg.vertices, cfg.radius, cfg.offset);
    HalfPlaneSplit split{cfg.split_axis, cfg.split_sign};
    return make_scene(std::move(curve), split, cfg.n1, cfg.n2, cfg.k, cfg.contrast_floor);
}

// Default reconstruction window: bounding box of D expanded to 1.5x its
// extent per dimension ("padded by 50%").
inline Window auto_window(const BoundaryCurve& curve) {
    const BoundingBox b = curve.bbox();
    const double px = 0.25 * (b.xmax - b.xmin);
    const double py = 0.25 * (b.ymax - b.ymin);
    return {b.xmin - px, b.xmax + px, b.ymin - py, b.ymax + py};
}

inline Window effective_window(const RunConfig& cfg) {
    if (!cfg.window_auto) return cfg.window;
    return auto_window(build_curve(cfg.curve, cfg.vertices, cfg.radius, cfg.offset));
}

// delta list actually run: the clean matrix first, then the requested levels
// in config order (duplicates and extra zeros dropped)
inline std::vector<double> effective_deltas(const RunConfig& cfg) {
    std::vector<double> out{0.0};
    for (double d : cfg.deltas) {
        bool seen = false;
        for (double e : out)
            if (e == d) { seen = true; break; }
        if (!seen) out.push_back(d);
    }
    return out;
}

inline RunConfig preset_config(const std::string& name) {
    RunConfig cfg;
    cfg.preset = name;
    cfg.k = 5.0;
    cfg.m = 64;
    cfg.cells_per_wavelength = 12.0;
    cfg.deltas = {0.05, 0.10};
    cfg.seed = 1;
    cfg.nx = cfg.ny = 64;
    if (name == "example1") {
        cfg.curve = CurveKind::rounded_triangle;
        cfg.split_axis = SplitAxis::x2;
        cfg.split_sign = +1;
        cfg.n1 = {2.0, 2.0};
        cfg.n2 = {0.5, 2.0};
    } else if (name == "example2") {
        cfg.curve = CurveKind::rounded_square;
        cfg.split_axis = SplitAxis::x1;
        cfg.split_sign = -1;
        cfg.n1 = {2.0, 2.0};
        cfg.n2 = {0.5, 2.0};
    } else if (name == "example3") {
        cfg.curve = CurveKind::kite;
        cfg.split_axis = SplitAxis::x2;
        cfg.split_sign = +1;
        cfg.n1 = {0.5, 2.0};
        cfg.n2 = {2.0, 2.0};
    } else {
        throw ConfigError("unknown preset '" + name +
                          "' (available: example1, example2, example3)");
    }
    return cfg;
}

namespace detail {

struct ConfigParser {
    std::vector<std::string> errors;

    double num(const std::string& key, const std::string& val) {
        char* end = nullptr;
        const double v = std::strtod(val.c_str(), &end);
        if (end == nullptr || *end != '\0' || !std::isfinite(v)) {
            errors.push_back(key + ": not a number: '" + val + "'");
            return 0.0;
        }
        return v;
    }

    long integer(const std::string& key, const std::string& val) {
        char* end = nullptr;
        const long v = std::strtol(val.c_str(), &end, 10);
        if (end == nullptr || *end != '\0') {
            errors.push_back(key + ": not an integer: '" + val + "'");
            return 0;
        }
        return v;
    }

    std::uint64_t uinteger(const std::string& key, const std::string& val) {
        char* end = nullptr;
        const unsigned long long v = std::strtoull(val.c_str(), &end, 10);
        if (end == nullptr || *end != '\0') {
            errors.push_back(key + ": not an unsigned integer: '" + val + "'");
            return 0;
        }
        return v;
    }

    std::vector<double> numbers(const std::string& key, const std::string& val) {
        std::vector<double> out;
        std::stringstream ss(val);
        std::string item;
        while (std::getline(ss, item, ',')) out.push_back(num(key, item));
        return out;
    }
};

} // namespace detail

inline void validate_config(const RunConfig& cfg, std::vector<std::string>& errors) {
    if (!(cfg.k > 0.0)) errors.push_back("k: must be positive");
    if (cfg.m < 8 || cfg.m % 2 != 0) errors.push_back("M: must be even and >= 8");
    if (cfg.vertices < 64) errors.push_back("vertices: must be >= 64");
    if (cfg.curve == CurveKind::disk && !(cfg.radius > 0.0))
        errors.push_back("radius: must be positive");
    if (cfg.h_explicit == 0.0 && !(cfg.cells_per_wavelength >= 8.0))
        errors.push_back("cells_per_wavelength: must be >= 8");
    if (cfg.h_explicit < 0.0) errors.push_back("h: must be positive when given");
    if (cfg.h_explicit > 0.0 && cfg.k > 0.0 &&
        (2.0 * pi / cfg.k) / cfg.h_explicit < 8.0)
        errors.push_back("h: fewer than 8 cells per wavelength");
    for (double d : cfg.deltas)
        if (!(d >= 0.0) || d >= 1.0) errors.push_back("delta: levels must lie in [0,1)");
    if (cfg.n1.imag() < 0.0 || cfg.n2.imag() < 0.0)
        errors.push_back("n1/n2: Im(n) must be nonnegative");
    if (!(cfg.contrast_floor >= 0.0)) errors.push_back("contrast_floor: must be >= 0");
    if (std::abs(cfg.n1.real() - 1.0) < cfg.contrast_floor ||
        std::abs(cfg.n2.real() - 1.0) < cfg.contrast_floor)
        errors.push_back("n1/n2: |Re(n)-1| below contrast_floor");
    if (cfg.nx < 16 || cfg.ny < 16) errors.push_back("resolution: must be at least 16x16");
    if (!(cfg.cutoff >= 0.0)) errors.push_back("cutoff: must be >= 0");
    if (!cfg.window_auto &&
        (!(cfg.window.x1 > cfg.window.x0) || !(cfg.window.y1 > cfg.window.y0)))
        errors.push_back("window: x0 < x1 and y0 < y1 required");
}

// Parses "key = value" lines ('#' comments, blank lines ignored). All
// problems are collected and reported together.
inline RunConfig parse_config(const std::string& text) {
    detail::ConfigParser p;
    std::map<std::string, std::string> kv;
    {
        std::istringstream in(text);
        std::string line;
        int line_no = 0;
        while (std::getline(in, line)) {
            ++line_no;
            const auto hash = line.find('#');
            if (hash != std::string::npos) line.erase(hash);
            const auto trim = [](std::string s) {
                const auto b = s.find_first_not_of(" \t\r");
                const auto e = s.find_last_not_of(" \t\r");
                return b == std::string::npos ? std::string{} : s.substr(b, e - b + 1);
            };
            line = trim(line);
            if (line.empty()) continue;
            const auto eq = line.find('=');
            if (eq == std::string::npos) {
                p.errors.push_back("line " + std::to_string(line_no) +
                                   ": expected key = value");
                continue;
            }
            kv[trim(line.substr(0, eq))] = trim(line.substr(eq + 1));
        }
    }

    RunConfig cfg;
    if (auto it = kv.find("preset"); it != kv.end()) {
        try {
            cfg = preset_config(it->second);
        } catch (const ConfigError& e) {
            p.errors.push_back(std::string("preset: ") + e.what());
        }
        kv.erase(it);
    } else {
        cfg.deltas = {};
    }

    for (const auto& [key, val] : kv) {
        if (key == "curve") {
            if (val == "kite") cfg.curve = CurveKind::kite;
            else if (val == "rounded_square") cfg.curve = CurveKind::rounded_square;
            else if (val == "rounded_triangle") cfg.curve = CurveKind::rounded_triangle;
            else if (val == "disk") cfg.curve = CurveKind::disk;
            else p.errors.push_back("curve: unknown curve '" + val +
                                    "' (kite, rounded_square, rounded_triangle, disk)");
        } else if (key == "radius") cfg.radius = p.num(key, val);
        else if (key == "vertices") cfg.vertices = static_cast<int>(p.integer(key, val));
        else if (key == "offset_x") cfg.offset.x = p.num(key, val);
        else if (key == "offset_y") cfg.offset.y = p.num(key, val);
        else if (key == "split_axis") {
            if (val == "x1") cfg.split_axis = SplitAxis::x1;
            else if (val == "x2") cfg.split_axis = SplitAxis::x2;
            else p.errors.push_back("split_axis: must be x1 or x2, got '" + val + "'");
        } else if (key == "d1_side") {
            if (val == "positive") cfg.split_sign = +1;
            else if (val == "negative") cfg.split_sign = -1;
            else p.errors.push_back("d1_side: must be positive or negative, got '" + val + "'");
        } else if (key == "n1_re") cfg.n1.real(p.num(key, val));
        else if (key == "n1_im") cfg.n1.imag(p.num(key, val));
        else if (key == "n2_re") cfg.n2.real(p.num(key, val));
        else if (key == "n2_im") cfg.n2.imag(p.num(key, val));
        else if (key == "contrast_floor") cfg.contrast_floor = p.num(key, val);
        else if (key == "k") cfg.k = p.num(key, val);
        else if (key == "M") cfg.m = static_cast<int>(p.integer(key, val));
        else if (key == "cells_per_wavelength") cfg.cells_per_wavelength = p.num(key, val);
        else if (key == "h") cfg.h_explicit = p.num(key, val);
        else if (key == "delta") cfg.deltas = p.numbers(key, val);
        else if (key == "seed") cfg.seed = p.uinteger(key, val);
        else if (key == "window") {
            if (val == "auto") cfg.window_auto = true;
            else {
                const auto v = p.numbers(key, val);
                if (v.size() != 4)
                    p.errors.push_back("window: expected auto or x0,x1,y0,y1");
                else {
                    cfg.window_auto = false;
                    cfg.window = {v[0], v[1], v[2], v[3]};
                }
            }
        } else if (key == "resolution") {
            const auto v = p.numbers(key, val);
            if (v.size() == 1) cfg.nx = cfg.ny = static_cast<int>(v[0]);
            else if (v.size() == 2) {
                cfg.nx = static_cast<int>(v[0]);
                cfg.ny = static_cast<int>(v[1]);
            } else p.errors.push_back("resolution: expected n or nx,ny");
        } else if (key == "cutoff") cfg.cutoff = p.num(key, val);
        else if (key == "out") cfg.out_dir = val;
        else p.errors.push_back("unknown key '" + key + "'");
    }

    validate_config(cfg, p.errors);
    if (!p.errors.empty()) {
        std::string msg = "config errors:";
        for (const auto& e : p.errors) msg += "\n  - " + e;
        throw ConfigError(msg);
    }
    return cfg;
}

// Canonical serialization: fixed key order, %.17g numbers. The FNV-1a hash of
// this text identifies the run in every artifact.
inline std::string canonical_text(const RunConfig& cfg) {
    char buf[1024];
    std::string deltas;
    for (size_t i = 0; i < cfg.deltas.size(); ++i) {
        char d[40];
        std::snprintf(d, sizeof(d), "%s%.17g", i ? "," : "", cfg.deltas[i]);
        deltas += d;
    }
    std::string win = "auto";
    if (!cfg.window_auto) {
        char w[200];
        std::snprintf(w, sizeof(w), "%.17g,%.17g,%.17g,%.17g", cfg.window.x0,
                      cfg.window.x1, cfg.window.y0, cfg.window.y1);
        win = w;
    }
    std::snprintf(buf, sizeof(buf),
                  "curve=%s\nradius=%.17g\nvertices=%d\noffset=%.17g,%.17g\n"
                  "split_axis=%s\nd1_side=%s\nn1=%.17g,%.17g\nn2=%.17g,%.17g\n"
                  "contrast_floor=%.17g\nk=%.17g\nM=%d\nh=%.17g\ndelta=%s\n"
                  "seed=%" PRIu64 "\nwindow=%s\nresolution=%d,%d\ncutoff=%.17g\n",
                  to_string(cfg.curve).c_str(), cfg.radius, cfg.vertices,
                  cfg.offset.x, cfg.offset.y,
                  cfg.split_axis == SplitAxis::x1 ? "x1" : "x2",
                  cfg.split_sign > 0 ? "positive" : "negative",
                  cfg.n1.real(), cfg.n1.imag(), cfg.n2.real(), cfg.n2.imag(),
                  cfg.contrast_floor, cfg.k, cfg.m, cfg.grid_h(), deltas.c_str(),
                  cfg.seed, win.c_str(), cfg.nx, cfg.ny, cfg.cutoff);
    return buf;
}

inline std::string config_hash(const RunConfig& cfg) {
    char hex[32];
    std::snprintf(hex, sizeof(hex), "%016" PRIx64, detail::fnv1a(canonical_text(cfg)));
    return hex;
}

} // namespace farscope
