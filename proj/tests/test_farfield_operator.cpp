#include <catch_amalgamated.hpp>

#include <cstring>
#include <filesystem>
#include <fstream>
#include <random>

#include "farscope/farfield_operator.hpp"
#include "test_oracles.hpp"

using namespace farscope;

namespace {

RefractiveScene disk_scene(cplx n, double k, double floor = 0.0) {
    return make_scene(build_curve(CurveKind::disk, 512, 1.0),
                      HalfPlaneSplit{SplitAxis::x2, +1}, n, n, k, floor);
}

RefractiveScene example2_scene() {
    return make_scene(build_curve(CurveKind::rounded_square, 512),
                      HalfPlaneSplit{SplitAxis::x1, -1}, cplx(2.0, 2.0),
                      cplx(0.5, 2.0), 5.0, 0.01);
}

FarFieldMatrix random_matrix(int m, std::uint64_t seed) {
    FarFieldMatrix f;
    f.m = m;
    f.k = 5.0;
    f.provenance = "loaded:test";
    f.entries.resize(m, m);
    Xoshiro256pp rng(seed);
    for (int r = 0; r < m; ++r)
        for (int s = 0; s < m; ++s)
            f.entries(r, s) = cplx(rng.uniform_pm1(), rng.uniform_pm1());
    return f;
}

bool bitwise_equal(const CMatrix& a, const CMatrix& b) {
    if (a.rows() != b.rows() || a.cols() != b.cols()) return false;
    return std::memcmp(a.data(), b.data(),
                       sizeof(cplx) * static_cast<size_t>(a.size())) == 0;
}

} // namespace

TEST_CASE("assemble_F: zero contrast gives the zero matrix") {
    const auto scene = disk_scene({1.0, 0.0}, 2.0);
    const auto grid = discretize(scene, 0.2);
    const auto f = assemble_F(scene, grid, 8);
    CHECK(f.entries.cwiseAbs().maxCoeff() == 0.0);
}

TEST_CASE("assemble_F preconditions") {
    const auto scene = disk_scene({2.0, 2.0}, 2.0);
    const auto grid = discretize(scene, 0.2);
    CHECK_THROWS_AS(assemble_F(scene, grid, 7), std::invalid_argument);
    CHECK_THROWS_AS(assemble_F(scene, grid, 4), std::invalid_argument);
}

TEST_CASE("disk matrix is circulant up to grid anisotropy") {
    const double k = 5.0;
    const auto scene = disk_scene({2.0, 2.0}, k);
    const auto grid = discretize(scene, (2.0 * pi / k) / 12.0);
    const int m = 32;
    const auto f = assemble_F(scene, grid, m);
    const double fmax = f.entries.cwiseAbs().maxCoeff();

    // quarter-turn shifts are exact lattice symmetries (origin-anchored grid)
    for (int r = 0; r < m; ++r)
        for (int s = 0; s < m; ++s)
            CHECK(std::abs(f.entries(r, s) -
                           f.entries((r + m / 4) % m, (s + m / 4) % m)) < 1e-10 * fmax);

    // within-diagonal spread is bounded by the staircase anisotropy
    double worst = 0.0;
    for (int diag = 0; diag < m; ++diag) {
        cplx mean = 0.0;
        for (int s = 0; s < m; ++s) mean += f.entries((s + diag) % m, s);
        mean /= static_cast<double>(m);
        double var = 0.0;
        for (int s = 0; s < m; ++s) var += std::norm(f.entries((s + diag) % m, s) - mean);
        worst = std::max(worst, std::sqrt(var / m));
    }
    CHECK(worst < 5e-2 * fmax); // measured ~1.4e-2 at this resolution
}

TEST_CASE("assemble_F is deterministic (paper-scale parameters)") {
    const auto scene = example2_scene();
    const auto grid = discretize(scene, (2.0 * pi / 5.0) / 12.0);
    const auto f1 = assemble_F(scene, grid, 64);
    const auto f2 = assemble_F(scene, grid, 64);
    CHECK(bitwise_equal(f1.entries, f2.entries));
    CHECK(f1.provenance == f2.provenance);
}

TEST_CASE("reciprocity defect of synthetic data is at roundoff") {
    const auto scene = example2_scene();
    const auto grid = discretize(scene, (2.0 * pi / 5.0) / 10.0);
    const auto f = assemble_F(scene, grid, 16);
    CHECK(reciprocity_defect(f) < 1e-10);
}

TEST_CASE("reciprocity defect of a random matrix is order one") {
    const auto f = random_matrix(16, 99);
    CHECK(reciprocity_defect(f) > 1e-2);
}

TEST_CASE("reciprocity symmetrization is an exact fixed point") {
    const auto g = random_matrix(16, 5);
    FarFieldMatrix s = g;
    const int m = g.m;
    for (int r = 0; r < m; ++r)
        for (int c = 0; c < m; ++c)
            s.entries(r, c) = g.entries(r, c) + g.entries((c + m / 2) % m, (r + m / 2) % m);
    CHECK(reciprocity_defect(s) == 0.0);
}

TEST_CASE("add_noise: delta zero is the identity") {
    const auto f = random_matrix(16, 1);
    const auto fd = add_noise(f, {0.0, 1234});
    CHECK(bitwise_equal(f.entries, fd.entries));
}

TEST_CASE("add_noise: exact relative spectral-norm perturbation") {
    const auto scene = example2_scene();
    const auto grid = discretize(scene, (2.0 * pi / 5.0) / 10.0);
    const auto f = assemble_F(scene, grid, 16);
    const double fnorm = spectral_norm(f.entries);
    for (double delta : {0.05, 0.10, 0.3}) {
        const auto fd = add_noise(f, {delta, 77});
        const double got = spectral_norm(fd.entries - f.entries) / fnorm;
        CHECK(std::abs(got - delta) < 1e-12);
    }
}

TEST_CASE("add_noise: seeding contract") {
    const auto f = random_matrix(16, 2);
    const auto a = add_noise(f, {0.05, 42});
    const auto b = add_noise(f, {0.05, 42});
    const auto c = add_noise(f, {0.05, 43});
    CHECK(bitwise_equal(a.entries, b.entries));
    CHECK_FALSE(bitwise_equal(a.entries, c.entries));
}

TEST_CASE("add_noise error paths") {
    const auto f = random_matrix(16, 3);
    CHECK_THROWS_AS(add_noise(f, {1.0, 1}), std::invalid_argument);
    CHECK_THROWS_AS(add_noise(f, {-0.1, 1}), std::invalid_argument);
    FarFieldMatrix zero = f;
    zero.entries.setZero();
    CHECK_THROWS_AS(add_noise(zero, {0.05, 1}), std::invalid_argument);
}

TEST_CASE("noise generator uniform range and reproducibility") {
    Xoshiro256pp rng(42);
    Xoshiro256pp rng2(42);
    for (int i = 0; i < 1000; ++i) {
        const double v = rng.uniform_pm1();
        CHECK(v == rng2.uniform_pm1());
        CHECK(v >= -1.0);
        CHECK(v <= 1.0);
    }
}

TEST_CASE("FFMAT round trip is bitwise lossless") {
    namespace fs = std::filesystem;
    const auto f = random_matrix(16, 11);
    const std::string path = (fs::temp_directory_path() / "roundtrip.ffmat").string();
    save_F(f, path);
    const auto g = load_F(path);
    CHECK(g.m == f.m);
    CHECK(g.k == f.k);
    CHECK(g.convention == f.convention);
    CHECK(g.provenance == f.provenance);
    CHECK(bitwise_equal(f.entries, g.entries));
    fs::remove(path);
}

TEST_CASE("FFMAT loader reports malformed input with line numbers") {
    namespace fs = std::filesystem;
    const auto f = random_matrix(8, 12);
    const std::string path = (fs::temp_directory_path() / "broken.ffmat").string();

    SECTION("truncated file names the missing row") {
        save_F(f, path);
        std::ifstream in(path);
        std::string all, line;
        int keep = 6; // header + 4 rows
        while (keep-- > 0 && std::getline(in, line)) all += line + "\n";
        in.close();
        std::ofstream(path) << all;
        try {
            load_F(path);
            FAIL("expected FormatError");
        } catch (const FormatError& e) {
            CHECK(std::string(e.what()).find("row 4 missing") != std::string::npos);
        }
    }

    SECTION("odd M rejected") {
        std::ofstream(path) << "FFMAT v1\nM=9 k=5 convention=c provenance=p\n";
        CHECK_THROWS_AS(load_F(path), FormatError);
    }

    SECTION("bad magic rejected") {
        std::ofstream(path) << "FFMAT v2\n";
        CHECK_THROWS_AS(load_F(path), FormatError);
    }

    SECTION("non-finite entry rejected") {
        save_F(f, path);
        std::ifstream in(path);
        std::string all, line;
        int ln = 0;
        while (std::getline(in, line)) {
            ++ln;
            if (ln == 3) {
                const auto sp = line.find(' ');
                line = "inf" + line.substr(sp);
            }
            all += line + "\n";
        }
        in.close();
        std::ofstream(path) << all;
        try {
            load_F(path);
            FAIL("expected FormatError");
        } catch (const FormatError& e) {
            CHECK(std::string(e.what()).find("line 3") != std::string::npos);
        }
    }

    SECTION("short row names the column") {
        save_F(f, path);
        std::ifstream in(path);
        std::string all, line;
        int ln = 0;
        while (std::getline(in, line)) {
            ++ln;
            if (ln == 4) line = line.substr(0, line.size() / 2);
            all += line + "\n";
        }
        in.close();
        std::ofstream(path) << all;
        CHECK_THROWS_AS(load_F(path), FormatError);
    }

    fs::remove(path);
}
