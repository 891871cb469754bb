#include <doctest.h>

#include <cstdio>
#include <fstream>
#include <random>
#include <string>
#include <vector>

#include "tfgdd/errors.hpp"
#include "tfgdd/fct.hpp"
#include "tfgdd/grid_io.hpp"

using namespace tfgdd;

namespace {

struct TempFile {
    std::string path;
    explicit TempFile(const std::string& name) : path("/tmp/tfgdd_test_" + name) {}
    ~TempFile() { std::remove(path.c_str()); }
};

TFGDDGrid sample_grid(unsigned seed) {
    TFGDDGrid g;
    g.n_t = 12;
    g.n_eta = 7;
    g.n_gamma = 5;
    g.t_start = 0.25;
    g.dt = 1.0 / 256.0;
    g.eta_start = 0.0;
    g.d_eta = 2.0;
    g.gamma_start = -1.2e-3;
    g.d_gamma = 6e-4;
    g.window_power = 2;
    g.sigma = 17.5;
    g.values.resize(g.n_t * g.n_eta * g.n_gamma);
    std::mt19937 rng(seed);
    std::uniform_real_distribution<double> unit(-1.0, 1.0);
    for (auto& v : g.values) v = {unit(rng), unit(rng)};
    return g;
}

std::string slurp(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    REQUIRE(in.good());
    return std::string(std::istreambuf_iterator<char>(in),
                       std::istreambuf_iterator<char>());
}

} // namespace

TEST_CASE("complex grid round trip") {
    const TFGDDGrid g = sample_grid(7);
    TempFile f("grid_c128.tfgd");
    save_grid(g, f.path);

    GridKind kind = GridKind::field;
    const TFGDDGrid back = load_grid(f.path, &kind);
    CHECK(kind == GridKind::raw_fct);
    REQUIRE(back.axes_match(g));
    CHECK(back.window_power == g.window_power);
    REQUIRE(back.values.size() == g.values.size());
    for (std::size_t i = 0; i < g.values.size(); ++i)
        CHECK(back.values[i] == g.values[i]); // bit-exact at complex128

    // Deterministic bytes: saving the loaded grid reproduces the file.
    TempFile f2("grid_c128_again.tfgd");
    save_grid(back, f2.path);
    CHECK(slurp(f.path) == slurp(f2.path));
}

TEST_CASE("squeezed flag survives the round trip") {
    const TFGDDGrid g = sample_grid(8);
    TempFile f("grid_sq.tfgd");
    save_grid(g, f.path, GridKind::squeezed);
    GridKind kind = GridKind::raw_fct;
    (void)load_grid(f.path, &kind);
    CHECK(kind == GridKind::squeezed);
    CHECK(peek_grid(f.path).kind == GridKind::squeezed);
}

TEST_CASE("float32 payload is lossy but close") {
    const TFGDDGrid g = sample_grid(9);
    TempFile f("grid_c64.tfgd");
    save_grid(g, f.path, GridKind::raw_fct, true);
    CHECK(peek_grid(f.path).dtype == 0);
    const TFGDDGrid back = load_grid(f.path);
    REQUIRE(back.values.size() == g.values.size());
    double worst = 0.0;
    for (std::size_t i = 0; i < g.values.size(); ++i)
        worst = std::max(worst, std::abs(back.values[i] - g.values[i]));
    CHECK(worst < 1e-6);
    CHECK(worst > 0.0); // it is genuinely float32

    // float32 file is roughly half the size of the float64 one.
    TempFile f64("grid_c128_size.tfgd");
    save_grid(g, f64.path);
    CHECK(slurp(f.path).size() < slurp(f64.path).size());
}

TEST_CASE("header peek reports the axes") {
    const TFGDDGrid g = sample_grid(10);
    TempFile f("grid_peek.tfgd");
    save_grid(g, f.path);
    const GridFileInfo info = peek_grid(f.path);
    CHECK(info.n_t == g.n_t);
    CHECK(info.n_eta == g.n_eta);
    CHECK(info.n_gamma == g.n_gamma);
    CHECK(info.window_power == g.window_power);
    CHECK(info.sigma == g.sigma);
    CHECK(info.t_start == g.t_start);
    CHECK(info.dt == g.dt);
    CHECK(info.eta_start == g.eta_start);
    CHECK(info.d_eta == g.d_eta);
    CHECK(info.gamma_start == g.gamma_start);
    CHECK(info.d_gamma == g.d_gamma);
    CHECK(info.dtype == 1);
}

TEST_CASE("container rejects malformed input") {
    SUBCASE("missing file") {
        CHECK_THROWS_AS(load_grid("/tmp/tfgdd_test_no_such_file.tfgd"), IoError);
    }
    SUBCASE("bad magic") {
        TempFile f("grid_badmagic.tfgd");
        std::ofstream(f.path, std::ios::binary) << "WAVEnotagrid-----------";
        CHECK_THROWS_AS(load_grid(f.path), IoError);
    }
    SUBCASE("truncated payload") {
        const TFGDDGrid g = sample_grid(11);
        TempFile f("grid_trunc.tfgd");
        save_grid(g, f.path);
        const std::string bytes = slurp(f.path);
        std::ofstream(f.path, std::ios::binary | std::ios::trunc)
            << bytes.substr(0, bytes.size() - 9);
        CHECK_THROWS_AS(load_grid(f.path), IoError);
    }
    SUBCASE("wrong version") {
        const TFGDDGrid g = sample_grid(12);
        TempFile f("grid_version.tfgd");
        save_grid(g, f.path);
        std::string bytes = slurp(f.path);
        bytes[4] = 9; // version low byte
        std::ofstream(f.path, std::ios::binary | std::ios::trunc) << bytes;
        CHECK_THROWS_AS(load_grid(f.path), IoError);
    }
    SUBCASE("inconsistent grid refused on save") {
        TFGDDGrid g = sample_grid(13);
        g.values.pop_back();
        TempFile f("grid_inconsistent.tfgd");
        CHECK_THROWS_AS(save_grid(g, f.path), ConfigError);
    }
    SUBCASE("real-plane container refused by complex loader") {
        TempFile f("grid_planes_as_complex.tfgd");
        GridFileInfo info;
        info.kind = GridKind::field;
        info.n_t = 3;
        info.n_eta = 2;
        info.n_gamma = 1;
        std::vector<double> plane(6, 1.0);
        save_real_planes(info, {plane.data()}, nullptr, f.path);
        CHECK_THROWS_AS(load_grid(f.path), IoError);
    }
}

TEST_CASE("real planes with mask round trip") {
    GridFileInfo info;
    info.kind = GridKind::field;
    info.n_t = 6;
    info.n_eta = 4;
    info.n_gamma = 3;
    info.window_power = 0;
    info.sigma = 25.0;
    info.dt = 1.0 / 1024.0;
    info.d_eta = 2.0;
    info.gamma_start = -1e-3;
    info.d_gamma = 1e-3;
    const std::size_t cells = info.n_t * info.n_eta * info.n_gamma;

    std::mt19937 rng(55);
    std::uniform_real_distribution<double> unit(-1.0, 1.0);
    std::vector<double> t_hat(cells), r_hat(cells), det(cells);
    std::vector<std::uint8_t> mask(cells);
    for (std::size_t i = 0; i < cells; ++i) {
        t_hat[i] = unit(rng);
        r_hat[i] = unit(rng);
        det[i] = std::abs(unit(rng));
        mask[i] = (i % 3 == 0) ? 1 : 0;
    }

    TempFile f("field.tfgd");
    save_real_planes(info, {t_hat.data(), r_hat.data(), det.data()}, mask.data(),
                     f.path);
    const RealPlanesFile back = load_real_planes(f.path, 3, true);
    CHECK(back.info.kind == GridKind::field);
    CHECK(back.info.dtype == 2);
    CHECK(back.info.sigma == 25.0);
    REQUIRE(back.planes.size() == 3);
    CHECK(back.planes[0] == t_hat);
    CHECK(back.planes[1] == r_hat);
    CHECK(back.planes[2] == det);
    CHECK(back.mask == mask);

    // Short read if the mask (or a plane) is missing from the file.
    TempFile f2("field_nomask.tfgd");
    save_real_planes(info, {t_hat.data(), r_hat.data(), det.data()}, nullptr,
                     f2.path);
    CHECK_THROWS_AS(load_real_planes(f2.path, 3, true), IoError);
    CHECK(load_real_planes(f2.path, 3, false).planes[2] == det);
}
