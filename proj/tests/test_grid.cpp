#include <cmath>
#include <filesystem>
#include <random>

#include "doctest.h"

#include "deltalap/errors.hpp"
#include "deltalap/grid.hpp"
#include "deltalap/io.hpp"

using namespace deltalap;

namespace {

Field random_field(const GridSpec& g, std::uint64_t seed)
{
    std::mt19937_64 rng(seed);
    std::normal_distribution<double> n;
    std::vector<cplx> v(g.size());
    for (auto& z : v)
        z = {n(rng), n(rng)};
    return Field::from_values(g, std::move(v));
}

double r2(const std::array<double, 3>& x) { return x[0] * x[0] + x[1] * x[1] + x[2] * x[2]; }

double max_diff(const std::vector<cplx>& a, const std::vector<cplx>& b)
{
    double m = 0;
    for (std::size_t i = 0; i < a.size(); ++i)
        m = std::max(m, std::abs(a[i] - b[i]));
    return m;
}

double max_abs(const std::vector<cplx>& a)
{
    double m = 0;
    for (auto z : a)
        m = std::max(m, std::abs(z));
    return m;
}

// trigonometric interpolant of a three dimensional field at x
cplx interpolate(const Field& f, const std::array<double, 3>& x)
{
    const GridSpec& g = f.grid();
    const int n = g.n;
    std::vector<cplx> ph[3];
    for (int a = 0; a < 3; ++a) {
        ph[a].resize(n);
        for (int q = 0; q < n; ++q)
            ph[a][q] = std::exp(cplx(0, g.dxi() * signed_index(q, n) * x[a]));
    }
    const auto& c = f.coefficients();
    cplx s = 0;
    std::size_t idx = 0;
    for (int a = 0; a < n; ++a)
        for (int b = 0; b < n; ++b) {
            cplx row = 0;
            for (int k = 0; k < n; ++k)
                row += c[idx++] * ph[2][k];
            s += row * ph[0][a] * ph[1][b];
        }
    return s * std::pow(2 * pi, -1.5) * std::pow(g.dxi(), 3);
}

// value at the lattice point closest to x
cplx value_at(const Field& f, std::array<double, 3> x)
{
    const GridSpec& g = f.grid();
    std::size_t idx = 0;
    for (int a = 0; a < g.d; ++a) {
        long j = std::lround((x[a] + g.L / 2) / g.h());
        idx = idx * g.n + static_cast<std::size_t>(j);
    }
    return f.values()[idx];
}

}  // namespace

TEST_CASE("grid spec validation")
{
    CHECK_NOTHROW((GridSpec{3, 8, 1.0}.validate()));
    CHECK_THROWS_AS((GridSpec{3, 4, 1.0}.validate()), DomainError);
    CHECK_THROWS_AS((GridSpec{2, 48, 1.0}.validate()), DomainError);
    CHECK_THROWS_AS((GridSpec{2, 64, -1.0}.validate()), DomainError);
    CHECK_THROWS_AS((GridSpec{4, 16, 1.0}.validate()), DomainError);
    CHECK(GridSpec{3, 16, 8.0}.size() == 4096);
}

TEST_CASE("transform round trip and Parseval")
{
    for (GridSpec g : {GridSpec{2, 64, 13.0}, GridSpec{3, 16, 5.0}}) {
        Field f = random_field(g, 3);
        Field back = Field::from_coefficients(g, f.coefficients());
        CHECK(max_diff(back.values(), f.values()) <= 1e-12 * max_abs(f.values()));
        double phys = 0, four = 0;
        for (auto z : f.values())
            phys += std::norm(z);
        for (auto z : f.coefficients())
            four += std::norm(z);
        phys *= std::pow(g.h(), g.d);
        four *= std::pow(g.dxi(), g.d);
        CHECK(std::fabs(phys - four) <= 1e-12 * phys);
    }
}

TEST_CASE("lp_norm")
{
    GridSpec g{2, 256, 40.0};
    Field gauss = Field::sample(g, [](const auto& x) { return std::exp(-r2(x) / 2); });
    CHECK(std::fabs(lp_norm(gauss, 2) - std::sqrt(pi)) < 1e-4);
    CHECK(lp_norm(gauss, INFINITY) == doctest::Approx(1.0).epsilon(1e-14));
    Field zero = Field::zeros(g);
    for (double p : {1.0, 1.7, 2.0, 5.0, double(INFINITY)})
        CHECK(lp_norm(zero, p) == 0.0);
    Field f = random_field(GridSpec{3, 8, 2.0}, 11);
    cplx lam(-1.3, 0.4);
    for (double p : {1.0, 2.5, double(INFINITY)})
        CHECK(lp_norm(lam * f, p) == doctest::Approx(std::abs(lam) * lp_norm(f, p)).epsilon(1e-13));
    CHECK_THROWS_AS(lp_norm(f, 0.5), DomainError);
}

TEST_CASE("lp_norm converges on a smooth compactly supported function")
{
    auto bump = [](const std::array<double, 3>& x) -> cplx {
        double t = r2(x) / 4;
        return t < 1 ? std::exp(-1 / (1 - t)) : 0.0;
    };
    const double p = 3.0;
    double ref = lp_norm(Field::sample(GridSpec{2, 512, 6.0}, bump), p);
    double e16 = std::fabs(lp_norm(Field::sample(GridSpec{2, 16, 6.0}, bump), p) - ref);
    double e32 = std::fabs(lp_norm(Field::sample(GridSpec{2, 32, 6.0}, bump), p) - ref);
    CHECK((e32 <= e16 / 4 || e32 < 1e-13));
}

TEST_CASE("apply_multiplier")
{
    GridSpec g{3, 16, 6.0};
    Field f = random_field(g, 5);
    Field id = apply_multiplier(f, [](const auto&) { return cplx(1.0); });
    CHECK(max_diff(id.values(), f.values()) <= 1e-12 * max_abs(f.values()));

    const double dxi = g.dxi();
    std::array<double, 3> xi0{dxi, -2 * dxi, 3 * dxi};
    Field wave = Field::sample(g, [&](const auto& x) {
        return std::exp(cplx(0, xi0[0] * x[0] + xi0[1] * x[1] + xi0[2] * x[2]));
    });
    Field lap = apply_multiplier(wave, [](const auto& xi) { return cplx(r2(xi)); });
    CHECK(max_diff(lap.values(), wave.scaled(r2(xi0)).values()) < 1e-11);
    CHECK(std::abs(point_eval_zero(wave) - 1.0) < 1e-12);

    auto m1 = [](const auto& xi) { return cplx(1.0 + xi[0] * xi[0], xi[1]); };
    auto m2 = [](const auto& xi) { return cplx(0.5, 0.0) / (2.0 + r2(xi)); };
    Field two = apply_multiplier(apply_multiplier(f, m1), m2);
    Field one = apply_multiplier(f, [&](const auto& xi) { return m1(xi) * m2(xi); });
    CHECK(max_diff(two.values(), one.values()) <= 1e-12 * max_abs(one.values()));

    CHECK_THROWS_AS((apply_multiplier(f, [](const auto& xi) { return cplx(1.0 / r2(xi)); })), DomainError);
}

TEST_CASE("sample_green")
{
    GridSpec g{3, 64, 16.0};
    Field a = sample_green(g, 1.0), b = sample_green(g, 1.0);
    CHECK(a.values() == b.values());
    auto sh = shells_for(g);
    std::vector<cplx> c = a.coefficients();
    double worst = 0;
    for (std::size_t i = 0; i < c.size(); ++i)
        worst = std::max(worst, std::abs((1.0 + sh->lambda[sh->id[i]]) * c[i] - std::pow(2 * pi, -1.5)));
    CHECK(worst < 1e-15);

    std::string warn;
    sample_green(g, 0.01, &warn);
    CHECK_FALSE(warn.empty());
    sample_green(g, 1.0, &warn);
    CHECK(warn.empty());
    CHECK_THROWS_AS(sample_green(g, -1.0), BranchError);
}

TEST_CASE("interpolation reproduces lattice values")
{
    GridSpec g{3, 32, 16.0};
    Field G = sample_green(g, 1.0);
    CHECK(std::abs(interpolate(G, {1, 0, 0}) - value_at(G, {1, 0, 0})) < 1e-12);
    Field gauss = Field::sample(GridSpec{3, 64, 16.0}, [](const auto& x) { return std::exp(-r2(x)); });
    CHECK(std::abs(interpolate(gauss, {0.3, -0.1, 0.77}) - std::exp(-0.6929)) < 1e-12);
}

TEST_CASE("continuum: sample_green at |x| = 1 on the L = 40, n = 256 grid")
{
    GridSpec g{3, 256, 40.0};
    double err = std::fabs(interpolate(sample_green(g, 1.0), {1, 0, 0}).real() - 1 / (4 * pi * std::exp(1.0)));
    CAPTURE(err);
    CHECK(err < 1e-3);
}

TEST_CASE("continuum: sample_green refinement order")
{
    double err[3];
    int i = 0;
    for (int n : {32, 64, 128}) {
        GridSpec g{3, n, 16.0};
        err[i++] = std::fabs(value_at(sample_green(g, 1.0), {1, 0, 0}).real() - green(3, 1.0, 1.0).real());
    }
    double order1 = std::log2(err[0] / err[1]), order2 = std::log2(err[1] / err[2]);
    CAPTURE(order1);
    CAPTURE(order2);
    // the error must at least go down
    CHECK(err[2] < err[1]);
    CHECK(err[1] < err[0]);
    CHECK(order2 >= 1.5);
}

TEST_CASE("point_eval_zero")
{
    GridSpec g{3, 128, 40.0};
    Field gauss = Field::sample(g, [](const auto& x) { return std::exp(-r2(x)); });
    CHECK(std::abs(point_eval_zero(gauss) - 1.0) < 1e-6);

    GridSpec g2{2, 256, 40.0};
    cplx diff = point_eval_zero(sample_green(g2, 1.0) - sample_green(g2, 4.0));
    cplx expect = -c_of_omega(2, 1.0) + c_of_omega(2, 4.0);
    CHECK(std::abs(diff - expect) < 1e-3);
}

TEST_CASE("shells")
{
    GridSpec g{3, 16, 6.0};
    auto sh = shells_for(g);
    double total = 0;
    for (double c : sh->count)
        total += c;
    CHECK(total == double(g.size()));
    Field f = random_field(g, 2);
    auto sums = shell_sums(*sh, f.coefficients());
    cplx all = 0;
    for (auto s : sums)
        all += s;
    cplx direct = 0;
    for (auto c : f.coefficients())
        direct += c;
    CHECK(std::abs(all - direct) < 1e-10);
    CHECK(shells_for(g).get() == sh.get());
}

TEST_CASE("smooth_taper")
{
    CHECK(smooth_taper(-1) == 1.0);
    CHECK(smooth_taper(0.5) == doctest::Approx(0.5));
    CHECK(smooth_taper(1.0) == 0.0);
    double prev = 1.0;
    for (int i = 1; i < 100; ++i) {
        double v = smooth_taper(i / 100.0);
        CHECK(v <= prev);
        prev = v;
    }
}

TEST_CASE("field checkpoint round trip")
{
    auto dir = std::filesystem::temp_directory_path() / "deltalap_test_field";
    std::filesystem::create_directories(dir);
    GridSpec g{2, 16, 3.0};
    Field f = random_field(g, 9);
    std::string prefix = (dir / "u").string();
    write_field(prefix, f);
    auto side = read_file(prefix + ".json");
    CHECK(side.find("\"row-major\"") != std::string::npos);
    CHECK(read_file(prefix + ".bin").size() == g.size() * 8);
    Field back = read_field(prefix);
    CHECK(back.grid() == g);
    CHECK(max_diff(back.values(), f.values()) < 1e-6 * max_abs(f.values()));
    std::filesystem::remove_all(dir);
}
