#include <cmath>

#include "doctest.h"

#include "deltalap/dynamics.hpp"
#include "deltalap/errors.hpp"

using namespace deltalap;

namespace {

double r2(const std::array<double, 3>& x) { return x[0] * x[0] + x[1] * x[1] + x[2] * x[2]; }

Field bump(const GridSpec& g, double sigma, double x0, double k0 = 0.0)
{
    return Field::sample(g, [=](const auto& x) {
        auto y = x;
        y[0] -= x0;
        return std::exp(-r2(y) / (2 * sigma * sigma)) * std::exp(cplx(0, k0 * x[1]));
    });
}

double rel_l2(const Field& a, const Field& b) { return l2_norm(a - b) / l2_norm(b); }

Field final_state(const PointInteraction& op, const Field& u0, double T, double tau)
{
    RecordOptions rec;
    rec.every = 1 << 30;
    rec.keep_states = true;
    return propagate_linear(op, u0, T, tau, rec).states.back();
}

const GridSpec plane{2, 32, 16.0};
const GridSpec cube{3, 16, 8.0};

}  // namespace

TEST_CASE("Crank-Nicolson is second order")
{
    PointInteraction op(2, 0.0, plane);
    Field u0 = bump(plane, 1.0, 0.7);
    Field a = final_state(op, u0, 0.4, 0.01), b = final_state(op, u0, 0.4, 0.005), c = final_state(op, u0, 0.4, 0.0025);
    double ratio = l2_norm(a - b) / l2_norm(b - c);
    CAPTURE(ratio);
    CHECK(ratio > 3.5);
    CHECK(ratio < 4.5);
}

TEST_CASE("linear propagation")
{
    PointInteraction op(2, 0.0, plane);
    REQUIRE(op.has_eigenvalue());
    Field f = bump(plane, 1.0, 0.5), g = bump(plane, 0.7, -1.0, 1.0);
    cplx a(0.3, 1.2), b(-2.0, 0.1);
    Field lhs = final_state(op, f.combine(a, g, b), 0.3, 0.01);
    Field rhs = final_state(op, f, 0.3, 0.01).combine(a, final_state(op, g, 0.3, 0.01), b);
    CHECK(rel_l2(lhs, rhs) < 1e-12);

    // the bound state only rotates
    const double E = op.eigenvalue(), T = 0.37;
    auto tr = propagate_linear(op, op.psi(), T, 0.01, {1 << 30, true});
    CHECK(rel_l2(tr.states.back(), op.psi().scaled(std::exp(cplx(0, tr.times.back() * E)))) < 1e-10);

    RecordOptions rec;
    rec.every = 5;
    rec.energy = true;
    rec.energy_mu = 0.0;
    auto tr2 = propagate_linear(op, f, 1.0, 0.01, rec);
    CHECK(tr2.times.back() == doctest::Approx(1.0));
    CHECK(tr2.max_mass_drift() < 1e-12);
    CHECK(tr2.max_step_mass_change < 1e-13);
    for (double e : tr2.energy)
        CHECK(std::fabs(e - tr2.energy.front()) <= 1e-8 * std::fabs(tr2.energy.front()));

    CHECK_THROWS_AS(propagate_linear(op, f, 0.001, 0.01), DomainError);
}

TEST_CASE("free limit of the propagator")
{
    PointInteraction hard(2, 1e12, plane);
    Field u0 = bump(plane, 1.0, 0.4);
    const double tau = 0.02;
    const int N = 20;
    Field u = final_state(hard, u0, N * tau, tau);
    Field cayley = apply_radial(u0, [&](double xi2) {
        return std::pow((1.0 - cplx(0, 0.5 * tau * xi2)) / (1.0 + cplx(0, 0.5 * tau * xi2)), N);
    });
    CHECK(rel_l2(u, cayley) < 1e-8);
}

TEST_CASE("dispersive decay fit guards")
{
    PointInteraction op(2, 0.0, plane);
    Field u0 = bump(plane, 1.0, 0.0);
    CHECK_THROWS_AS((dispersive_decay_fit(op, u0, 4.0, {0.1, 0.2, 0.5}, 0.01)), InsufficientWindowError);
    CHECK_THROWS_AS((dispersive_decay_fit(op, u0, 4.0, {0.1, 1.5}, 0.01)), InsufficientWindowError);
    CHECK_THROWS_AS((dispersive_decay_fit(op, u0, 1.5, {0.1, 0.5, 1.5}, 0.01)), DomainError);
    PointInteraction op3(3, -1.0, cube);
    CHECK_THROWS_AS((dispersive_decay_fit(op3, bump(cube, 1.0, 0.0), 3.0, {0.1, 0.5, 1.5}, 0.01)), DomainError);

    // (L/4)/(2 xi) with xi the 1e-6 mass radius
    double xi = data_frequency_radius(u0);
    CHECK(xi > 3.0);
    CHECK(xi < 6.0);
    CHECK(reflection_time(u0) == doctest::Approx(plane.L / 8 / xi));
    CHECK(std::isinf(reflection_time(Field::zeros(plane))));
}

TEST_CASE("Strichartz admissibility")
{
    CHECK_NOTHROW(check_strichartz_pair(2, 4, 4));
    CHECK_NOTHROW(check_strichartz_pair(2, 6, 3));
    CHECK_NOTHROW(check_strichartz_pair(2, INFINITY, 2));
    CHECK_NOTHROW(check_strichartz_pair(3, 8, 12.0 / 5));
    CHECK_NOTHROW(check_strichartz_pair(3, 12, 2.25));
    CHECK_THROWS_AS(check_strichartz_pair(2, 4, 3), DomainError);
    CHECK_THROWS_AS(check_strichartz_pair(2, 2, INFINITY), DomainError);
    CHECK_THROWS_AS(check_strichartz_pair(3, 4, 3), DomainError);
    CHECK_THROWS_AS(check_strichartz_pair(3, 5, 2.5), DomainError);
}

TEST_CASE("Strichartz ratio is scale invariant")
{
    PointInteraction op(2, 0.0, plane);
    Field u0 = bump(plane, 1.0, 0.5);
    double a = strichartz_ratio(op, u0, 4, 4, 0.5, 0.01);
    double b = strichartz_ratio(op, u0.scaled(cplx(0, 7.5)), 4, 4, 0.5, 0.01);
    CHECK(a > 0);
    CHECK(b == doctest::Approx(a).epsilon(1e-12));
    auto many = strichartz_ratios(op, u0, {{4, 4}, {6, 3}}, {0.25, 0.5}, 0.01);
    REQUIRE(many.size() == 2);
    CHECK(many[0][1] == doctest::Approx(a).epsilon(1e-12));
    CHECK(many[0][0] <= many[0][1]);
}

TEST_CASE("nonlinear Strang flow")
{
    PointInteraction op(3, -1.0, cube);
    NlsProblem prob{&op, 1.5, 1.0, bump(cube, 1.0, 0.3), 0.2, 0.01};
    auto tr = nls_strang(prob);
    CHECK(tr.max_step_mass_change < 1e-12);
    CHECK(tr.max_mass_drift() < 1e-11);

    NlsProblem zero = prob;
    zero.u0 = Field::zeros(cube);
    CHECK(l2_norm(nls_strang_step(zero, zero.u0)) == 0.0);
    CHECK(l2_norm(nonlinearity(zero.u0, 1.5)) == 0.0);

    Field u = bump(cube, 1.0, 0.0);
    Field n = nonlinearity(u.scaled(2.0), 1.5);
    CHECK(rel_l2(n, nonlinearity(u, 1.5).scaled(std::pow(2.0, 1.5))) < 1e-13);

    NlsProblem bad = prob;
    bad.mu = 0.5;
    CHECK_THROWS_AS(bad.validate(), DomainError);
    bad = prob;
    bad.p_nl = 1.0;
    CHECK_THROWS_AS(bad.validate(), DomainError);
}

TEST_CASE("Duhamel iteration")
{
    PointInteraction op(3, -1.0, cube);
    NlsProblem lin{&op, 1.5, 0.0, bump(cube, 1.0, 0.3), 0.1, 0.01};
    auto res = duhamel_solve(lin, 1e-10, 5);
    CHECK(res.converged);
    CHECK(res.iterations == 1);
    CHECK(res.report.empty());

    NlsProblem nl = lin;
    nl.mu = 1.0;
    nl.u0 = nl.u0.scaled(0.3);
    auto r2 = duhamel_solve(nl, 1e-9, 40);
    CHECK(r2.converged);
    REQUIRE(r2.ratios.size() >= 2);
    CHECK(r2.ratios.front() < 0.5);
    // the fixed point agrees with the split step flow to time step accuracy
    auto st = nls_strang(nl, {1 << 30, true});
    CHECK(rel_l2(r2.trace.states.back(), st.states.back()) < 1e-3);

    auto short_run = duhamel_solve(nl, 1e-14, 1);
    CHECK_FALSE(short_run.converged);
    CHECK(short_run.report.find("no contraction") != std::string::npos);
}

TEST_CASE("energy of the bound state")
{
    PointInteraction op(3, -1.0, cube);
    auto [m, e] = mass_energy(op, op.psi(), 3.0, 0.0);
    CHECK(m == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(e == doctest::Approx(-op.eigenvalue() / 2).epsilon(1e-6));
    auto [m0, e0] = mass_energy(op, Field::zeros(cube), 3.0, 1.0);
    CHECK(m0 == 0.0);
    CHECK(e0 == 0.0);
}

TEST_CASE("nonlinear estimate windows")
{
    CHECK_NOTHROW(check_nonlinear_window(0.2, 1.2, 1.7, 2.0));
    CHECK_NOTHROW(check_nonlinear_window(0.3, 1.5, 1.6, 2.0));
    CHECK_NOTHROW(check_nonlinear_window(0.6, 1.2, 1.6, 2.0));
    CHECK_THROWS_AS(check_nonlinear_window(0.3, 1.5, 2.0, 2.0), DomainError);
    CHECK_THROWS_AS(check_nonlinear_window(0.6, 1.5, 1.7, 2.0), DomainError);
    CHECK_THROWS_AS(check_nonlinear_window(1.0, 1.2, 1.7, 2.0), DomainError);
    CHECK_THROWS_AS(check_nonlinear_window(0.2, 1.2, 1.4, 2.0), DomainError);
    CHECK_THROWS_AS(check_nonlinear_window(0.2, 1.2, 1.7, 3.0), DomainError);
    try {
        check_nonlinear_window(0.5, 1.6, 1.7, 2.0);
        FAIL("accepted p + s = 2.1");
    } catch (const DomainError& e) {
        CHECK(std::string(e.what()).find("p + s < 2") != std::string::npos);
    }
}

TEST_CASE("nonlinear estimate ratio is scale invariant")
{
    PointInteraction op(3, -1.0, cube);
    Field phi = bump(cube, 1.0, 0.4);
    double a = nonlinear_estimate_ratio(op, phi, 0.2, 1.2, 1.7, 2.0);
    double b = nonlinear_estimate_ratio(op, phi.scaled(cplx(3.0, -1.0)), 0.2, 1.2, 1.7, 2.0);
    CHECK(a > 0);
    CHECK(b == doctest::Approx(a).epsilon(1e-10));
    CHECK(nonlinear_estimate_ratio(op, Field::zeros(cube), 0.2, 1.2, 1.7, 2.0) == 0.0);
    PointInteraction op2(2, 0.0, plane);
    CHECK_THROWS_AS(nonlinear_estimate_ratio(op2, bump(plane, 1.0, 0.0), 0.2, 1.2, 1.7, 2.0), DomainError);
}
