#include "deltalap/specfun.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "deltalap/errors.hpp"

namespace deltalap {

namespace {

BesselResult bessel_k_hankel(double nu, cplx z, double tol)
{
    const double mu = 4.0 * nu * nu;
    cplx term = 1.0, sum = 1.0;
    double last = 1.0;
    for (int k = 1; k < 200; ++k) {
        term *= (mu - (2.0 * k - 1) * (2.0 * k - 1)) / (8.0 * k) / z;
        double a = std::abs(term);
        if (a > last && k > 2)
            break;  // asymptotic series started to diverge
        sum += term;
        last = a;
        if (a < 1e-17 * std::abs(sum))
            break;
    }
    BesselResult res;
    res.value = std::sqrt(pi / (2.0 * z)) * std::exp(-z) * sum;
    res.est_error = last / std::max(std::abs(sum), 1e-300);
    res.accurate = res.est_error <= tol;
    return res;
}

// K_nu(z) = int_0^inf exp(-z cosh t) cosh(nu t) dt, trapezoid with halving
BesselResult bessel_k_integral(double nu, cplx z, double tol)
{
    const double x = z.real();
    auto f = [&](double t) { return std::exp(-z * std::cosh(t)) * std::cosh(nu * t); };

    // integrand magnitude relative to exp(-x) drops below e^-46 past tmax
    double tmax = 0.5;
    while (tmax < 60.0) {
        double decay = x * (std::cosh(tmax) - 1.0) - nu * tmax;
        if (decay > 46.0 && x * std::sinh(tmax) > nu)
            break;
        tmax += 0.25;
    }

    double h = 0.5;
    cplx sum = 0.5 * f(0.0);
    for (int k = 1; k <= static_cast<int>(tmax / h); ++k)
        sum += f(k * h);
    cplx prev = h * sum;
    BesselResult res;
    res.accurate = false;
    for (int level = 0; level < 12; ++level) {
        double hh = 0.5 * h;
        int count = static_cast<int>(tmax / hh);
        for (int k = 1; k <= count; k += 2)
            sum += f(k * hh);
        cplx cur = hh * sum;
        double diff = std::abs(cur - prev) / std::max(std::abs(cur), 1e-300);
        h = hh;
        prev = cur;
        res.value = cur;
        res.est_error = diff;
        if (level >= 1 && diff <= tol) {
            res.accurate = true;
            break;
        }
    }
    if (tmax >= 60.0)
        res.accurate = false;
    return res;
}

}  // namespace

BesselResult bessel_k(double nu, cplx z, double tol)
{
    if (!std::isfinite(nu))
        throw DomainError("bessel_k: order must be finite");
    if (!std::isfinite(z.real()) || !std::isfinite(z.imag()))
        throw DomainError("bessel_k: argument must be finite");
    if (z.real() <= 0.0)
        throw DomainError("bessel_k: argument must satisfy Re z > 0, got " +
                          std::to_string(z.real()));
    nu = std::fabs(nu);
    if (std::abs(z) > 50.0)
        return bessel_k_hankel(nu, z, tol);
    return bessel_k_integral(nu, z, tol);
}

double bessel_k(double nu, double x)
{
    return bessel_k(nu, cplx(x, 0.0)).value.real();
}

void check_off_cut(cplx omega, const char* who)
{
    if (!std::isfinite(omega.real()) || !std::isfinite(omega.imag()))
        throw BranchError(std::string(who) + ": spectral parameter is not finite");
    if (omega.imag() == 0.0 && omega.real() <= 0.0)
        throw BranchError(std::string(who) + ": omega = " + std::to_string(omega.real()) +
                          " lies on the cut (-inf,0]");
}

cplx principal_sqrt(cplx omega)
{
    check_off_cut(omega, "principal_sqrt");
    return std::sqrt(omega);
}

void check_dimension(int d)
{
    if (d != 2 && d != 3)
        throw DomainError("dimension must be 2 or 3, got " + std::to_string(d));
}

cplx green(int d, cplx omega, double r)
{
    check_dimension(d);
    check_off_cut(omega, "green");
    r = std::fabs(r);
    if (r < 1e-8)
        throw SingularityError("green: |x| = " + std::to_string(r) +
                               " is below 1e-8, the Green function is singular at 0");
    cplx k = std::sqrt(omega);
    if (d == 3)
        return std::exp(-k * r) / (4.0 * pi * r);
    return bessel_k(0.0, k * r).value / (2.0 * pi);
}

cplx green_fourier(int d, cplx omega, double xi2)
{
    check_dimension(d);
    check_off_cut(omega, "green_fourier");
    return std::pow(2.0 * pi, -0.5 * d) / (omega + xi2);
}

cplx c_of_omega(int d, cplx omega)
{
    check_dimension(d);
    check_off_cut(omega, "c_of_omega");
    if (d == 3)
        return std::sqrt(omega) / (4.0 * pi);
    return (euler_gamma - std::log(2.0)) / (2.0 * pi) + std::log(omega) / (4.0 * pi);
}

std::optional<double> e_alpha(int d, double alpha)
{
    check_dimension(d);
    if (d == 3) {
        if (alpha < 0.0)
            return 16.0 * pi * pi * alpha * alpha;
        return std::nullopt;
    }
    double e = 4.0 * std::exp(-4.0 * pi * alpha - 2.0 * euler_gamma);
    // beyond the double range the bound state is numerically indistinguishable from 0
    if (!(e > 0.0) || !std::isfinite(e))
        return std::nullopt;
    return e;
}

double frac_green_constant(int d, double beta)
{
    return std::pow(2.0, (2.0 - beta - d) / 2.0) / (std::pow(pi, 0.5 * d) * std::tgamma(beta / 2.0));
}

double frac_green_closed(int d, double s, double r)
{
    check_dimension(d);
    if (!(s > 0.0 && s < 2.0))
        throw DomainError("frac_green_closed: s must lie in (0,2), got " + std::to_string(s));
    r = std::fabs(r);
    if (r < 1e-8)
        throw SingularityError("frac_green_closed: |x| below 1e-8");
    double nu = (d + s - 2.0) / 2.0;
    return frac_green_constant(d, 2.0 - s) * bessel_k(nu, r) * std::pow(r, (2.0 - s - d) / 2.0);
}

SpectralConstants make_constants(int d, double alpha)
{
    check_dimension(d);
    if (!std::isfinite(alpha))
        throw DomainError("alpha must be finite");
    SpectralConstants c;
    c.d = d;
    c.alpha = alpha;
    c.e_alpha = e_alpha(d, alpha);
    return c;
}

}  // namespace deltalap
