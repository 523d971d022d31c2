#include "deltalap/freeop.hpp"

#include <cmath>
#include <string>

#include "deltalap/errors.hpp"

namespace deltalap {

void FreeFractional::validate() const
{
    check_off_cut(omega, "free_frac");
    if (!(s >= -2.0 && s <= 2.0))
        throw DomainError("free_frac: s must lie in [-2,2], got " + std::to_string(s));
}

cplx FreeFractional::symbol(double xi2) const
{
    cplx z = omega + xi2;
    if (s == 2.0)
        return z;
    if (s == -2.0)
        return 1.0 / z;
    if (s == 0.0)
        return 1.0;
    return std::exp(0.5 * s * std::log(z));
}

Field free_resolvent(cplx omega, const Field& f)
{
    check_off_cut(omega, "free_resolvent");
    return apply_radial(f, [&](double xi2) { return 1.0 / (omega + xi2); });
}

Field free_frac(double s, cplx omega, const Field& f)
{
    FreeFractional op{omega, s};
    op.validate();
    return apply_radial(f, [&](double xi2) { return op.symbol(xi2); });
}

double hsp_norm(const Field& f, double s, double p)
{
    return lp_norm(free_frac(s, 1.0, f), p);
}

namespace {

std::vector<cplx> komatsu_radial(double s, cplx omega, const Shells& sh, const std::vector<double>& weights,
                                 const QuadratureScheme& scheme)
{
    const std::size_t ns = sh.size();
    HalfLineProblem prob;
    prob.dim = ns;
    prob.eval = [&](double t, cplx* out) {
        double ts = std::pow(t, -0.5 * s);
        for (std::size_t m = 0; m < ns; ++m)
            out[m] = ts / (t + omega + sh.lambda[m]);
    };
    prob.norm = [&](const cplx* v) {
        double acc = 0.0;
        for (std::size_t m = 0; m < ns; ++m)
            acc += weights[m] * std::norm(v[m]);
        return std::sqrt(acc);
    };
    prob.power_lo = -0.5 * s;
    prob.power_hi = -0.5 * s - 1.0;
    prob.onset_hi = std::abs(omega) + sh.lambda.back();
    double ref = 0.0;
    for (std::size_t m = 0; m < ns; ++m)
        ref += weights[m] * std::norm(std::exp(-0.5 * s * std::log(omega + sh.lambda[m])));
    ref = std::sqrt(ref) * std::sin(0.5 * s * pi) / pi;
    auto res = integrate_half_line(prob, scheme, std::abs(omega), ref);
    const double c = std::sin(0.5 * s * pi) / pi;
    for (auto& v : res.value)
        v *= c;
    return res.value;
}

std::vector<double> shell_weights(const Shells& sh, const Field& f)
{
    std::vector<double> w(sh.size(), 0.0);
    const auto& c = f.coefficients();
    const double vol = std::pow(f.grid().dxi(), f.grid().d);
    for (std::size_t i = 0; i < c.size(); ++i)
        w[sh.id[i]] += std::norm(c[i]) * vol;
    return w;
}

}  // namespace

Field komatsu_free(double s, double omega, const Field& f, const QuadratureScheme& scheme)
{
    if (!(s > 0.0 && s < 2.0))
        throw DomainError("komatsu_free: s must lie in (0,2), got " + std::to_string(s));
    check_off_cut(omega, "komatsu_free");
    auto sh = shells_for(f.grid());
    auto radial = komatsu_radial(s, omega, *sh, shell_weights(*sh, f), scheme);
    return apply_radial(f, *sh, radial);
}

double komatsu_free_check(double s, cplx omega, const Field& f, const QuadratureScheme& scheme)
{
    if (!(s > 0.0 && s < 2.0))
        throw DomainError("komatsu_free_check: s must lie in (0,2), got " + std::to_string(s));
    check_off_cut(omega, "komatsu_free_check");
    auto sh = shells_for(f.grid());
    auto weights = shell_weights(*sh, f);
    auto radial = komatsu_radial(s, omega, *sh, weights, scheme);
    double num = 0.0, den = 0.0;
    for (std::size_t m = 0; m < sh->size(); ++m) {
        cplx exact = std::exp(-0.5 * s * std::log(omega + sh->lambda[m]));
        num += weights[m] * std::norm(radial[m] - exact);
        den += weights[m] * std::norm(exact);
    }
    if (den == 0.0)
        return 0.0;
    return std::sqrt(num / den);
}

double komatsu_scalar(double s, double a, const QuadratureScheme& scheme)
{
    if (!(s > 0.0 && s < 2.0))
        throw DomainError("komatsu_scalar: s must lie in (0,2)");
    double v = integrate_half_line_scalar([&](double t) { return std::pow(t, -0.5 * s) / (t + a); }, scheme, a,
                                          -0.5 * s, -0.5 * s - 1.0, a);
    return std::sin(0.5 * s * pi) / pi * v;
}

}  // namespace deltalap
