#include "deltalap/quadrature.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <mutex>
#include <string>

#include "deltalap/errors.hpp"

namespace deltalap {

void QuadratureScheme::validate() const
{
    if (!(tol > 0.0 && tol <= 1e-4))
        throw DomainError("quadrature: tol must lie in (0, 1e-4]");
    if (panel_nodes < 8)
        throw DomainError("quadrature: panel_nodes must be >= 8");
    if (max_panels < 1)
        throw DomainError("quadrature: max_panels must be >= 1");
    if (!(panel_width > 0.0))
        throw DomainError("quadrature: panel_width must be positive");
    if (split_point < 0.0)
        throw DomainError("quadrature: split_point must be >= 0");
}

const GaussRule& gauss_legendre(int n)
{
    static std::mutex mu;
    static std::map<int, GaussRule> cache;
    std::lock_guard<std::mutex> lock(mu);
    auto it = cache.find(n);
    if (it != cache.end())
        return it->second;
    GaussRule r;
    r.x.resize(n);
    r.w.resize(n);
    for (int i = 0; i < (n + 1) / 2; ++i) {
        double x = std::cos(3.141592653589793 * (i + 0.75) / (n + 0.5));
        double dp = 0.0;
        for (int it2 = 0; it2 < 100; ++it2) {
            double p0 = 1.0, p1 = x;
            for (int k = 2; k <= n; ++k) {
                double p2 = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
                p0 = p1;
                p1 = p2;
            }
            dp = n * (x * p1 - p0) / (x * x - 1.0);
            double dx = p1 / dp;
            x -= dx;
            if (std::fabs(dx) < 1e-16)
                break;
        }
        r.x[i] = -x;
        r.x[n - 1 - i] = x;
        r.w[i] = r.w[n - 1 - i] = 2.0 / ((1.0 - x * x) * dp * dp);
    }
    return cache.emplace(n, std::move(r)).first->second;
}

namespace {

void run_side(const HalfLineProblem& prob, const QuadratureScheme& scheme, double a, double ref_norm,
              int dir, std::vector<cplx>& acc, QuadratureResult& res)
{
    const std::size_t dim = prob.dim;
    const double power = dir < 0 ? prob.power_lo : prob.power_hi;
    if (dir < 0 && !(power > -1.0))
        throw DomainError("quadrature: integrand ~ t^" + std::to_string(power) +
                          " is not integrable at t = 0");
    if (dir > 0 && !(power < -1.0))
        throw QuadratureError("quadrature: integrand ~ t^" + std::to_string(power) +
                                  " at infinity, the tail diverges",
                              1.0);
    std::vector<double> denom(dim, dir < 0 ? power + 1.0 : -(power + 1.0));
    if (dir > 0 && !prob.power_hi_each.empty()) {
        if (prob.power_hi_each.size() != dim)
            throw DomainError("quadrature: power_hi_each has wrong size");
        for (std::size_t i = 0; i < dim; ++i) {
            if (!(prob.power_hi_each[i] < -1.0))
                throw QuadratureError("quadrature: component tail diverges", 1.0);
            denom[i] = -(prob.power_hi_each[i] + 1.0);
        }
    }
    double onset = dir < 0 ? prob.onset_lo : prob.onset_hi;
    if (!(onset > 0.0))
        onset = a;

    const GaussRule& rule = gauss_legendre(scheme.panel_nodes);
    const double W = scheme.panel_width;
    std::vector<cplx> f(dim), panel(dim), tail_prev(dim), tail(dim), diff(dim);

    prob.eval(a, f.data());
    ++res.evaluations;
    for (std::size_t i = 0; i < dim; ++i)
        tail_prev[i] = f[i] * a / denom[i];

    double last_panel_norm = 0.0;
    int rising = 0;
    double resid = 1.0;
    for (int k = 0; k < scheme.max_panels; ++k) {
        std::fill(panel.begin(), panel.end(), cplx(0.0));
        for (std::size_t q = 0; q < rule.x.size(); ++q) {
            double v = (k + 0.5) * W + 0.5 * W * rule.x[q];
            double t = a * std::exp(dir * v);
            prob.eval(t, f.data());
            ++res.evaluations;
            double wt = 0.5 * W * rule.w[q] * t;
            for (std::size_t i = 0; i < dim; ++i)
                panel[i] += wt * f[i];
        }
        double tv = a * std::exp(dir * (k + 1) * W);
        prob.eval(tv, f.data());
        ++res.evaluations;
        for (std::size_t i = 0; i < dim; ++i) {
            tail[i] = f[i] * tv / denom[i];
            diff[i] = tail_prev[i] - panel[i] - tail[i];
            acc[i] += panel[i];
        }
        (dir < 0 ? res.panels_lo : res.panels_hi) = k + 1;

        double ref = std::max(ref_norm, prob.norm(acc.data()));
        if (!(ref > 0.0))
            ref = 1.0;
        resid = prob.norm(diff.data()) / ref;
        bool asymptotic = dir < 0 ? tv <= 0.1 * onset : tv >= 10.0 * onset;
        if (asymptotic && resid <= scheme.tol) {
            for (std::size_t i = 0; i < dim; ++i)
                acc[i] += tail[i];
            res.residual = std::max(res.residual, resid);
            return;
        }
        double pn = prob.norm(panel.data());
        if (asymptotic && k > 0 && pn >= last_panel_norm && pn > scheme.tol * ref) {
            if (++rising >= 8)
                throw QuadratureError("quadrature: panel contributions stopped decaying (plateau at " +
                                          std::to_string(pn / ref) + " relative)",
                                      resid);
        } else {
            rising = 0;
        }
        last_panel_norm = pn;
        tail_prev.swap(tail);
    }
    throw QuadratureError("quadrature: no convergence within " + std::to_string(scheme.max_panels) +
                              " panels, achieved residual " + std::to_string(resid),
                          resid);
}

}  // namespace

QuadratureResult integrate_half_line(const HalfLineProblem& prob, const QuadratureScheme& scheme,
                                     double split, double ref_norm)
{
    scheme.validate();
    double a = scheme.split_point > 0.0 ? scheme.split_point : split;
    if (!(a > 0.0) || !std::isfinite(a))
        throw DomainError("quadrature: split point must be positive");
    QuadratureResult res;
    res.value.assign(prob.dim, cplx(0.0));
    run_side(prob, scheme, a, ref_norm, -1, res.value, res);
    run_side(prob, scheme, a, ref_norm, +1, res.value, res);
    return res;
}

double integrate_half_line_scalar(const std::function<double(double)>& f, const QuadratureScheme& scheme,
                                  double split, double power_lo, double power_hi, double onset_hi)
{
    HalfLineProblem prob;
    prob.dim = 1;
    prob.eval = [&](double t, cplx* out) { out[0] = f(t); };
    prob.norm = [](const cplx* v) { return std::abs(v[0]); };
    prob.power_lo = power_lo;
    prob.power_hi = power_hi;
    prob.onset_hi = onset_hi;
    return integrate_half_line(prob, scheme, split, 0.0).value[0].real();
}

}  // namespace deltalap
