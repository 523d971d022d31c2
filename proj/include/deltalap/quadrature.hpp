#pragma once

#include <complex>
#include <cstddef>
#include <functional>
#include <vector>

namespace deltalap {

using cplx = std::complex<double>;

struct QuadratureScheme {
    double tol = 1e-8;
    int panel_nodes = 16;
    int max_panels = 200;   // per side of the split point
    double split_point = 0.0;  // 0 selects |omega|
    double panel_width = 2.0;  // in the logarithmic variable

    void validate() const;
};

struct GaussRule {
    std::vector<double> x;  // nodes on [-1,1]
    std::vector<double> w;
};
const GaussRule& gauss_legendre(int n);

// Integral over t in (0, inf) of a vector valued f(t). Both half lines are
// mapped logarithmically around the split point and covered by Gauss-Legendre
// panels. Beyond the last panel the integrand is replaced by its power law
// f ~ t^power_lo (t -> 0) or f ~ t^power_hi (t -> inf); a side is finished when
// that tail model agrees with the panel just added to within tol.
struct HalfLineProblem {
    std::size_t dim = 1;
    std::function<void(double t, cplx* out)> eval;
    std::function<double(const cplx*)> norm;
    double power_lo = 0.0;
    double power_hi = -2.0;
    // optional per-component exponents at infinity, overriding power_hi
    std::vector<double> power_hi_each;
    double onset_lo = 0.0;  // power law for t well below this (0: split point)
    double onset_hi = 0.0;  // power law for t well above this (0: split point)
};

struct QuadratureResult {
    std::vector<cplx> value;
    double residual = 0.0;  // relative to the reference norm
    int panels_lo = 0;
    int panels_hi = 0;
    long evaluations = 0;
};

QuadratureResult integrate_half_line(const HalfLineProblem& prob, const QuadratureScheme& scheme,
                                     double split, double ref_norm);

// scalar convenience wrapper
double integrate_half_line_scalar(const std::function<double(double)>& f, const QuadratureScheme& scheme,
                                  double split, double power_lo, double power_hi, double onset_hi = 0.0);

}  // namespace deltalap
