#pragma once

#include "deltalap/grid.hpp"
#include "deltalap/quadrature.hpp"

namespace deltalap {

struct FreeFractional {
    cplx omega = 1.0;
    double s = 0.0;

    void validate() const;
    cplx symbol(double xi2) const;  // (omega + |xi|^2)^{s/2}, principal branch
};

Field free_resolvent(cplx omega, const Field& f);
Field free_frac(double s, cplx omega, const Field& f);
// || (1 - Delta)^{s/2} f ||_p
double hsp_norm(const Field& f, double s, double p);

// Relative L2 distance between the Komatsu quadrature of (omega - Delta)^{-s/2} f
// and the direct multiplier.
double komatsu_free_check(double s, cplx omega, const Field& f, const QuadratureScheme& scheme);
// Komatsu quadrature of (omega - Delta)^{-s/2} f
Field komatsu_free(double s, double omega, const Field& f, const QuadratureScheme& scheme);
// scalar self test: quadrature of (sin(s pi/2)/pi) int t^{-s/2} / (t + a) dt against a^{-s/2}
double komatsu_scalar(double s, double a, const QuadratureScheme& scheme);

}  // namespace deltalap
