#pragma once

#include <complex>
#include <optional>

namespace deltalap {

using cplx = std::complex<double>;

inline constexpr double pi = 3.141592653589793238462643383279502884;
inline constexpr double euler_gamma = 0.577215664901532860606512090082402431;

struct BesselResult {
    cplx value;
    bool accurate = true;   // false when the truncation could not reach the tolerance
    double est_error = 0.0; // estimated relative error
};

// K_nu(z) for Re z > 0. Quadrature of the cosh integral below |z| = 50,
// Hankel asymptotic series above. Real z <= 0 throws DomainError.
BesselResult bessel_k(double nu, cplx z, double tol = 1e-13);
double bessel_k(double nu, double x);

// principal square root, throws BranchError on (-inf, 0]
cplx principal_sqrt(cplx omega);
void check_off_cut(cplx omega, const char* who);

// (omega - Delta)^{-1} delta_0 at distance r from the origin
cplx green(int d, cplx omega, double r);
// Fourier symbol (2pi)^{-d/2} / (omega + |xi|^2)
cplx green_fourier(int d, cplx omega, double xi2);
cplx c_of_omega(int d, cplx omega);
std::optional<double> e_alpha(int d, double alpha);

// (1 - Delta)^{s/2} G_1 at distance r, s in (0,2)
double frac_green_closed(int d, double s, double r);
// constant of the Fourier pair (1+|xi|^2)^{-beta/2} <-> C K_nu(r) r^{-nu}
double frac_green_constant(int d, double beta);

struct SpectralConstants {
    int d = 3;
    double alpha = -1.0;
    std::optional<double> e_alpha;
    double euler_gamma = deltalap::euler_gamma;
};

SpectralConstants make_constants(int d, double alpha);

void check_dimension(int d);

}  // namespace deltalap
