#pragma once

#include <memory>
#include <optional>

#include "deltalap/freeop.hpp"
#include "deltalap/grid.hpp"
#include "deltalap/quadrature.hpp"
#include "deltalap/specfun.hpp"

namespace deltalap {

// Point interaction Laplacian on a periodic grid.
//
// On the lattice the operator is the rank-one perturbation Delta_h + beta delta delta^T.
// Its coupling function kappa(z) = alpha + c(w_a) + S(w_a) - S(z), with
// S(z) = G_{z,h}(0) = L^-d sum_k 1/(z + |xi_k|^2), replaces alpha + c(z): it agrees with
// it at the anchor w_a and makes resolvent, eigenpair and Komatsu identities exact
// on the grid. The anchor is E_alpha when that eigenvalue exists and lies above
// the lowest nonzero lattice frequency, otherwise the reference shift.
class PointInteraction {
public:
    PointInteraction(int d, double alpha, const GridSpec& grid, std::optional<double> omega_ref = {});

    const SpectralConstants& constants() const { return constants_; }
    int d() const { return constants_.d; }
    double alpha() const { return constants_.alpha; }
    const GridSpec& grid() const { return grid_; }
    const Shells& shells() const { return *shells_; }
    double omega_ref() const { return omega_ref_; }
    double anchor() const { return anchor_; }

    // true when the grid model carries the bound state E_alpha
    bool has_eigenvalue() const { return has_eigen_; }
    double eigenvalue() const;
    const Field& psi() const;

    cplx lattice_sum(cplx z) const;
    cplx coupling(cplx z) const;
    // 1/beta = alpha + c(w_a) + S(w_a)
    double inverse_strength() const { return inverse_strength_; }

    // bilinear pairing int f G_z from the shell sums of f
    cplx pair_green(const std::vector<cplx>& sums, cplx z) const;
    cplx pair_green(const Field& f, cplx z) const;
    // ||G_{z,h}||_2^2 for real z > 0
    double green_norm2(double z) const;
    // Fourier coefficient of G_z on shell m
    cplx green_coeff(cplx z, std::size_t m) const { return green_scale_ / (z + shells_->lambda[m]); }

private:
    SpectralConstants constants_;
    GridSpec grid_;
    std::shared_ptr<const Shells> shells_;
    double omega_ref_ = 2.0;
    double anchor_ = 2.0;
    bool has_eigen_ = false;
    double inverse_strength_ = 0.0;
    double green_scale_ = 0.0;
    double pair_scale_ = 0.0;
    Field psi_;
};

struct Decomposition {
    Field regular;
    cplx coeff = 0.0;
    cplx omega = 1.0;
};

// B_omega f = <f, G_omega> G_omega / kappa(omega)
Field b_omega(const PointInteraction& op, cplx omega, const Field& f);
// (omega - Delta_alpha)^{-1} f
Field resolvent_alpha(const PointInteraction& op, cplx omega, const Field& f);
// (omega - Delta_alpha) phi for phi = regular + coeff G_{phi.omega}
Field apply_op(const PointInteraction& op, cplx omega, const Decomposition& phi);
// splitting of a grid field into regular part and G_omega multiple fixed by the boundary condition
Decomposition trace_decomposition(const PointInteraction& op, cplx omega, const Field& u);
// (omega - Delta_alpha) u for any grid field
Field apply_shifted(const PointInteraction& op, cplx omega, const Field& u);

Field frac_neg(const PointInteraction& op, double s, double omega, const Field& f, const QuadratureScheme& scheme);
Field frac_pos(const PointInteraction& op, double s, double omega, const Field& phi,
               const QuadratureScheme& scheme);
cplx c_s_functional(const PointInteraction& op, double s, double omega, const Field& f,
                    const QuadratureScheme& scheme);
Decomposition decompose(const PointInteraction& op, double s, double omega, const Field& f,
                        const QuadratureScheme& scheme);
double hspa_norm(const PointInteraction& op, const Field& phi, double s, double p, const QuadratureScheme& scheme);
Field project_ac(const PointInteraction& op, const Field& phi);

// admissible integrability window for the perturbed Sobolev norms
void check_p_window(int d, double p);

// ||G_omega||_p by radial quadrature of the closed form
double green_lp_norm(int d, double omega, double p, const QuadratureScheme& scheme = {});

// int_0^inf t^{-s/2} (omega+t)^{A-1} f(sqrt(omega+t) r) dt with f the radial profile of G_1
double weighted_green_integral(int d, double s, double A, double omega, double r,
                               const QuadratureScheme& scheme = {});
struct WeightedSup {
    double sup = 0.0;
    double argmax = 0.0;
};
// sup over log spaced r in [r_lo, r_hi] of r^{2A-s} times the integral above, A = d/(2p)
WeightedSup weighted_green_sup(int d, double s, double p, double omega, double r_lo, double r_hi, int points,
                               const QuadratureScheme& scheme = {});

}  // namespace deltalap
