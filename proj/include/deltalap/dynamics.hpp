#pragma once

#include <map>
#include <optional>
#include <string>
#include <vector>

#include "deltalap/pointop.hpp"

namespace deltalap {

struct EvolutionTrace {
    std::vector<double> times;
    std::vector<Field> states;  // empty unless requested
    std::vector<double> mass;
    std::vector<double> energy;  // empty unless requested
    std::map<double, std::vector<double>> lp_records;
    double max_step_mass_change = 0.0;  // relative to mass[0], over every step taken

    double max_mass_drift() const;
};

struct RecordOptions {
    int every = 1;            // record every this many steps (the final step is always recorded)
    bool keep_states = false;
    bool energy = false;
    double energy_p_nl = 3.0;
    double energy_mu = 0.0;
    std::vector<double> lp;   // exponents of the recorded L^p norms
    QuadratureScheme scheme;
};

// One Crank-Nicolson step exp(i tau Delta_alpha) ~ (1 - i tau/2 Delta_alpha)^{-1}(1 + i tau/2 Delta_alpha)
// acting on Fourier coefficients in place.
class CnStepper {
public:
    CnStepper(const PointInteraction& op, double tau);
    void step(std::vector<cplx>& c) const;
    double tau() const { return tau_; }

private:
    const PointInteraction* op_;
    double tau_;
    cplx w_;
    cplx a_scale_;  // pair scale / kappa(w)
    std::vector<cplx> inv_, gc_;
};

// e^{it Delta_alpha} u0 on t = 0, tau, ..., T; the bound state part rotates by its exact phase.
EvolutionTrace propagate_linear(const PointInteraction& op, const Field& u0, double T, double tau,
                                const RecordOptions& rec = {});

struct DecayFit {
    double slope = 0.0;
    double intercept = 0.0;
    double t_lo = 0.0;
    double t_hi = 0.0;
    double t_max = 0.0;    // reflection bound (L/4)/(2 xi_data)
    double xi_data = 0.0;  // radius holding all but 1e-6 of the spectral mass
    std::vector<double> times;
    std::vector<double> norms;
};

// frequency radius outside which only 1e-6 of the L2 mass lives
double data_frequency_radius(const Field& u);
double reflection_time(const Field& u);

// fit of log ||u(t)||_p against log t; u0 is projected onto the continuous subspace first
DecayFit dispersive_decay_fit(const PointInteraction& op, const Field& u0, double p, const std::vector<double>& times,
                              double tau);
// one propagation, one fit per exponent
std::vector<DecayFit> dispersive_decay_fits(const PointInteraction& op, const Field& u0, const std::vector<double>& ps,
                                            const std::vector<double>& times, double tau);

void check_strichartz_pair(int d, double q, double r);

// (int_0^T ||e^{it Delta_alpha} P_ac u0||_r^q dt)^{1/q} / ||u0||_2; q = inf gives the sup
double strichartz_ratio(const PointInteraction& op, const Field& u0, double q, double r, double T, double tau);
// result[i][j]: pair i over horizon horizons[j], from a single propagation
std::vector<std::vector<double>> strichartz_ratios(const PointInteraction& op, const Field& u0,
                                                   const std::vector<std::pair<double, double>>& pairs,
                                                   const std::vector<double>& horizons, double tau);

struct NlsProblem {
    const PointInteraction* op = nullptr;
    double p_nl = 3.0;
    double mu = 1.0;
    Field u0;
    double T = 1.0;
    double tau = 1e-3;

    void validate() const;
};

// u |u|^{p-1} with 0 |0|^{p-1} = 0
Field nonlinearity(const Field& u, double p_nl);

Field nls_strang_step(const NlsProblem& prob, const Field& u);
EvolutionTrace nls_strang(const NlsProblem& prob, const RecordOptions& rec = {});

struct DuhamelResult {
    EvolutionTrace trace;       // the last iterate
    std::vector<double> ratios; // successive sup-in-time L2 distance quotients
    std::vector<double> distances;
    bool converged = false;
    int iterations = 0;
    std::string report;         // set when no contraction was observed
};

DuhamelResult duhamel_solve(const NlsProblem& prob, double tol, int max_iter);

// (mass, energy) with energy = 1/2 ||(w - Delta_alpha)^{1/2} u||^2 - w/2 ||u||^2 + mu/(p+1) ||u||_{p+1}^{p+1}
std::pair<double, double> mass_energy(const PointInteraction& op, const Field& u, double p_nl, double mu,
                                      const QuadratureScheme& scheme = {});

// exponent windows of the nonlinear estimate, throws DomainError naming the failed inequality
void check_nonlinear_window(double s, double p_nl, double ell, double ell1);

double nonlinear_estimate_ratio(const PointInteraction& op, const Field& phi, double s, double p_nl, double ell,
                                double ell1, const QuadratureScheme& scheme = {});

}  // namespace deltalap
