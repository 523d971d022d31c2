#include "deltalap/pointop.hpp"

#include <cmath>
#include <sstream>
#include <string>

#include "deltalap/errors.hpp"

namespace deltalap {

PointInteraction::PointInteraction(int d, double alpha, const GridSpec& grid, std::optional<double> omega_ref)
    : constants_(make_constants(d, alpha)), grid_(grid)
{
    grid_.validate();
    if (grid_.d != d)
        throw DomainError("PointInteraction: grid dimension differs from d");
    shells_ = shells_for(grid_);
    green_scale_ = std::pow(2.0 * pi, -0.5 * d);
    pair_scale_ = std::pow(grid_.dxi(), d) * green_scale_;

    const auto& e = constants_.e_alpha;
    const double floor = e ? *e : 0.0;
    omega_ref_ = omega_ref ? *omega_ref : floor + 2.0;
    if (!std::isfinite(omega_ref_) || omega_ref_ < floor + 1.0) {
        std::ostringstream os;
        os << "omega_ref = " << omega_ref_ << " must exceed max(0, E_alpha) = " << floor << " by at least 1";
        throw DomainError(os.str());
    }
    const double lowest = grid_.dxi() * grid_.dxi();
    has_eigen_ = e && *e >= lowest;
    anchor_ = has_eigen_ ? *e : omega_ref_;
    inverse_strength_ = alpha + c_of_omega(d, anchor_).real() + lattice_sum(anchor_).real();

    if (has_eigen_) {
        const double E = *e;
        const double scale = green_scale_ / std::sqrt(green_norm2(E));
        std::vector<cplx> radial(shells_->size());
        for (std::size_t m = 0; m < radial.size(); ++m)
            radial[m] = scale / (E + shells_->lambda[m]);
        psi_ = field_from_radial(*shells_, radial);
    }
}

double PointInteraction::eigenvalue() const
{
    if (!has_eigen_)
        throw DomainError("PointInteraction: the grid model has no bound state");
    return *constants_.e_alpha;
}

const Field& PointInteraction::psi() const
{
    if (!has_eigen_)
        throw DomainError("PointInteraction: the grid model has no bound state");
    return psi_;
}

cplx PointInteraction::lattice_sum(cplx z) const
{
    const auto& lam = shells_->lambda;
    const auto& cnt = shells_->count;
    cplx s = 0.0;
    if (z.imag() == 0.0) {
        double x = z.real(), acc = 0.0;
        for (std::size_t m = 0; m < lam.size(); ++m)
            acc += cnt[m] / (x + lam[m]);
        s = acc;
    } else {
        for (std::size_t m = 0; m < lam.size(); ++m)
            s += cnt[m] / (z + lam[m]);
    }
    return s / std::pow(grid_.L, grid_.d);
}

cplx PointInteraction::coupling(cplx z) const
{
    return inverse_strength_ - lattice_sum(z);
}

cplx PointInteraction::pair_green(const std::vector<cplx>& sums, cplx z) const
{
    const auto& lam = shells_->lambda;
    cplx s = 0.0;
    for (std::size_t m = 0; m < lam.size(); ++m)
        s += sums[m] / (z + lam[m]);
    return s * pair_scale_;
}

cplx PointInteraction::pair_green(const Field& f, cplx z) const
{
    return pair_green(shell_sums(*shells_, f.coefficients()), z);
}

double PointInteraction::green_norm2(double z) const
{
    const auto& lam = shells_->lambda;
    const auto& cnt = shells_->count;
    double acc = 0.0;
    for (std::size_t m = 0; m < lam.size(); ++m)
        acc += cnt[m] / ((z + lam[m]) * (z + lam[m]));
    return acc / std::pow(grid_.L, grid_.d);
}

namespace {

void check_grid(const PointInteraction& op, const Field& f)
{
    if (!(f.grid() == op.grid()))
        throw DomainError("field grid differs from the model grid");
}

cplx checked_coupling(const PointInteraction& op, cplx omega)
{
    if (op.has_eigenvalue() && std::abs(omega - op.eigenvalue()) <= 1e-12 * op.eigenvalue())
        throw PoleError("omega coincides with the eigenvalue E_alpha");
    cplx k = op.coupling(omega);
    if (std::abs(k) < 1e-300)
        throw PoleError("alpha + c(omega) vanishes at this omega");
    return k;
}

double cut_distance(cplx omega)
{
    return omega.real() > 0.0 ? std::abs(omega) : std::fabs(omega.imag());
}

void check_positive_shift(const PointInteraction& op, double omega, const char* who)
{
    if (!(omega > 0.0) || !std::isfinite(omega))
        throw DomainError(std::string(who) + ": omega must be a positive real");
    if (op.has_eigenvalue() && !(omega > op.eigenvalue()))
        throw DomainError(std::string(who) + ": omega must exceed E_alpha = " + std::to_string(op.eigenvalue()));
    if (!(op.coupling(omega).real() > 0.0))
        throw DomainError(std::string(who) + ": omega - Delta_alpha is not positive at omega = " +
                          std::to_string(omega));
}

void check_s(double s, const char* who)
{
    if (!(s > 0.0 && s < 2.0))
        throw DomainError(std::string(who) + ": s must lie in (0,2), got " + std::to_string(s));
}

// Rank-one parts of the Komatsu integrals for A = omega - Delta_alpha,
//   field:  int t^{sign s/2} B_{omega+t} f dt   (radial coefficients)
//   scalar: int t^{sign s/2} <f,G_{omega+t}> / kappa(omega+t) dt
// both without the factor sin(s pi/2)/pi.
struct RankOneIntegrals {
    std::vector<cplx> radial;
    cplx scalar = 0.0;
};

RankOneIntegrals rank_one_integrals(const PointInteraction& op, double s, int sign, double omega,
                                    const Field& f, const QuadratureScheme& scheme, bool want_field,
                                    bool want_scalar)
{
    const Shells& sh = op.shells();
    const std::size_t ns = sh.size();
    const auto sums = shell_sums(sh, f.coefficients());
    const int d = op.d();
    const double Ld = std::pow(op.grid().L, d);
    const double gscale = std::pow(2.0 * pi, -0.5 * d);
    const double pscale = std::pow(op.grid().dxi(), d) * gscale;
    const double vol = std::pow(op.grid().dxi(), d);
    const double inv_strength = op.inverse_strength();
    const double gnorm = std::sqrt(op.green_norm2(omega));

    const std::size_t nfield = want_field ? ns : 0;
    const std::size_t dim = nfield + (want_scalar ? 1 : 0);
    std::vector<double> inv(ns);

    HalfLineProblem prob;
    prob.dim = dim;
    prob.eval = [&](double t, cplx* out) {
        const double z = omega + t;
        double S = 0.0;
        cplx pf = 0.0;
        for (std::size_t m = 0; m < ns; ++m) {
            inv[m] = 1.0 / (z + sh.lambda[m]);
            S += sh.count[m] * inv[m];
            pf += sums[m] * inv[m];
        }
        const double kappa = inv_strength - S / Ld;
        if (std::fabs(kappa) < 1e-8)
            throw ConditioningError("Komatsu integrand: |alpha + c(omega+t)| < 1e-8 at t = " + std::to_string(t));
        const cplx coef = std::pow(t, 0.5 * sign * s) * pf * pscale / kappa;
        for (std::size_t m = 0; m < nfield; ++m)
            out[m] = coef * gscale * inv[m];
        if (want_scalar)
            out[nfield] = coef;
    };
    prob.norm = [&](const cplx* v) {
        double acc = 0.0;
        for (std::size_t m = 0; m < nfield; ++m)
            acc += sh.count[m] * std::norm(v[m]);
        acc *= vol;
        if (want_scalar)
            acc += std::norm(v[nfield]) * gnorm * gnorm;
        return std::sqrt(acc);
    };
    prob.power_lo = 0.5 * sign * s;
    prob.power_hi_each.assign(dim, 0.5 * sign * s - 2.0);
    if (want_scalar)
        prob.power_hi_each[nfield] = 0.5 * sign * s - 1.0;
    prob.power_hi = want_scalar ? 0.5 * sign * s - 1.0 : 0.5 * sign * s - 2.0;
    prob.onset_lo = omega;
    prob.onset_hi = omega + sh.lambda.back();

    // scale of the free part, the natural reference for the tolerance
    double ref = 0.0;
    const auto& c = f.coefficients();
    for (std::size_t i = 0; i < c.size(); ++i)
        ref += std::norm(c[i]) * std::pow(omega + sh.lambda[sh.id[i]], sign * s);
    ref = std::sqrt(ref * vol) * pi / std::sin(0.5 * s * pi);

    auto res = integrate_half_line(prob, scheme, omega, ref);
    RankOneIntegrals out;
    if (want_field)
        out.radial.assign(res.value.begin(), res.value.begin() + static_cast<std::ptrdiff_t>(ns));
    if (want_scalar)
        out.scalar = res.value[nfield];
    return out;
}

}  // namespace

Field b_omega(const PointInteraction& op, cplx omega, const Field& f)
{
    check_grid(op, f);
    check_off_cut(omega, "b_omega");
    cplx k = checked_coupling(op, omega);
    cplx a = op.pair_green(f, omega) / k;
    const auto& sh = op.shells();
    std::vector<cplx> radial(sh.size());
    for (std::size_t m = 0; m < radial.size(); ++m)
        radial[m] = a * op.green_coeff(omega, m);
    return field_from_radial(sh, radial);
}

Field resolvent_alpha(const PointInteraction& op, cplx omega, const Field& f)
{
    check_grid(op, f);
    check_off_cut(omega, "resolvent_alpha");
    if (cut_distance(omega) < 1e-6)
        throw ConditioningError("resolvent_alpha: omega within 1e-6 of the continuous spectrum");
    if (op.has_eigenvalue() && std::abs(omega - op.eigenvalue()) < 1e-6)
        throw ConditioningError("resolvent_alpha: omega within 1e-6 of E_alpha");
    cplx k = checked_coupling(op, omega);
    const auto& sh = op.shells();
    const auto& c = f.coefficients();
    cplx a = op.pair_green(shell_sums(sh, c), omega) / k;
    std::vector<cplx> inv(sh.size()), rank(sh.size());
    for (std::size_t m = 0; m < sh.size(); ++m) {
        inv[m] = 1.0 / (omega + sh.lambda[m]);
        rank[m] = a * op.green_coeff(omega, m);
    }
    std::vector<cplx> out(c.size());
    for (std::size_t i = 0; i < c.size(); ++i)
        out[i] = c[i] * inv[sh.id[i]] + rank[sh.id[i]];
    return Field::from_coefficients(f.grid(), std::move(out));
}

Field apply_op(const PointInteraction& op, cplx omega, const Decomposition& phi)
{
    check_grid(op, phi.regular);
    check_off_cut(phi.omega, "apply_op");
    const auto& sh = op.shells();
    const auto& g = phi.regular.coefficients();
    const cplx w = phi.omega;
    std::vector<cplx> out(g.size());
    for (std::size_t i = 0; i < g.size(); ++i) {
        const std::size_t m = sh.id[i];
        cplx full = g[i] + phi.coeff * op.green_coeff(w, m);
        out[i] = (w + sh.lambda[m]) * g[i] + (omega - w) * full;
    }
    return Field::from_coefficients(op.grid(), std::move(out));
}

Decomposition trace_decomposition(const PointInteraction& op, cplx omega, const Field& u)
{
    check_grid(op, u);
    check_off_cut(omega, "trace_decomposition");
    Decomposition dec;
    dec.omega = omega;
    dec.coeff = point_eval_zero(u) / op.inverse_strength();
    dec.regular = u - sample_green(op.grid(), omega).scaled(dec.coeff);
    return dec;
}

Field apply_shifted(const PointInteraction& op, cplx omega, const Field& u)
{
    check_grid(op, u);
    const auto& sh = op.shells();
    const auto& c = u.coefficients();
    const cplx delta = point_eval_zero(u) / op.inverse_strength() * std::pow(2.0 * pi, -0.5 * op.d());
    std::vector<cplx> out(c.size());
    for (std::size_t i = 0; i < c.size(); ++i)
        out[i] = (omega + sh.lambda[sh.id[i]]) * c[i] - delta;
    return Field::from_coefficients(op.grid(), std::move(out));
}

namespace {

Field combine_free_and_rank_one(const PointInteraction& op, double s, double omega, const Field& f,
                                const std::vector<cplx>& radial, double weight, cplx extra_green)
{
    const auto& sh = op.shells();
    const auto& c = f.coefficients();
    std::vector<cplx> sym(sh.size()), add(sh.size());
    for (std::size_t m = 0; m < sh.size(); ++m) {
        sym[m] = std::pow(omega + sh.lambda[m], 0.5 * s);
        add[m] = weight * radial[m] + extra_green * op.green_coeff(omega, m);
    }
    std::vector<cplx> out(c.size());
    for (std::size_t i = 0; i < c.size(); ++i)
        out[i] = sym[sh.id[i]] * c[i] + add[sh.id[i]];
    return Field::from_coefficients(op.grid(), std::move(out));
}

}  // namespace

Field frac_neg(const PointInteraction& op, double s, double omega, const Field& f, const QuadratureScheme& scheme)
{
    check_grid(op, f);
    check_s(s, "frac_neg");
    check_positive_shift(op, omega, "frac_neg");
    auto r = rank_one_integrals(op, s, -1, omega, f, scheme, true, false);
    return combine_free_and_rank_one(op, -s, omega, f, r.radial, std::sin(0.5 * s * pi) / pi, 0.0);
}

Field frac_pos(const PointInteraction& op, double s, double omega, const Field& phi, const QuadratureScheme& scheme)
{
    check_grid(op, phi);
    check_s(s, "frac_pos");
    check_positive_shift(op, omega, "frac_pos");
    auto r = rank_one_integrals(op, s, +1, omega, phi, scheme, true, false);
    return combine_free_and_rank_one(op, s, omega, phi, r.radial, -std::sin(0.5 * s * pi) / pi, 0.0);
}

cplx c_s_functional(const PointInteraction& op, double s, double omega, const Field& f,
                    const QuadratureScheme& scheme)
{
    check_grid(op, f);
    check_s(s, "c_s_functional");
    check_positive_shift(op, omega, "c_s_functional");
    auto r = rank_one_integrals(op, s, -1, omega, f, scheme, false, true);
    return std::sin(0.5 * s * pi) / pi * r.scalar;
}

Decomposition decompose(const PointInteraction& op, double s, double omega, const Field& f,
                        const QuadratureScheme& scheme)
{
    check_grid(op, f);
    check_s(s, "decompose");
    check_positive_shift(op, omega, "decompose");
    auto r = rank_one_integrals(op, s, -1, omega, f, scheme, true, true);
    const double w = std::sin(0.5 * s * pi) / pi;
    Decomposition dec;
    dec.omega = omega;
    dec.coeff = w * r.scalar;
    dec.regular = combine_free_and_rank_one(op, -s, omega, f, r.radial, w, -dec.coeff);
    return dec;
}

void check_p_window(int d, double p)
{
    check_dimension(d);
    bool ok = d == 2 ? (p > 1.0 && std::isfinite(p)) : (p > 1.5 && p < 3.0);
    if (!ok) {
        std::ostringstream os;
        os << "p = " << p << " for d = " << d << " lies outside the admissible window (1,inf) if d=2, (3/2,3) if d=3";
        throw DomainError(os.str());
    }
}

double hspa_norm(const PointInteraction& op, const Field& phi, double s, double p, const QuadratureScheme& scheme)
{
    check_p_window(op.d(), p);
    check_s(s, "hspa_norm");
    return lp_norm(frac_pos(op, s, op.omega_ref(), phi, scheme), p);
}

Field project_ac(const PointInteraction& op, const Field& phi)
{
    check_grid(op, phi);
    if (!op.has_eigenvalue())
        return phi;
    const Field& psi = op.psi();
    const auto& a = phi.coefficients();
    const auto& b = psi.coefficients();
    cplx s = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i)
        s += a[i] * std::conj(b[i]);
    s *= std::pow(op.grid().dxi(), op.d());
    return phi.combine(1.0, psi, -s);
}

namespace {

double green_profile(int d, double rho)
{
    if (d == 3)
        return std::exp(-rho) / (4.0 * pi * rho);
    return bessel_k(0.0, rho) / (2.0 * pi);
}

}  // namespace

double green_lp_norm(int d, double omega, double p, const QuadratureScheme& scheme)
{
    check_dimension(d);
    if (!(omega > 0.0))
        throw DomainError("green_lp_norm: omega must be positive");
    if (!(p >= 1.0) || (d == 3 && !(p < 3.0)))
        throw DomainError("green_lp_norm: G_omega lies in L^p only for p in [1,3) if d=3, [1,inf) if d=2");
    const double k = std::sqrt(omega);
    const double sphere = d == 3 ? 4.0 * pi : 2.0 * pi;
    auto f = [&](double r) {
        double g = std::pow(omega, 0.5 * d - 1.0) * green_profile(d, k * r);
        return sphere * std::pow(std::fabs(g), p) * std::pow(r, d - 1.0);
    };
    double power_lo = d == 3 ? 2.0 - p : 1.0;
    double v = integrate_half_line_scalar(f, scheme, 1.0 / k, power_lo, -2.0);
    return std::pow(v, 1.0 / p);
}

double weighted_green_integral(int d, double s, double A, double omega, double r, const QuadratureScheme& scheme)
{
    check_dimension(d);
    if (!(omega > 0.0) || !(r > 0.0))
        throw DomainError("weighted_green_integral: omega and r must be positive");
    auto f = [&](double t) {
        double z = omega + t;
        return std::pow(t, -0.5 * s) * std::pow(z, A - 1.0) * green_profile(d, std::sqrt(z) * r);
    };
    HalfLineProblem prob;
    prob.dim = 1;
    prob.eval = [&](double t, cplx* out) { out[0] = f(t); };
    prob.norm = [](const cplx* v) { return std::abs(v[0]); };
    prob.power_lo = -0.5 * s;
    prob.power_hi = -2.0;
    prob.onset_lo = omega;
    double split = std::max(omega, 1.0 / (r * r));
    return integrate_half_line(prob, scheme, split, 0.0).value[0].real();
}

WeightedSup weighted_green_sup(int d, double s, double p, double omega, double r_lo, double r_hi, int points,
                               const QuadratureScheme& scheme)
{
    if (!(r_lo > 0.0 && r_hi > r_lo) || points < 2)
        throw DomainError("weighted_green_sup: need 0 < r_lo < r_hi and at least two points");
    const double A = d / (2.0 * p);
    WeightedSup out;
    for (int i = 0; i < points; ++i) {
        double r = r_lo * std::pow(r_hi / r_lo, static_cast<double>(i) / (points - 1));
        double v = std::pow(r, 2.0 * A - s) * weighted_green_integral(d, s, A, omega, r, scheme);
        if (v > out.sup) {
            out.sup = v;
            out.argmax = r;
        }
    }
    return out;
}

}  // namespace deltalap
