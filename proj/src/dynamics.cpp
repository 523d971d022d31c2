#include "deltalap/dynamics.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <sstream>

#include "deltalap/errors.hpp"

namespace deltalap {

double EvolutionTrace::max_mass_drift() const
{
    double m = 0.0;
    if (mass.empty() || mass[0] == 0.0)
        return 0.0;
    for (double x : mass)
        m = std::max(m, std::fabs(x - mass[0]) / mass[0]);
    return m;
}

namespace {

double coeff_mass(const GridSpec& g, const std::vector<cplx>& c)
{
    double s = 0.0;
    for (const auto& z : c)
        s += std::norm(z);
    return s * std::pow(g.dxi(), g.d);
}

cplx coeff_inner(const GridSpec& g, const std::vector<cplx>& a, const std::vector<cplx>& b)
{
    cplx s = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i)
        s += a[i] * std::conj(b[i]);
    return s * std::pow(g.dxi(), g.d);
}

double coeff_distance(const GridSpec& g, const std::vector<cplx>& a, const std::vector<cplx>& b)
{
    double s = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i)
        s += std::norm(a[i] - b[i]);
    return std::sqrt(s * std::pow(g.dxi(), g.d));
}

void check_step(double T, double tau)
{
    if (!(tau > 0.0) || !std::isfinite(tau))
        throw DomainError("time step tau must be positive");
    if (!(T >= tau))
        throw DomainError("horizon T must be at least tau");
}

int step_count(double T, double tau)
{
    return static_cast<int>(std::llround(T / tau));
}

struct Recorder {
    const PointInteraction& op;
    const RecordOptions& rec;
    EvolutionTrace& trace;

    void operator()(double t, const std::vector<cplx>& c)
    {
        trace.times.push_back(t);
        trace.mass.push_back(coeff_mass(op.grid(), c));
        if (!rec.keep_states && !rec.energy && rec.lp.empty())
            return;
        Field f = Field::from_coefficients(op.grid(), c);
        for (double p : rec.lp)
            trace.lp_records[p].push_back(lp_norm(f, p));
        if (rec.energy)
            trace.energy.push_back(mass_energy(op, f, rec.energy_p_nl, rec.energy_mu, rec.scheme).second);
        if (rec.keep_states)
            trace.states.push_back(std::move(f));
    }
};

}  // namespace

CnStepper::CnStepper(const PointInteraction& op, double tau) : op_(&op), tau_(tau)
{
    if (!(tau > 0.0) || !std::isfinite(tau))
        throw DomainError("CnStepper: tau must be positive");
    w_ = cplx(0.0, -2.0 / tau);
    const Shells& sh = op.shells();
    inv_.resize(sh.size());
    gc_.resize(sh.size());
    for (std::size_t m = 0; m < sh.size(); ++m) {
        inv_[m] = 1.0 / (w_ + sh.lambda[m]);
        gc_[m] = op.green_coeff(w_, m);
    }
    cplx k = op.coupling(w_);
    if (std::abs(k) < 1e-8)
        throw ConditioningError("CnStepper: coupling nearly vanishes at the Crank-Nicolson shift");
    a_scale_ = std::pow(op.grid().dxi(), op.d()) * std::pow(2.0 * pi, -0.5 * op.d()) / k;
}

void CnStepper::step(std::vector<cplx>& c) const
{
    const PointInteraction& op = *op_;
    const Shells& sh = op.shells();
    cplx b = 0.0;
    const std::vector<cplx>* psi = nullptr;
    if (op.has_eigenvalue()) {
        psi = &op.psi().coefficients();
        b = coeff_inner(op.grid(), c, *psi);
        for (std::size_t i = 0; i < c.size(); ++i)
            c[i] -= b * (*psi)[i];
    }
    std::vector<cplx> sums = shell_sums(sh, c);
    cplx a = 0.0;
    for (std::size_t m = 0; m < sums.size(); ++m)
        a += sums[m] * inv_[m];
    a *= a_scale_;
    const cplx two_w = 2.0 * w_;
    for (std::size_t i = 0; i < c.size(); ++i) {
        const std::size_t m = sh.id[i];
        c[i] = two_w * (c[i] * inv_[m] + a * gc_[m]) - c[i];
    }
    if (psi) {
        cplx phase = std::exp(cplx(0.0, tau_ * op.eigenvalue())) * b;
        for (std::size_t i = 0; i < c.size(); ++i)
            c[i] += phase * (*psi)[i];
    }
}

EvolutionTrace propagate_linear(const PointInteraction& op, const Field& u0, double T, double tau,
                                const RecordOptions& rec)
{
    check_step(T, tau);
    if (!(u0.grid() == op.grid()))
        throw DomainError("propagate_linear: field grid differs from the model grid");
    if (rec.every < 1)
        throw DomainError("propagate_linear: record interval must be >= 1");
    CnStepper cn(op, tau);
    const int N = step_count(T, tau);
    EvolutionTrace trace;
    Recorder record{op, rec, trace};
    std::vector<cplx> c = u0.coefficients();
    record(0.0, c);
    const double m0 = trace.mass[0];
    double m_prev = m0;
    for (int k = 1; k <= N; ++k) {
        cn.step(c);
        const double m = coeff_mass(op.grid(), c);
        if (m0 > 0.0)
            trace.max_step_mass_change = std::max(trace.max_step_mass_change, std::fabs(m - m_prev) / m0);
        m_prev = m;
        if (k % rec.every == 0 || k == N)
            record(k * tau, c);
    }
    return trace;
}

double data_frequency_radius(const Field& u)
{
    auto sh = shells_for(u.grid());
    std::vector<double> mass(sh->size(), 0.0);
    const auto& c = u.coefficients();
    for (std::size_t i = 0; i < c.size(); ++i)
        mass[sh->id[i]] += std::norm(c[i]);
    const double total = std::accumulate(mass.begin(), mass.end(), 0.0);
    if (total == 0.0)
        return 0.0;
    double outside = 0.0;
    for (std::size_t m = sh->size(); m-- > 0;) {
        outside += mass[m];
        if (outside > 1e-6 * total)
            return std::sqrt(sh->lambda[m]);
    }
    return 0.0;
}

double reflection_time(const Field& u)
{
    double xi = data_frequency_radius(u);
    if (xi == 0.0)
        return std::numeric_limits<double>::infinity();
    return (u.grid().L / 4.0) / (2.0 * xi);
}

std::vector<DecayFit> dispersive_decay_fits(const PointInteraction& op, const Field& u0, const std::vector<double>& ps,
                                            const std::vector<double>& times, double tau)
{
    const int d = op.d();
    for (double p : ps) {
        if (!(p >= 2.0) || (d == 3 && !(p < 3.0)) || !std::isfinite(p)) {
            std::ostringstream os;
            os << "dispersive_decay_fit: p = " << p << " outside [2,inf) if d=2, [2,3) if d=3";
            throw DomainError(os.str());
        }
    }
    Field u = project_ac(op, u0);
    DecayFit proto;
    // band of the datum itself: the subtracted bound state part is broadband but does not travel
    proto.xi_data = data_frequency_radius(u0);
    proto.t_max = reflection_time(u0);

    std::vector<double> ts;
    for (double t : times)
        if (t > 0.0 && t <= proto.t_max)
            ts.push_back(t);
    std::sort(ts.begin(), ts.end());
    ts.erase(std::unique(ts.begin(), ts.end()), ts.end());
    if (ts.size() < 3 || ts.back() < 10.0 * ts.front()) {
        std::ostringstream os;
        os << "dispersive_decay_fit: usable window ";
        if (ts.empty())
            os << "is empty";
        else
            os << "[" << ts.front() << ", " << ts.back() << "]";
        os << " is shorter than one decade (reflection bound " << proto.t_max << ")";
        throw InsufficientWindowError(os.str());
    }

    std::vector<DecayFit> fits(ps.size(), proto);
    CnStepper cn(op, tau);
    std::vector<cplx> c = u.coefficients();
    int k = 0;
    for (double t : ts) {
        int target = std::max(1, step_count(t, tau));
        for (; k < target; ++k)
            cn.step(c);
        Field f = Field::from_coefficients(op.grid(), c);
        for (std::size_t j = 0; j < ps.size(); ++j) {
            fits[j].times.push_back(k * tau);
            fits[j].norms.push_back(lp_norm(f, ps[j]));
        }
    }
    for (auto& fit : fits) {
        const std::size_t n = fit.times.size();
        double sx = 0, sy = 0, sxx = 0, sxy = 0;
        for (std::size_t i = 0; i < n; ++i) {
            double x = std::log(fit.times[i]), y = std::log(fit.norms[i]);
            sx += x;
            sy += y;
            sxx += x * x;
            sxy += x * y;
        }
        fit.slope = (n * sxy - sx * sy) / (n * sxx - sx * sx);
        fit.intercept = (sy - fit.slope * sx) / n;
        fit.t_lo = fit.times.front();
        fit.t_hi = fit.times.back();
    }
    return fits;
}

DecayFit dispersive_decay_fit(const PointInteraction& op, const Field& u0, double p, const std::vector<double>& times,
                              double tau)
{
    return dispersive_decay_fits(op, u0, {p}, times, tau).front();
}

void check_strichartz_pair(int d, double q, double r)
{
    check_dimension(d);
    std::ostringstream os;
    if (!(r >= 2.0))
        os << "r = " << r << " violates r >= 2";
    else if (d == 2 && !std::isfinite(r))
        os << "r = inf is excluded for d=2";
    else if (d == 3 && !(r < 3.0))
        os << "r = " << r << " violates r < 3 for d=3";
    else if (d == 2 && !(q > 2.0))
        os << "q = " << q << " violates q > 2 for d=2";
    else if (d == 3 && !(q > 4.0))
        os << "q = " << q << " violates q > 4 for d=3";
    else {
        double lhs = std::isinf(q) ? 0.0 : 2.0 / q;
        if (std::fabs(lhs + d / r - 0.5 * d) > 1e-9)
            os << "(q, r) = (" << q << ", " << r << ") violates 2/q + d/r = d/2";
    }
    if (!os.str().empty())
        throw DomainError("strichartz: " + os.str());
}

std::vector<std::vector<double>> strichartz_ratios(const PointInteraction& op, const Field& u0,
                                                   const std::vector<std::pair<double, double>>& pairs,
                                                   const std::vector<double>& horizons, double tau)
{
    for (const auto& [q, r] : pairs)
        check_strichartz_pair(op.d(), q, r);
    if (horizons.empty())
        throw DomainError("strichartz: no horizon given");
    for (double T : horizons)
        check_step(T, tau);
    std::vector<std::vector<double>> out(pairs.size(), std::vector<double>(horizons.size(), 0.0));
    const double n0 = l2_norm(u0);
    if (n0 == 0.0)
        return out;
    std::vector<int> ends;
    for (double T : horizons)
        ends.push_back(step_count(T, tau));
    const int N = *std::max_element(ends.begin(), ends.end());

    Field u = project_ac(op, u0);
    CnStepper cn(op, tau);
    std::vector<cplx> c = u.coefficients();
    std::vector<double> acc(pairs.size(), 0.0), prev(pairs.size(), 0.0);
    for (int k = 0; k <= N; ++k) {
        if (k > 0)
            cn.step(c);
        Field f = k == 0 ? u : Field::from_coefficients(op.grid(), c);
        for (std::size_t i = 0; i < pairs.size(); ++i) {
            const double q = pairs[i].first;
            const double v = lp_norm(f, pairs[i].second);
            double cur;
            if (std::isinf(q)) {
                acc[i] = std::max(acc[i], v);
                cur = acc[i];
            } else {
                double vq = std::pow(v, q);
                // trapezoid: the running sum holds full weights, the endpoint correction is applied on read
                if (k > 0)
                    acc[i] += 0.5 * tau * (prev[i] + vq);
                prev[i] = vq;
                cur = std::pow(acc[i], 1.0 / q);
            }
            for (std::size_t j = 0; j < ends.size(); ++j)
                if (ends[j] == k)
                    out[i][j] = cur / n0;
        }
    }
    return out;
}

double strichartz_ratio(const PointInteraction& op, const Field& u0, double q, double r, double T, double tau)
{
    return strichartz_ratios(op, u0, {{q, r}}, {T}, tau)[0][0];
}

void NlsProblem::validate() const
{
    if (!op)
        throw DomainError("nls: no operator");
    if (!(p_nl > 1.0))
        throw DomainError("nls: p_nl must exceed 1");
    if (mu != 1.0 && mu != -1.0 && mu != 0.0)
        throw DomainError("nls: mu must be +1 or -1 (0 switches the nonlinearity off)");
    check_step(T, tau);
    if (u0.empty() || !(u0.grid() == op->grid()))
        throw DomainError("nls: initial datum missing or on another grid");
}

Field nonlinearity(const Field& u, double p_nl)
{
    std::vector<cplx> v = u.values();
    const double e = p_nl - 1.0;
    for (auto& z : v) {
        double a = std::abs(z);
        z = a == 0.0 ? cplx(0.0) : z * std::pow(a, e);
    }
    return Field::from_values(u.grid(), std::move(v));
}

namespace {

void phase_half(std::vector<cplx>& v, double mu, double p_nl, double dt)
{
    const double e = p_nl - 1.0;
    for (auto& z : v) {
        double a = std::abs(z);
        if (a == 0.0)
            continue;
        z *= std::exp(cplx(0.0, -mu * dt * std::pow(a, e)));
    }
}

void strang_step(const NlsProblem& prob, const CnStepper& cn, std::vector<cplx>& vals, std::vector<cplx>& coeffs)
{
    const GridSpec& g = prob.op->grid();
    phase_half(vals, prob.mu, prob.p_nl, 0.5 * prob.tau);
    to_coefficients(g, vals, coeffs);
    cn.step(coeffs);
    to_values(g, coeffs, vals);
    phase_half(vals, prob.mu, prob.p_nl, 0.5 * prob.tau);
}

}  // namespace

Field nls_strang_step(const NlsProblem& prob, const Field& u)
{
    prob.validate();
    CnStepper cn(*prob.op, prob.tau);
    std::vector<cplx> vals = u.values(), coeffs;
    strang_step(prob, cn, vals, coeffs);
    return Field::from_values(u.grid(), std::move(vals));
}

EvolutionTrace nls_strang(const NlsProblem& prob, const RecordOptions& rec)
{
    prob.validate();
    const PointInteraction& op = *prob.op;
    CnStepper cn(op, prob.tau);
    const int N = step_count(prob.T, prob.tau);
    EvolutionTrace trace;
    Recorder record{op, rec, trace};
    std::vector<cplx> vals = prob.u0.values(), coeffs = prob.u0.coefficients();
    record(0.0, coeffs);
    const double m0 = trace.mass[0];
    double m_prev = m0;
    for (int k = 1; k <= N; ++k) {
        strang_step(prob, cn, vals, coeffs);
        // coeffs holds the state after the linear substep; the phase substeps leave |u| unchanged
        const double m = coeff_mass(op.grid(), coeffs);
        if (m0 > 0.0)
            trace.max_step_mass_change = std::max(trace.max_step_mass_change, std::fabs(m - m_prev) / m0);
        m_prev = m;
        if (k % rec.every == 0 || k == N) {
            to_coefficients(op.grid(), vals, coeffs);
            for (const auto& z : vals)
                if (!std::isfinite(z.real()) || !std::isfinite(z.imag()))
                    throw DomainError("nls: solution blew up (non-finite values) at t = " +
                                      std::to_string(k * prob.tau));
            record(k * prob.tau, coeffs);
        }
    }
    return trace;
}

DuhamelResult duhamel_solve(const NlsProblem& prob, double tol, int max_iter)
{
    prob.validate();
    if (!(tol > 0.0) || max_iter < 1)
        throw DomainError("duhamel_solve: tol must be positive and max_iter >= 1");
    const PointInteraction& op = *prob.op;
    const GridSpec& g = op.grid();
    const double tau = prob.tau;
    const int N = step_count(prob.T, tau);
    CnStepper cn(op, tau);

    // linear flow of the datum
    std::vector<std::vector<cplx>> lin(N + 1);
    lin[0] = prob.u0.coefficients();
    for (int n = 1; n <= N; ++n) {
        lin[n] = lin[n - 1];
        cn.step(lin[n]);
    }
    double scale = 0.0;
    for (const auto& c : lin)
        scale = std::max(scale, std::sqrt(coeff_mass(g, c)));

    DuhamelResult res;
    std::vector<std::vector<cplx>> cur = lin, next(N + 1);
    std::vector<cplx> vals, F, A, V;
    const cplx mi = cplx(0.0, -prob.mu);
    for (int it = 1; it <= max_iter; ++it) {
        for (int n = 0; n <= N; ++n) {
            to_values(g, cur[n], vals);
            const double e = prob.p_nl - 1.0;
            for (auto& z : vals) {
                double a = std::abs(z);
                z = a == 0.0 ? cplx(0.0) : z * std::pow(a, e);
            }
            to_coefficients(g, vals, F);
            if (n == 0) {
                A = F;
                V = F;
                next[0] = lin[0];
                continue;
            }
            cn.step(A);
            cn.step(V);
            for (std::size_t i = 0; i < A.size(); ++i)
                A[i] += F[i];
            next[n].resize(F.size());
            for (std::size_t i = 0; i < F.size(); ++i)
                next[n][i] = lin[n][i] + mi * tau * (A[i] - 0.5 * V[i] - 0.5 * F[i]);
        }
        double dist = 0.0;
        for (int n = 0; n <= N; ++n)
            dist = std::max(dist, coeff_distance(g, next[n], cur[n]));
        if (!std::isfinite(dist))
            throw DomainError("duhamel_solve: iterate became non-finite");
        if (!res.distances.empty())
            res.ratios.push_back(res.distances.back() > 0.0 ? dist / res.distances.back() : 0.0);
        res.distances.push_back(dist);
        cur.swap(next);
        res.iterations = it;
        if (dist <= tol * std::max(scale, 1e-300)) {
            res.converged = true;
            break;
        }
    }
    if (!res.converged) {
        std::ostringstream os;
        os << "no contraction within " << max_iter << " iterations at T = " << prob.T << "; ratios:";
        for (double r : res.ratios)
            os << ' ' << r;
        res.report = os.str();
    }
    for (int n = 0; n <= N; ++n) {
        res.trace.times.push_back(n * tau);
        res.trace.mass.push_back(coeff_mass(g, cur[n]));
        res.trace.states.push_back(Field::from_coefficients(g, std::move(cur[n])));
    }
    return res;
}

std::pair<double, double> mass_energy(const PointInteraction& op, const Field& u, double p_nl, double mu,
                                      const QuadratureScheme& scheme)
{
    const double m = std::pow(l2_norm(u), 2);
    if (m == 0.0)
        return {0.0, 0.0};
    const double w = op.omega_ref();
    const double kin = std::pow(l2_norm(frac_pos(op, 1.0, w, u, scheme)), 2);
    double e = 0.5 * kin - 0.5 * w * m;
    if (mu != 0.0)
        e += mu / (p_nl + 1.0) * std::pow(lp_norm(u, p_nl + 1.0), p_nl + 1.0);
    return {m, e};
}

void check_nonlinear_window(double s, double p, double ell, double ell1)
{
    std::ostringstream os;
    os << "nonlinear estimate (s, p, l, l1) = (" << s << ", " << p << ", " << ell << ", " << ell1 << "): ";
    auto fail = [&](const std::string& why) { throw DomainError(os.str() + why); };
    if (!(s >= 0.0 && s < 1.0))
        fail("s must lie in [0,1)");
    if (!(p > 1.0 && p < 2.0))
        fail("p must lie in (1,2)");
    if (!(p + s < 2.0))
        fail("p + s < 2 fails");
    if (!(ell > 1.5 && ell <= 2.0))
        fail("l must lie in (3/2,2]");
    if (!(ell1 >= 2.0 && ell1 < 3.0))
        fail("l1 must lie in [2,3)");
    const double X = p / ell1 - 1.0 / ell;
    if (!(X > (p - 2.0) / 3.0))
        fail("(p-2)/3 < p/l1 - 1/l fails");
    if (p + s < 1.5) {
        if (!(X <= 0.5 * s * (p - 1.0)))
            fail("p/l1 - 1/l <= s(p-1)/2 fails (regime p+s < 3/2)");
    } else if (s < 0.5) {
        if (!(X <= p / 6.0 - s / 3.0))
            fail("p/l1 - 1/l <= p/6 - s/3 fails (regime 3/2 <= p+s < 2, s < 1/2)");
    } else if (!(X <= s * (p - 1.0) / 3.0)) {
        fail("p/l1 - 1/l <= s(p-1)/3 fails (regime 3/2 <= p+s < 2, s >= 1/2)");
    }
    if (!(p + s < 3.0 / ell))
        fail("p + s < 3/l fails");
}

double nonlinear_estimate_ratio(const PointInteraction& op, const Field& phi, double s, double p_nl, double ell,
                                double ell1, const QuadratureScheme& scheme)
{
    if (op.d() != 3)
        throw DomainError("nonlinear_estimate_ratio: the estimate is stated for d=3");
    check_nonlinear_window(s, p_nl, ell, ell1);
    if (l2_norm(phi) == 0.0)
        return 0.0;
    const double num = hsp_norm(nonlinearity(phi, p_nl), s, ell);
    const double den = std::pow(hspa_norm(op, phi, s, ell1, scheme), p_nl);
    return num / den;
}

}  // namespace deltalap
