#include "deltalap/grid.hpp"

#include <bit>
#include <cmath>
#include <cstring>
#include <limits>
#include <map>
#include <mutex>
#include <sstream>
#include <tuple>

#include <json.hpp>

#include "deltalap/errors.hpp"
#include "deltalap/io.hpp"

namespace deltalap {

std::size_t GridSpec::size() const
{
    std::size_t total = 1;
    for (int i = 0; i < d; ++i)
        total *= static_cast<std::size_t>(n);
    return total;
}

void GridSpec::validate() const
{
    check_dimension(d);
    if (n < 8 || (n & (n - 1)) != 0)
        throw DomainError("grid: n must be a power of two >= 8, got " + std::to_string(n));
    if (!(L > 0.0) || !std::isfinite(L))
        throw DomainError("grid: box length L must be positive");
}

Field Field::from_values(const GridSpec& g, std::vector<cplx> values)
{
    g.validate();
    if (values.size() != g.size())
        throw DomainError("Field: sample array has wrong size");
    Field f;
    f.grid_ = g;
    auto coeffs = std::make_shared<std::vector<cplx>>();
    to_coefficients(g, values, *coeffs);
    f.values_ = std::make_shared<const std::vector<cplx>>(std::move(values));
    f.coeffs_ = std::move(coeffs);
    return f;
}

Field Field::from_coefficients(const GridSpec& g, std::vector<cplx> coeffs)
{
    g.validate();
    if (coeffs.size() != g.size())
        throw DomainError("Field: coefficient array has wrong size");
    Field f;
    f.grid_ = g;
    auto values = std::make_shared<std::vector<cplx>>();
    to_values(g, coeffs, *values);
    f.coeffs_ = std::make_shared<const std::vector<cplx>>(std::move(coeffs));
    f.values_ = std::move(values);
    return f;
}

Field Field::zeros(const GridSpec& g)
{
    g.validate();
    Field f;
    f.grid_ = g;
    auto z = std::make_shared<const std::vector<cplx>>(g.size(), cplx(0.0));
    f.values_ = z;
    f.coeffs_ = z;
    return f;
}

Field Field::sample(const GridSpec& g, const std::function<cplx(const std::array<double, 3>&)>& fn)
{
    g.validate();
    std::vector<cplx> v(g.size());
    const int n = g.n;
    const double h = g.h(), x0 = -0.5 * g.L;
    std::size_t idx = 0;
    std::array<double, 3> x{0.0, 0.0, 0.0};
    if (g.d == 2) {
        for (int i = 0; i < n; ++i)
            for (int j = 0; j < n; ++j) {
                x[0] = x0 + i * h;
                x[1] = x0 + j * h;
                v[idx++] = fn(x);
            }
    } else {
        for (int i = 0; i < n; ++i)
            for (int j = 0; j < n; ++j)
                for (int k = 0; k < n; ++k) {
                    x[0] = x0 + i * h;
                    x[1] = x0 + j * h;
                    x[2] = x0 + k * h;
                    v[idx++] = fn(x);
                }
    }
    return from_values(g, std::move(v));
}

Field Field::scaled(cplx a) const
{
    return combine(a, *this, 0.0);
}

Field Field::combine(cplx a, const Field& other, cplx b) const
{
    if (!(other.grid_ == grid_))
        throw DomainError("Field: grids differ");
    const auto& v1 = values();
    const auto& v2 = other.values();
    const auto& c1 = coefficients();
    const auto& c2 = other.coefficients();
    auto v = std::make_shared<std::vector<cplx>>(v1.size());
    auto c = std::make_shared<std::vector<cplx>>(c1.size());
    for (std::size_t i = 0; i < v1.size(); ++i) {
        (*v)[i] = a * v1[i] + b * v2[i];
        (*c)[i] = a * c1[i] + b * c2[i];
    }
    Field f;
    f.grid_ = grid_;
    f.values_ = std::move(v);
    f.coeffs_ = std::move(c);
    return f;
}

Field operator+(const Field& a, const Field& b) { return a.combine(1.0, b, 1.0); }
Field operator-(const Field& a, const Field& b) { return a.combine(1.0, b, -1.0); }
Field operator*(cplx a, const Field& f) { return f.scaled(a); }

namespace {

std::mutex shell_mutex;
std::map<std::tuple<int, int, double>, std::shared_ptr<const Shells>> shell_cache;

template <class F>
void for_each_mode(const GridSpec& g, F&& f)
{
    const int n = g.n;
    std::size_t idx = 0;
    if (g.d == 2) {
        for (int i = 0; i < n; ++i) {
            int ki = signed_index(i, n);
            for (int j = 0; j < n; ++j, ++idx) {
                int kj = signed_index(j, n);
                f(idx, ki, kj, 0);
            }
        }
    } else {
        for (int i = 0; i < n; ++i) {
            int ki = signed_index(i, n);
            for (int j = 0; j < n; ++j) {
                int kj = signed_index(j, n);
                for (int k = 0; k < n; ++k, ++idx)
                    f(idx, ki, kj, signed_index(k, n));
            }
        }
    }
}

}  // namespace

std::shared_ptr<const Shells> shells_for(const GridSpec& g)
{
    g.validate();
    std::lock_guard<std::mutex> lock(shell_mutex);
    auto key = std::make_tuple(g.d, g.n, g.L);
    auto it = shell_cache.find(key);
    if (it != shell_cache.end())
        return it->second;

    auto sh = std::make_shared<Shells>();
    sh->grid = g;
    const int half = g.n / 2;
    const int mmax = g.d * half * half;
    std::vector<std::int64_t> shell_of_m(mmax + 1, -1);
    std::vector<double> counts(mmax + 1, 0.0);
    for_each_mode(g, [&](std::size_t, int a, int b, int c) { counts[a * a + b * b + c * c] += 1.0; });
    const double dxi2 = g.dxi() * g.dxi();
    for (int m = 0; m <= mmax; ++m) {
        if (counts[m] == 0.0)
            continue;
        shell_of_m[m] = static_cast<std::int64_t>(sh->lambda.size());
        sh->lambda.push_back(m * dxi2);
        sh->count.push_back(counts[m]);
    }
    sh->id.resize(g.size());
    for_each_mode(g, [&](std::size_t idx, int a, int b, int c) {
        sh->id[idx] = static_cast<std::uint32_t>(shell_of_m[a * a + b * b + c * c]);
    });
    // keep memory bounded when many box sizes are explored
    if (shell_cache.size() > 8)
        shell_cache.clear();
    shell_cache.emplace(key, sh);
    return sh;
}

std::vector<cplx> shell_sums(const Shells& sh, const std::vector<cplx>& coeffs)
{
    std::vector<cplx> out(sh.size(), cplx(0.0));
    for (std::size_t i = 0; i < coeffs.size(); ++i)
        out[sh.id[i]] += coeffs[i];
    return out;
}

Field field_from_radial(const Shells& sh, const std::vector<cplx>& radial)
{
    std::vector<cplx> c(sh.id.size());
    for (std::size_t i = 0; i < c.size(); ++i)
        c[i] = radial[sh.id[i]];
    return Field::from_coefficients(sh.grid, std::move(c));
}

std::vector<cplx> radial_symbol(const Shells& sh, const std::function<cplx(double)>& symbol)
{
    std::vector<cplx> r(sh.size());
    for (std::size_t m = 0; m < r.size(); ++m) {
        r[m] = symbol(sh.lambda[m]);
        if (!std::isfinite(r[m].real()) || !std::isfinite(r[m].imag())) {
            std::ostringstream os;
            os << "multiplier is not finite at |xi|^2 = " << sh.lambda[m];
            throw DomainError(os.str());
        }
    }
    return r;
}

double lp_norm(const Field& f, double p)
{
    if (!(p >= 1.0))
        throw DomainError("lp_norm: p must be >= 1, got " + std::to_string(p));
    const auto& v = f.values();
    if (std::isinf(p)) {
        double m = 0.0;
        for (const auto& z : v)
            m = std::max(m, std::abs(z));
        return m;
    }
    const double hd = std::pow(f.grid().h(), f.grid().d);
    double sum = 0.0;
    if (p == 2.0) {
        for (const auto& z : v)
            sum += std::norm(z);
        return std::sqrt(sum * hd);
    }
    double scale = 0.0;
    for (const auto& z : v)
        scale = std::max(scale, std::abs(z));
    if (scale == 0.0)
        return 0.0;
    for (const auto& z : v)
        sum += std::pow(std::abs(z) / scale, p);
    return scale * std::pow(sum * hd, 1.0 / p);
}

double l2_norm(const Field& f)
{
    return lp_norm(f, 2.0);
}

cplx inner(const Field& f, const Field& g)
{
    if (!(f.grid() == g.grid()))
        throw DomainError("inner: grids differ");
    const auto& a = f.values();
    const auto& b = g.values();
    cplx s = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i)
        s += a[i] * std::conj(b[i]);
    return s * std::pow(f.grid().h(), f.grid().d);
}

Field apply_multiplier(const Field& f, const std::function<cplx(const std::array<double, 3>&)>& m)
{
    const GridSpec& g = f.grid();
    const auto& c = f.coefficients();
    std::vector<cplx> out(c.size());
    const double dxi = g.dxi();
    for_each_mode(g, [&](std::size_t idx, int a, int b, int k) {
        std::array<double, 3> xi{a * dxi, b * dxi, k * dxi};
        cplx v = m(xi);
        if (!std::isfinite(v.real()) || !std::isfinite(v.imag())) {
            std::ostringstream os;
            os << "multiplier is not finite at xi = (" << xi[0] << ", " << xi[1];
            if (g.d == 3)
                os << ", " << xi[2];
            os << ")";
            throw DomainError(os.str());
        }
        out[idx] = v * c[idx];
    });
    return Field::from_coefficients(g, std::move(out));
}

Field apply_radial(const Field& f, const Shells& sh, const std::vector<cplx>& radial)
{
    const auto& c = f.coefficients();
    std::vector<cplx> out(c.size());
    for (std::size_t i = 0; i < c.size(); ++i)
        out[i] = radial[sh.id[i]] * c[i];
    return Field::from_coefficients(f.grid(), std::move(out));
}

Field apply_radial(const Field& f, const std::function<cplx(double)>& symbol)
{
    auto sh = shells_for(f.grid());
    return apply_radial(f, *sh, radial_symbol(*sh, symbol));
}

Field sample_green(const GridSpec& g, cplx omega, std::string* warning)
{
    check_off_cut(omega, "sample_green");
    auto sh = shells_for(g);
    const double norm = std::pow(2.0 * pi, -0.5 * g.d);
    auto radial = radial_symbol(*sh, [&](double xi2) { return norm / (omega + xi2); });
    if (warning) {
        warning->clear();
        if (std::sqrt(omega).real() < 5.0 / g.L)
            *warning = "sample_green: Re sqrt(omega) < 5/L, G_omega does not decay inside the box";
    }
    return field_from_radial(*sh, radial);
}

cplx point_eval_zero(const Field& f)
{
    const GridSpec& g = f.grid();
    cplx s = 0.0;
    for (const auto& c : f.coefficients())
        s += c;
    return s * std::pow(2.0 * pi, -0.5 * g.d) * std::pow(g.dxi(), g.d);
}

double smooth_taper(double t)
{
    if (t <= 0.0)
        return 1.0;
    if (t >= 1.0)
        return 0.0;
    double a = std::exp(-1.0 / (1.0 - t));
    double b = std::exp(-1.0 / t);
    return a / (a + b);
}

void write_field(const std::string& path_prefix, const Field& f)
{
    const auto& v = f.values();
    std::string bytes(v.size() * 8, '\0');
    char* out = bytes.data();
    for (const auto& z : v) {
        float parts[2] = {static_cast<float>(z.real()), static_cast<float>(z.imag())};
        for (float x : parts) {
            std::uint32_t u;
            std::memcpy(&u, &x, 4);
            if constexpr (std::endian::native == std::endian::big)
                u = ((u & 0xffu) << 24) | ((u & 0xff00u) << 8) | ((u >> 8) & 0xff00u) | (u >> 24);
            std::memcpy(out, &u, 4);
            out += 4;
        }
    }
    nlohmann::ordered_json side;
    side["d"] = f.grid().d;
    side["n"] = f.grid().n;
    side["L"] = f.grid().L;
    side["layout"] = "row-major";
    side["dtype"] = "complex64-le";
    write_file_atomic(path_prefix + ".bin", bytes);
    write_file_atomic(path_prefix + ".json", side.dump(2) + "\n");
}

Field read_field(const std::string& path_prefix)
{
    auto side = nlohmann::json::parse(read_file(path_prefix + ".json"));
    GridSpec g;
    g.d = side.at("d").get<int>();
    g.n = side.at("n").get<int>();
    g.L = side.at("L").get<double>();
    g.validate();
    if (side.at("layout").get<std::string>() != "row-major")
        throw DomainError("read_field: unsupported layout");
    std::string bytes = read_file(path_prefix + ".bin");
    if (bytes.size() != g.size() * 8)
        throw DomainError("read_field: binary size does not match the sidecar");
    std::vector<cplx> v(g.size());
    const char* in = bytes.data();
    for (auto& z : v) {
        float parts[2];
        for (float& x : parts) {
            std::uint32_t u;
            std::memcpy(&u, in, 4);
            if constexpr (std::endian::native == std::endian::big)
                u = ((u & 0xffu) << 24) | ((u & 0xff00u) << 8) | ((u >> 8) & 0xff00u) | (u >> 24);
            std::memcpy(&x, &u, 4);
            in += 4;
        }
        z = cplx(parts[0], parts[1]);
    }
    return Field::from_values(g, std::move(v));
}

}  // namespace deltalap
