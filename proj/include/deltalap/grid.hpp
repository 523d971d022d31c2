#pragma once

#include <array>
#include <complex>
#include <cstdint>
#include <functional>
#include <memory>
#include <string>
#include <vector>

#include "deltalap/specfun.hpp"

namespace deltalap {

// Uniform periodic grid on [-L/2, L/2)^d, x_j = -L/2 + j h, frequencies 2 pi k / L.
struct GridSpec {
    int d = 3;
    int n = 128;
    double L = 40.0;

    double h() const { return L / n; }
    double dxi() const { return 2.0 * pi / L; }
    std::size_t size() const;
    void validate() const;
    bool operator==(const GridSpec&) const = default;
};

// Immutable pair of physical samples and Fourier coefficients.
// Coefficients are stored in natural FFT order: array index q stands for k = q or q - n.
class Field {
public:
    Field() = default;

    static Field from_values(const GridSpec& g, std::vector<cplx> values);
    static Field from_coefficients(const GridSpec& g, std::vector<cplx> coeffs);
    static Field zeros(const GridSpec& g);
    static Field sample(const GridSpec& g, const std::function<cplx(const std::array<double, 3>&)>& f);

    const GridSpec& grid() const { return grid_; }
    const std::vector<cplx>& values() const { return *values_; }
    const std::vector<cplx>& coefficients() const { return *coeffs_; }
    bool empty() const { return !values_; }

    Field scaled(cplx a) const;
    // a*this + b*other, no transform needed
    Field combine(cplx a, const Field& other, cplx b) const;

private:
    GridSpec grid_;
    std::shared_ptr<const std::vector<cplx>> values_;
    std::shared_ptr<const std::vector<cplx>> coeffs_;
};

Field operator+(const Field& a, const Field& b);
Field operator-(const Field& a, const Field& b);
Field operator*(cplx a, const Field& f);

// Transforms between samples and coefficients; out may alias nothing in in.
void to_coefficients(const GridSpec& g, const std::vector<cplx>& values, std::vector<cplx>& coeffs);
void to_values(const GridSpec& g, const std::vector<cplx>& coeffs, std::vector<cplx>& values);

// signed lattice index for an array index along one axis
inline int signed_index(int q, int n) { return q < n / 2 ? q : q - n; }

// Lattice frequencies grouped by |k|^2. Radial symbols are evaluated once per shell.
struct Shells {
    GridSpec grid;
    std::vector<std::uint32_t> id;  // shell of each mode
    std::vector<double> lambda;     // |xi|^2 of each shell
    std::vector<double> count;      // number of modes in each shell
    std::size_t size() const { return lambda.size(); }
};

std::shared_ptr<const Shells> shells_for(const GridSpec& g);

// sums of coefficients over each shell
std::vector<cplx> shell_sums(const Shells& sh, const std::vector<cplx>& coeffs);
// field whose coefficient at every mode of shell m is radial[m]
Field field_from_radial(const Shells& sh, const std::vector<cplx>& radial);
// radial array of symbol(|xi|^2) per shell
std::vector<cplx> radial_symbol(const Shells& sh, const std::function<cplx(double)>& symbol);

double lp_norm(const Field& f, double p);
double l2_norm(const Field& f);
// int f conj(g)
cplx inner(const Field& f, const Field& g);

Field apply_multiplier(const Field& f, const std::function<cplx(const std::array<double, 3>&)>& m);
// multiplier depending on |xi|^2 only
Field apply_radial(const Field& f, const std::function<cplx(double)>& symbol);
Field apply_radial(const Field& f, const Shells& sh, const std::vector<cplx>& radial);

// band-limited G_omega; warning set when Re sqrt(omega) < 5/L
Field sample_green(const GridSpec& g, cplx omega, std::string* warning = nullptr);

// trigonometric interpolant at x = 0
cplx point_eval_zero(const Field& f);

// C-infinity step: 1 for t <= 0, 0 for t >= 1
double smooth_taper(double t);

// little-endian complex64 samples plus a JSON sidecar
void write_field(const std::string& path_prefix, const Field& f);
Field read_field(const std::string& path_prefix);

}  // namespace deltalap
