#include <fftw3.h>

#include <cmath>
#include <map>
#include <mutex>
#include <stdexcept>
#include <tuple>

#include "deltalap/grid.hpp"

namespace deltalap {

namespace {

std::mutex plan_mutex;
std::map<std::tuple<int, int, int>, fftw_plan> plan_cache;

// In-place plan usable on any array through fftw_execute_dft. Planning is not
// thread safe in FFTW, execution of an existing plan is.
fftw_plan plan_for(int d, int n, int sign)
{
    std::lock_guard<std::mutex> lock(plan_mutex);
    auto key = std::make_tuple(d, n, sign);
    auto it = plan_cache.find(key);
    if (it != plan_cache.end())
        return it->second;
    std::size_t total = 1;
    int dims[3];
    for (int i = 0; i < d; ++i) {
        dims[i] = n;
        total *= static_cast<std::size_t>(n);
    }
    fftw_complex* buf = fftw_alloc_complex(total);
    if (!buf)
        throw std::bad_alloc();
    fftw_plan p = fftw_plan_dft(d, dims, buf, buf, sign, FFTW_ESTIMATE | FFTW_UNALIGNED);
    fftw_free(buf);
    if (!p)
        throw std::runtime_error("FFTW planning failed");
    plan_cache.emplace(key, p);
    return p;
}

void flip_parity(const GridSpec& g, std::vector<cplx>& a)
{
    const int n = g.n;
    std::size_t idx = 0;
    if (g.d == 2) {
        for (int i = 0; i < n; ++i)
            for (int j = 0; j < n; ++j, ++idx)
                if ((i + j) & 1)
                    a[idx] = -a[idx];
    } else {
        for (int i = 0; i < n; ++i)
            for (int j = 0; j < n; ++j)
                for (int k = 0; k < n; ++k, ++idx)
                    if ((i + j + k) & 1)
                        a[idx] = -a[idx];
    }
}

}  // namespace

void to_coefficients(const GridSpec& g, const std::vector<cplx>& values, std::vector<cplx>& coeffs)
{
    coeffs = values;
    fftw_execute_dft(plan_for(g.d, g.n, FFTW_BACKWARD), reinterpret_cast<fftw_complex*>(coeffs.data()),
                     reinterpret_cast<fftw_complex*>(coeffs.data()));
    const double scale = std::pow(2.0 * pi, -0.5 * g.d) * std::pow(g.h(), g.d);
    for (auto& c : coeffs)
        c *= scale;
    flip_parity(g, coeffs);
}

void to_values(const GridSpec& g, const std::vector<cplx>& coeffs, std::vector<cplx>& values)
{
    values = coeffs;
    flip_parity(g, values);
    fftw_execute_dft(plan_for(g.d, g.n, FFTW_FORWARD), reinterpret_cast<fftw_complex*>(values.data()),
                     reinterpret_cast<fftw_complex*>(values.data()));
    const double scale = std::pow(2.0 * pi, -0.5 * g.d) * std::pow(g.dxi(), g.d);
    for (auto& v : values)
        v *= scale;
}

}  // namespace deltalap
