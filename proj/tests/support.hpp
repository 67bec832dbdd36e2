#ifndef LSPADE_TESTS_SUPPORT_HPP
#define LSPADE_TESTS_SUPPORT_HPP

#include "lspade/numerics.hpp"

#include <complex>
#include <random>

namespace testing_support
{
using lspade::complex_t;
using lspade::cvector;

inline std::mt19937_64& rng()
{
    static std::mt19937_64 gen(20240613);
    return gen;
}

inline double uniform(double lo, double hi) { return std::uniform_real_distribution<double>(lo, hi)(rng()); }

inline int uniform_int(int lo, int hi) { return std::uniform_int_distribution<int>(lo, hi)(rng()); }

inline complex_t gaussian_complex()
{
    std::normal_distribution<double> n(0.0, 1.0);
    return {n(rng()), n(rng())};
}

inline cvector random_vector(std::size_t n)
{
    cvector v(n);
    for (auto& x : v)
        x = gaussian_complex();
    return v;
}

inline cvector random_unit_vector(std::size_t n)
{
    auto v = random_vector(n);
    const double s = lspade::detail::vector_norm(v);
    for (auto& x : v)
        x /= s;
    return v;
}

/// Uniform point in the disk |z - c| <= r.
inline complex_t in_disk(complex_t c, double r)
{
    const double rad = r * std::sqrt(uniform(0.0, 1.0));
    const double arg = uniform(0.0, 2.0 * 3.141592653589793);
    return c + std::polar(rad, arg);
}

inline lspade::HermitianMatrix random_hermitian(std::size_t n)
{
    lspade::HermitianMatrix h(n);
    for (std::size_t i = 0; i < n; ++i)
    {
        h(i, i) = uniform(-1.0, 1.0);
        for (std::size_t j = i + 1; j < n; ++j)
        {
            h(i, j) = gaussian_complex();
            h(j, i) = std::conj(h(i, j));
        }
    }
    return h;
}

/// max_k |a_k - b_k|
inline double max_diff(const cvector& a, const cvector& b)
{
    double d = 0.0;
    for (std::size_t k = 0; k < a.size(); ++k)
        d = std::max(d, std::abs(a[k] - b[k]));
    return d;
}

/// Distance between unit vectors modulo a global phase.
inline double phase_distance(const cvector& a, const cvector& b)
{
    complex_t dot = 0.0;
    for (std::size_t k = 0; k < a.size(); ++k)
        dot += std::conj(a[k]) * b[k];
    const complex_t ph = std::abs(dot) > 0.0 ? dot / std::abs(dot) : complex_t(1.0);
    double d = 0.0;
    for (std::size_t k = 0; k < a.size(); ++k)
        d = std::max(d, std::abs(a[k] * ph - b[k]));
    return d;
}
} // namespace testing_support

#endif
