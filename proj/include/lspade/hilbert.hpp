#ifndef LSPADE_HILBERT_HPP
#define LSPADE_HILBERT_HPP

#include "lspade/error.hpp"
#include "lspade/numerics.hpp"

#include <cmath>
#include <complex>
#include <cstddef>
#include <string>
#include <utility>
#include <vector>

namespace lspade
{
enum class WeightKind
{
    L2,
    Energy,
};

/// Diagonal inner-product weights over a fixed orthogonal mode basis. For
/// Energy(shift) the weight of mode k is lambda_k + shift, which realizes
/// <grad u, grad v> + shift <u, v> on Dirichlet-Laplacian eigenfunctions.
class InnerProductWeights
{
public:
    InnerProductWeights() = default;

    InnerProductWeights(std::vector<double> weights, WeightKind kind, double shift = 0.0)
        : weights_(std::move(weights)), kind_(kind), shift_(shift)
    {
        for (std::size_t k = 0; k < weights_.size(); ++k)
            if (!(weights_[k] > 0.0))
                fail(ErrorKind::InvalidParameters, "inner-product weight " + std::to_string(k) + " is not positive");
    }

    static InnerProductWeights l2(std::size_t dimension) { return {std::vector<double>(dimension, 1.0), WeightKind::L2}; }

    std::size_t size() const noexcept { return weights_.size(); }
    double operator[](std::size_t k) const { return weights_[k]; }
    const std::vector<double>& values() const noexcept { return weights_; }
    WeightKind kind() const noexcept { return kind_; }
    double shift() const noexcept { return shift_; }

private:
    std::vector<double> weights_;
    WeightKind kind_ = WeightKind::L2;
    double shift_ = 0.0;
};

/// Coefficients of a vector of V over the mode basis.
class CoefficientVector
{
public:
    CoefficientVector() = default;
    explicit CoefficientVector(std::size_t dimension) : values_(dimension) {}
    explicit CoefficientVector(cvector values) : values_(std::move(values)) {}
    CoefficientVector(std::initializer_list<complex_t> values) : values_(values) {}

    std::size_t dimension() const noexcept { return values_.size(); }
    complex_t& operator[](std::size_t k) { return values_[k]; }
    const complex_t& operator[](std::size_t k) const { return values_[k]; }
    const cvector& values() const noexcept { return values_; }

    auto begin() const noexcept { return values_.begin(); }
    auto end() const noexcept { return values_.end(); }

    CoefficientVector& operator*=(complex_t a)
    {
        for (auto& x : values_)
            x *= a;
        return *this;
    }

    friend bool operator==(const CoefficientVector&, const CoefficientVector&) = default;

private:
    cvector values_;
};

namespace detail
{
inline void require_same_dimension(std::size_t a, std::size_t b, const char* where)
{
    if (a != b)
        fail(ErrorKind::DimensionMismatch,
             std::string(where) + ": dimensions " + std::to_string(a) + " and " + std::to_string(b) + " differ");
}
} // namespace detail

/// sum_k w_k u_k conj(v_k)
inline complex_t inner_product(const CoefficientVector& u, const CoefficientVector& v, const InnerProductWeights& w)
{
    detail::require_same_dimension(u.dimension(), v.dimension(), "inner_product");
    detail::require_same_dimension(u.dimension(), w.size(), "inner_product");
    // Real and imaginary parts are accumulated separately so that swapping u
    // and v conjugates the result exactly.
    double re = 0.0;
    double im = 0.0;
    for (std::size_t k = 0; k < u.dimension(); ++k)
    {
        re += w[k] * (u[k].real() * v[k].real() + u[k].imag() * v[k].imag());
        im += w[k] * (u[k].imag() * v[k].real() - u[k].real() * v[k].imag());
    }
    return {re, im};
}

inline double norm_squared(const CoefficientVector& u, const InnerProductWeights& w)
{
    detail::require_same_dimension(u.dimension(), w.size(), "norm");
    double s = 0.0;
    for (std::size_t k = 0; k < u.dimension(); ++k)
        s += w[k] * std::norm(u[k]);
    return s;
}

inline double norm(const CoefficientVector& u, const InnerProductWeights& w)
{
    return std::sqrt(norm_squared(u, w));
}

/// a u + v
inline CoefficientVector axpy(complex_t a, const CoefficientVector& u, const CoefficientVector& v)
{
    detail::require_same_dimension(u.dimension(), v.dimension(), "axpy");
    CoefficientVector out(v.dimension());
    for (std::size_t k = 0; k < v.dimension(); ++k)
        out[k] = a * u[k] + v[k];
    return out;
}
} // namespace lspade

#endif // LSPADE_HILBERT_HPP
