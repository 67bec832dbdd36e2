#ifndef LSPADE_POLY_HPP
#define LSPADE_POLY_HPP

#include "lspade/error.hpp"
#include "lspade/numerics.hpp"

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstddef>
#include <utility>
#include <vector>

namespace lspade
{
/// Scalar polynomial sum_j a_j (z - z0)^j, coefficients stored ascending.
class ShiftedPolynomial
{
public:
    ShiftedPolynomial() = default;
    ShiftedPolynomial(complex_t center, cvector coeffs) : center_(center), coeffs_(std::move(coeffs)) {}

    complex_t center() const noexcept { return center_; }
    const cvector& coeffs() const noexcept { return coeffs_; }

    /// Nominal degree (length - 1), regardless of vanishing leading terms.
    int degree() const noexcept { return static_cast<int>(coeffs_.size()) - 1; }

    complex_t operator()(complex_t z) const
    {
        const complex_t t = z - center_;
        complex_t acc = 0.0;
        for (auto it = coeffs_.rbegin(); it != coeffs_.rend(); ++it)
            acc = acc * t + *it;
        return acc;
    }

    double coefficient_norm() const
    {
        double s = 0.0;
        for (const auto& c : coeffs_)
            s += std::norm(c);
        return std::sqrt(s);
    }

    friend bool operator==(const ShiftedPolynomial&, const ShiftedPolynomial&) = default;

private:
    complex_t center_ = 0.0;
    cvector coeffs_;
};

inline complex_t evaluate(const ShiftedPolynomial& p, complex_t z) { return p(z); }

/// Scales to unit coefficient 2-norm and rotates the global phase so that the
/// largest coefficient (lowest index on ties) is real positive.
inline ShiftedPolynomial normalize(const ShiftedPolynomial& p)
{
    double big = 0.0;
    for (const auto& c : p.coeffs())
        big = std::max(big, std::abs(c));
    if (!(big > 1e-300))
        fail(ErrorKind::ZeroPolynomial, "cannot normalize the zero polynomial");
    // Already normalized inputs come back unchanged, which makes the map idempotent.
    if (std::abs(p.coefficient_norm() - 1.0) <= 1e-14)
    {
        const auto& a = p.coeffs();
        const auto pivot = std::find_if(a.begin(), a.end(),
                                        [&](const complex_t& x) { return std::abs(x) >= big * (1.0 - 1e-10); });
        if (pivot->imag() == 0.0 && pivot->real() > 0.0)
            return p;
    }
    cvector c = p.coeffs();
    // Pre-scale by the largest entry so the norm cannot overflow.
    for (auto& x : c)
        x /= big;
    detail::fix_phase(c);
    return {p.center(), std::move(c)};
}

/// Maps a unit eigenvector q (Gramian ordering, q_j pairs with (z-z0)^{N-j})
/// to the ascending denominator a_{N-j} = q_j.
inline ShiftedPolynomial denominator_from_eigvec(const cvector& q, complex_t z0)
{
    double s = 0.0;
    for (const auto& x : q)
        s += std::norm(x);
    if (q.empty() || std::abs(std::sqrt(s) - 1.0) > 1e-12)
        fail(ErrorKind::NotNormalized, "denominator coefficient vector is not of unit norm");
    cvector a(q.rbegin(), q.rend());
    return {z0, std::move(a)};
}

/// Inverse of denominator_from_eigvec.
inline cvector eigvec_from_denominator(const ShiftedPolynomial& p)
{
    return cvector(p.coeffs().rbegin(), p.coeffs().rend());
}

struct PolynomialRoots
{
    cvector roots;
    int effective_degree = 0;
    /// Set when trailing coefficients below 1e-13 of the largest were dropped.
    bool trimmed_degree = false;
};

inline constexpr double root_trim_threshold = 1e-13;

/// Roots of p after trimming negligible leading terms, sorted by distance to
/// the center, ties by (Re, Im).
inline PolynomialRoots roots_with_diagnostics(const ShiftedPolynomial& p, double tol = 1e-13)
{
    const auto& c = p.coeffs();
    double big = 0.0;
    for (const auto& x : c)
        big = std::max(big, std::abs(x));
    if (big == 0.0)
        fail(ErrorKind::ZeroPolynomial, "zero polynomial has no well-defined roots");
    std::size_t len = c.size();
    while (len > 0 && std::abs(c[len - 1]) <= root_trim_threshold * big)
        --len;
    PolynomialRoots out;
    out.effective_degree = static_cast<int>(len) - 1;
    out.trimmed_degree = len < c.size();
    if (out.effective_degree < 1)
        fail(ErrorKind::ConstantPolynomial, "polynomial has no roots after trimming");
    auto shifted = polynomial_roots(std::span<const complex_t>(c.data(), len), tol);
    for (auto& r : shifted)
        r += p.center();
    const complex_t z0 = p.center();
    std::stable_sort(shifted.begin(), shifted.end(), [&](complex_t a, complex_t b) {
        const double da = std::abs(a - z0);
        const double db = std::abs(b - z0);
        if (da != db)
            return da < db;
        if (a.real() != b.real())
            return a.real() < b.real();
        return a.imag() < b.imag();
    });
    out.roots = std::move(shifted);
    return out;
}

inline cvector roots(const ShiftedPolynomial& p, double tol = 1e-13) { return roots_with_diagnostics(p, tol).roots; }
} // namespace lspade

#endif // LSPADE_POLY_HPP
