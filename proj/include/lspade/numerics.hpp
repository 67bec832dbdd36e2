#ifndef LSPADE_NUMERICS_HPP
#define LSPADE_NUMERICS_HPP

// Dense complex kernels for the small (order <= 64) problems that show up in
// denominator computations: Hermitian eigenpairs by cyclic Jacobi, right
// singular vectors of triangular factors by one-sided Jacobi, and polynomial
// roots by Durand-Kerner iteration.

#include "lspade/error.hpp"

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstddef>
#include <limits>
#include <numbers>
#include <numeric>
#include <span>
#include <string>
#include <utility>
#include <vector>

namespace lspade
{
using complex_t = std::complex<double>;
using cvector = std::vector<complex_t>;

/// Square complex matrix stored row-major. Hermitian symmetry is checked by
/// the routines that rely on it rather than enforced on every write.
class HermitianMatrix
{
public:
    HermitianMatrix() = default;
    explicit HermitianMatrix(std::size_t order) : order_(order), entries_(order * order) {}

    HermitianMatrix(std::size_t order, cvector entries) : order_(order), entries_(std::move(entries))
    {
        if (entries_.size() != order_ * order_)
            fail(ErrorKind::DimensionMismatch, "HermitianMatrix entries do not match order");
    }

    std::size_t order() const noexcept { return order_; }

    complex_t& operator()(std::size_t i, std::size_t j) { return entries_[i * order_ + j]; }
    const complex_t& operator()(std::size_t i, std::size_t j) const { return entries_[i * order_ + j]; }

    std::span<const complex_t> entries() const noexcept { return entries_; }

    double frobenius_norm() const
    {
        double s = 0.0;
        for (const auto& a : entries_)
            s += std::norm(a);
        return std::sqrt(s);
    }

    double max_abs() const
    {
        double m = 0.0;
        for (const auto& a : entries_)
            m = std::max(m, std::abs(a));
        return m;
    }

    /// Largest deviation from Hermitian symmetry relative to the largest entry.
    double hermitian_defect() const
    {
        const double scale = max_abs();
        if (scale == 0.0)
            return 0.0;
        double d = 0.0;
        for (std::size_t i = 0; i < order_; ++i)
            for (std::size_t j = i; j < order_; ++j)
                d = std::max(d, std::abs((*this)(i, j) - std::conj((*this)(j, i))));
        return d / scale;
    }

private:
    std::size_t order_ = 0;
    cvector entries_;
};

/// Upper-triangular square matrix; entries below the diagonal are always zero.
class UpperTriangular
{
public:
    UpperTriangular() = default;
    explicit UpperTriangular(std::size_t order) : order_(order), entries_(order * order) {}

    std::size_t order() const noexcept { return order_; }

    complex_t operator()(std::size_t i, std::size_t j) const { return entries_[i * order_ + j]; }

    void set(std::size_t i, std::size_t j, complex_t value)
    {
        if (i > j)
            fail(ErrorKind::InvalidParameters, "UpperTriangular: write below the diagonal");
        entries_[i * order_ + j] = value;
    }

    double frobenius_norm() const
    {
        double s = 0.0;
        for (const auto& a : entries_)
            s += std::norm(a);
        return std::sqrt(s);
    }

    /// max |r_ii| / min |r_ii|; infinite when some diagonal entry vanishes.
    double diagonal_condition() const
    {
        double lo = std::numeric_limits<double>::infinity();
        double hi = 0.0;
        for (std::size_t i = 0; i < order_; ++i)
        {
            const double d = std::abs((*this)(i, i));
            lo = std::min(lo, d);
            hi = std::max(hi, d);
        }
        if (lo == 0.0)
            return std::numeric_limits<double>::infinity();
        return hi / lo;
    }

    /// R^H R, only for tests and diagnostics.
    HermitianMatrix gram() const
    {
        HermitianMatrix g(order_);
        for (std::size_t i = 0; i < order_; ++i)
            for (std::size_t j = 0; j < order_; ++j)
            {
                complex_t s = 0.0;
                for (std::size_t k = 0; k <= std::min(i, j); ++k)
                    s += std::conj((*this)(k, i)) * (*this)(k, j);
                g(i, j) = s;
            }
        return g;
    }

private:
    std::size_t order_ = 0;
    cvector entries_;
};

struct MinEigenpair
{
    double eigenvalue = 0.0;
    cvector vector;
    /// Set when the two smallest eigenvalues are closer than 1e-12 ||H||_F.
    bool degenerate_minimum = false;
    /// Second smallest eigenvalue (equals eigenvalue for order 1).
    double next_eigenvalue = 0.0;
};

struct HermitianEigen
{
    std::vector<double> values; // ascending
    std::vector<cvector> vectors;
};

namespace detail
{
inline double vector_norm(std::span<const complex_t> v)
{
    double s = 0.0;
    for (const auto& x : v)
        s += std::norm(x);
    return std::sqrt(s);
}

/// Scales v to unit length and rotates its phase so that the largest entry
/// (lowest index among near-ties) is real and nonnegative.
inline void fix_phase(cvector& v)
{
    const double nrm = vector_norm(v);
    if (nrm == 0.0)
        return;
    double big = 0.0;
    for (const auto& x : v)
        big = std::max(big, std::abs(x));
    std::size_t pivot = 0;
    for (std::size_t i = 0; i < v.size(); ++i)
        if (std::abs(v[i]) >= big * (1.0 - 1e-10))
        {
            pivot = i;
            break;
        }
    const complex_t phase = std::abs(v[pivot]) > 0.0 ? std::conj(v[pivot]) / std::abs(v[pivot]) : 1.0;
    for (auto& x : v)
        x *= phase / nrm;
    v[pivot] = std::abs(v[pivot]);
}

/// Lexicographic order on (real parts, then imaginary parts).
inline bool lexicographically_less(const cvector& a, const cvector& b)
{
    for (std::size_t i = 0; i < a.size(); ++i)
        if (a[i].real() != b[i].real())
            return a[i].real() < b[i].real();
    for (std::size_t i = 0; i < a.size(); ++i)
        if (a[i].imag() != b[i].imag())
            return a[i].imag() < b[i].imag();
    return false;
}

/// Unitary plane rotation annihilating the (p,q) entry of the 2x2 Hermitian
/// block [[app, apq], [conj(apq), aqq]]. Returns (c, s*e) so that
/// U = [[c, s e], [-s conj(e), c]].
struct PlaneRotation
{
    double c = 1.0;
    complex_t se = 0.0;
};

inline PlaneRotation jacobi_rotation(double app, double aqq, complex_t apq)
{
    const double mag = std::abs(apq);
    const complex_t e = apq / mag;
    const double theta = (aqq - app) / (2.0 * mag);
    const double t = (theta >= 0.0 ? 1.0 : -1.0) / (std::abs(theta) + std::sqrt(theta * theta + 1.0));
    const double c = 1.0 / std::sqrt(t * t + 1.0);
    return {c, t * c * e};
}

/// Columns p, q of an n-column row-major matrix times U.
inline void rotate_columns(cvector& a, std::size_t rows, std::size_t cols, std::size_t p, std::size_t q,
                           const PlaneRotation& r)
{
    for (std::size_t k = 0; k < rows; ++k)
    {
        const complex_t akp = a[k * cols + p];
        const complex_t akq = a[k * cols + q];
        a[k * cols + p] = akp * r.c - akq * std::conj(r.se);
        a[k * cols + q] = akp * r.se + akq * r.c;
    }
}

inline MinEigenpair select_minimum(std::vector<double> values, std::vector<cvector> vectors, double scale)
{
    std::vector<std::size_t> idx(values.size());
    std::iota(idx.begin(), idx.end(), 0);
    std::stable_sort(idx.begin(), idx.end(), [&](auto a, auto b) { return values[a] < values[b]; });

    MinEigenpair out;
    out.eigenvalue = values[idx[0]];
    out.next_eigenvalue = idx.size() > 1 ? values[idx[1]] : values[idx[0]];
    for (auto& v : vectors)
        fix_phase(v);
    out.vector = vectors[idx[0]];
    if (idx.size() > 1 && out.next_eigenvalue - out.eigenvalue < 1e-12 * scale)
    {
        out.degenerate_minimum = true;
        for (std::size_t k = 1; k < idx.size() && values[idx[k]] - out.eigenvalue < 1e-12 * scale; ++k)
            if (lexicographically_less(vectors[idx[k]], out.vector))
                out.vector = vectors[idx[k]];
    }
    return out;
}
} // namespace detail

/// Full eigendecomposition by cyclic complex Jacobi. Eigenvalues ascending,
/// eigenvectors unit length with the phase convention of fix_phase.
inline HermitianEigen hermitian_eigen(const HermitianMatrix& h, int max_sweeps = 100)
{
    const std::size_t n = h.order();
    if (n == 0)
        fail(ErrorKind::InvalidParameters, "hermitian_eigen: empty matrix");
    if (h.hermitian_defect() > 1e-13)
        fail(ErrorKind::NonHermitianInput, "matrix is not Hermitian within 1e-13 of its scale");

    cvector a(h.entries().begin(), h.entries().end());
    for (std::size_t i = 0; i < n; ++i)
    {
        for (std::size_t j = i + 1; j < n; ++j)
        {
            const complex_t avg = 0.5 * (a[i * n + j] + std::conj(a[j * n + i]));
            a[i * n + j] = avg;
            a[j * n + i] = std::conj(avg);
        }
        a[i * n + i] = a[i * n + i].real();
    }
    cvector v(n * n, 0.0);
    for (std::size_t i = 0; i < n; ++i)
        v[i * n + i] = 1.0;

    const double fro = h.frobenius_norm();
    bool converged = (n == 1 || fro == 0.0);
    for (int sweep = 0; sweep < max_sweeps && !converged; ++sweep)
    {
        double off = 0.0;
        for (std::size_t i = 0; i < n; ++i)
            for (std::size_t j = 0; j < n; ++j)
                if (i != j)
                    off += std::norm(a[i * n + j]);
        if (std::sqrt(off) <= 1e-17 * fro)
        {
            converged = true;
            break;
        }
        for (std::size_t p = 0; p + 1 < n; ++p)
            for (std::size_t q = p + 1; q < n; ++q)
            {
                const complex_t apq = a[p * n + q];
                const double app = a[p * n + p].real();
                const double aqq = a[q * n + q].real();
                if (std::abs(apq) == 0.0)
                    continue;
                // Below this level the rotation no longer changes either diagonal entry.
                if (std::abs(apq) <= 1e-18 * std::sqrt(std::abs(app * aqq)) && std::abs(apq) <= 1e-18 * fro)
                {
                    a[p * n + q] = a[q * n + p] = 0.0;
                    continue;
                }
                const auto rot = detail::jacobi_rotation(app, aqq, apq);
                detail::rotate_columns(a, n, n, p, q, rot);
                // Row update with U^H.
                for (std::size_t k = 0; k < n; ++k)
                {
                    const complex_t apk = a[p * n + k];
                    const complex_t aqk = a[q * n + k];
                    a[p * n + k] = rot.c * apk - rot.se * aqk;
                    a[q * n + k] = std::conj(rot.se) * apk + rot.c * aqk;
                }
                a[p * n + q] = a[q * n + p] = 0.0;
                a[p * n + p] = a[p * n + p].real();
                a[q * n + q] = a[q * n + q].real();
                detail::rotate_columns(v, n, n, p, q, rot);
            }
        if (sweep + 1 == max_sweeps)
        {
            double last = 0.0;
            for (std::size_t i = 0; i < n; ++i)
                for (std::size_t j = 0; j < n; ++j)
                    if (i != j)
                        last += std::norm(a[i * n + j]);
            if (std::sqrt(last) > 1e-14 * fro)
                fail(ErrorKind::NoConvergence, "Jacobi sweep limit of " + std::to_string(max_sweeps) + " exceeded");
            converged = true;
        }
    }

    std::vector<std::size_t> idx(n);
    std::iota(idx.begin(), idx.end(), 0);
    std::stable_sort(idx.begin(), idx.end(), [&](auto x, auto y) { return a[x * n + x].real() < a[y * n + y].real(); });

    HermitianEigen out;
    for (auto k : idx)
    {
        out.values.push_back(a[k * n + k].real());
        cvector col(n);
        for (std::size_t i = 0; i < n; ++i)
            col[i] = v[i * n + k];
        detail::fix_phase(col);
        out.vectors.push_back(std::move(col));
    }
    return out;
}

/// Smallest eigenvalue of H and its eigenvector. The tolerance argument is
/// part of the residual contract ||Hv - mu v|| <= tol ||H||_F; Jacobi
/// converges well below any tol in (0, 1e-6].
inline MinEigenpair hermitian_min_eigenpair(const HermitianMatrix& h, double tol = 1e-12)
{
    if (!(tol > 0.0 && tol <= 1e-6))
        fail(ErrorKind::InvalidParameters, "hermitian_min_eigenpair: tol must lie in (0, 1e-6]");
    auto eig = hermitian_eigen(h);
    return detail::select_minimum(std::move(eig.values), std::move(eig.vectors), h.frobenius_norm());
}

struct SingularSystem
{
    std::vector<double> singular_values; // ascending
    std::vector<cvector> right_vectors;
};

/// Right singular vectors of R by one-sided (Hestenes) Jacobi applied to the
/// columns of R. R^H R is never formed, so accuracy is governed by cond(R).
inline SingularSystem right_singular_system(const UpperTriangular& r, int max_sweeps = 100)
{
    const std::size_t n = r.order();
    if (n == 0)
        fail(ErrorKind::InvalidParameters, "right_singular_system: empty matrix");
    cvector w(n * n);
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < n; ++j)
            w[i * n + j] = r(i, j);
    cvector v(n * n, 0.0);
    for (std::size_t i = 0; i < n; ++i)
        v[i * n + i] = 1.0;

    auto column_dot = [&](std::size_t p, std::size_t q) {
        complex_t s = 0.0;
        for (std::size_t k = 0; k < n; ++k)
            s += std::conj(w[k * n + p]) * w[k * n + q];
        return s;
    };

    // Columns at rounding level carry no direction; rotating them only
    // reshuffles noise and never settles.
    const double fro = r.frobenius_norm();
    const double noise = 4.0 * std::numeric_limits<double>::epsilon() * fro;
    // Recomputed column products sit at rounding level after a rotation, so
    // orthogonality is only asked to that level.
    const double ortho = static_cast<double>(n) * std::numeric_limits<double>::epsilon();
    bool converged = (n == 1);
    for (int sweep = 0; sweep < max_sweeps && !converged; ++sweep)
    {
        bool rotated = false;
        for (std::size_t p = 0; p + 1 < n; ++p)
            for (std::size_t q = p + 1; q < n; ++q)
            {
                const double alpha = column_dot(p, p).real();
                const double beta = column_dot(q, q).real();
                const complex_t gamma = column_dot(p, q);
                if (std::abs(gamma) == 0.0 || std::abs(gamma) <= ortho * std::sqrt(alpha * beta) ||
                    std::min(alpha, beta) <= noise * noise)
                    continue;
                rotated = true;
                const auto rot = detail::jacobi_rotation(alpha, beta, gamma);
                detail::rotate_columns(w, n, n, p, q, rot);
                detail::rotate_columns(v, n, n, p, q, rot);
            }
        converged = !rotated;
    }
    if (!converged)
        fail(ErrorKind::NoConvergence, "one-sided Jacobi sweep limit of " + std::to_string(max_sweeps) + " exceeded");

    std::vector<double> sigma(n);
    for (std::size_t k = 0; k < n; ++k)
    {
        double s = 0.0;
        for (std::size_t i = 0; i < n; ++i)
            s += std::norm(w[i * n + k]);
        sigma[k] = std::sqrt(s);
    }
    std::vector<std::size_t> idx(n);
    std::iota(idx.begin(), idx.end(), 0);
    std::stable_sort(idx.begin(), idx.end(), [&](auto x, auto y) { return sigma[x] < sigma[y]; });

    SingularSystem out;
    for (auto k : idx)
    {
        out.singular_values.push_back(sigma[k]);
        cvector col(n);
        for (std::size_t i = 0; i < n; ++i)
            col[i] = v[i * n + k];
        detail::fix_phase(col);
        out.right_vectors.push_back(std::move(col));
    }
    return out;
}

/// Unit eigenvector of R^H R for its smallest eigenvalue (the squared
/// minimal singular value, reported in `eigenvalue`).
inline MinEigenpair min_right_singular_vector(const UpperTriangular& r, double tol = 1e-12)
{
    if (!(tol > 0.0 && tol <= 1e-6))
        fail(ErrorKind::InvalidParameters, "min_right_singular_vector: tol must lie in (0, 1e-6]");
    auto svd = right_singular_system(r);
    std::vector<double> squared;
    double fro = 0.0;
    for (double s : svd.singular_values)
    {
        squared.push_back(s * s);
        fro += s * s * s * s;
    }
    return detail::select_minimum(std::move(squared), std::move(svd.right_vectors), std::sqrt(fro));
}

/// Largest principal angle (radians) between span(a) and span(b), each given
/// by orthonormal vectors. Returns pi/2 when the dimensions differ.
inline double max_principal_angle(const std::vector<cvector>& a, const std::vector<cvector>& b)
{
    if (a.size() != b.size() || a.empty())
        return std::numbers::pi / 2.0;
    const std::size_t n = a.front().size();
    const std::size_t p = a.size();
    // Residual of a after projection onto span(b); its largest singular value is sin(theta_max).
    std::vector<cvector> resid = a;
    for (auto& x : resid)
        for (const auto& y : b)
        {
            complex_t c = 0.0;
            for (std::size_t i = 0; i < n; ++i)
                c += std::conj(y[i]) * x[i];
            for (std::size_t i = 0; i < n; ++i)
                x[i] -= c * y[i];
        }
    HermitianMatrix g(p);
    for (std::size_t i = 0; i < p; ++i)
        for (std::size_t j = 0; j < p; ++j)
        {
            complex_t s = 0.0;
            for (std::size_t k = 0; k < n; ++k)
                s += std::conj(resid[i][k]) * resid[j][k];
            g(i, j) = s;
        }
    for (std::size_t i = 0; i < p; ++i)
        for (std::size_t j = i + 1; j < p; ++j)
            g(j, i) = std::conj(g(i, j));
    const double top = hermitian_eigen(g).values.back();
    return std::asin(std::min(1.0, std::sqrt(std::max(0.0, top))));
}

// ---------------------------------------------------------------------------
// Polynomial roots

namespace detail
{
inline complex_t horner(std::span<const complex_t> ascending, complex_t z)
{
    complex_t acc = 0.0;
    for (auto it = ascending.rbegin(); it != ascending.rend(); ++it)
        acc = acc * z + *it;
    return acc;
}

inline bool root_order(complex_t a, complex_t b)
{
    const double ma = std::abs(a);
    const double mb = std::abs(b);
    if (ma != mb)
        return ma < mb;
    return std::arg(a) < std::arg(b);
}
} // namespace detail

/// Roots of sum_j coeffs[j] z^j by Durand-Kerner iteration, repeated according
/// to multiplicity and sorted by (magnitude, phase).
inline cvector polynomial_roots(std::span<const complex_t> coeffs, double tol = 1e-13, int max_iterations = 500)
{
    if (coeffs.empty())
        fail(ErrorKind::DegenerateLeadingCoefficient, "empty coefficient list");
    const std::size_t degree = coeffs.size() - 1;
    double cmax = 0.0;
    for (const auto& c : coeffs)
        cmax = std::max(cmax, std::abs(c));
    if (cmax == 0.0 || std::abs(coeffs.back()) <= 1e-13 * cmax)
        fail(ErrorKind::DegenerateLeadingCoefficient, "leading coefficient is negligible relative to the largest");
    if (degree > 32)
        fail(ErrorKind::InvalidParameters, "polynomial_roots supports degree <= 32");
    if (degree == 0)
        return {};

    cvector monic(coeffs.begin(), coeffs.end());
    for (auto& c : monic)
        c /= coeffs.back();

    // Fujiwara bound on the root moduli.
    double radius = 0.0;
    for (std::size_t j = 1; j <= degree; ++j)
    {
        double m = std::abs(monic[degree - j]);
        if (j == degree)
            m *= 0.5;
        radius = std::max(radius, std::pow(m, 1.0 / static_cast<double>(j)));
    }
    radius = 2.0 * radius;
    if (radius == 0.0)
        radius = 1.0;

    cvector z(degree);
    const complex_t seed(0.4, 0.9);
    complex_t power = 1.0;
    for (std::size_t k = 0; k < degree; ++k)
    {
        z[k] = radius * power;
        power *= seed;
    }

    auto residual_ok = [&](complex_t r) {
        return std::abs(detail::horner(coeffs, r)) <= tol * cmax * std::pow(1.0 + std::abs(r), static_cast<double>(degree));
    };

    int polish = 0;
    double last_step = std::numeric_limits<double>::infinity();
    for (int it = 0; it < max_iterations; ++it)
    {
        double step = 0.0;
        for (std::size_t i = 0; i < degree; ++i)
        {
            complex_t denom = 1.0;
            for (std::size_t j = 0; j < degree; ++j)
                if (j != i)
                    denom *= (z[i] - z[j]);
            if (denom == complex_t(0.0))
                continue;
            const complex_t delta = detail::horner(monic, z[i]) / denom;
            z[i] -= delta;
            step = std::max(step, std::abs(delta) / (1.0 + std::abs(z[i])));
        }
        const bool all_ok = std::all_of(z.begin(), z.end(), residual_ok);
        if (all_ok)
        {
            // Keep polishing while corrections still shrink.
            if (step <= 4e-16 || step >= last_step || ++polish >= 10)
                break;
        }
        last_step = step;
        if (it + 1 == max_iterations && !all_ok)
            fail(ErrorKind::NoConvergence, "Durand-Kerner did not converge in " + std::to_string(max_iterations) +
                                               " iterations");
    }
    std::sort(z.begin(), z.end(), detail::root_order);
    return z;
}

struct RootCluster
{
    complex_t center;
    std::size_t multiplicity = 0;
};

/// Groups roots within rel_tol (relative to 1 + |root|) for reporting; the raw
/// roots stay untouched.
inline std::vector<RootCluster> cluster_roots(std::span<const complex_t> roots, double rel_tol = 1e-7)
{
    std::vector<RootCluster> out;
    std::vector<bool> used(roots.size(), false);
    for (std::size_t i = 0; i < roots.size(); ++i)
    {
        if (used[i])
            continue;
        complex_t sum = roots[i];
        std::size_t count = 1;
        used[i] = true;
        for (std::size_t j = i + 1; j < roots.size(); ++j)
            if (!used[j] && std::abs(roots[j] - roots[i]) <= rel_tol * (1.0 + std::abs(roots[i])))
            {
                used[j] = true;
                sum += roots[j];
                ++count;
            }
        out.push_back({sum / static_cast<double>(count), count});
    }
    return out;
}
} // namespace lspade

#endif // LSPADE_NUMERICS_HPP
