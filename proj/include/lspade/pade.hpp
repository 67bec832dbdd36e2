#ifndef LSPADE_PADE_HPP
#define LSPADE_PADE_HPP

// Least-squares Pade approximants of vector-valued meromorphic maps from their
// Taylor coefficients at z0.
//
// The denominator Q (unit coefficient norm) minimizes either the norm of the
// single Taylor coefficient [QS]_E (fast variant) or the rho-weighted sum of
// ||[QS]_g||^2 for g = M+1..E (standard variant). Both reduce to the minimal
// eigenvector of a small Gramian of Taylor coefficients; the fast variant can
// also be computed from a QR factorization of the coefficient quasimatrix,
// which avoids squaring its condition number. The numerator matches the first
// M+1 Taylor coefficients of QS.

#include "lspade/error.hpp"
#include "lspade/hilbert.hpp"
#include "lspade/modal.hpp"
#include "lspade/numerics.hpp"
#include "lspade/poly.hpp"

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstddef>
#include <limits>
#include <string>
#include <utility>
#include <vector>

namespace lspade
{
enum class Variant
{
    Fast,
    Standard,
};

/// How fast denominators are computed.
enum class FastPath
{
    QR,
    Gramian,
};

struct BuildParams
{
    complex_t z0 = 0.0;
    int M = 0;
    int N = 0;
    int E = 0;
    Variant variant = Variant::Fast;
    double rho = 1.0; // Standard only
    FastPath fast_path = FastPath::QR;

    static BuildParams fast(complex_t z0, int M, int N, int E, FastPath path = FastPath::QR)
    {
        return {z0, M, N, E, Variant::Fast, 1.0, path};
    }

    static BuildParams standard(complex_t z0, int M, int N, int E, double rho)
    {
        return {z0, M, N, E, Variant::Standard, rho, FastPath::QR};
    }

    void validate() const
    {
        if (M < 0 || N < 0)
            fail(ErrorKind::InvalidParameters, "M and N must be nonnegative");
        if (variant == Variant::Fast && E < std::max(M, N))
            fail(ErrorKind::InvalidParameters, "fast variant requires E >= max(M, N)");
        if (variant == Variant::Standard)
        {
            if (E < M + N)
                fail(ErrorKind::InvalidParameters, "standard variant requires E >= M + N");
            if (!(rho > 0.0))
                fail(ErrorKind::InvalidParameters, "standard variant requires rho > 0");
        }
    }
};

/// sum_j p_j (z - z0)^j with vector coefficients.
struct VectorPolynomial
{
    complex_t center = 0.0;
    std::vector<CoefficientVector> coeffs;

    int degree() const noexcept { return static_cast<int>(coeffs.size()) - 1; }

    CoefficientVector operator()(complex_t z) const
    {
        if (coeffs.empty())
            return {};
        const complex_t t = z - center;
        CoefficientVector acc(coeffs.back().dimension());
        for (auto it = coeffs.rbegin(); it != coeffs.rend(); ++it)
            acc = axpy(t, acc, *it);
        return acc;
    }
};

struct Diagnostics
{
    /// Value of the minimized quadratic form at the returned coefficient
    /// vector, evaluated in factored form ||sum_j q_j S_{E-N+j}||^2 (weighted
    /// sum of such terms for the standard variant, scaled by rho^{-2(M+1)}).
    double min_eigenvalue = 0.0;
    /// Smallest eigenvalue (or squared singular value) reported by the solver.
    double solver_eigenvalue = 0.0;
    double next_eigenvalue = 0.0;
    bool degenerate = false;
    /// max|r_ii| / min|r_ii| of the quasimatrix R factor; 0 when not computed.
    double r_condition = 0.0;
    /// lambda_max / lambda_min of the eigensolved Gramian; 0 when not computed.
    double gramian_condition = 0.0;
    /// QR path: some diagonal of R fell below 1e-14 of the first column norm.
    bool rank_deficient = false;
};

struct DenominatorResult
{
    ShiftedPolynomial denominator;
    Diagnostics diagnostics;
    /// Orthonormal basis of the (near-)null cluster of the eigenproblem; one
    /// vector unless the minimum is degenerate.
    std::vector<cvector> null_basis;
};

enum class GramianKind
{
    Single,
    WeightedSum,
};

struct GramianMatrix
{
    HermitianMatrix matrix;
    GramianKind kind = GramianKind::Single;
    int M = 0;
    int E = 0;
    double rho = 1.0;

    std::size_t order() const noexcept { return matrix.order(); }
};

struct PadeApproximant
{
    VectorPolynomial numerator;
    ShiftedPolynomial denominator;
    BuildParams params;
    Diagnostics diagnostics;
};

namespace detail
{
inline void require_length(const TaylorSeries& taylor, int needed, const char* where)
{
    if (static_cast<int>(taylor.length()) < needed)
        fail(ErrorKind::InsufficientTaylorLength, std::string(where) + ": needs " + std::to_string(needed) +
                                                      " Taylor coefficients, got " + std::to_string(taylor.length()));
}

/// Columns S_{E-N}, ..., S_E, with zero vectors for negative indices.
inline std::vector<CoefficientVector> quasimatrix(const TaylorSeries& taylor, int N, int E)
{
    const std::size_t dim = taylor.coefficients.front().dimension();
    std::vector<CoefficientVector> cols;
    cols.reserve(N + 1);
    for (int j = 0; j <= N; ++j)
    {
        const int idx = E - N + j;
        cols.push_back(idx < 0 ? CoefficientVector(dim) : taylor.coefficients[idx]);
    }
    return cols;
}

/// ||sum_j q_j S_{E-N+j}||_w^2
inline double quadratic_form_factored(const TaylorSeries& taylor, const cvector& q, int E, const InnerProductWeights& w)
{
    const int N = static_cast<int>(q.size()) - 1;
    const auto cols = quasimatrix(taylor, N, E);
    CoefficientVector acc(cols.front().dimension());
    for (int j = 0; j <= N; ++j)
        acc = axpy(q[j], cols[j], acc);
    return norm_squared(acc, w);
}

inline std::vector<cvector> cluster_basis(const std::vector<double>& values, const std::vector<cvector>& vectors,
                                          double scale)
{
    std::vector<cvector> out{vectors.front()};
    for (std::size_t k = 1; k < values.size() && values[k] - values.front() < 1e-12 * scale; ++k)
        out.push_back(vectors[k]);
    return out;
}

inline DenominatorResult denominator_from_eigen(const HermitianMatrix& g, complex_t z0)
{
    auto eig = hermitian_eigen(g);
    const double scale = g.frobenius_norm();
    DenominatorResult out;
    out.null_basis = cluster_basis(eig.values, eig.vectors, scale);
    const double lo = eig.values.front();
    const double hi = eig.values.back();
    auto pick = detail::select_minimum(eig.values, eig.vectors, scale);
    out.denominator = denominator_from_eigvec(pick.vector, z0);
    out.diagnostics.solver_eigenvalue = pick.eigenvalue;
    out.diagnostics.next_eigenvalue = pick.next_eigenvalue;
    out.diagnostics.degenerate = pick.degenerate_minimum;
    out.diagnostics.gramian_condition = lo > 0.0 ? hi / lo : std::numeric_limits<double>::infinity();
    return out;
}
} // namespace detail

/// Entry (i, j) = <S_{E-N+j}, S_{E-N+i}>_w, with S_a = 0 for a < 0.
inline GramianMatrix gramian(const TaylorSeries& taylor, int N, int E, const InnerProductWeights& w)
{
    if (E < 0 || N < 0)
        fail(ErrorKind::InvalidParameters, "gramian: E and N must be nonnegative");
    detail::require_length(taylor, E + 1, "gramian");
    const auto cols = detail::quasimatrix(taylor, N, E);
    GramianMatrix g{HermitianMatrix(N + 1), GramianKind::Single, 0, E, 1.0};
    for (int i = 0; i <= N; ++i)
        for (int j = i; j <= N; ++j)
        {
            const complex_t v = inner_product(cols[j], cols[i], w);
            g.matrix(i, j) = v;
            g.matrix(j, i) = std::conj(v);
        }
    for (int i = 0; i <= N; ++i)
        g.matrix(i, i) = g.matrix(i, i).real();
    return g;
}

/// sum_{g=M+1}^{E} rho^{2(g-M-1)} gramian(taylor, N, g, w), i.e. the standard
/// functional's Gramian with the common factor rho^{2(M+1)} removed.
inline GramianMatrix weighted_gramian(const TaylorSeries& taylor, int M, int N, int E, double rho,
                                      const InnerProductWeights& w)
{
    if (!(rho > 0.0))
        fail(ErrorKind::InvalidParameters, "rho must be positive");
    if (2.0 * (E - M) * std::log10(rho) > 300.0)
        fail(ErrorKind::RhoOverflow, "rho^{2(E-M)} exceeds 1e300");
    detail::require_length(taylor, E + 1, "weighted_gramian");
    GramianMatrix sum{HermitianMatrix(N + 1), GramianKind::WeightedSum, M, E, rho};
    for (int g = M + 1; g <= E; ++g)
    {
        const double factor = std::pow(rho, 2.0 * (g - M - 1));
        const auto block = gramian(taylor, N, g, w);
        for (int i = 0; i <= N; ++i)
            for (int j = 0; j <= N; ++j)
                sum.matrix(i, j) += factor * block.matrix(i, j);
    }
    return sum;
}

/// Fast denominator from the minimal eigenvector of the Gramian.
inline DenominatorResult denominator_fast_gramian(const TaylorSeries& taylor, int N, int E,
                                                  const InnerProductWeights& w)
{
    if (E < N)
        fail(ErrorKind::InvalidParameters, "fast denominator requires E >= N");
    const auto g = gramian(taylor, N, E, w);
    auto out = detail::denominator_from_eigen(g.matrix, taylor.center);
    out.diagnostics.min_eigenvalue =
        detail::quadratic_form_factored(taylor, eigvec_from_denominator(out.denominator), E, w);
    return out;
}

/// R factor of the quasimatrix [S_{E-N} | ... | S_E] under <.,.>_w by modified
/// Gram-Schmidt with one reorthogonalization pass.
struct QuasimatrixQR
{
    UpperTriangular r;
    bool rank_deficient = false;
};

inline QuasimatrixQR quasimatrix_qr(const TaylorSeries& taylor, int N, int E, const InnerProductWeights& w)
{
    detail::require_length(taylor, E + 1, "quasimatrix_qr");
    auto cols = detail::quasimatrix(taylor, N, E);
    QuasimatrixQR out{UpperTriangular(N + 1), false};
    const double first = norm(cols.front(), w);
    std::vector<CoefficientVector> basis;
    for (int j = 0; j <= N; ++j)
    {
        CoefficientVector v = cols[j];
        std::vector<complex_t> r(j + 1, 0.0);
        for (int pass = 0; pass < 2; ++pass)
            for (int i = 0; i < j; ++i)
            {
                const complex_t c = inner_product(v, basis[i], w);
                v = axpy(-c, basis[i], v);
                r[i] += c;
            }
        const double diag = norm(v, w);
        for (int i = 0; i < j; ++i)
            out.r.set(i, j, r[i]);
        out.r.set(j, j, diag);
        if (diag <= 1e-14 * first || diag == 0.0)
        {
            out.rank_deficient = true;
            basis.emplace_back(v.dimension());
        }
        else
        {
            v *= 1.0 / diag;
            basis.push_back(std::move(v));
        }
    }
    return out;
}

/// Fast denominator from the minimal right singular vector of the quasimatrix
/// R factor.
inline DenominatorResult denominator_fast_qr(const TaylorSeries& taylor, int N, int E, const InnerProductWeights& w)
{
    if (E < N)
        fail(ErrorKind::InvalidParameters, "fast denominator requires E >= N");
    const auto qr = quasimatrix_qr(taylor, N, E, w);
    auto svd = right_singular_system(qr.r);
    // Near-ties are judged on singular values against ||R||_F, not on their
    // squares, so this path resolves minima the Gramian path cannot.
    const double fro = qr.r.frobenius_norm();
    DenominatorResult out;
    out.null_basis = detail::cluster_basis(svd.singular_values, svd.right_vectors, fro);
    auto pick = detail::select_minimum(svd.singular_values, svd.right_vectors, fro);
    pick.eigenvalue *= pick.eigenvalue;
    pick.next_eigenvalue *= pick.next_eigenvalue;
    out.denominator = denominator_from_eigvec(pick.vector, taylor.center);
    out.diagnostics.solver_eigenvalue = pick.eigenvalue;
    out.diagnostics.next_eigenvalue = pick.next_eigenvalue;
    out.diagnostics.degenerate = pick.degenerate_minimum;
    out.diagnostics.r_condition = qr.r.diagonal_condition();
    out.diagnostics.rank_deficient = qr.rank_deficient;
    out.diagnostics.min_eigenvalue = detail::quadratic_form_factored(taylor, pick.vector, E, w);
    return out;
}

/// Standard denominator: minimal eigenvector of the rho-weighted Gramian sum.
inline DenominatorResult denominator_standard(const TaylorSeries& taylor, int M, int N, int E, double rho,
                                              const InnerProductWeights& w)
{
    if (E < M + N)
        fail(ErrorKind::InvalidParameters, "standard denominator requires E >= M + N");
    const auto g = weighted_gramian(taylor, M, N, E, rho, w);
    auto out = detail::denominator_from_eigen(g.matrix, taylor.center);
    const auto q = eigvec_from_denominator(out.denominator);
    double value = 0.0;
    for (int gamma = M + 1; gamma <= E; ++gamma)
        value += std::pow(rho, 2.0 * (gamma - M - 1)) * detail::quadratic_form_factored(taylor, q, gamma, w);
    out.diagnostics.min_eigenvalue = value;
    return out;
}

/// p_a = sum_{l=0}^{min(a, N)} a_l S_{a-l}, a = 0..M.
inline VectorPolynomial numerator(const TaylorSeries& taylor, const ShiftedPolynomial& q, int M)
{
    if (M < 0)
        fail(ErrorKind::InvalidParameters, "numerator degree must be nonnegative");
    detail::require_length(taylor, M + 1, "numerator");
    const auto& a = q.coeffs();
    const int N = q.degree();
    VectorPolynomial p{taylor.center, {}};
    p.coeffs.reserve(M + 1);
    for (int alpha = 0; alpha <= M; ++alpha)
    {
        CoefficientVector acc(taylor.coefficients.front().dimension());
        for (int l = 0; l <= std::min(alpha, N); ++l)
            acc = axpy(a[l], taylor.coefficients[alpha - l], acc);
        p.coeffs.push_back(std::move(acc));
    }
    return p;
}

inline PadeApproximant build(const TaylorSeries& taylor, const BuildParams& params, const InnerProductWeights& w)
{
    params.validate();
    if (std::abs(taylor.center - params.z0) > 0.0)
        fail(ErrorKind::InvalidParameters, "Taylor series center differs from z0");
    detail::require_length(taylor, std::max(params.E, params.M) + 1, "build");

    DenominatorResult den;
    if (params.variant == Variant::Standard)
        den = denominator_standard(taylor, params.M, params.N, params.E, params.rho, w);
    else if (params.fast_path == FastPath::Gramian)
        den = denominator_fast_gramian(taylor, params.N, params.E, w);
    else
        den = denominator_fast_qr(taylor, params.N, params.E, w);

    PadeApproximant out;
    out.numerator = numerator(taylor, den.denominator, params.M);
    out.denominator = std::move(den.denominator);
    out.params = params;
    out.diagnostics = den.diagnostics;
    return out;
}

inline PadeApproximant build(const ModalModel& model, const BuildParams& params)
{
    params.validate();
    const auto taylor = taylor_coefficients(model, params.z0, std::max(params.E, params.M));
    return build(taylor, params, model.weights());
}

struct Evaluation
{
    CoefficientVector value;
    double denominator_magnitude = 0.0;
};

/// P(z) / Q(z). Small |Q(z)| is reported, never rejected.
inline Evaluation evaluate(const PadeApproximant& approx, complex_t z)
{
    auto p = approx.numerator(z);
    const complex_t q = approx.denominator(z);
    p *= 1.0 / q;
    return {std::move(p), std::abs(q)};
}

inline cvector approximant_poles(const PadeApproximant& approx) { return roots(approx.denominator); }

/// ||[QS]_E|| = ||sum_j q_j S_{E-N+j}||_w computed from Taylor coefficients.
inline double functional_value(const ShiftedPolynomial& q, const TaylorSeries& taylor, int E,
                               const InnerProductWeights& w)
{
    detail::require_length(taylor, E + 1, "functional_value");
    if (E < 0)
        fail(ErrorKind::InvalidParameters, "functional_value: E must be nonnegative");
    return std::sqrt(detail::quadratic_form_factored(taylor, eigvec_from_denominator(q), E, w));
}

/// Same functional through the modal expansion:
/// sqrt(sum_k w_k |c_k|^2 |Q(lambda_k)|^2 / |lambda_k - z0|^{2E+2}). Needs E >= deg Q.
inline double functional_value(const ShiftedPolynomial& q, const ModalModel& model, int E)
{
    if (E < q.degree())
        fail(ErrorKind::InvalidParameters, "modal functional form needs E >= deg Q");
    const complex_t z0 = q.center();
    detail::require_center(model, z0);
    const auto& modes = model.modes();
    const auto& w = model.weights();
    double s = 0.0;
    for (std::size_t k = 0; k < modes.size(); ++k)
    {
        if (modes[k].source_coefficient == complex_t(0.0))
            continue;
        const double dist = std::abs(modes[k].eigenvalue - z0);
        s += w[k] * std::norm(modes[k].source_coefficient) * std::norm(q(modes[k].eigenvalue)) /
             std::pow(dist, 2.0 * E + 2.0);
    }
    return std::sqrt(s);
}

/// ||Q(z) S(z) - P(z)||_w
inline double residual_norm(const ModalModel& model, const PadeApproximant& approx, complex_t z)
{
    if (model.pole_distance(z) <= 1e-10)
        fail(ErrorKind::PoleEvaluation, "residual requested within 1e-10 of a pole");
    const auto s = evaluate_exact(model, z);
    auto minus_p = approx.numerator(z);
    minus_p *= -1.0;
    return norm(axpy(approx.denominator(z), s, minus_p), model.weights());
}

// ---------------------------------------------------------------------------
// Computable bounds

/// C' = ||v*|| prod_{a<=N} (1 + |lambda_{N+1} - z0| / |lambda_a - z0|), poles
/// ordered by distance to z0.
inline double optimality_constant(const ModalModel& model, complex_t z0, int N)
{
    const auto poles = pole_list(model, z0);
    if (static_cast<int>(poles.size()) < N + 1)
        fail(ErrorKind::InvalidParameters, "optimality constant needs at least N+1 poles");
    const double outer = std::abs(poles[N].pole - z0);
    double c = model.source_norm();
    for (int a = 0; a < N; ++a)
        c *= 1.0 + outer / std::abs(poles[a].pole - z0);
    return c;
}

/// Upper bound C' / |lambda_{N+1} - z0|^{E+1} on the minimal fast functional.
inline double fast_optimality_bound(const ModalModel& model, complex_t z0, int N, int E)
{
    const auto poles = pole_list(model, z0);
    if (static_cast<int>(poles.size()) < N + 1)
        fail(ErrorKind::InvalidParameters, "optimality bound needs at least N+1 poles");
    return optimality_constant(model, z0, N) / std::pow(std::abs(poles[N].pole - z0), E + 1.0);
}

/// Pointwise bound on ||Q S - P|| for fast approximants with E = max(M, N) and
/// M >= N - 1.
inline double residual_bound(const ModalModel& model, complex_t z0, int M, int N, int E, complex_t z)
{
    if (M < N - 1 || E != std::max(M, N))
        fail(ErrorKind::InvalidParameters, "residual bound needs M >= N-1 and E = max(M, N)");
    const auto poles = pole_list(model, z0);
    if (static_cast<int>(poles.size()) < N + 1)
        fail(ErrorKind::InvalidParameters, "residual bound needs at least N+1 poles");
    const double c = optimality_constant(model, z0, N);
    const double ratio = std::pow(std::abs(z - z0) / std::abs(poles[N].pole - z0), E + 1.0);
    const double d = model.pole_distance(z);
    if (M >= N)
        return c / d * ratio;
    return c * (1.0 / d + 1.0 / std::abs(z - z0)) * ratio;
}
} // namespace lspade

#endif // LSPADE_PADE_HPP
