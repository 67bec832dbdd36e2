#ifndef LSPADE_MODAL_HPP
#define LSPADE_MODAL_HPP

// Diagonal (modal) representations of resolvent maps S(z) = (L - z)^{-1} v*.
// A model is a list of modes (eigenvalue, coefficient of v*) over an
// orthogonal basis together with the diagonal inner-product weights.

#include "lspade/error.hpp"
#include "lspade/hilbert.hpp"
#include "lspade/numerics.hpp"

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstddef>
#include <cstdio>
#include <numbers>
#include <optional>
#include <string>
#include <utility>
#include <vector>

namespace lspade
{
struct ModeEntry
{
    complex_t eigenvalue;
    complex_t source_coefficient;
    std::optional<std::pair<int, int>> tag;
};

/// A distinct eigenvalue together with the modes spanning its eigenspace.
struct PoleGroup
{
    complex_t pole;
    std::vector<std::size_t> modes;
    double residue_norm = 0.0;
    bool retained = true;
};

struct PoleInfo
{
    complex_t pole;
    double residue_norm = 0.0;
};

struct TaylorSeries
{
    complex_t center;
    std::vector<CoefficientVector> coefficients; // S_0 .. S_E

    std::size_t length() const noexcept { return coefficients.size(); }
};

inline constexpr double default_drop_threshold = 1e-14;
inline constexpr double eigenvalue_grouping_tolerance = 1e-12;

class ModalModel
{
public:
    ModalModel() = default;

    ModalModel(std::vector<ModeEntry> modes, InnerProductWeights weights, double drop_threshold = default_drop_threshold)
        : modes_(std::move(modes)), weights_(std::move(weights)), drop_threshold_(drop_threshold)
    {
        if (modes_.empty())
            fail(ErrorKind::InvalidParameters, "modal model needs at least one mode");
        if (weights_.size() != modes_.size())
            fail(ErrorKind::DimensionMismatch, "weights and modes have different lengths");
        if (drop_threshold_ < 0.0)
            fail(ErrorKind::InvalidParameters, "drop_threshold must be nonnegative");
        group_poles();
    }

    std::size_t dimension() const noexcept { return modes_.size(); }
    const std::vector<ModeEntry>& modes() const noexcept { return modes_; }
    const InnerProductWeights& weights() const noexcept { return weights_; }
    double drop_threshold() const noexcept { return drop_threshold_; }
    const std::vector<PoleGroup>& groups() const noexcept { return groups_; }

    /// Coefficients of v*, with discarded (removable) groups zeroed.
    CoefficientVector source() const
    {
        CoefficientVector v(modes_.size());
        for (std::size_t k = 0; k < modes_.size(); ++k)
            v[k] = modes_[k].source_coefficient;
        return v;
    }

    double source_norm() const { return norm(source(), weights_); }

    /// Smallest distance from z to a retained pole.
    double pole_distance(complex_t z) const
    {
        double d = std::numeric_limits<double>::infinity();
        for (const auto& g : groups_)
            if (g.retained)
                d = std::min(d, std::abs(g.pole - z));
        return d;
    }

    std::optional<complex_t> nearest_pole(complex_t z) const
    {
        std::optional<complex_t> best;
        double d = std::numeric_limits<double>::infinity();
        for (const auto& g : groups_)
            if (g.retained && std::abs(g.pole - z) < d)
            {
                d = std::abs(g.pole - z);
                best = g.pole;
            }
        return best;
    }

private:
    void group_poles()
    {
        std::vector<std::size_t> order(modes_.size());
        for (std::size_t k = 0; k < order.size(); ++k)
            order[k] = k;
        std::stable_sort(order.begin(), order.end(), [&](auto a, auto b) {
            const auto& la = modes_[a].eigenvalue;
            const auto& lb = modes_[b].eigenvalue;
            return la.real() != lb.real() ? la.real() < lb.real() : la.imag() < lb.imag();
        });
        for (auto k : order)
        {
            if (!groups_.empty() &&
                std::abs(modes_[k].eigenvalue - groups_.back().pole) <= eigenvalue_grouping_tolerance)
            {
                groups_.back().modes.push_back(k);
                continue;
            }
            groups_.push_back({modes_[k].eigenvalue, {k}, 0.0, true});
        }
        double total = 0.0;
        for (std::size_t k = 0; k < modes_.size(); ++k)
            total += weights_[k] * std::norm(modes_[k].source_coefficient);
        const double vnorm = std::sqrt(total);
        for (auto& g : groups_)
        {
            double s = 0.0;
            for (auto k : g.modes)
                s += weights_[k] * std::norm(modes_[k].source_coefficient);
            g.residue_norm = std::sqrt(s);
            if (g.residue_norm <= drop_threshold_ * vnorm)
            {
                g.retained = false;
                for (auto k : g.modes)
                    modes_[k].source_coefficient = 0.0;
            }
        }
    }

    std::vector<ModeEntry> modes_;
    InnerProductWeights weights_;
    double drop_threshold_ = default_drop_threshold;
    std::vector<PoleGroup> groups_;
};

// ---------------------------------------------------------------------------
// Quadrature

struct QuadratureRule
{
    std::vector<double> nodes;
    std::vector<double> weights;
};

/// n-point Gauss-Legendre rule mapped to [a, b]; nodes by Newton iteration
/// on the three-term recurrence.
inline QuadratureRule gauss_legendre(int n, double a, double b)
{
    if (n < 1)
        fail(ErrorKind::InvalidParameters, "gauss_legendre needs n >= 1");
    QuadratureRule rule;
    rule.nodes.resize(n);
    rule.weights.resize(n);
    const double half = 0.5 * (b - a);
    const double mid = 0.5 * (b + a);
    for (int i = 0; i < (n + 1) / 2; ++i)
    {
        double x = std::cos(std::numbers::pi * (i + 0.75) / (n + 0.5));
        double dp = 0.0;
        for (int it = 0; it < 100; ++it)
        {
            double p0 = 1.0;
            double p1 = x;
            for (int k = 2; k <= n; ++k)
            {
                const double p2 = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
                p0 = p1;
                p1 = p2;
            }
            dp = n * (x * p1 - p0) / (x * x - 1.0);
            const double dx = p1 / dp;
            x -= dx;
            if (std::abs(dx) < 1e-16)
                break;
        }
        // Recompute the derivative at the converged node.
        double p0 = 1.0;
        double p1 = x;
        for (int k = 2; k <= n; ++k)
        {
            const double p2 = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
            p0 = p1;
            p1 = p2;
        }
        dp = n * (x * p1 - p0) / (x * x - 1.0);
        const double w = 2.0 / ((1.0 - x * x) * dp * dp);
        rule.nodes[i] = mid - half * x;
        rule.nodes[n - 1 - i] = mid + half * x;
        rule.weights[i] = rule.weights[n - 1 - i] = half * w;
    }
    return rule;
}

// ---------------------------------------------------------------------------
// Builders

struct HelmholtzParams
{
    int max_index = 40;
    double nu_sq = 12.0;
    double theta = std::numbers::pi / 3.0;
    int quad_order = 64;
    double drop_threshold = default_drop_threshold;
};

namespace detail
{
/// Projections c * (2/pi) \int\int f sin(mx) sin(ny) of the Helmholtz source
/// f = -Lap(u) - nu^2 u for u = w exp(-i nu d.x), w = c x(pi-x) y(pi-y).
/// The source is a sum of four separable terms, so the tensor Gauss-Legendre
/// rule factorizes into products of one-dimensional sums.
inline std::vector<complex_t> helmholtz_source_coefficients(int max_index, double nu_sq, double theta, int quad_order)
{
    using std::numbers::pi;
    const double nu = std::sqrt(nu_sq);
    const double d1 = std::cos(theta);
    const double d2 = std::sin(theta);
    const double c = 16.0 / (pi * pi * pi * pi);
    const auto rule = gauss_legendre(quad_order, 0.0, pi);

    // integrals[shape][m-1] = \int_0^pi shape(t) exp(-i nu d t) sin(m t) dt
    // shapes: 0 -> 1, 1 -> t(pi-t), 2 -> pi-2t
    auto directional = [&](double d) {
        std::vector<std::vector<complex_t>> out(3, std::vector<complex_t>(max_index, 0.0));
        for (std::size_t q = 0; q < rule.nodes.size(); ++q)
        {
            const double t = rule.nodes[q];
            const complex_t wave = std::polar(rule.weights[q], -nu * d * t);
            const double shapes[3] = {1.0, t * (pi - t), pi - 2.0 * t};
            for (int m = 1; m <= max_index; ++m)
            {
                const double s = std::sin(m * t);
                for (int a = 0; a < 3; ++a)
                    out[a][m - 1] += shapes[a] * s * wave;
            }
        }
        return out;
    };
    const auto ix = directional(d1);
    const auto iy = directional(d2);
    const complex_t i_nu(0.0, 2.0 * nu);

    std::vector<complex_t> coef;
    coef.reserve(static_cast<std::size_t>(max_index) * max_index);
    for (int m = 1; m <= max_index; ++m)
        for (int n = 1; n <= max_index; ++n)
        {
            const complex_t s = 2.0 * ix[0][m - 1] * iy[1][n - 1] + 2.0 * ix[1][m - 1] * iy[0][n - 1] +
                                i_nu * d1 * ix[2][m - 1] * iy[1][n - 1] + i_nu * d2 * ix[1][m - 1] * iy[2][n - 1];
            coef.push_back(c * (2.0 / pi) * s);
        }
    return coef;
}
} // namespace detail

/// Exact modal model of -Lap - z on (0, pi)^2 with homogeneous Dirichlet
/// conditions, source chosen so that S(nu_sq) is a bubble times a plane wave,
/// and energy weights lambda + nu_sq.
inline ModalModel build_rectangle_helmholtz(const HelmholtzParams& p)
{
    if (p.max_index < 4)
        fail(ErrorKind::InvalidParameters, "max_index must be >= 4");
    if (p.quad_order < 20)
        fail(ErrorKind::InvalidParameters, "quad_order must be >= 20");
    if (!(p.nu_sq > 0.0))
        fail(ErrorKind::InvalidParameters, "nu_sq must be positive");

    const auto coef = detail::helmholtz_source_coefficients(p.max_index, p.nu_sq, p.theta, p.quad_order);
    const auto refined = detail::helmholtz_source_coefficients(p.max_index, p.nu_sq, p.theta, 2 * p.quad_order);
    double scale = 0.0;
    double change = 0.0;
    for (std::size_t k = 0; k < coef.size(); ++k)
    {
        scale = std::max(scale, std::abs(refined[k]));
        change = std::max(change, std::abs(refined[k] - coef[k]));
    }
    if (change > 1e-10 * scale)
    {
        char buf[32];
        std::snprintf(buf, sizeof buf, "%.3g", change / scale);
        fail(ErrorKind::QuadratureNotConverged,
             std::string("doubling quad_order changed a coefficient by ") + buf + " relative; raise quad_order");
    }

    std::vector<ModeEntry> modes;
    std::vector<double> weights;
    std::size_t k = 0;
    for (int m = 1; m <= p.max_index; ++m)
        for (int n = 1; n <= p.max_index; ++n, ++k)
        {
            const double lambda = static_cast<double>(m * m + n * n);
            modes.push_back({lambda, coef[k], std::pair{m, n}});
            weights.push_back(lambda + p.nu_sq);
        }
    return ModalModel(std::move(modes), InnerProductWeights(std::move(weights), WeightKind::Energy, p.nu_sq),
                      p.drop_threshold);
}

/// One mode per pole with real source coefficient equal to the residue norm,
/// under L2 weights.
inline ModalModel build_synthetic(const cvector& poles, const std::vector<double>& residue_norms,
                                  double drop_threshold = default_drop_threshold)
{
    if (poles.size() != residue_norms.size())
        fail(ErrorKind::LengthMismatch, "poles and residue_norms differ in length");
    if (poles.empty())
        fail(ErrorKind::InvalidParameters, "synthetic model needs at least one pole");
    for (std::size_t i = 0; i < poles.size(); ++i)
    {
        if (!(residue_norms[i] > 0.0))
            fail(ErrorKind::InvalidParameters, "residue norms must be positive");
        for (std::size_t j = i + 1; j < poles.size(); ++j)
            if (std::abs(poles[i] - poles[j]) <= 1e-10)
                fail(ErrorKind::DuplicatePoles, "poles " + std::to_string(i) + " and " + std::to_string(j) +
                                                    " are closer than 1e-10");
    }
    std::vector<ModeEntry> modes;
    for (std::size_t i = 0; i < poles.size(); ++i)
        modes.push_back({poles[i], residue_norms[i], std::nullopt});
    return ModalModel(std::move(modes), InnerProductWeights::l2(poles.size()), drop_threshold);
}

// ---------------------------------------------------------------------------
// Queries

inline CoefficientVector evaluate_exact(const ModalModel& model, complex_t z)
{
    for (const auto& g : model.groups())
        if (g.retained && std::abs(g.pole - z) <= 1e-12)
            fail(ErrorKind::PoleEvaluation, "evaluation point coincides with pole (" + std::to_string(g.pole.real()) +
                                                ", " + std::to_string(g.pole.imag()) + ")");
    CoefficientVector out(model.dimension());
    const auto& modes = model.modes();
    for (std::size_t k = 0; k < modes.size(); ++k)
        if (modes[k].source_coefficient != complex_t(0.0))
            out[k] = modes[k].source_coefficient / (modes[k].eigenvalue - z);
    return out;
}

namespace detail
{
inline void require_center(const ModalModel& model, complex_t z0)
{
    for (const auto& g : model.groups())
        if (g.retained && std::abs(g.pole - z0) <= 1e-10)
            fail(ErrorKind::CenterOnPole, "expansion center lies within 1e-10 of a pole");
}
} // namespace detail

/// Closed form S_gamma[k] = c_k / (lambda_k - z0)^{gamma+1}.
inline TaylorSeries taylor_coefficients(const ModalModel& model, complex_t z0, int order)
{
    if (order < 0)
        fail(ErrorKind::InvalidParameters, "Taylor order must be nonnegative");
    detail::require_center(model, z0);
    TaylorSeries t{z0, {}};
    t.coefficients.assign(order + 1, CoefficientVector(model.dimension()));
    const auto& modes = model.modes();
    for (std::size_t k = 0; k < modes.size(); ++k)
    {
        if (modes[k].source_coefficient == complex_t(0.0))
            continue;
        const complex_t inv = 1.0 / (modes[k].eigenvalue - z0);
        for (int g = 0; g <= order; ++g)
            t.coefficients[g][k] = modes[k].source_coefficient * std::pow(inv, g + 1);
    }
    return t;
}

/// Taylor coefficients through the shifted solves (L - z0) S_a = S_{a-1},
/// which are componentwise divisions in the modal basis.
inline TaylorSeries recursive_taylor(const ModalModel& model, complex_t z0, int order)
{
    if (order < 0)
        fail(ErrorKind::InvalidParameters, "Taylor order must be nonnegative");
    detail::require_center(model, z0);
    TaylorSeries t{z0, {}};
    t.coefficients.reserve(order + 1);
    t.coefficients.push_back(evaluate_exact(model, z0));
    const auto& modes = model.modes();
    for (int a = 1; a <= order; ++a)
    {
        CoefficientVector next(model.dimension());
        const auto& prev = t.coefficients.back();
        for (std::size_t k = 0; k < modes.size(); ++k)
            next[k] = prev[k] / (modes[k].eigenvalue - z0);
        t.coefficients.push_back(std::move(next));
    }
    return t;
}

/// Retained poles sorted by distance to z0; ties broken by (Re, Im).
inline std::vector<PoleInfo> pole_list(const ModalModel& model, complex_t z0)
{
    std::vector<PoleInfo> out;
    for (const auto& g : model.groups())
        if (g.retained)
            out.push_back({g.pole, g.residue_norm});
    std::stable_sort(out.begin(), out.end(), [&](const PoleInfo& a, const PoleInfo& b) {
        const double da = std::abs(a.pole - z0);
        const double db = std::abs(b.pole - z0);
        if (std::abs(da - db) > 1e-12 * std::max(da, db))
            return da < db;
        if (a.pole.real() != b.pole.real())
            return a.pole.real() < b.pole.real();
        return a.pole.imag() < b.pole.imag();
    });
    return out;
}
} // namespace lspade

#endif // LSPADE_MODAL_HPP
