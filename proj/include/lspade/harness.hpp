#ifndef LSPADE_HARNESS_HPP
#define LSPADE_HARNESS_HPP

// Study configuration and the experiment drivers behind the pade-mor CLI.
// Every driver returns its CSV/JSON output as a string; formatting is fixed
// (17 significant digits, '\n' line endings) so identical configurations
// produce byte-identical output.

#include "lspade/error.hpp"
#include "lspade/io.hpp"
#include "lspade/modal.hpp"
#include "lspade/pade.hpp"

#include <json.hpp>

#include <algorithm>
#include <cmath>
#include <limits>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

namespace lspade
{
enum class ERule
{
    MaxMN,
    MPlusN,
};

enum class VariantSelection
{
    Fast,
    Standard,
    Both,
};

struct ModelSpec
{
    enum class Kind
    {
        Helmholtz,
        Synthetic,
    };
    Kind kind = Kind::Helmholtz;
    HelmholtzParams helmholtz;
    cvector poles;
    std::vector<double> residue_norms;

    ModalModel build() const
    {
        if (kind == Kind::Helmholtz)
            return build_rectangle_helmholtz(helmholtz);
        return build_synthetic(poles, residue_norms);
    }
};

struct StudyConfig
{
    ModelSpec model;
    complex_t z0{12.0, 0.5};
    double k_lo = 9.0;
    double k_hi = 15.0;
    std::vector<int> M_list{2, 3, 4, 5, 6, 7, 8};
    int N = 2;
    /// Fast approximants use E_rule; standard ones always use E = M + N.
    ERule e_rule = ERule::MaxMN;
    double rho_factor = 1.0;
    int grid_points = 101;
    std::vector<complex_t> probes{{9.0, 0.0}, {11.0, 0.0}};
    std::vector<int> E_list{2, 3, 4, 5, 6, 7, 8};
    VariantSelection variants = VariantSelection::Both;
    FastPath fast_path = FastPath::QR;

    /// rho = factor * max_{z in K} |z - z0|
    double rho() const { return rho_factor * std::max(std::abs(k_lo - z0), std::abs(k_hi - z0)); }

    int fast_E(int M) const { return e_rule == ERule::MaxMN ? std::max(M, N) : M + N; }

    std::vector<double> grid() const
    {
        std::vector<double> z(grid_points);
        for (int i = 0; i < grid_points; ++i)
            z[i] = k_lo + (k_hi - k_lo) * static_cast<double>(i) / static_cast<double>(grid_points - 1);
        return z;
    }
};

namespace detail
{
/// 1-based line of the first occurrence of "key" in the raw config text.
inline int line_of_key(const std::string& text, const std::string& key)
{
    const auto pos = text.find("\"" + key + "\"");
    if (pos == std::string::npos)
        return 0;
    return 1 + static_cast<int>(std::count(text.begin(), text.begin() + static_cast<std::ptrdiff_t>(pos), '\n'));
}

struct ConfigReader
{
    const std::string& text;

    [[noreturn]] void error(const std::string& key, const std::string& message) const
    {
        const int line = line_of_key(text, key);
        std::string where = line > 0 ? "line " + std::to_string(line) + ": " : "";
        fail(ErrorKind::ConfigError, where + "'" + key + "' " + message);
    }

    template <typename T>
    T get(const json& j, const std::string& key) const
    {
        try
        {
            return j.at(key).get<T>();
        }
        catch (const json::exception& e)
        {
            error(key, std::string("is missing or has the wrong type (") + e.what() + ")");
        }
    }

    complex_t complex(const json& j, const std::string& key) const
    {
        try
        {
            return complex_from_json(j.at(key));
        }
        catch (const std::exception& e)
        {
            error(key, std::string("must be a complex number [re, im] (") + e.what() + ")");
        }
    }
};
} // namespace detail

/// Parses and validates a study configuration. Errors carry the line of the
/// offending key.
inline StudyConfig parse_config(const std::string& text)
{
    json j;
    try
    {
        j = json::parse(text);
    }
    catch (const json::parse_error& e)
    {
        const auto upto = std::min<std::size_t>(e.byte, text.size());
        const int line = 1 + static_cast<int>(std::count(text.begin(), text.begin() + static_cast<std::ptrdiff_t>(upto), '\n'));
        fail(ErrorKind::ConfigError, "line " + std::to_string(line) + ": invalid JSON (" + e.what() + ")");
    }
    if (!j.is_object())
        fail(ErrorKind::ConfigError, "line 1: configuration must be a JSON object");

    const detail::ConfigReader r{text};
    StudyConfig c;

    if (!j.contains("model"))
        r.error("model", "is required");
    const auto& m = j["model"];
    const auto kind = r.get<std::string>(m, "kind");
    if (kind == "helmholtz")
    {
        c.model.kind = ModelSpec::Kind::Helmholtz;
        c.model.helmholtz.max_index = m.value("max_index", 40);
        c.model.helmholtz.nu_sq = m.value("nu_sq", 12.0);
        c.model.helmholtz.theta = m.value("theta", std::numbers::pi / 3.0);
        c.model.helmholtz.quad_order = m.value("quad_order", 64);
        c.model.helmholtz.drop_threshold = m.value("drop_threshold", default_drop_threshold);
        if (c.model.helmholtz.max_index < 4)
            r.error("max_index", "must be >= 4");
        if (c.model.helmholtz.quad_order < 20)
            r.error("quad_order", "must be >= 20");
        if (!(c.model.helmholtz.nu_sq > 0.0))
            r.error("nu_sq", "must be positive");
    }
    else if (kind == "synthetic")
    {
        c.model.kind = ModelSpec::Kind::Synthetic;
        for (const auto& p : r.get<json>(m, "poles"))
            c.model.poles.push_back(complex_from_json(p));
        c.model.residue_norms = r.get<std::vector<double>>(m, "residue_norms");
        if (c.model.poles.size() != c.model.residue_norms.size())
            r.error("residue_norms", "must have one entry per pole");
        if (c.model.poles.empty())
            r.error("poles", "must not be empty");
    }
    else
        r.error("kind", "must be \"helmholtz\" or \"synthetic\"");

    if (j.contains("K"))
    {
        const auto k = r.get<std::vector<double>>(j, "K");
        if (k.size() != 2 || !std::isfinite(k[0]) || !std::isfinite(k[1]) || !(k[0] < k[1]))
            r.error("K", "must be a finite interval [lo, hi] with lo < hi");
        c.k_lo = k[0];
        c.k_hi = k[1];
    }
    // Chebyshev center of K lifted by i/2 unless given.
    c.z0 = j.contains("z0") ? r.complex(j, "z0") : complex_t(0.5 * (c.k_lo + c.k_hi), 0.5);
    if (j.contains("M_list"))
        c.M_list = r.get<std::vector<int>>(j, "M_list");
    if (c.M_list.empty() || *std::min_element(c.M_list.begin(), c.M_list.end()) < 0)
        r.error("M_list", "must be a nonempty list of nonnegative integers");
    c.N = j.value("N", 2);
    if (c.N < 0)
        r.error("N", "must be nonnegative");
    if (j.contains("E_rule"))
    {
        const auto rule = r.get<std::string>(j, "E_rule");
        if (rule == "MaxMN")
            c.e_rule = ERule::MaxMN;
        else if (rule == "MPlusN")
            c.e_rule = ERule::MPlusN;
        else
            r.error("E_rule", "must be \"MaxMN\" or \"MPlusN\"");
    }
    if (j.contains("rho_rule"))
    {
        const auto& rr = j["rho_rule"];
        if (rr.value("kind", std::string("RK_multiple")) != "RK_multiple")
            r.error("rho_rule", "only {\"kind\": \"RK_multiple\"} is supported");
        c.rho_factor = rr.value("factor", 1.0);
        if (!(c.rho_factor > 0.0))
            r.error("factor", "must be positive");
    }
    c.grid_points = j.value("grid_points", 101);
    if (c.grid_points < 2)
        r.error("grid_points", "must be >= 2");
    if (j.contains("probes"))
    {
        c.probes.clear();
        for (const auto& p : r.get<json>(j, "probes"))
            c.probes.push_back(complex_from_json(p));
    }
    if (j.contains("E_list"))
        c.E_list = r.get<std::vector<int>>(j, "E_list");
    if (c.E_list.empty() || !std::is_sorted(c.E_list.begin(), c.E_list.end()))
        r.error("E_list", "must be a nonempty ascending list");
    if (j.contains("variant"))
    {
        const auto v = r.get<std::string>(j, "variant");
        if (v == "fast")
            c.variants = VariantSelection::Fast;
        else if (v == "standard")
            c.variants = VariantSelection::Standard;
        else if (v == "both")
            c.variants = VariantSelection::Both;
        else
            r.error("variant", "must be \"fast\", \"standard\" or \"both\"");
    }
    if (j.contains("fast_path"))
    {
        const auto v = r.get<std::string>(j, "fast_path");
        if (v == "qr")
            c.fast_path = FastPath::QR;
        else if (v == "gramian")
            c.fast_path = FastPath::Gramian;
        else
            r.error("fast_path", "must be \"qr\" or \"gramian\"");
    }
    return c;
}

// ---------------------------------------------------------------------------
// Shared analysis helpers

/// Least-squares slope of log10(y) against x.
inline double log_slope(const std::vector<double>& x, const std::vector<double>& y)
{
    if (x.size() != y.size() || x.size() < 2)
        fail(ErrorKind::InvalidParameters, "slope fit needs at least two points");
    double mx = 0.0;
    double my = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i)
    {
        mx += x[i];
        my += std::log10(y[i]);
    }
    mx /= static_cast<double>(x.size());
    my /= static_cast<double>(x.size());
    double sxy = 0.0;
    double sxx = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i)
    {
        sxy += (x[i] - mx) * (std::log10(y[i]) - my);
        sxx += (x[i] - mx) * (x[i] - mx);
    }
    return sxy / sxx;
}

struct SlopeFit
{
    double slope = std::numeric_limits<double>::quiet_NaN(); // log10 per step
    double first = 0.0;
    double last = 0.0;
    std::size_t points = 0;

    double ratio() const { return std::pow(10.0, slope); }
};

/// Fit over the longest contiguous run of points with y in [lo, hi].
inline SlopeFit fit_longest_run(const std::vector<double>& x, const std::vector<double>& y, double lo, double hi)
{
    std::size_t best_start = 0;
    std::size_t best_len = 0;
    for (std::size_t i = 0; i < y.size();)
    {
        if (!(y[i] >= lo && y[i] <= hi))
        {
            ++i;
            continue;
        }
        std::size_t j = i;
        while (j < y.size() && y[j] >= lo && y[j] <= hi)
            ++j;
        if (j - i > best_len)
        {
            best_start = i;
            best_len = j - i;
        }
        i = j;
    }
    SlopeFit f;
    f.points = best_len;
    if (best_len < 2)
        return f;
    std::vector<double> xs(x.begin() + best_start, x.begin() + best_start + best_len);
    std::vector<double> ys(y.begin() + best_start, y.begin() + best_start + best_len);
    f.slope = log_slope(xs, ys);
    f.first = xs.front();
    f.last = xs.back();
    return f;
}

/// Window [1e-11, 1e-1]; falls back to everything above the 1e-12 floor when
/// fewer than three points qualify.
inline SlopeFit fit_convergence(const std::vector<double>& x, const std::vector<double>& y)
{
    auto f = fit_longest_run(x, y, 1e-11, 1e-1);
    if (f.points >= 3)
        return f;
    return fit_longest_run(x, y, 1e-12, std::numeric_limits<double>::infinity());
}

inline double median(std::vector<double> v)
{
    if (v.empty())
        return std::numeric_limits<double>::quiet_NaN();
    std::sort(v.begin(), v.end());
    const std::size_t n = v.size();
    return n % 2 ? v[n / 2] : 0.5 * (v[n / 2 - 1] + v[n / 2]);
}

struct PoleMatch
{
    std::vector<double> errors; // one per target, min over roots
    std::size_t unmatched_roots = 0;
};

/// Nearest-root matching: error_a = min_b |root_b - target_a|; roots that are
/// nearest to no target are counted as unmatched.
inline PoleMatch match_poles(const cvector& roots, const cvector& targets)
{
    PoleMatch out;
    std::vector<bool> used(roots.size(), false);
    for (const auto& t : targets)
    {
        double best = std::numeric_limits<double>::infinity();
        std::size_t arg = 0;
        for (std::size_t b = 0; b < roots.size(); ++b)
            if (std::abs(roots[b] - t) < best)
            {
                best = std::abs(roots[b] - t);
                arg = b;
            }
        out.errors.push_back(best);
        if (!roots.empty())
            used[arg] = true;
    }
    out.unmatched_roots = static_cast<std::size_t>(std::count(used.begin(), used.end(), false));
    return out;
}

inline double approximation_error(const ModalModel& model, const PadeApproximant& a, complex_t z, double* q_mag = nullptr)
{
    const auto e = evaluate(a, z);
    if (q_mag)
        *q_mag = e.denominator_magnitude;
    return norm(axpy(-1.0, e.value, evaluate_exact(model, z)), model.weights());
}

namespace detail
{
inline void require_center_off_poles(const ModalModel& model, complex_t z0)
{
    if (model.pole_distance(z0) <= 1e-10)
        fail(ErrorKind::CenterOnPole, "z0 lies on a pole of the model");
}

inline std::string csv_line(const std::vector<std::string>& fields)
{
    std::string s;
    for (std::size_t i = 0; i < fields.size(); ++i)
    {
        if (i)
            s += ',';
        s += fields[i];
    }
    return s + '\n';
}

inline std::string fmt_or_nan(double x) { return std::isfinite(x) ? format_real(x) : std::string("nan"); }
} // namespace detail

// ---------------------------------------------------------------------------
// Commands

/// JSON array of approximants, one per (M, variant).
inline std::string cmd_build(const StudyConfig& c)
{
    const auto model = c.model.build();
    detail::require_center_off_poles(model, c.z0);
    json out = json::array();
    for (int M : c.M_list)
    {
        std::vector<BuildParams> params;
        if (c.variants != VariantSelection::Standard)
            params.push_back(BuildParams::fast(c.z0, M, c.N, c.fast_E(M), c.fast_path));
        if (c.variants != VariantSelection::Fast)
            params.push_back(BuildParams::standard(c.z0, M, c.N, M + c.N, c.rho()));
        for (const auto& p : params)
        {
            const auto a = build(model, p);
            json entry = to_json(a);
            if (c.N > 0)
            {
                json poles = json::array();
                try
                {
                    for (const auto& r : approximant_poles(a))
                        poles.push_back(complex_to_json(r));
                }
                catch (const Error& e)
                {
                    if (e.kind() != ErrorKind::ConstantPolynomial)
                        throw;
                }
                entry["poles"] = poles;
            }
            out.push_back(std::move(entry));
        }
    }
    return out.dump(1) + '\n';
}

/// Error of fast and standard approximants on a uniform grid of K.
inline std::string cmd_sweep(const StudyConfig& c)
{
    const auto model = c.model.build();
    detail::require_center_off_poles(model, c.z0);
    const int emax = std::max(*std::max_element(c.M_list.begin(), c.M_list.end()) + c.N, 0);
    const auto taylor = taylor_coefficients(model, c.z0, std::max(emax, c.fast_E(*std::max_element(c.M_list.begin(), c.M_list.end()))));
    std::vector<PadeApproximant> fast;
    std::vector<PadeApproximant> standard;
    for (int M : c.M_list)
    {
        fast.push_back(build(taylor, BuildParams::fast(c.z0, M, c.N, c.fast_E(M), c.fast_path), model.weights()));
        standard.push_back(build(taylor, BuildParams::standard(c.z0, M, c.N, M + c.N, c.rho()), model.weights()));
    }

    std::vector<std::string> header{"z", "s_norm", "near_pole"};
    for (int M : c.M_list)
        header.push_back("abs_error_fast_M" + std::to_string(M));
    for (int M : c.M_list)
        header.push_back("abs_error_std_M" + std::to_string(M));
    for (int M : c.M_list)
        header.push_back("q_fast_M" + std::to_string(M));
    for (int M : c.M_list)
        header.push_back("q_std_M" + std::to_string(M));
    std::string csv = detail::csv_line(header);

    for (double x : c.grid())
    {
        const complex_t z(x, 0.0);
        const bool on_pole = model.pole_distance(z) <= 1e-12;
        std::vector<std::string> errs;
        std::vector<std::string> qs;
        bool near = on_pole;
        double s_norm = std::numeric_limits<double>::quiet_NaN();
        if (!on_pole)
            s_norm = norm(evaluate_exact(model, z), model.weights());
        for (const auto* family : {&fast, &standard})
            for (const auto& a : *family)
            {
                double q = 0.0;
                double err = std::numeric_limits<double>::quiet_NaN();
                if (on_pole)
                    q = std::abs(a.denominator(z));
                else
                    err = approximation_error(model, a, z, &q);
                near = near || q < 1e-13;
                errs.push_back(detail::fmt_or_nan(err));
                qs.push_back(format_real(q));
            }
        std::vector<std::string> row{format_complex(z), detail::fmt_or_nan(s_norm), near ? "1" : "0"};
        row.insert(row.end(), errs.begin(), errs.end());
        row.insert(row.end(), qs.begin(), qs.end());
        csv += detail::csv_line(row);
    }
    return csv;
}

/// Relative error at each probe versus M, with fitted and predicted per-M
/// log10 slopes; the prediction is log10(|z - z0| / |lambda_{N+1} - z0|).
inline std::string cmd_convergence(const StudyConfig& c)
{
    const auto model = c.model.build();
    detail::require_center_off_poles(model, c.z0);
    for (const auto& p : c.probes)
        if (model.pole_distance(p) < 0.05)
            fail(ErrorKind::ConfigError, "probe " + format_complex(p) + " lies within 0.05 of a pole");
    const auto poles = pole_list(model, c.z0);
    const double outer = static_cast<int>(poles.size()) > c.N ? std::abs(poles[c.N].pole - c.z0)
                                                              : std::numeric_limits<double>::infinity();
    const int mmax = *std::max_element(c.M_list.begin(), c.M_list.end());
    const auto taylor = taylor_coefficients(model, c.z0, std::max(mmax + c.N, c.fast_E(mmax)));

    std::string csv = detail::csv_line({"variant", "probe", "M", "abs_error", "rel_error", "q_magnitude",
                                        "fitted_slope", "predicted_slope", "fitted_ratio", "predicted_ratio",
                                        "fit_first_M", "fit_last_M"});
    for (const Variant v : {Variant::Fast, Variant::Standard})
    {
        if ((v == Variant::Fast && c.variants == VariantSelection::Standard) ||
            (v == Variant::Standard && c.variants == VariantSelection::Fast))
            continue;
        for (const auto& z : c.probes)
        {
            const double s_norm = norm(evaluate_exact(model, z), model.weights());
            std::vector<double> ms;
            std::vector<double> abs_err;
            std::vector<double> rel_err;
            std::vector<double> qmag;
            for (int M : c.M_list)
            {
                const auto p = v == Variant::Fast ? BuildParams::fast(c.z0, M, c.N, c.fast_E(M), c.fast_path)
                                                  : BuildParams::standard(c.z0, M, c.N, M + c.N, c.rho());
                const auto a = build(taylor, p, model.weights());
                double q = 0.0;
                const double err = approximation_error(model, a, z, &q);
                ms.push_back(M);
                abs_err.push_back(err);
                rel_err.push_back(err / s_norm);
                qmag.push_back(q);
            }
            const auto fit = fit_convergence(ms, rel_err);
            const double predicted_ratio = std::abs(z - c.z0) / outer;
            for (std::size_t i = 0; i < ms.size(); ++i)
                csv += detail::csv_line({v == Variant::Fast ? "fast" : "standard", format_complex(z),
                                         std::to_string(static_cast<int>(ms[i])), format_real(abs_err[i]),
                                         format_real(rel_err[i]), format_real(qmag[i]), detail::fmt_or_nan(fit.slope),
                                         format_real(std::log10(predicted_ratio)), detail::fmt_or_nan(fit.ratio()),
                                         format_real(predicted_ratio), std::to_string(static_cast<int>(fit.first)),
                                         std::to_string(static_cast<int>(fit.last))});
        }
    }
    return csv;
}

struct PoleStudyRow
{
    Variant variant;
    int E = 0;
    std::vector<double> errors;
    std::vector<double> predicted; // |(lambda_a - z0)/(lambda_{N+1} - z0)|^{2E}
    std::size_t unmatched = 0;
};

/// Pole errors of fast (M = E) and standard (M = E - N) approximants against
/// the N poles nearest z0.
inline std::vector<PoleStudyRow> pole_study(const ModalModel& model, const StudyConfig& c)
{
    detail::require_center_off_poles(model, c.z0);
    if (c.N < 1)
        fail(ErrorKind::ConfigError, "pole study needs N >= 1");
    if (c.E_list.front() < c.N)
        fail(ErrorKind::ConfigError, "E_list entries must be >= N");
    const auto poles = pole_list(model, c.z0);
    if (static_cast<int>(poles.size()) < c.N + 1)
        fail(ErrorKind::ConfigError, "model has fewer than N+1 poles");
    cvector targets;
    for (int a = 0; a < c.N; ++a)
        targets.push_back(poles[a].pole);
    const double outer = std::abs(poles[c.N].pole - c.z0);
    const auto taylor = taylor_coefficients(model, c.z0, c.E_list.back());

    std::vector<PoleStudyRow> rows;
    for (const Variant v : {Variant::Fast, Variant::Standard})
    {
        if ((v == Variant::Fast && c.variants == VariantSelection::Standard) ||
            (v == Variant::Standard && c.variants == VariantSelection::Fast))
            continue;
        for (int E : c.E_list)
        {
            const auto p = v == Variant::Fast ? BuildParams::fast(c.z0, E, c.N, E, c.fast_path)
                                              : BuildParams::standard(c.z0, E - c.N, c.N, E, c.rho());
            const auto a = build(taylor, p, model.weights());
            cvector r;
            try
            {
                r = approximant_poles(a);
            }
            catch (const Error& e)
            {
                if (e.kind() != ErrorKind::ConstantPolynomial)
                    throw;
            }
            auto match = match_poles(r, targets);
            PoleStudyRow row{v, E, match.errors, {}, match.unmatched_roots};
            for (const auto& t : targets)
                row.predicted.push_back(std::pow(std::abs(t - c.z0) / outer, 2.0 * E));
            rows.push_back(std::move(row));
        }
    }
    return rows;
}

inline std::string cmd_poles(const StudyConfig& c)
{
    const auto model = c.model.build();
    const auto rows = pole_study(model, c);
    const auto poles = pole_list(model, c.z0);

    std::vector<std::string> header{"variant", "E"};
    for (int a = 0; a < c.N; ++a)
        header.push_back("err_pole" + std::to_string(a + 1));
    for (int a = 0; a < c.N; ++a)
        header.push_back("predicted_rate_pole" + std::to_string(a + 1));
    for (int a = 0; a < c.N; ++a)
        header.push_back("fitted_factor_pole" + std::to_string(a + 1));
    for (int a = 0; a < c.N; ++a)
        header.push_back("predicted_factor_pole" + std::to_string(a + 1));
    header.push_back("unmatched_roots");
    std::string csv = detail::csv_line(header);

    const double outer = std::abs(poles[c.N].pole - c.z0);
    for (const Variant v : {Variant::Fast, Variant::Standard})
    {
        std::vector<const PoleStudyRow*> mine;
        for (const auto& r : rows)
            if (r.variant == v)
                mine.push_back(&r);
        if (mine.empty())
            continue;
        std::vector<std::string> fitted;
        for (int a = 0; a < c.N; ++a)
        {
            std::vector<double> es;
            std::vector<double> ys;
            for (const auto* r : mine)
            {
                es.push_back(r->E);
                ys.push_back(r->errors[a]);
            }
            const auto fit = fit_convergence(es, ys);
            fitted.push_back(detail::fmt_or_nan(fit.ratio()));
        }
        for (const auto* r : mine)
        {
            std::vector<std::string> row{v == Variant::Fast ? "fast" : "standard", std::to_string(r->E)};
            for (double e : r->errors)
                row.push_back(format_real(e));
            for (double p : r->predicted)
                row.push_back(format_real(p));
            row.insert(row.end(), fitted.begin(), fitted.end());
            for (int a = 0; a < c.N; ++a)
                row.push_back(format_real(std::norm(poles[a].pole - c.z0) / (outer * outer)));
            row.push_back(std::to_string(r->unmatched));
            csv += detail::csv_line(row);
        }
    }
    return csv;
}

struct CompareRow
{
    int E = 0;
    double z = 0.0;
    double err_fast = 0.0;
    double err_std = 0.0;
    double err_std_plus_n = 0.0;
    double q_fast = 0.0;
    double q_std = 0.0;
};

/// Fast (M = E) against standard (M = E - N) at an equal derivative budget E,
/// and against standard with N more derivatives (M = E).
inline std::vector<CompareRow> compare_study(const ModalModel& model, const StudyConfig& c)
{
    detail::require_center_off_poles(model, c.z0);
    if (c.E_list.front() < c.N)
        fail(ErrorKind::ConfigError, "E_list entries must be >= N");
    const auto taylor = taylor_coefficients(model, c.z0, c.E_list.back() + c.N);
    std::vector<CompareRow> rows;
    for (int E : c.E_list)
    {
        const auto fast = build(taylor, BuildParams::fast(c.z0, E, c.N, E, c.fast_path), model.weights());
        const auto std_eq = build(taylor, BuildParams::standard(c.z0, E - c.N, c.N, E, c.rho()), model.weights());
        const auto std_more = build(taylor, BuildParams::standard(c.z0, E, c.N, E + c.N, c.rho()), model.weights());
        for (double x : c.grid())
        {
            const complex_t z(x, 0.0);
            if (model.pole_distance(z) <= 1e-12)
                continue;
            CompareRow r{E, x};
            r.err_fast = approximation_error(model, fast, z, &r.q_fast);
            r.err_std = approximation_error(model, std_eq, z, &r.q_std);
            r.err_std_plus_n = approximation_error(model, std_more, z);
            rows.push_back(r);
        }
    }
    return rows;
}

inline std::string cmd_compare(const StudyConfig& c)
{
    const auto model = c.model.build();
    const auto rows = compare_study(model, c);
    std::string csv = detail::csv_line({"E", "z", "err_fast", "err_std", "ratio_fast_std", "err_std_plusN",
                                        "ratio_fast_std_plusN", "q_fast", "q_std"});
    for (const auto& r : rows)
        csv += detail::csv_line({std::to_string(r.E), format_complex({r.z, 0.0}), format_real(r.err_fast),
                                 format_real(r.err_std), detail::fmt_or_nan(r.err_fast / r.err_std),
                                 format_real(r.err_std_plus_n), detail::fmt_or_nan(r.err_fast / r.err_std_plus_n),
                                 format_real(r.q_fast), format_real(r.q_std)});
    return csv;
}

/// Exit status convention of the CLI: 2 for configuration problems, 3 for
/// numerical failures.
inline int exit_code_for(ErrorKind kind)
{
    switch (kind)
    {
    case ErrorKind::ConfigError:
    case ErrorKind::InvalidParameters:
    case ErrorKind::CenterOnPole:
    case ErrorKind::DuplicatePoles:
    case ErrorKind::LengthMismatch:
        return 2;
    default:
        return 3;
    }
}
} // namespace lspade

#endif // LSPADE_HARNESS_HPP
