#ifndef LSPADE_IO_HPP
#define LSPADE_IO_HPP

// JSON and CSV encodings. Complex scalars are [re, im] in JSON and "re+imj"
// text in CSV; reals are printed with 17 significant digits.

#include "lspade/error.hpp"
#include "lspade/modal.hpp"
#include "lspade/pade.hpp"
#include "lspade/poly.hpp"

#include <json.hpp>

#include <cmath>
#include <cstdio>
#include <limits>
#include <string>
#include <vector>

namespace lspade
{
using json = nlohmann::json;

inline json complex_to_json(complex_t z) { return json::array({z.real(), z.imag()}); }

inline complex_t complex_from_json(const json& j)
{
    if (j.is_number())
        return {j.get<double>(), 0.0};
    if (!j.is_array() || j.size() != 2 || !j[0].is_number() || !j[1].is_number())
        fail(ErrorKind::ConfigError, "complex number must be [re, im], got " + j.dump());
    return {j[0].get<double>(), j[1].get<double>()};
}

inline std::string format_real(double x)
{
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", x);
    return buf;
}

inline std::string format_complex(complex_t z)
{
    std::string out = format_real(z.real());
    const double im = z.imag();
    if (std::signbit(im))
        out += "-" + format_real(-im);
    else
        out += "+" + format_real(im);
    return out + "j";
}

// --- polynomials -------------------------------------------------------------

inline json to_json(const ShiftedPolynomial& p)
{
    json coeffs = json::array();
    for (const auto& c : p.coeffs())
        coeffs.push_back(complex_to_json(c));
    return {{"center", complex_to_json(p.center())}, {"coeffs", coeffs}};
}

inline ShiftedPolynomial polynomial_from_json(const json& j)
{
    cvector c;
    for (const auto& x : j.at("coeffs"))
        c.push_back(complex_from_json(x));
    return {complex_from_json(j.at("center")), std::move(c)};
}

// --- modal models ------------------------------------------------------------

inline json to_json(const ModalModel& model)
{
    json modes = json::array();
    for (const auto& m : model.modes())
    {
        json e = {{"lambda", complex_to_json(m.eigenvalue)}, {"coef", complex_to_json(m.source_coefficient)}};
        if (m.tag)
            e["tag"] = json::array({m.tag->first, m.tag->second});
        modes.push_back(std::move(e));
    }
    json weights;
    if (model.weights().kind() == WeightKind::Energy)
        weights = {{"kind", "energy"}, {"shift", model.weights().shift()}};
    else
        weights = {{"kind", "l2"}};
    return {{"modes", modes}, {"weights", weights}, {"drop_threshold", model.drop_threshold()}};
}

inline ModalModel model_from_json(const json& j)
{
    std::vector<ModeEntry> modes;
    for (const auto& e : j.at("modes"))
    {
        ModeEntry m{complex_from_json(e.at("lambda")), complex_from_json(e.at("coef")), std::nullopt};
        if (e.contains("tag"))
            m.tag = std::pair{e["tag"][0].get<int>(), e["tag"][1].get<int>()};
        modes.push_back(m);
    }
    const auto& wj = j.at("weights");
    const std::string kind = wj.at("kind").get<std::string>();
    InnerProductWeights w;
    if (kind == "energy")
    {
        const double shift = wj.at("shift").get<double>();
        std::vector<double> values;
        for (const auto& m : modes)
            values.push_back(m.eigenvalue.real() + shift);
        w = InnerProductWeights(std::move(values), WeightKind::Energy, shift);
    }
    else if (kind == "l2")
        w = InnerProductWeights::l2(modes.size());
    else
        fail(ErrorKind::ConfigError, "unknown weight kind '" + kind + "'");
    return ModalModel(std::move(modes), std::move(w), j.value("drop_threshold", default_drop_threshold));
}

// --- approximants ------------------------------------------------------------

// Non-finite reals (an infinite condition number) are written as null.
inline json real_to_json(double x) { return std::isfinite(x) ? json(x) : json(nullptr); }

inline double real_from_json(const json& j, const char* key, double fallback)
{
    if (!j.contains(key))
        return fallback;
    if (j[key].is_null())
        return std::numeric_limits<double>::infinity();
    return j[key].get<double>();
}

inline json to_json(const Diagnostics& d)
{
    return {{"min_eigenvalue", real_to_json(d.min_eigenvalue)},
            {"solver_eigenvalue", real_to_json(d.solver_eigenvalue)},
            {"next_eigenvalue", real_to_json(d.next_eigenvalue)},
            {"degenerate", d.degenerate},
            {"r_condition", real_to_json(d.r_condition)},
            {"gramian_condition", real_to_json(d.gramian_condition)},
            {"rank_deficient", d.rank_deficient}};
}

inline json to_json(const BuildParams& p)
{
    json j = {{"z0", complex_to_json(p.z0)},
              {"M", p.M},
              {"N", p.N},
              {"E", p.E},
              {"variant", p.variant == Variant::Fast ? "fast" : "standard"}};
    if (p.variant == Variant::Standard)
        j["rho"] = p.rho;
    else
        j["fast_path"] = p.fast_path == FastPath::QR ? "qr" : "gramian";
    return j;
}

inline json to_json(const PadeApproximant& a)
{
    json num = json::array();
    for (const auto& c : a.numerator.coeffs)
    {
        json v = json::array();
        for (const auto& x : c)
            v.push_back(complex_to_json(x));
        num.push_back(std::move(v));
    }
    return {{"params", to_json(a.params)},
            {"denominator", to_json(a.denominator)},
            {"numerator", num},
            {"diagnostics", to_json(a.diagnostics)}};
}

inline PadeApproximant approximant_from_json(const json& j)
{
    PadeApproximant a;
    const auto& p = j.at("params");
    a.params.z0 = complex_from_json(p.at("z0"));
    a.params.M = p.at("M").get<int>();
    a.params.N = p.at("N").get<int>();
    a.params.E = p.at("E").get<int>();
    a.params.variant = p.at("variant").get<std::string>() == "standard" ? Variant::Standard : Variant::Fast;
    a.params.rho = p.value("rho", 1.0);
    a.params.fast_path = p.value("fast_path", std::string("qr")) == "gramian" ? FastPath::Gramian : FastPath::QR;
    a.denominator = polynomial_from_json(j.at("denominator"));
    a.numerator.center = a.params.z0;
    for (const auto& v : j.at("numerator"))
    {
        cvector c;
        for (const auto& x : v)
            c.push_back(complex_from_json(x));
        a.numerator.coeffs.emplace_back(std::move(c));
    }
    const auto& d = j.at("diagnostics");
    a.diagnostics.min_eigenvalue = real_from_json(d, "min_eigenvalue", 0.0);
    a.diagnostics.solver_eigenvalue = real_from_json(d, "solver_eigenvalue", 0.0);
    a.diagnostics.next_eigenvalue = real_from_json(d, "next_eigenvalue", 0.0);
    a.diagnostics.degenerate = d.value("degenerate", false);
    a.diagnostics.r_condition = real_from_json(d, "r_condition", 0.0);
    a.diagnostics.gramian_condition = real_from_json(d, "gramian_condition", 0.0);
    a.diagnostics.rank_deficient = d.value("rank_deficient", false);
    return a;
}
} // namespace lspade

#endif // LSPADE_IO_HPP
