#include "lspade/harness.hpp"

#include <gtest/gtest.h>

#include <algorithm>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <sys/wait.h>

using namespace lspade;

namespace
{
const char* synthetic_config = R"({
  "model": {"kind": "synthetic", "poles": [[1, 0], [4, 0]], "residue_norms": [1, 2]},
  "K": [0, 6],
  "z0": [2.5, 0.3],
  "M_list": [1, 2, 3],
  "N": 2,
  "grid_points": 25,
  "probes": [[0.5, 0], [3, 0]],
  "E_list": [2, 3, 4]
})";

std::string read_file(const std::filesystem::path& p)
{
    std::ifstream in(p, std::ios::binary);
    std::stringstream s;
    s << in.rdbuf();
    return s.str();
}

std::vector<std::vector<std::string>> parse_csv(const std::string& text)
{
    std::vector<std::vector<std::string>> rows;
    std::stringstream lines(text);
    std::string line;
    while (std::getline(lines, line))
    {
        std::vector<std::string> row;
        std::stringstream fields(line);
        std::string f;
        while (std::getline(fields, f, ','))
            row.push_back(f);
        rows.push_back(row);
    }
    return rows;
}

std::size_t column(const std::vector<std::string>& header, const std::string& name)
{
    const auto it = std::find(header.begin(), header.end(), name);
    if (it == header.end())
        throw std::runtime_error("missing column " + name);
    return static_cast<std::size_t>(it - header.begin());
}

ErrorKind error_kind_of(const std::string& cfg)
{
    try
    {
        parse_config(cfg);
    }
    catch (const Error& e)
    {
        return e.kind();
    }
    return ErrorKind::InvalidParameters;
}

std::string error_message_of(const std::string& cfg)
{
    try
    {
        parse_config(cfg);
    }
    catch (const Error& e)
    {
        return e.what();
    }
    return "";
}

int run_cli(const std::string& args)
{
    const int status = std::system((std::string(PADE_MOR_EXE) + " " + args + " 2>/dev/null").c_str());
    return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

std::filesystem::path temp_dir()
{
    auto d = std::filesystem::temp_directory_path() / "pade_mor_harness_test";
    std::filesystem::create_directories(d);
    return d;
}

void write_file(const std::filesystem::path& p, const std::string& s) { std::ofstream(p, std::ios::binary) << s; }
} // namespace

// --- config parsing ------------------------------------------------------------

TEST(Config, Defaults)
{
    const auto c = parse_config(R"({"model": {"kind": "helmholtz"}})");
    EXPECT_EQ(c.model.kind, ModelSpec::Kind::Helmholtz);
    EXPECT_EQ(c.model.helmholtz.max_index, 40);
    EXPECT_EQ(c.z0, complex_t(12.0, 0.5));
    EXPECT_EQ(c.N, 2);
    EXPECT_EQ(c.grid_points, 101);
    EXPECT_EQ(c.fast_E(5), 5);
    EXPECT_EQ(c.fast_E(1), 2);
    EXPECT_NEAR(c.rho(), std::sqrt(9.25), 1e-15);
}

TEST(Config, ChebyshevCenterDefault)
{
    const auto c = parse_config(R"({"model": {"kind": "helmholtz"}, "K": [2, 6]})");
    EXPECT_EQ(c.z0, complex_t(4.0, 0.5));
}

TEST(Config, FullSynthetic)
{
    const auto c = parse_config(synthetic_config);
    EXPECT_EQ(c.model.kind, ModelSpec::Kind::Synthetic);
    EXPECT_EQ(c.model.poles.size(), 2u);
    EXPECT_EQ(c.M_list, (std::vector<int>{1, 2, 3}));
    EXPECT_EQ(c.grid().size(), 25u);
    EXPECT_EQ(c.grid().front(), 0.0);
    EXPECT_EQ(c.grid().back(), 6.0);
}

TEST(Config, Rules)
{
    const auto c = parse_config(
        R"({"model": {"kind": "helmholtz"}, "E_rule": "MPlusN", "rho_rule": {"kind": "RK_multiple", "factor": 10}, "fast_path": "gramian", "variant": "fast"})");
    EXPECT_EQ(c.fast_E(3), 5);
    EXPECT_NEAR(c.rho(), 10.0 * std::sqrt(9.25), 1e-13);
    EXPECT_EQ(c.fast_path, FastPath::Gramian);
    EXPECT_EQ(c.variants, VariantSelection::Fast);
}

TEST(Config, ErrorsCarryLine)
{
    const std::string bad_grid = "{\n  \"model\": {\"kind\": \"helmholtz\"},\n  \"grid_points\": 1\n}";
    EXPECT_EQ(error_kind_of(bad_grid), ErrorKind::ConfigError);
    EXPECT_NE(error_message_of(bad_grid).find("line 3"), std::string::npos) << error_message_of(bad_grid);

    const std::string bad_k = "{\n\"model\": {\"kind\": \"helmholtz\"},\n\n\"K\": [5, 1]\n}";
    EXPECT_NE(error_message_of(bad_k).find("line 4"), std::string::npos) << error_message_of(bad_k);

    const std::string bad_json = "{\n\"model\": {\"kind\": \"helmholtz\"},\n\"N\": 2,,\n}";
    EXPECT_EQ(error_kind_of(bad_json), ErrorKind::ConfigError);
    EXPECT_NE(error_message_of(bad_json).find("line 3"), std::string::npos) << error_message_of(bad_json);
}

TEST(Config, Rejections)
{
    EXPECT_EQ(error_kind_of("[]"), ErrorKind::ConfigError);
    EXPECT_EQ(error_kind_of("{}"), ErrorKind::ConfigError);
    EXPECT_EQ(error_kind_of(R"({"model": {"kind": "fem"}})"), ErrorKind::ConfigError);
    EXPECT_EQ(error_kind_of(R"({"model": {"kind": "helmholtz", "max_index": 3}})"), ErrorKind::ConfigError);
    EXPECT_EQ(error_kind_of(R"({"model": {"kind": "helmholtz"}, "K": [0, "x"]})"), ErrorKind::ConfigError);
    EXPECT_EQ(error_kind_of(R"({"model": {"kind": "helmholtz"}, "M_list": []})"), ErrorKind::ConfigError);
    EXPECT_EQ(error_kind_of(R"({"model": {"kind": "helmholtz"}, "E_list": [4, 3]})"), ErrorKind::ConfigError);
    EXPECT_EQ(error_kind_of(R"({"model": {"kind": "helmholtz"}, "E_rule": "Other"})"), ErrorKind::ConfigError);
    EXPECT_EQ(error_kind_of(R"({"model": {"kind": "helmholtz"}, "z0": [1, 2, 3]})"), ErrorKind::ConfigError);
    EXPECT_EQ(error_kind_of(R"({"model": {"kind": "synthetic", "poles": [1, 2], "residue_norms": [1]}})"),
              ErrorKind::ConfigError);
}

// --- analysis helpers ----------------------------------------------------------

TEST(Slope, ExactGeometricSequence)
{
    std::vector<double> x{1, 2, 3, 4, 5};
    std::vector<double> y;
    for (double v : x)
        y.push_back(3.0 * std::pow(0.25, v));
    const auto f = fit_convergence(x, y);
    EXPECT_NEAR(f.ratio(), 0.25, 1e-12);
    // 0.75 and 0.1875 sit above the window.
    EXPECT_EQ(f.points, 3u);
    EXPECT_EQ(f.first, 3.0);
}

TEST(Slope, WindowSkipsFloorAndPreasymptotic)
{
    std::vector<double> x{1, 2, 3, 4, 5, 6, 7};
    std::vector<double> y{10.0, 1e-2, 1e-4, 1e-6, 1e-8, 1e-13, 1e-13};
    const auto f = fit_convergence(x, y);
    EXPECT_EQ(f.first, 2.0);
    EXPECT_EQ(f.last, 5.0);
    EXPECT_NEAR(f.ratio(), 1e-2, 1e-12);
}

TEST(Slope, FallsBackAboveFloor)
{
    std::vector<double> x{1, 2, 3, 4};
    std::vector<double> y{0.9, 0.5, 0.3, 0.2};
    const auto f = fit_convergence(x, y);
    EXPECT_EQ(f.points, 4u);
    EXPECT_LT(f.ratio(), 1.0);
}

TEST(Median, OddEven)
{
    EXPECT_EQ(median({3, 1, 2}), 2.0);
    EXPECT_EQ(median({4, 1, 3, 2}), 2.5);
    EXPECT_TRUE(std::isnan(median({})));
}

TEST(PoleMatching, NearestRoot)
{
    const auto m = match_poles({complex_t(13.01), complex_t(9.9), complex_t(30.0)}, {13.0, 10.0});
    EXPECT_NEAR(m.errors[0], 0.01, 1e-12);
    EXPECT_NEAR(m.errors[1], 0.1, 1e-12);
    EXPECT_EQ(m.unmatched_roots, 1u);
}

// --- commands ------------------------------------------------------------------

TEST(Commands, BuildSyntheticExact)
{
    auto c = parse_config(synthetic_config);
    c.M_list = {1, 2};
    const auto j = json::parse(cmd_build(c));
    ASSERT_EQ(j.size(), 4u);
    for (const auto& a : j)
    {
        EXPECT_LE(a["diagnostics"]["min_eigenvalue"].get<double>(), 1e-20);
        std::vector<complex_t> poles;
        for (const auto& p : a["poles"])
            poles.push_back(complex_from_json(p));
        ASSERT_EQ(poles.size(), 2u);
        std::sort(poles.begin(), poles.end(), [](complex_t x, complex_t y) { return x.real() < y.real(); });
        EXPECT_NEAR(std::abs(poles[0] - 1.0), 0.0, 1e-8);
        EXPECT_NEAR(std::abs(poles[1] - 4.0), 0.0, 1e-8);
    }
}

TEST(Commands, BuildSquareM8)
{
    auto c = parse_config(R"({"model": {"kind": "helmholtz"}, "M_list": [8], "variant": "fast"})");
    const auto j = json::parse(cmd_build(c));
    ASSERT_EQ(j.size(), 1u);
    EXPECT_EQ(j[0]["denominator"]["coeffs"].size(), 3u);
    std::vector<double> re;
    for (const auto& p : j[0]["poles"])
        re.push_back(complex_from_json(p).real());
    ASSERT_EQ(re.size(), 2u);
    EXPECT_NEAR(re[0], 13.0, 1e-3);
    EXPECT_NEAR(re[1], 10.0, 1e-3);
}

TEST(Commands, CenterOnPole)
{
    auto c = parse_config(synthetic_config);
    c.z0 = 4.0;
    try
    {
        cmd_build(c);
        FAIL();
    }
    catch (const Error& e)
    {
        EXPECT_EQ(e.kind(), ErrorKind::CenterOnPole);
        EXPECT_EQ(exit_code_for(e.kind()), 2);
    }
}

TEST(Commands, SweepSyntheticExact)
{
    const auto rows = parse_csv(cmd_sweep(parse_config(synthetic_config)));
    ASSERT_EQ(rows.size(), 26u);
    const auto& h = rows[0];
    EXPECT_EQ(h[0], "z");
    int checked = 0;
    for (std::size_t r = 1; r < rows.size(); ++r)
        for (int M : {2, 3})
            for (const char* v : {"fast", "std"})
            {
                const auto& f = rows[r][column(h, std::string("abs_error_") + v + "_M" + std::to_string(M))];
                if (f == "nan")
                    continue;
                EXPECT_LE(std::stod(f), 1e-9) << rows[r][0] << " " << v << " M" << M;
                ++checked;
            }
    EXPECT_GT(checked, 80);
    // Grid points on the poles stay in the table, flagged.
    EXPECT_EQ(rows[1 + 4][0], "1+0j");
    EXPECT_EQ(rows[1 + 4][column(h, "near_pole")], "1");
    EXPECT_EQ(rows[1 + 16][column(h, "near_pole")], "1");
    EXPECT_EQ(rows[1 + 5][column(h, "near_pole")], "0");
}

TEST(Commands, SweepSquareShape)
{
    const auto rows = parse_csv(cmd_sweep(parse_config(R"({"model": {"kind": "helmholtz"}})")));
    ASSERT_EQ(rows.size(), 102u);
    const auto& h = rows[0];
    ASSERT_EQ(h.size(), 3u + 4u * 7u);
    EXPECT_EQ(rows[1][0], "9+0j");
    EXPECT_EQ(rows[101][0], "15+0j");
    EXPECT_EQ(rows[1 + 50][0], "12+0j");
    for (std::size_t r = 1; r < rows.size(); ++r)
        EXPECT_EQ(rows[r][column(h, "near_pole")], "0");
}

TEST(Commands, SweepSquareM8Regression)
{
    const auto rows = parse_csv(cmd_sweep(parse_config(R"({"model": {"kind": "helmholtz"}})")));
    const auto& h = rows[0];
    double m8 = 0.0;
    double m2 = 0.0;
    for (std::size_t r = 1; r < rows.size(); ++r)
    {
        const double z = std::stod(rows[r][0]);
        if (z < 11.5 || z > 12.5)
            continue;
        m8 = std::max(m8, std::stod(rows[r][column(h, "abs_error_fast_M8")]));
        m2 = std::max(m2, std::stod(rows[r][column(h, "abs_error_fast_M2")]));
    }
    EXPECT_LE(m8, 1e-4 * m2);
}

TEST(Commands, ConvergencePredictedRatios)
{
    const auto rows = parse_csv(cmd_convergence(parse_config(R"({"model": {"kind": "helmholtz"}, "variant": "fast"})")));
    const auto& h = rows[0];
    for (std::size_t r = 1; r < rows.size(); ++r)
    {
        const double predicted = std::stod(rows[r][column(h, "predicted_ratio")]);
        if (rows[r][column(h, "probe")] == "11+0j")
            EXPECT_NEAR(predicted, std::sqrt(1.25) / std::sqrt(16.25), 1e-15);
        else
            EXPECT_NEAR(predicted, std::sqrt(9.25) / std::sqrt(16.25), 1e-15);
    }
}

TEST(Commands, ConvergenceProbeOnPoleRejected)
{
    auto c = parse_config(R"({"model": {"kind": "helmholtz"}})");
    c.probes = {13.02};
    try
    {
        cmd_convergence(c);
        FAIL();
    }
    catch (const Error& e)
    {
        EXPECT_EQ(e.kind(), ErrorKind::ConfigError);
    }
}

TEST(Commands, ConvergenceSlopeStableInRho)
{
    std::vector<double> slopes;
    for (const char* f : {"0.1", "1", "10"})
    {
        const auto rows = parse_csv(cmd_convergence(parse_config(
            std::string(R"({"model": {"kind": "helmholtz"}, "variant": "standard", "probes": [[11, 0]], "rho_rule": {"kind": "RK_multiple", "factor": )") +
            f + "}}")));
        slopes.push_back(std::stod(rows[1][column(rows[0], "fitted_slope")]));
    }
    for (double s : slopes)
        EXPECT_NEAR(s, slopes[1], 0.2 * std::abs(slopes[1]));
}

TEST(Commands, PolesPredictedFactors)
{
    const auto rows = parse_csv(cmd_poles(parse_config(R"({"model": {"kind": "helmholtz"}})")));
    const auto& h = rows[0];
    ASSERT_EQ(rows.size(), 15u);
    EXPECT_NEAR(std::stod(rows[1][column(h, "predicted_factor_pole1")]), 1.0 / 13.0, 1e-15);
    EXPECT_NEAR(std::stod(rows[1][column(h, "predicted_factor_pole2")]), 17.0 / 65.0, 1e-15);
    EXPECT_EQ(rows[1][0], "fast");
    EXPECT_EQ(rows[8][0], "standard");
}

TEST(Commands, PolesRejectEBelowN)
{
    auto c = parse_config(R"({"model": {"kind": "helmholtz"}, "E_list": [1, 2, 3]})");
    try
    {
        cmd_poles(c);
        FAIL();
    }
    catch (const Error& e)
    {
        EXPECT_EQ(e.kind(), ErrorKind::ConfigError);
    }
}

TEST(Commands, CompareSyntheticExact)
{
    const auto rows = parse_csv(cmd_compare(parse_config(synthetic_config)));
    const auto& h = rows[0];
    for (std::size_t r = 1; r < rows.size(); ++r)
    {
        EXPECT_LE(std::stod(rows[r][column(h, "err_fast")]), 1e-9);
        EXPECT_LE(std::stod(rows[r][column(h, "err_std_plusN")]), 1e-9);
        // Standard at E = 2 has M = 0, too few numerator terms for two poles.
        if (std::stoi(rows[r][0]) >= 3)
            EXPECT_LE(std::stod(rows[r][column(h, "err_std")]), 1e-9) << rows[r][0] << " " << rows[r][1];
    }
}

TEST(Commands, CompareFastAgainstStandardWithMoreDerivatives)
{
    const auto model = build_rectangle_helmholtz({});
    auto c = parse_config(R"({"model": {"kind": "helmholtz"}, "E_list": [4, 5, 6, 7, 8]})");
    for (const auto E : c.E_list)
    {
        auto single = c;
        single.E_list = {E};
        std::vector<double> ratios;
        for (const auto& r : compare_study(model, single))
            ratios.push_back(r.err_fast / r.err_std_plus_n);
        const double med = median(ratios);
        EXPECT_GE(med, 0.2) << "E=" << E;
        EXPECT_LE(med, 5.0) << "E=" << E;
    }
}

// --- CLI -----------------------------------------------------------------------

TEST(Cli, ExitCodes)
{
    const auto dir = temp_dir();
    write_file(dir / "ok.json", synthetic_config);
    EXPECT_EQ(run_cli("build --config " + (dir / "ok.json").string() + " --out " + (dir / "ok.out").string()), 0);

    auto on_pole = json::parse(synthetic_config);
    on_pole["z0"] = json::array({1.0, 0.0});
    write_file(dir / "pole.json", on_pole.dump());
    EXPECT_EQ(run_cli("build --config " + (dir / "pole.json").string() + " --out " + (dir / "p.out").string()), 2);

    write_file(dir / "bad.json", "{ not json");
    EXPECT_EQ(run_cli("sweep --config " + (dir / "bad.json").string() + " --out " + (dir / "b.out").string()), 2);
    EXPECT_EQ(run_cli("sweep --config " + (dir / "missing.json").string() + " --out " + (dir / "b.out").string()), 2);
    EXPECT_EQ(run_cli("frobnicate --config x --out y"), 2);

    // A quadrature too coarse for the requested modes is a numerical failure.
    write_file(dir / "quad.json", R"({"model": {"kind": "helmholtz", "nu_sq": 400, "theta": 0.3, "quad_order": 20}})");
    EXPECT_EQ(run_cli("build --config " + (dir / "quad.json").string() + " --out " + (dir / "q.out").string()), 3);
}

TEST(Cli, ByteIdenticalOutput)
{
    const auto dir = temp_dir();
    const std::string cfg = std::string(EXAMPLES_CFG_DIR) + "/helmholtz.json";
    for (const char* cmd : {"build", "sweep", "convergence", "poles", "compare"})
    {
        const auto a = dir / (std::string(cmd) + "_a.out");
        const auto b = dir / (std::string(cmd) + "_b.out");
        ASSERT_EQ(run_cli(std::string(cmd) + " --config " + cfg + " --out " + a.string()), 0) << cmd;
        ASSERT_EQ(run_cli(std::string(cmd) + " --config " + cfg + " --out " + b.string()), 0) << cmd;
        const auto ta = read_file(a);
        EXPECT_FALSE(ta.empty());
        EXPECT_EQ(ta, read_file(b)) << cmd;
        EXPECT_EQ(ta.find('\r'), std::string::npos);
    }
}
