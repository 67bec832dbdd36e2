// pade-mor: build least-squares Padé approximants of a modal model and run
// convergence studies on them.

#include "lspade/harness.hpp"

#include <CLI11.hpp>

#include <fstream>
#include <iostream>
#include <sstream>
#include <string>

namespace
{
int run(const std::string& command, const std::string& config_path, const std::string& out_path)
{
    std::ifstream in(config_path);
    if (!in)
    {
        std::cerr << "error: cannot read config '" << config_path << "'\n";
        return 2;
    }
    std::stringstream buf;
    buf << in.rdbuf();

    std::string output;
    try
    {
        const auto cfg = lspade::parse_config(buf.str());
        if (command == "build")
            output = lspade::cmd_build(cfg);
        else if (command == "sweep")
            output = lspade::cmd_sweep(cfg);
        else if (command == "convergence")
            output = lspade::cmd_convergence(cfg);
        else if (command == "poles")
            output = lspade::cmd_poles(cfg);
        else
            output = lspade::cmd_compare(cfg);
    }
    catch (const lspade::Error& e)
    {
        std::cerr << "error [" << lspade::to_string(e.kind()) << "]: " << e.what() << '\n';
        return lspade::exit_code_for(e.kind());
    }

    std::ofstream out(out_path, std::ios::binary);
    if (!out)
    {
        std::cerr << "error: cannot write '" << out_path << "'\n";
        return 2;
    }
    out << output;
    return 0;
}
} // namespace

int main(int argc, char** argv)
{
    CLI::App app{"Least-squares Padé approximants of meromorphic modal models"};
    app.require_subcommand(1, 1);
    std::string config;
    std::string out;
    for (const char* name : {"build", "sweep", "convergence", "poles", "compare"})
    {
        auto* sub = app.add_subcommand(name);
        sub->add_option("--config", config, "study configuration (JSON)")->required();
        sub->add_option("--out", out, "output file")->required();
    }
    try
    {
        app.parse(argc, argv);
    }
    catch (const CLI::ParseError& e)
    {
        app.exit(e);
        return e.get_exit_code() == 0 ? 0 : 2;
    }
    return run(app.get_subcommands().front()->get_name(), config, out);
}
