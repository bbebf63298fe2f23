#include <CLI11.hpp>

#include <iostream>
#include <string>

#include "cardinal_cli/commands.hpp"

int main(int argc, char** argv) {
    CLI::App app{"Cardinal-series densities and spread option prices from characteristic functions"};
    std::string command, config;
    cardinal::cli::Overrides o;
    app.add_option("command", command, "density, price, bound, converge or validate")
        ->required()
        ->check(CLI::IsMember({"density", "price", "bound", "converge", "validate"}));
    app.add_option("config", config, "run configuration (JSON)")->required();
    app.add_option("--strike", o.strike, "replace price.strikes with this single strike");
    app.add_option("--a", o.a, "band a for every axis");
    app.add_option("--tau", o.tau, "coefficient threshold (switches to threshold truncation)");
    app.add_option("--seed", o.seed, "Monte Carlo seed");
    app.add_option("-o,--output", o.output, "write the artifact here instead of standard output");
    app.add_flag("--strict-paper", o.strict_paper, "use the printed (uncorrected) forms; refuses SV pricing");
    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return 2;
    }
    return cardinal::cli::run(command, config, o, std::cout, std::cerr);
}
