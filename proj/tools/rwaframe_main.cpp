// rwaframe: rotating-frame analysis of laser-driven multi-level systems.

#include <iostream>
#include <string>

#include <CLI11.hpp>

#include "rwaframe/cli.hpp"

int main(int argc, char** argv) {
    using namespace rwaframe;
    CLI::App app{"Rotating-frame time-independence analysis for RWA multi-level systems"};
    app.require_subcommand(1);

    cli::CommandRequest request;
    std::string input, format = "human";
    std::size_t levels = 0;
    LevelIndex gauge = 0;
    double step = 0, horizon = 0;
    std::uint64_t seed = 0;

    auto add_common = [&](CLI::App* sub) {
        sub->add_option("--format", format, "Output format")->check(CLI::IsMember({"human", "machine"}));
        sub->add_option("--tolerance", request.tolerance, "Relative detuning tolerance")->capture_default_str();
    };
    auto add_input = [&](CLI::App* sub) {
        sub->add_option("--input", input, "System description file")->required();
        sub->add_option("--gauge", gauge, "Level whose frame frequency is pinned to zero");
        sub->add_flag("--keep-zero-amplitude", request.keep_zero_amplitude,
                      "Keep transitions with zero Rabi amplitude in the analysis");
    };
    auto add_dynamics = [&](CLI::App* sub) {
        sub->add_option("--step", step, "RK4 step (default: shortest period / 2000)");
        sub->add_option("--horizon", horizon, "Simulation horizon (default: 10 / min |rabi|)");
        sub->add_option("--seed", seed, "Seed for a random initial state (default: level 1)");
        sub->add_flag("--tune", request.tune, "Retune chord lasers so every detuning vanishes");
        sub->add_option("--samples", request.max_samples, "Maximum number of recorded time points")
            ->capture_default_str();
    };

    auto* analyze = app.add_subcommand("analyze", "Classify a system and report its frame and detunings");
    add_input(analyze);
    add_common(analyze);
    auto* transform = app.add_subcommand("transform", "Dump the rotating-frame Hamiltonian");
    add_input(transform);
    add_common(transform);
    auto* census = app.add_subcommand("census", "Classify every fully coupled parity pattern of N levels");
    census->add_option("--levels", levels, "Number of levels N")->required()->check(CLI::Range(1, 12));
    add_common(census);
    auto* simulate = app.add_subcommand("simulate", "Propagate the lab-frame Schroedinger equation");
    add_input(simulate);
    add_common(simulate);
    add_dynamics(simulate);
    auto* verify = app.add_subcommand("verify", "Compare lab-frame RK4 against exact rotating-frame evolution");
    add_input(verify);
    add_common(verify);
    add_dynamics(verify);
    verify->add_option("--verify-tolerance", request.verify_tolerance, "Allowed population deviation")
        ->capture_default_str();

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return cli::input_error;
    }

    for (auto* sub : app.get_subcommands()) {
        request.command = *cli::parse_command(sub->get_name());
        auto given = [sub](const char* name) {
            const auto* opt = sub->get_option_no_throw(name);
            return opt != nullptr && opt->count() > 0;
        };
        if (given("--input")) request.input_path = input;
        if (given("--levels")) request.levels = levels;
        if (given("--gauge")) request.gauge = gauge;
        if (given("--step")) request.step = step;
        if (given("--horizon")) request.horizon = horizon;
        if (given("--seed")) request.seed = seed;
    }
    request.format = format == "machine" ? OutputFormat::machine : OutputFormat::human;
    return cli::run(request, std::cout, std::cerr);
}
