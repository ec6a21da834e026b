// tracelab <experiment> --config <path> [--out <dir>] [--seed <int>]

#include <CLI11.hpp>
#include <cstdio>
#include <exception>
#include <iostream>

#include "tracelab/error.hpp"
#include "tracelab/harness.hpp"

int main(int argc, char** argv) {
    namespace th = tracelab::harness;
    CLI::App app{"Numerical checks for traces of W^{1,p} ∩ L^q on half-spaces"};
    std::string experiment, config_path, out_dir = ".";
    std::uint64_t seed = 0;
    app.add_option("experiment", experiment, "Experiment to run")
        ->required()
        ->check(CLI::IsMember(th::experiment_names()));
    app.add_option("--config", config_path, "INI config file")->required();
    app.add_option("--out", out_dir, "Output directory for CSV files");
    auto* seed_opt = app.add_option("--seed", seed, "Seed overriding the config");
    CLI11_PARSE(app, argc, argv);

    try {
        const auto cfg = tracelab::Config::load(config_path);
        th::RunOptions opts;
        opts.out_dir = out_dir;
        if (*seed_opt) opts.seed = seed;
        const auto res = th::run(experiment, cfg, opts);
        for (const auto& s : res.summary)
            std::printf("%-4s %-32s %zu/%zu%s\n", s.passed() ? "ok" : "FAIL", s.check.c_str(), s.rows - s.failed, s.rows,
                        s.hard ? "" : "  (soft)");
        return res.exit_status;
    } catch (const tracelab::ParseError& e) {
        std::cerr << "tracelab: " << e.what() << '\n';
        return 2;
    } catch (const tracelab::DomainError& e) {
        std::cerr << "tracelab: " << e.what() << '\n';
        return 2;
    } catch (const tracelab::ResourceError& e) {
        std::cerr << "tracelab: " << e.what() << '\n';
        return 3;
    } catch (const std::exception& e) {
        std::cerr << "tracelab: " << e.what() << '\n';
        return 4;
    }
}
