#include "efimov/cli/run.hpp"

#include <CLI11.hpp>

#include <iostream>
#include <optional>
#include <string>

using namespace efimov::cli;

int main(int argc, char** argv) {
    CLI::App app{"Spectral experiments for H = H0 - gamma T1 - T2 on the unit square"};

    std::string experiment;
    std::string config_path;
    std::string out_dir;
    std::optional<std::string> gamma;
    std::optional<int> M, N, g;
    std::optional<std::uint64_t> seed;
    std::optional<std::size_t> dense_cap;

    app.add_option("--experiment", experiment,
                   "spectrum | essential | condition5 | condition6 | thm41 | accumulate | example5");
    app.add_option("--config", config_path, "JSON run configuration")->check(CLI::ExistingFile);
    app.add_option("--out", out_dir, "output directory (default efimov_out)");
    app.add_option("--gamma", gamma, "coupling for the example model, e.g. 2/3 or 0.75");
    app.add_option("--M", M, "tents kept in the example potential");
    app.add_option("--N", N, "terms kept in the example series kernel");
    app.add_option("--g", g, "Gauss points per segment");
    app.add_option("--seed", seed, "seed for the iterative eigensolver");
    app.add_option("--dense-cap", dense_cap, "largest matrix dimension solved densely");

    CLI11_PARSE(app, argc, argv);

    RunConfig config;
    try {
        if (!config_path.empty()) {
            config = load_config(config_path);
        } else if (experiment.empty()) {
            std::cerr << "error: give --experiment or --config\n";
            return kExitError;
        } else {
            config.model = example_model_config(efimov::hubbard::Example5Params{});
        }
        if (!experiment.empty()) config.experiment = parse_experiment(experiment);

        if (gamma || M || N || g) {
            if (!config_path.empty() && !config.model.example) {
                throw ConfigError("model", "--gamma/--M/--N/--g apply to the example model only");
            }
            efimov::hubbard::Example5Params p = config.model.params;
            if (gamma) {
                try {
                    p.gamma = parse_real(*gamma);
                } catch (const std::invalid_argument& e) {
                    throw ConfigError("gamma", e.what());
                }
            }
            if (M) p.M = *M;
            if (N) p.N = *N;
            if (g) p.order = *g;
            config.model = example_model_config(p, config.model.deltas);
        }
        if (!out_dir.empty()) config.out_dir = out_dir;
        if (seed) config.seed = *seed;
        if (dense_cap) config.dense_cap = *dense_cap;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kExitError;
    }

    const int code = run(config, std::cerr);
    if (code != kExitError) {
        std::cout << "wrote " << config.out_dir.string() << " (exit " << code << ")\n";
    }
    return code;
}
