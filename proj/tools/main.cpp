#include <cstdio>
#include <exception>
#include <string>

#include "CLI11.hpp"
#include "cdk/experiment.hpp"

int main(int argc, char** argv) {
    CLI::App app{"Christoffel-Darboux kernel and canonical-system experiments"};
    app.require_subcommand(0, 1);

    bool list = false;
    app.add_flag("--list-models", list, "print recognized model ids and exit");

    std::string config_path, out_dir = ".";
    int jobs = 1;
    CLI::App* run = app.add_subcommand("run", "run an experiment config");
    run->add_option("config", config_path, "JSON experiment config")->required();
    run->add_option("--out", out_dir, "output directory");
    run->add_option("--jobs", jobs, "worker threads")->check(CLI::PositiveNumber);

    CLI11_PARSE(app, argc, argv);

    if (list) {
        for (const auto& m : cdk::list_models()) std::printf("%s\n", m.c_str());
        return 0;
    }
    if (!run->parsed()) {
        std::fprintf(stderr, "%s\n", app.help().c_str());
        return 2;
    }
    try {
        cdk::ExperimentConfig config = cdk::ExperimentConfig::from_file(config_path);
        return cdk::run_experiment(config, out_dir, jobs);
    } catch (const cdk::ConfigError& e) {
        std::fprintf(stderr, "config error: %s\n", e.what());
        return 2;
    } catch (const std::exception& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return 1;
    }
}
