#include <iostream>
#include <string>

#include "CLI11.hpp"

#include "she/app/config.hpp"
#include "she/app/experiments.hpp"
#include "she/errors.hpp"

int main(int argc, char** argv) {
    CLI::App app{"stochastic heat equation on LCA groups: kernels, moments, "
                 "Monte Carlo, excitation indices"};
    app.require_subcommand(1);

    std::string run_path;
    CLI::App* cmd_run = app.add_subcommand("run", "run an experiment from a config file");
    cmd_run->add_option("config", run_path, "path to a she/1 JSON config")->required();

    std::string verify_path;
    CLI::App* cmd_verify =
        app.add_subcommand("verify-all", "run the acceptance checks and print a pass/fail table");
    cmd_verify->add_option("--config", verify_path,
                           "optional config supplying output directory/formats");

    CLI::App* cmd_schema = app.add_subcommand("print-schema", "print the config schema and exit");

    CLI11_PARSE(app, argc, argv);

    try {
        if (cmd_schema->parsed()) {
            std::cout << she::app::schema_text();
            return 0;
        }
        she::app::ExperimentConfig cfg;
        if (cmd_run->parsed()) {
            cfg = she::app::parse_config_file(run_path);
        } else {
            cfg = verify_path.empty()
                      ? she::app::parse_config_text(
                            R"({"schema": "she/1", "experiment": "verify-all"})")
                      : she::app::parse_config_file(verify_path);
            cfg.experiment = she::app::ExperimentKind::VerifyAll;
        }
        const she::app::RunResult res = she::app::run_experiment(cfg);
        std::cout << res.summary;
        std::cout << "wrote";
        for (const std::string& f : res.files) std::cout << " " << f;
        std::cout << "\n";
        return res.exit_code;
    } catch (const she::ConfigError& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return 2;
    } catch (const she::NumericError& e) {
        std::cerr << "numeric error: " << e.what() << "\n";
        return 3;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 3;
    }
}
