#include "skdv/experiment.hpp"

#include <CLI11.hpp>

#include <fstream>
#include <iostream>

using skdv::ConfigError;
using skdv::ExperimentKind;

namespace {

nlohmann::json read_json(const std::string& file) {
    std::ifstream is(file);
    if (!is) throw std::runtime_error("cannot open " + file);
    nlohmann::json j;
    is >> j;
    return j;
}

int run_config(const std::string& file, const ExperimentKind* expected) {
    const auto config = skdv::load_config(file);
    if (expected)
        for (std::size_t i = 0; i < config.experiments.size(); ++i)
            if (config.experiments[i].kind != *expected)
                throw ConfigError("experiments[" + std::to_string(i) + "].kind",
                                  std::string("expected '") + skdv::to_string(*expected) + "' for this subcommand");
    const auto result = skdv::run(config);
    std::cout << result.directory.string() << "\n";
    for (const auto& cell : result.summary["cells"])
        if (cell["status"] == "failed")
            std::cerr << "cell " << cell["id"] << " (" << cell["kind"].get<std::string>()
                      << ") failed: " << cell["reason"].get<std::string>() << "\n";
    return result.exit_code;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Stochastic KdV experiments on the torus"};
    app.require_subcommand(1);

    std::string config_file;
    auto* run_cmd = app.add_subcommand("run", "Run every experiment cell in a config file");
    run_cmd->add_option("config", config_file, "JSON config")->required()->check(CLI::ExistingFile);

    std::vector<std::pair<CLI::App*, ExperimentKind>> kind_cmds;
    for (ExperimentKind kind : skdv::all_experiment_kinds()) {
        auto* cmd = app.add_subcommand(skdv::to_string(kind),
                                       std::string("Run a config whose cells are all '") + skdv::to_string(kind) + "'");
        cmd->add_option("config", config_file, "JSON config")->required()->check(CLI::ExistingFile);
        kind_cmds.emplace_back(cmd, kind);
    }

    std::string a_file, b_file;
    double tolerance = 0.05;
    auto* compare_cmd = app.add_subcommand("compare", "Compare two summary.json files");
    compare_cmd->add_option("a", a_file, "First summary")->required()->check(CLI::ExistingFile);
    compare_cmd->add_option("b", b_file, "Second summary")->required()->check(CLI::ExistingFile);
    compare_cmd->add_option("--tolerance", tolerance, "Relative change that flags a scalar")
        ->check(CLI::PositiveNumber);

    std::string kind_name, variant;
    auto* defaults_cmd = app.add_subcommand("defaults", "Print the default parameters of an experiment kind");
    defaults_cmd->add_option("kind", kind_name, "Experiment kind")->required();
    defaults_cmd->add_option("variant", variant, "Scenario or study name");

    CLI11_PARSE(app, argc, argv);

    try {
        if (*run_cmd) return run_config(config_file, nullptr);
        for (const auto& [cmd, kind] : kind_cmds)
            if (*cmd) return run_config(config_file, &kind);
        if (*compare_cmd) {
            const auto c = skdv::compare_reports(read_json(a_file), read_json(b_file), tolerance);
            std::cout << skdv::to_json(c).dump(2) << "\n";
            return c.flagged > 0 ? 1 : 0;
        }
        if (*defaults_cmd) {
            std::cout << skdv::default_params(skdv::experiment_kind_from_string(kind_name), variant).dump(2) << "\n";
            return 0;
        }
    } catch (const ConfigError& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    }
    return 0;
}
