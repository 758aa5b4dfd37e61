#include <CLI11.hpp>

#include <fstream>
#include <iostream>
#include <sstream>

#include "txadv/experiment.hpp"

namespace {

std::string read_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw txadv::IoError("cannot open " + path);
    std::ostringstream buf;
    buf << in.rdbuf();
    return buf.str();
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Adversarial-robustness harness for Ethereum transaction classifiers"};
    app.require_subcommand(1);

    std::string config_path;
    std::string out_override;
    std::int64_t seed_override = -1;

    auto* run = app.add_subcommand("run", "Run an experiment from a JSON config");
    run->add_option("config", config_path, "Experiment config file")->required();
    run->add_option("--out", out_override, "Output directory (overrides the config)");
    run->add_option("--seed", seed_override, "Global seed (overrides the config)");

    auto* validate = app.add_subcommand("validate", "Validate a config without running it");
    validate->add_option("config", config_path, "Experiment config file")->required();

    std::string preset_name;
    auto* presets = app.add_subcommand("presets", "List presets, or print one as a config");
    presets->add_option("name", preset_name, "Preset to print");

    CLI11_PARSE(app, argc, argv);

    try {
        if (run->parsed()) {
            auto config = txadv::config_from_json(read_file(config_path));
            if (seed_override >= 0) {
                config.seed = static_cast<std::uint64_t>(seed_override);
                config.split_seed = config.seed ^ 0x5914ULL;
            }
            const std::string out_dir = out_override.empty() ? config.output_dir : out_override;
            const auto result = txadv::run_experiment(config, out_dir);
            std::cout << "wrote " << result.manifest_path << "\n"
                      << "manifest sha256 " << result.manifest_digest << "\n";
            return 0;
        }
        if (validate->parsed()) {
            txadv::config_from_json(read_file(config_path));
            std::cout << "config ok\n";
            return 0;
        }
        if (presets->parsed()) {
            if (preset_name.empty()) {
                for (const auto& name : txadv::preset_names()) std::cout << name << "\n";
            } else {
                std::cout << txadv::config_to_json(txadv::preset(preset_name)) << "\n";
            }
            return 0;
        }
    } catch (const txadv::ConfigError& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    return 0;
}
