#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "txadv/attacks.hpp"
#include "txadv/dataset.hpp"
#include "txadv/defense.hpp"
#include "txadv/models.hpp"

namespace txadv {

enum class EvaluationScope { FullDataset, TestSplit };

struct DatasetSource {
    bool synthetic = true;
    Schema schema = Schema::Binary;
    // csv
    std::string path;
    // synthetic
    std::size_t n_rows = 1000;
    std::map<std::string, double> class_mix;
    double separability = 0.9;
    std::uint64_t seed = 0;
};

struct ExperimentConfig {
    DatasetSource dataset;
    std::uint64_t split_seed = 0;
    std::vector<ModelSpec> models;
    SurrogateParams surrogate;
    std::vector<AttackPlan> attacks;
    std::optional<DefenseConfig> defense;
    EvaluationScope scope = EvaluationScope::FullDataset;
    std::string output_dir = "txadv-out";
    std::uint64_t seed = 0;
};

// Strict parser: unknown keys are rejected with the offending key named.
ExperimentConfig config_from_json(const std::string& text);
std::string config_to_json(const ExperimentConfig& config);

std::string model_spec_name(const ModelSpec& spec);

struct RunResult {
    std::string manifest_path;
    std::string manifest_digest;  // sha256 of the manifest body
};

// Executes the full grid and writes reports/, tables/, artifacts/ and
// manifest.json under out_dir. Outputs carry no wall-clock state, so a
// rerun with the same config is byte-identical.
RunResult run_experiment(const ExperimentConfig& config, const std::string& out_dir);

// Named experiment grids shipping with the tool.
std::vector<std::string> preset_names();
ExperimentConfig preset(const std::string& name);

}  // namespace txadv
