#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include "smoothcert/attack.hpp"

namespace smoothcert::cli {

// One flat key=value file drives every subcommand; command-line flags
// override individual keys. Defaults reproduce the bundled digit experiment.
struct RunConfig {
    std::string images = "data/mnist17-images-idx3-ubyte";
    std::string labels = "data/mnist17-labels-idx1-ubyte";
    std::uint32_t digit_a = 1;
    std::uint32_t digit_b = 7;
    std::uint32_t train_size = 100;
    std::uint32_t test_size = 1000;
    double beta = 0.9;
    std::uint32_t num_classifiers = 10000;
    double alpha = 0.001;
    std::uint32_t hidden = 64;
    std::uint32_t epochs = 200;
    double lr = 0.5;
    std::uint64_t seed = 7;
    std::uint32_t workers = 0; // 0 = hardware concurrency
    std::string out = "runs/mnist17";

    std::vector<std::uint32_t> trigger_positions;
    std::vector<std::uint32_t> trigger_values;
    std::uint32_t trigger_target = 0;
    std::uint32_t poison_count = 0;
    std::uint64_t attack_seed = 0; // 0 = derive from seed

    std::filesystem::path out_dir() const { return out; }
    std::filesystem::path dataset_path() const { return out_dir() / "dataset.smcdat"; }
    std::filesystem::path ensemble_path() const { return out_dir() / "ensemble.smcens"; }
    std::filesystem::path per_example_path() const { return out_dir() / "per_example.csv"; }
    std::filesystem::path curve_path() const { return out_dir() / "curve.csv"; }
    std::filesystem::path attack_report_path() const { return out_dir() / "attack_eval.csv"; }

    TriggerSpec trigger() const;
    void validate() const; // throws ConfigError on out-of-range fields
};

RunConfig load_config(const std::filesystem::path& path);
void save_config(const std::filesystem::path& path, const RunConfig& cfg);

// "1,7" -> {1, 7}; empty string -> {}. Shared by config keys and CLI flags.
std::vector<std::uint32_t> parse_u32_list(const std::string& value, const std::string& key);

bool operator==(const RunConfig& a, const RunConfig& b);

} // namespace smoothcert::cli
