#pragma once

#include "efimov/bound_states.hpp"
#include "efimov/hubbard_example.hpp"
#include "efimov/operators.hpp"

#include <json.hpp>

#include <cstdint>
#include <filesystem>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

namespace efimov::cli {

enum class Experiment { Spectrum, Essential, Condition5, Condition6, Thm41, Accumulate, Example5 };

std::string to_string(Experiment e);
/// Throws ConfigError naming "experiment" for an unknown name.
Experiment parse_experiment(const std::string& name);

/// Bad configuration; key() is the dotted path of the offending entry.
class ConfigError : public std::runtime_error {
public:
    ConfigError(std::string key, const std::string& message)
        : std::runtime_error("config key '" + key + "': " + message), key_(std::move(key)) {}

    const std::string& key() const noexcept { return key_; }

private:
    std::string key_;
};

/// Decimal or rational literal ("0.75", "2/3", "-1e-3"). Throws std::invalid_argument.
double parse_real(const std::string& text);

struct FamilyConfig {
    std::string basis = "phi";  ///< constant | legendre | sine | phi
    int from = 2;
    int to = 6;
};

struct ModelConfig {
    bool example = true;
    hubbard::Example5Params params;
    /// Deltas as given, kept so the report can echo them.
    std::vector<double> deltas;
    ModelSpec spec;            ///< built model (example or inline)
    nlohmann::ordered_json echo;  ///< normalized description written to the report
};

struct RunConfig {
    Experiment experiment = Experiment::Example5;
    ModelConfig model;
    std::optional<FamilyConfig> family;
    std::vector<ScheduleEntry> schedule;
    std::filesystem::path out_dir = "efimov_out";
    std::optional<double> tol;
    std::uint64_t seed = 20240601;
    std::size_t dense_cap = kDefaultDenseCap;
    std::size_t iterative_cap = 40000;
    double min_gap_ratio = 1.2;
    int minimax_terms = 10;
};

RunConfig parse_config(const nlohmann::json& doc);
/// Reads and parses a JSON file; syntax errors are reported as ConfigError.
RunConfig load_config(const std::filesystem::path& path);

/// Example model from parameters; throws ConfigError("model.gamma", ...) etc.
ModelConfig example_model_config(const hubbard::Example5Params& params, std::vector<double> deltas = {});

/// Resolves an indexed family against an axis; throws ConfigError.
std::vector<IndexedFunction> build_family(const FamilyConfig& family, const Interval& axis);

/// Default schedule N = 2..5 with M = N and the model's order.
std::vector<ScheduleEntry> default_schedule(const hubbard::Example5Params& params);

}  // namespace efimov::cli
