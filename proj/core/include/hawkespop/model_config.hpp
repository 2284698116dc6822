#pragma once

#include "hawkespop/model.hpp"

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

namespace hawkespop {

class ConfigError : public std::runtime_error {
  public:
    using std::runtime_error::runtime_error;
};

// Defaults for CLI runs; command line flags override them.
struct RunDefaults {
    std::optional<double> t;
    std::optional<int> order;
    std::optional<std::string> method;
    std::optional<std::vector<double>> h;
    std::optional<std::vector<std::size_t>> mc_runs;
    std::optional<std::uint64_t> seed;
    std::optional<double> horizon;
    std::optional<std::size_t> runs;
    std::optional<std::vector<double>> tau_grid;
    std::optional<std::vector<double>> theta_grid;
    std::optional<std::vector<double>> s_grid;
};

struct ModelConfig {
    std::optional<HawkesModel> model;         // full parameterisation
    std::optional<SymmetricModel> symmetric;  // symmetric family
    RunDefaults run;
};

[[nodiscard]] ModelConfig parse_model_config(const std::string &text);
[[nodiscard]] ModelConfig load_model_config(const std::filesystem::path &path);

} // namespace hawkespop
