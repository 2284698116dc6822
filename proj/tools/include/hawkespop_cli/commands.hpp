#pragma once

#include <cstdint>
#include <optional>
#include <ostream>
#include <stdexcept>
#include <string>
#include <vector>

namespace hawkespop::cli {

// bad flag values that the parser cannot see (e.g. taken from the config)
class UsageError : public std::invalid_argument {
  public:
    using std::invalid_argument::invalid_argument;
};

struct MomentsOptions {
    std::string config;
    std::optional<double> t;
    std::optional<int> order;
    std::optional<std::string> method; // ode | closed | blocks
    bool stationary = false;
};

struct CompareOptions {
    std::string config;
    std::optional<double> t;
    std::optional<int> order;
    std::optional<std::vector<double>> h;
    std::optional<std::vector<std::size_t>> mc_runs;
    std::optional<std::uint64_t> seed;
};

struct CrossOptions {
    std::string config;
    std::optional<double> t;
    std::optional<std::vector<double>> tau_grid;
    std::optional<double> h;
    std::optional<std::size_t> mc_runs;
    std::optional<std::uint64_t> seed;
};

struct SimulateOptions {
    std::string config;
    std::optional<double> horizon;
    std::optional<std::size_t> runs;
    std::optional<std::uint64_t> seed;
    std::optional<int> order;
    std::string dump_events; // directory, empty = no dump
    std::size_t dump_limit = 10;
};

struct NearlyUnstableOptions {
    std::string config;
    std::optional<std::vector<double>> theta_grid;
    std::optional<std::vector<double>> s_grid;
    bool summary = false;
};

struct TransformOptions {
    std::string config;
    std::optional<double> t;
    std::vector<double> s, z;
    std::optional<double> tau; // two-time transform when set
    std::vector<double> r, y;
};

// Each command writes CSV to out; errors are thrown.
void cmd_moments(const MomentsOptions &o, std::ostream &out);
void cmd_compare(const CompareOptions &o, std::ostream &out);
void cmd_cross(const CrossOptions &o, std::ostream &out);
void cmd_simulate(const SimulateOptions &o, std::ostream &out);
void cmd_nearly_unstable(const NearlyUnstableOptions &o, std::ostream &out);
void cmd_transform(const TransformOptions &o, std::ostream &out);

// Full command line; returns the process exit code.
int run_cli(const std::vector<std::string> &args, std::ostream &out,
            std::ostream &err);

} // namespace hawkespop::cli
