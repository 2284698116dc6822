#include "hawkespop_cli/commands.hpp"

#include "hawkespop/model_config.hpp"

#include <CLI11.hpp>

#include <fstream>
#include <functional>
#include <memory>

namespace hawkespop::cli {

namespace {

constexpr int kUsageExit = 2;
constexpr int kFailureExit = 1;

// Opens --output or falls back to the given stream.
class Sink {
  public:
    Sink(const std::string &path, std::ostream &fallback) : out_(&fallback) {
        if (!path.empty()) {
            file_ = std::make_unique<std::ofstream>(path);
            if (!*file_)
                throw std::runtime_error("cannot open output file " + path);
            out_ = file_.get();
        }
    }
    std::ostream &stream() { return *out_; }

  private:
    std::unique_ptr<std::ofstream> file_;
    std::ostream *out_;
};

void config_arg(CLI::App *sub, std::string &target) {
    sub->add_option("config", target, "model configuration (JSON)")
        ->required()
        ->check(CLI::ExistingFile);
}

} // namespace

int run_cli(const std::vector<std::string> &args, std::ostream &out,
            std::ostream &err) {
    CLI::App app{"Exact moments and transforms of Markovian multivariate Hawkes "
                 "population processes"};
    app.name(args.empty() ? "hawkespop" : args.front());
    app.require_subcommand(1);
    std::string output;
    app.add_option("-o,--output", output, "write CSV here instead of stdout");

    MomentsOptions mo;
    auto *moments = app.add_subcommand("moments", "joint reduced moments");
    config_arg(moments, mo.config);
    moments->add_option("--t", mo.t, "time")->check(CLI::NonNegativeNumber);
    moments->add_option("--order", mo.order, "highest total order")
        ->check(CLI::PositiveNumber);
    moments->add_option("--method", mo.method, "ode | closed | blocks")
        ->check(CLI::IsMember({"ode", "closed", "blocks"}));
    moments->add_flag("--stationary", mo.stationary, "stationary moments");

    CompareOptions co;
    auto *compare = app.add_subcommand("compare", "engine vs FD vs MC errors");
    compare->set_help_flag("--help", "print this help message and exit");
    config_arg(compare, co.config);
    compare->add_option("--t", co.t, "time")->check(CLI::NonNegativeNumber);
    compare->add_option("--order", co.order)->check(CLI::PositiveNumber);
    compare->add_option("--h", co.h, "FD widths")->delimiter(',');
    compare->add_option("--mc-runs", co.mc_runs, "MC replication counts")
        ->delimiter(',');
    compare->add_option("--seed", co.seed);

    CrossOptions xo;
    auto *cross = app.add_subcommand("cross", "two-time cross-moments");
    cross->set_help_flag("--help", "print this help message and exit");
    config_arg(cross, xo.config);
    cross->add_option("--t", xo.t)->check(CLI::NonNegativeNumber);
    cross->add_option("--tau-grid", xo.tau_grid)->delimiter(',');
    cross->add_option("--h", xo.h);
    cross->add_option("--mc-runs", xo.mc_runs, "0 disables MC");
    cross->add_option("--seed", xo.seed);

    SimulateOptions so;
    auto *simulate = app.add_subcommand("simulate", "Monte Carlo estimates");
    config_arg(simulate, so.config);
    simulate->add_option("--horizon", so.horizon)->check(CLI::NonNegativeNumber);
    simulate->add_option("--runs", so.runs, "replications (>= 2)")
        ->check(CLI::Range(std::size_t{2}, std::numeric_limits<std::size_t>::max()));
    simulate->add_option("--seed", so.seed);
    simulate->add_option("--order", so.order)->check(CLI::PositiveNumber);
    simulate->add_option("--dump-events", so.dump_events,
                         "directory for per-run event logs");
    simulate->add_option("--dump-limit", so.dump_limit,
                         "number of runs to dump")
        ->capture_default_str();

    NearlyUnstableOptions no;
    auto *nearly = app.add_subcommand("nearly-unstable",
                                      "distance to the Gamma limit");
    config_arg(nearly, no.config);
    nearly->add_option("--theta-grid", no.theta_grid)->delimiter(',');
    nearly->add_option("--s-grid", no.s_grid)->delimiter(',');
    nearly->add_flag("--summary", no.summary, "one row per theta");

    TransformOptions to;
    auto *transform = app.add_subcommand("transform", "raw joint transform");
    config_arg(transform, to.config);
    transform->add_option("--t", to.t)->check(CLI::NonNegativeNumber);
    transform->add_option("--s", to.s)->delimiter(',');
    transform->add_option("--z", to.z)->delimiter(',');
    transform->add_option("--tau", to.tau, "lag; selects the two-time transform")
        ->check(CLI::NonNegativeNumber);
    transform->add_option("--r", to.r)->delimiter(',');
    transform->add_option("--y", to.y)->delimiter(',');

    std::vector<std::string> rest(args.rbegin(), args.rend());
    if (!rest.empty())
        rest.pop_back(); // program name
    try {
        app.parse(rest);
    } catch (const CLI::ParseError &e) {
        return app.exit(e, out, err);
    }

    try {
        Sink sink(output, out);
        std::ostream &os = sink.stream();
        if (moments->parsed())
            cmd_moments(mo, os);
        else if (compare->parsed())
            cmd_compare(co, os);
        else if (cross->parsed())
            cmd_cross(xo, os);
        else if (simulate->parsed())
            cmd_simulate(so, os);
        else if (nearly->parsed())
            cmd_nearly_unstable(no, os);
        else if (transform->parsed())
            cmd_transform(to, os);
        os.flush();
    } catch (const UsageError &e) {
        err << "usage error: " << e.what() << '\n';
        return kUsageExit;
    } catch (const ConfigError &e) {
        err << "config error: " << e.what() << '\n';
        return kFailureExit;
    } catch (const std::exception &e) {
        err << "error: " << e.what() << '\n';
        return kFailureExit;
    }
    return 0;
}

} // namespace hawkespop::cli
