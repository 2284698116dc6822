#include "hawkespop/model_config.hpp"

#include <json.hpp>

#include <fstream>
#include <set>
#include <sstream>

namespace hawkespop {

using nlohmann::json;

namespace {

void reject_unknown(const json &obj, const std::set<std::string> &allowed,
                    const std::string &where) {
    for (auto it = obj.begin(); it != obj.end(); ++it)
        if (!allowed.count(it.key()))
            throw ConfigError(where + ": unknown key '" + it.key() + "'");
}

const json &require(const json &obj, const std::string &key,
                    const std::string &where) {
    auto it = obj.find(key);
    if (it == obj.end())
        throw ConfigError(where + ": missing required key '" + key + "'");
    return *it;
}

double number(const json &v, const std::string &where) {
    if (!v.is_number())
        throw ConfigError(where + ": expected a number");
    return v.get<double>();
}

Vector number_array(const json &v, std::size_t d, const std::string &where) {
    if (!v.is_array())
        throw ConfigError(where + ": expected an array");
    if (v.size() != d)
        throw ConfigError(where + ": expected " + std::to_string(d) +
                          " entries, got " + std::to_string(v.size()));
    Vector out(static_cast<Eigen::Index>(d));
    for (std::size_t i = 0; i < d; ++i)
        out[static_cast<Eigen::Index>(i)] =
            number(v[i], where + "[" + std::to_string(i) + "]");
    return out;
}

std::vector<double> number_list(const json &v, const std::string &where) {
    if (!v.is_array())
        throw ConfigError(where + ": expected an array");
    std::vector<double> out;
    for (std::size_t i = 0; i < v.size(); ++i)
        out.push_back(number(v[i], where + "[" + std::to_string(i) + "]"));
    return out;
}

MarkPtr parse_mark(const json &v, const std::string &where) {
    if (!v.is_object())
        throw ConfigError(where + ": expected an object with 'kind'");
    const json &kind = require(v, "kind", where);
    if (!kind.is_string())
        throw ConfigError(where + ".kind: expected a string");
    const auto k = kind.get<std::string>();
    try {
        if (k == "zero") {
            reject_unknown(v, {"kind"}, where);
            return zero_mark();
        }
        if (k == "deterministic") {
            reject_unknown(v, {"kind", "value"}, where);
            return deterministic_mark(
                number(require(v, "value", where), where + ".value"));
        }
        if (k == "exponential") {
            reject_unknown(v, {"kind", "mean", "rate"}, where);
            const bool has_mean = v.contains("mean");
            const bool has_rate = v.contains("rate");
            if (has_mean == has_rate)
                throw ConfigError(where +
                                  ": exponential mark needs exactly one of "
                                  "'mean' or 'rate'");
            if (has_mean)
                return exponential_mark(number(v["mean"], where + ".mean"));
            const double rate = number(v["rate"], where + ".rate");
            if (!(rate > 0.0))
                throw ConfigError(where + ".rate: must be positive");
            return exponential_mark(1.0 / rate);
        }
    } catch (const ModelError &e) {
        throw ConfigError(where + ": " + e.what());
    }
    throw ConfigError(where + ".kind: unknown mark kind '" + k + "'");
}

RunDefaults parse_run(const json &v) {
    const std::string w = "run";
    if (!v.is_object())
        throw ConfigError(w + ": expected an object");
    reject_unknown(v,
                   {"t", "order", "method", "h", "mc_runs", "seed", "horizon",
                    "runs", "tau_grid", "theta_grid", "s_grid"},
                   w);
    RunDefaults r;
    if (v.contains("t"))
        r.t = number(v["t"], w + ".t");
    if (v.contains("order")) {
        if (!v["order"].is_number_integer())
            throw ConfigError(w + ".order: expected an integer");
        r.order = v["order"].get<int>();
    }
    if (v.contains("method")) {
        if (!v["method"].is_string())
            throw ConfigError(w + ".method: expected a string");
        r.method = v["method"].get<std::string>();
    }
    if (v.contains("h"))
        r.h = number_list(v["h"], w + ".h");
    if (v.contains("mc_runs")) {
        std::vector<std::size_t> m;
        for (double x : number_list(v["mc_runs"], w + ".mc_runs")) {
            if (x < 0 || x != std::floor(x))
                throw ConfigError(w + ".mc_runs: expected nonnegative integers");
            m.push_back(static_cast<std::size_t>(x));
        }
        r.mc_runs = m;
    }
    if (v.contains("seed")) {
        if (!v["seed"].is_number_unsigned())
            throw ConfigError(w + ".seed: expected a nonnegative integer");
        r.seed = v["seed"].get<std::uint64_t>();
    }
    if (v.contains("horizon"))
        r.horizon = number(v["horizon"], w + ".horizon");
    if (v.contains("runs")) {
        if (!v["runs"].is_number_unsigned())
            throw ConfigError(w + ".runs: expected a nonnegative integer");
        r.runs = v["runs"].get<std::size_t>();
    }
    if (v.contains("tau_grid"))
        r.tau_grid = number_list(v["tau_grid"], w + ".tau_grid");
    if (v.contains("theta_grid"))
        r.theta_grid = number_list(v["theta_grid"], w + ".theta_grid");
    if (v.contains("s_grid"))
        r.s_grid = number_list(v["s_grid"], w + ".s_grid");
    return r;
}

SymmetricModel parse_symmetric(const json &v) {
    const std::string w = "symmetric";
    if (!v.is_object())
        throw ConfigError(w + ": expected an object");
    reject_unknown(v, {"d", "alpha", "lambda_bar", "marks"}, w);
    const json &dj = require(v, "d", w);
    if (!dj.is_number_unsigned() || dj.get<std::size_t>() < 1)
        throw ConfigError(w + ".d: expected a positive integer");
    SymmetricModel m;
    m.d = dj.get<std::size_t>();
    m.alpha = number(require(v, "alpha", w), w + ".alpha");
    m.lambda_bar = number(require(v, "lambda_bar", w), w + ".lambda_bar");
    const json &mk = require(v, "marks", w);
    if (!mk.is_array() || mk.size() != m.d)
        throw ConfigError(w + ".marks: expected " + std::to_string(m.d) +
                          " mark objects");
    for (std::size_t i = 0; i < m.d; ++i)
        m.marks.push_back(
            parse_mark(mk[i], w + ".marks[" + std::to_string(i) + "]"));
    try {
        m.validate();
    } catch (const ModelError &e) {
        throw ConfigError(w + ": " + e.what());
    }
    return m;
}

} // namespace

ModelConfig parse_model_config(const std::string &text) {
    json root;
    try {
        root = json::parse(text);
    } catch (const json::parse_error &e) {
        throw ConfigError(std::string("malformed config: ") + e.what());
    }
    if (!root.is_object())
        throw ConfigError("config: top level must be an object");
    reject_unknown(root,
                   {"d", "lambda_bar", "alpha", "mu", "marks", "coupling",
                    "allow_unstable", "symmetric", "run"},
                   "config");
    ModelConfig cfg;
    if (root.contains("run"))
        cfg.run = parse_run(root["run"]);
    if (root.contains("symmetric")) {
        for (const char *k : {"d", "lambda_bar", "alpha", "mu", "marks",
                              "coupling", "allow_unstable"})
            if (root.contains(k))
                throw ConfigError(std::string("config: key '") + k +
                                  "' cannot be combined with 'symmetric'");
        cfg.symmetric = parse_symmetric(root["symmetric"]);
        return cfg;
    }
    const json &dj = require(root, "d", "config");
    if (!dj.is_number_unsigned() || dj.get<std::size_t>() < 1)
        throw ConfigError("config.d: expected a positive integer");
    const auto d = dj.get<std::size_t>();
    Vector lb = number_array(require(root, "lambda_bar", "config"), d,
                             "config.lambda_bar");
    Vector al = number_array(require(root, "alpha", "config"), d, "config.alpha");
    Vector mu = number_array(require(root, "mu", "config"), d, "config.mu");
    const json &mj = require(root, "marks", "config");
    if (!mj.is_array() || mj.size() != d)
        throw ConfigError("config.marks: expected " + std::to_string(d) +
                          " rows");
    std::vector<std::vector<MarkPtr>> grid(d);
    for (std::size_t i = 0; i < d; ++i) {
        const std::string wi = "config.marks[" + std::to_string(i) + "]";
        if (!mj[i].is_array() || mj[i].size() != d)
            throw ConfigError(wi + ": expected " + std::to_string(d) +
                              " entries");
        for (std::size_t j = 0; j < d; ++j)
            grid[i].push_back(
                parse_mark(mj[i][j], wi + "[" + std::to_string(j) + "]"));
    }
    ColumnCoupling coupling = ColumnCoupling::independent;
    if (root.contains("coupling")) {
        const json &c = root["coupling"];
        if (c == "independent")
            coupling = ColumnCoupling::independent;
        else if (c == "common")
            coupling = ColumnCoupling::common;
        else
            throw ConfigError("config.coupling: expected 'independent' or "
                              "'common'");
    }
    bool allow_unstable = false;
    if (root.contains("allow_unstable")) {
        if (!root["allow_unstable"].is_boolean())
            throw ConfigError("config.allow_unstable: expected a boolean");
        allow_unstable = root["allow_unstable"].get<bool>();
    }
    try {
        cfg.model.emplace(std::move(lb), std::move(al), std::move(mu),
                          std::move(grid), coupling, allow_unstable);
    } catch (const ModelError &e) {
        throw ConfigError(std::string("config: ") + e.what());
    }
    return cfg;
}

ModelConfig load_model_config(const std::filesystem::path &path) {
    std::ifstream in(path, std::ios::binary);
    if (!in)
        throw ConfigError("cannot open config file '" + path.string() + "'");
    std::ostringstream ss;
    ss << in.rdbuf();
    try {
        return parse_model_config(ss.str());
    } catch (const ConfigError &e) {
        throw ConfigError(path.string() + ": " + e.what());
    }
}

} // namespace hawkespop
