#include "covpen/config.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <map>
#include <set>
#include <sstream>

#include <boost/property_tree/ini_parser.hpp>
#include <boost/property_tree/ptree.hpp>

#include "covpen/error.hpp"

namespace covpen {

namespace pt = boost::property_tree;

std::string_view to_string(OutputFormat f) { return f == OutputFormat::Json ? "json" : "csv"; }

OutputFormat parse_output_format(std::string_view s) {
    if (s == "json") return OutputFormat::Json;
    if (s == "csv") return OutputFormat::Csv;
    throw ConfigError("unknown output format '" + std::string(s) + "' (expected json or csv)");
}

namespace {

const std::map<std::string, std::set<std::string>> kSchema = {
    {"data", {"input", "benchmark_column"}},
    {"backtest",
     {"horizon", "initial", "lags", "estimators", "methods", "benchmark", "penalty_n", "vol_target",
      "scale_columns"}},
    {"simulate",
     {"kind", "n_assets", "t_obs", "coefficients", "noise_sigma", "mean", "rho", "sigma_x", "sigma_r", "mu_x",
      "mu_r"}},
    {"diagnose", {"input", "alpha", "bootstrap", "block_len", "perf", "haircut", "cscv_blocks", "cscv_perf"}},
    {"run", {"seed", "jobs", "format", "out"}},
};

std::string fmt(double v) {
    char buf[32];
    const auto r = std::to_chars(buf, buf + sizeof buf, v);
    return std::string(buf, r.ptr);
}

class Reader {
public:
    Reader(const pt::ptree& tree, std::string origin) : tree_(tree), origin_(std::move(origin)) {}

    std::optional<std::string> raw(const std::string& section, const std::string& key) const {
        const auto sec = tree_.get_child_optional(section);
        if (!sec) return std::nullopt;
        const auto v = sec->get_optional<std::string>(pt::ptree::path_type(key, '\0'));
        if (!v) return std::nullopt;
        return *v;
    }

    [[noreturn]] void fail(const std::string& section, const std::string& key, const std::string& msg) const {
        throw ConfigError(origin_ + ": [" + section + "] " + key + ": " + msg);
    }

    template <class F>
    void with(const std::string& section, const std::string& key, F&& apply) const {
        const auto v = raw(section, key);
        if (!v) return;
        try {
            apply(*v);
        } catch (const ConfigError& e) {
            fail(section, key, e.what());
        }
    }

private:
    const pt::ptree& tree_;
    std::string origin_;
};

double to_double(const std::string& s) {
    double v = 0.0;
    const auto r = std::from_chars(s.data(), s.data() + s.size(), v);
    if (r.ec != std::errc() || r.ptr != s.data() + s.size() || !std::isfinite(v)) {
        throw ConfigError("expected a number, got '" + s + "'");
    }
    return v;
}

std::uint64_t to_u64(const std::string& s) {
    std::uint64_t v = 0;
    const auto r = std::from_chars(s.data(), s.data() + s.size(), v);
    if (r.ec != std::errc() || r.ptr != s.data() + s.size()) {
        throw ConfigError("expected a non-negative integer, got '" + s + "'");
    }
    return v;
}

bool to_bool(const std::string& s) {
    if (s == "true" || s == "1" || s == "yes") return true;
    if (s == "false" || s == "0" || s == "no") return false;
    throw ConfigError("expected true or false, got '" + s + "'");
}

std::vector<std::string> to_list(const std::string& s) {
    std::vector<std::string> out;
    std::stringstream ss(s);
    std::string item;
    while (std::getline(ss, item, ',')) {
        const auto b = item.find_first_not_of(" \t");
        const auto e = item.find_last_not_of(" \t");
        if (b == std::string::npos) throw ConfigError("empty list element in '" + s + "'");
        out.push_back(item.substr(b, e - b + 1));
    }
    if (out.empty()) throw ConfigError("empty list");
    return out;
}

template <class T>
std::string join(const std::vector<T>& xs) {
    std::string out;
    for (std::size_t i = 0; i < xs.size(); ++i) {
        if (i) out += ',';
        if constexpr (std::is_same_v<T, double>) {
            out += fmt(xs[i]);
        } else if constexpr (std::is_arithmetic_v<T>) {
            out += std::to_string(xs[i]);
        } else {
            out += to_string(xs[i]);
        }
    }
    return out;
}

}  // namespace

ExperimentConfig parse_config(std::istream& in, const std::string& origin) {
    pt::ptree tree;
    try {
        pt::read_ini(in, tree);
    } catch (const pt::ini_parser_error& e) {
        throw ConfigError(origin + ": line " + std::to_string(e.line()) + ": " + e.message());
    }
    for (const auto& [section, body] : tree) {
        const auto it = kSchema.find(section);
        if (it == kSchema.end()) {
            if (body.empty()) throw ConfigError(origin + ": key '" + section + "' outside any section");
            throw ConfigError(origin + ": unknown section [" + section + "]");
        }
        for (const auto& [key, value] : body) {
            if (!it->second.count(key)) throw ConfigError(origin + ": [" + section + "] unknown key '" + key + "'");
        }
    }

    const Reader r(tree, origin);
    ExperimentConfig c;
    auto& bt = c.backtest;

    r.with("data", "input", [&](const std::string& v) { c.input = v; });
    r.with("data", "benchmark_column", [&](const std::string& v) { c.benchmark_column = v; });

    r.with("backtest", "horizon", [&](const std::string& v) { bt.horizon_h = to_u64(v); });
    r.with("backtest", "initial", [&](const std::string& v) { bt.initial_I = to_u64(v); });
    r.with("backtest", "lags", [&](const std::string& v) {
        bt.lag_grid.clear();
        for (const auto& s : to_list(v)) bt.lag_grid.push_back(static_cast<int>(to_u64(s)));
    });
    r.with("backtest", "estimators", [&](const std::string& v) {
        c.estimators.clear();
        for (const auto& s : to_list(v)) c.estimators.push_back(parse_estimator(s));
    });
    r.with("backtest", "methods", [&](const std::string& v) {
        c.methods.clear();
        for (const auto& s : to_list(v)) c.methods.push_back(parse_penalty_method(s));
    });
    r.with("backtest", "benchmark", [&](const std::string& v) { bt.benchmark.constant = to_double(v); });
    r.with("backtest", "penalty_n", [&](const std::string& v) {
        if (v == "design_rows") {
            bt.penalty_n = PenaltyN::DesignRows;
        } else if (v == "series_length") {
            bt.penalty_n = PenaltyN::SeriesLength;
        } else {
            throw ConfigError("expected design_rows or series_length, got '" + v + "'");
        }
    });
    r.with("backtest", "vol_target", [&](const std::string& v) {
        if (!v.empty()) bt.vol_target = to_double(v);
    });
    r.with("backtest", "scale_columns", [&](const std::string& v) { bt.fit_options.scale_columns = to_bool(v); });

    auto& sim = c.simulate;
    r.with("simulate", "kind", [&](const std::string& v) {
        if (v == "ar") {
            sim.kind = SimulateConfig::Kind::AR;
        } else if (v == "joint_gaussian") {
            sim.kind = SimulateConfig::Kind::JointGaussian;
        } else {
            throw ConfigError("expected ar or joint_gaussian, got '" + v + "'");
        }
    });
    r.with("simulate", "n_assets", [&](const std::string& v) { sim.n_assets = to_u64(v); });
    r.with("simulate", "t_obs", [&](const std::string& v) { sim.t_obs = to_u64(v); });
    r.with("simulate", "coefficients", [&](const std::string& v) {
        sim.ar.coefficients.clear();
        for (const auto& s : to_list(v)) sim.ar.coefficients.push_back(to_double(s));
    });
    r.with("simulate", "noise_sigma", [&](const std::string& v) { sim.ar.noise_sigma = to_double(v); });
    r.with("simulate", "mean", [&](const std::string& v) { sim.ar.mean = to_double(v); });
    r.with("simulate", "rho", [&](const std::string& v) { sim.joint.rho = to_double(v); });
    r.with("simulate", "sigma_x", [&](const std::string& v) { sim.joint.sigma_x = to_double(v); });
    r.with("simulate", "sigma_r", [&](const std::string& v) { sim.joint.sigma_r = to_double(v); });
    r.with("simulate", "mu_x", [&](const std::string& v) { sim.joint.mu_x = to_double(v); });
    r.with("simulate", "mu_r", [&](const std::string& v) { sim.joint.mu_r = to_double(v); });

    auto& dg = c.diagnose;
    r.with("diagnose", "input", [&](const std::string& v) { dg.input = v; });
    r.with("diagnose", "alpha", [&](const std::string& v) { dg.alpha = to_double(v); });
    r.with("diagnose", "bootstrap", [&](const std::string& v) { dg.bootstrap = to_u64(v); });
    r.with("diagnose", "block_len", [&](const std::string& v) { dg.block_len = to_u64(v); });
    r.with("diagnose", "perf", [&](const std::string& v) { dg.perf = parse_perf_fn(v); });
    r.with("diagnose", "haircut", [&](const std::string& v) { dg.haircut = parse_haircut_method(v); });
    r.with("diagnose", "cscv_blocks", [&](const std::string& v) { dg.cscv_blocks = to_u64(v); });
    r.with("diagnose", "cscv_perf", [&](const std::string& v) { dg.cscv_perf = parse_perf_fn(v); });

    r.with("run", "seed", [&](const std::string& v) { c.seed = to_u64(v); });
    r.with("run", "jobs", [&](const std::string& v) { c.jobs = to_u64(v); });
    r.with("run", "format", [&](const std::string& v) { c.format = parse_output_format(v); });
    r.with("run", "out", [&](const std::string& v) { c.out_dir = v; });

    try {
        bt.validate();
        if (c.estimators.empty() || c.methods.empty()) throw ConfigError("estimators and methods must be non-empty");
        if (c.jobs < 1) throw ConfigError("[run] jobs must be at least 1");
        if (!(dg.alpha > 0.0 && dg.alpha < 1.0)) throw ConfigError("[diagnose] alpha must lie in (0, 1)");
        synthetic::validate(sim.kind == SimulateConfig::Kind::AR
                                ? synthetic::SimSpec{sim.ar, sim.t_obs, 0}
                                : synthetic::SimSpec{sim.joint, sim.t_obs, 0});
    } catch (const ConfigError& e) {
        throw ConfigError(origin + ": " + e.what());
    } catch (const DomainError& e) {
        throw ConfigError(origin + ": [simulate] " + e.what());
    }
    return c;
}

ExperimentConfig load_config(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open config file " + path.string());
    return parse_config(in, path.string());
}

std::string ExperimentConfig::echo() const {
    const auto& bt = backtest;
    std::ostringstream os;
    os << "data.input = " << input.generic_string() << '\n'
       << "data.benchmark_column = " << benchmark_column << '\n'
       << "backtest.horizon = " << bt.horizon_h << '\n'
       << "backtest.initial = " << bt.initial_I << '\n'
       << "backtest.lags = " << join(bt.lag_grid) << '\n'
       << "backtest.estimators = " << join(estimators) << '\n'
       << "backtest.methods = " << join(methods) << '\n'
       << "backtest.benchmark = " << fmt(bt.benchmark.constant) << '\n'
       << "backtest.penalty_n = " << (bt.penalty_n == PenaltyN::DesignRows ? "design_rows" : "series_length")
       << '\n'
       << "backtest.vol_target = " << (bt.vol_target ? fmt(*bt.vol_target) : "") << '\n'
       << "backtest.scale_columns = " << (bt.fit_options.scale_columns ? "true" : "false") << '\n'
       << "simulate.kind = " << (simulate.kind == SimulateConfig::Kind::AR ? "ar" : "joint_gaussian") << '\n'
       << "simulate.n_assets = " << simulate.n_assets << '\n'
       << "simulate.t_obs = " << simulate.t_obs << '\n'
       << "simulate.coefficients = " << join(simulate.ar.coefficients) << '\n'
       << "simulate.noise_sigma = " << fmt(simulate.ar.noise_sigma) << '\n'
       << "simulate.mean = " << fmt(simulate.ar.mean) << '\n'
       << "simulate.rho = " << fmt(simulate.joint.rho) << '\n'
       << "simulate.sigma_x = " << fmt(simulate.joint.sigma_x) << '\n'
       << "simulate.sigma_r = " << fmt(simulate.joint.sigma_r) << '\n'
       << "simulate.mu_x = " << fmt(simulate.joint.mu_x) << '\n'
       << "simulate.mu_r = " << fmt(simulate.joint.mu_r) << '\n'
       << "diagnose.input = " << diagnose.input.generic_string() << '\n'
       << "diagnose.alpha = " << fmt(diagnose.alpha) << '\n'
       << "diagnose.bootstrap = " << diagnose.bootstrap << '\n'
       << "diagnose.block_len = " << diagnose.block_len << '\n'
       << "diagnose.perf = " << to_string(diagnose.perf) << '\n'
       << "diagnose.haircut = " << to_string(diagnose.haircut) << '\n'
       << "diagnose.cscv_blocks = " << diagnose.cscv_blocks << '\n'
       << "diagnose.cscv_perf = " << to_string(diagnose.cscv_perf) << '\n'
       << "run.seed = " << seed << '\n'
       << "run.format = " << to_string(format) << '\n';
    // jobs and out do not affect results and are left out.
    return os.str();
}

}  // namespace covpen
