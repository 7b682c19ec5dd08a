// covpen: batch front end for the covariance-penalty backtest library.
//
//   covpen backtest  [--config F] [--seed S] [--jobs N] [--format json|csv] [--out DIR]
//   covpen diagnose  --config F ...
//   covpen simulate  [--config F] ...
//   covpen verify    [--seed S]
//
// Exit status: 0 success, 1 partial failure, 2 configuration error.

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>

#include "CLI11.hpp"
#include "json.hpp"

#include "covpen/asset_table.hpp"
#include "covpen/config.hpp"
#include "covpen/error.hpp"
#include "covpen/estimators.hpp"
#include "covpen/experiment.hpp"
#include "covpen/moments.hpp"
#include "covpen/multiplicity.hpp"
#include "covpen/penalties.hpp"
#include "covpen/report.hpp"
#include "covpen/rng.hpp"
#include "covpen/stats.hpp"
#include "covpen/synthetic.hpp"

namespace {

constexpr int kExitOk = 0;
constexpr int kExitPartial = 1;
constexpr int kExitConfig = 2;

struct CommonFlags {
    std::string config;
    std::optional<std::uint64_t> seed;
    std::optional<std::size_t> jobs;
    std::optional<std::string> format;
    std::optional<std::string> out;
};

void add_common(CLI::App* cmd, CommonFlags& f) {
    cmd->add_option("--config", f.config, "INI configuration file")->check(CLI::ExistingFile);
    cmd->add_option("--seed", f.seed, "master seed (overrides [run] seed)");
    cmd->add_option("--jobs", f.jobs, "worker threads (overrides [run] jobs)")->check(CLI::PositiveNumber);
    cmd->add_option("--format", f.format, "report format")->check(CLI::IsMember({"json", "csv"}));
    cmd->add_option("--out", f.out, "output directory (overrides [run] out)");
}

covpen::ExperimentConfig resolve(const CommonFlags& f) {
    covpen::ExperimentConfig c = f.config.empty() ? covpen::ExperimentConfig{} : covpen::load_config(f.config);
    if (f.seed) c.seed = *f.seed;
    if (f.jobs) c.jobs = *f.jobs;
    if (f.format) c.format = covpen::parse_output_format(*f.format);
    if (f.out) c.out_dir = *f.out;
    return c;
}

void write_text(const std::filesystem::path& path, const std::string& text) {
    std::filesystem::create_directories(path.parent_path());
    std::ofstream out(path, std::ios::binary);
    if (!out) throw covpen::IoError("cannot open " + path.string() + " for writing");
    out << text;
    if (!out) throw covpen::IoError("failed writing " + path.string());
}

int cmd_backtest(const covpen::ExperimentConfig& c) {
    const covpen::RunManifest m = covpen::run_experiment(c);
    covpen::write_outputs(m, c.out_dir, c.format);
    std::cout << "assets: " << m.n_ok << " ok, " << m.n_partial << " partial, " << m.n_failed << " failed\n";
    for (const auto& s : m.summary) {
        std::cout << "  " << covpen::to_string(s.estimator) << '-' << covpen::to_string(s.method)
                  << "  mean realized SR " << (s.realized_sharpe.mean ? *s.realized_sharpe.mean : NAN) << " (n="
                  << s.realized_sharpe.n << ")\n";
    }
    for (const auto& w : m.warnings) std::cerr << "warning: " << w << '\n';
    std::cout << "manifest " << (c.out_dir / "manifest.json").string() << " hash " << m.manifest_hash << '\n';
    return m.has_failures() ? kExitPartial : kExitOk;
}

int cmd_diagnose(const covpen::ExperimentConfig& c) {
    const auto& d = c.diagnose;
    if (d.input.empty()) throw covpen::ConfigError("[diagnose] input is required");
    const covpen::AssetTable table = covpen::ingest_csv(d.input);
    if (!table.rejected.empty()) {
        throw covpen::ConfigError("diagnose: strategy " + table.rejected.front().asset_id +
                                  " rejected: " + table.rejected.front().reason);
    }
    if (table.assets.empty()) throw covpen::ConfigError("diagnose: no strategies in " + d.input.string());
    std::vector<std::vector<double>> rows;
    for (const auto& a : table.assets) {
        if (a.dates != table.assets.front().dates) {
            throw covpen::ConfigError("diagnose: strategy " + a.asset_id + " is not aligned with the others");
        }
        rows.push_back(a.returns);
    }
    const covpen::StrategyPanel panel = covpen::StrategyPanel::from_rows(rows);

    nlohmann::ordered_json j;
    j["schema_version"] = covpen::kSchemaVersion;
    j["strategies"] = panel.n_strategies();
    j["t_obs"] = panel.t_obs();
    int status = kExitOk;

    const covpen::BootstrapOptions bo{d.bootstrap, d.perf, d.block_len, c.seed};
    try {
        const auto rw = covpen::romano_wolf_stepdown(panel, d.alpha, bo);
        auto echelons = nlohmann::ordered_json::array();
        for (const auto& e : rw.echelons) {
            std::vector<std::string> ids;
            for (std::size_t i : e.members) ids.push_back(table.assets[i].asset_id);
            echelons.push_back({{"k", e.k}, {"critical_value", e.critical_value}, {"members", ids}});
        }
        j["romano_wolf"] = {{"alpha", rw.alpha},        {"n_bootstrap", rw.n_bootstrap},
                            {"block_len", d.block_len}, {"perf", std::string(covpen::to_string(d.perf))},
                            {"v_hat", rw.v_hat},        {"brc_pvalue", rw.brc_pvalue},
                            {"echelons", echelons}};
    } catch (const covpen::Error& e) {
        j["romano_wolf"] = {{"error", e.what()}};
        status = kExitPartial;
    }

    try {
        std::vector<double> srs, pvals;
        for (const auto& r : rows) {
            srs.push_back(covpen::stats::sharpe(r));
            pvals.push_back(covpen::sharpe_pvalue(srs.back(), panel.t_obs()));
        }
        const auto best = static_cast<std::size_t>(std::max_element(srs.begin(), srs.end()) - srs.begin());
        std::vector<double> others = pvals;
        others.erase(others.begin() + static_cast<long>(best));
        const auto h = covpen::haircut_sharpe(srs[best], panel.t_obs(), rows.size(), d.haircut, others);
        j["haircut"] = {{"strategy", table.assets[best].asset_id},
                        {"method", std::string(covpen::to_string(h.method))},
                        {"n_trials", h.n_trials},
                        {"sharpe", srs[best]},
                        {"p_single", h.p_single},
                        {"p_multi", h.p_multi},
                        {"haircut_sr", h.haircut_sr},
                        {"haircut_pct", h.haircut_pct}};
    } catch (const covpen::Error& e) {
        j["haircut"] = {{"error", e.what()}};
        status = kExitPartial;
    }

    try {
        const auto cv = covpen::cscv(panel, d.cscv_blocks, d.cscv_perf);
        j["cscv"] = {{"s_blocks", cv.s_blocks},
                     {"combinations", cv.n_combinations},
                     {"dropped_tail", cv.dropped_tail},
                     {"pbo", cv.pbo},
                     {"prob_loss", cv.prob_loss},
                     {"degradation_slope", cv.degradation_slope},
                     {"dominates_random", cv.dominates_random}};
        if (cv.dropped_tail > 0) {
            std::cerr << "warning: cscv dropped " << cv.dropped_tail << " trailing observations\n";
        }
    } catch (const covpen::Error& e) {
        j["cscv"] = {{"error", e.what()}};
        status = kExitPartial;
    }

    if (c.format == covpen::OutputFormat::Json) {
        write_text(c.out_dir / "diagnose.json", j.dump(2) + "\n");
    } else {
        std::string csv = "schema_version,section,key,value\n";
        for (const auto& [section, body] : j.items()) {
            if (!body.is_object()) continue;
            for (const auto& [key, value] : body.items()) {
                if (value.is_array()) continue;
                csv += std::to_string(covpen::kSchemaVersion) + "," + section + "," + key + "," +
                       (value.is_string() ? value.get<std::string>() : value.dump()) + "\n";
            }
        }
        write_text(c.out_dir / "diagnose.csv", csv);
    }
    std::cout << j.dump(2) << '\n';
    return status;
}

int cmd_simulate(const covpen::ExperimentConfig& c) {
    const covpen::AssetTable table = covpen::simulate_universe(c.simulate, c.seed);
    std::ostringstream os;
    covpen::write_wide_csv(os, table.assets);
    write_text(c.out_dir / "returns.csv", os.str());
    std::cout << "wrote " << table.assets.size() << " series of length " << c.simulate.t_obs << " to "
              << (c.out_dir / "returns.csv").string() << '\n';
    return kExitOk;
}

// Reduced-size versions of the oracle suites, for a quick health check of an
// installed binary. The full suites live in the test tree.
int cmd_verify(std::uint64_t seed) {
    int failures = 0;
    auto check = [&](const std::string& name, bool ok, const std::string& detail) {
        std::cout << (ok ? "PASS " : "FAIL ") << name << "  " << detail << '\n';
        if (!ok) ++failures;
    };

    for (double rho : {0.0, 0.6}) {
        const auto mc = covpen::synthetic::mc_moments_oracle({rho, 1, 1, 0, 0}, 200000, seed);
        const auto f = covpen::product_moments(rho);
        const double z2 = std::abs(mc.value.mu2 - f.mu2) / mc.standard_error.mu2;
        check("moments rho=" + std::to_string(rho), z2 < 4.0, "mu2 z=" + std::to_string(z2));
    }

    const double mass = covpen::product_density_mass({1, 1, 0.4, 0, 0}, -60, 60);
    check("density mass rho=0.4", std::abs(mass - 1.0) < 1e-6, "mass=" + std::to_string(mass));

    covpen::Rng rng(seed);
    bool dof_ok = true;
    for (int i = 0; i < 50; ++i) {
        std::vector<double> r(80);
        for (double& x : r) x = rng.normal();
        const auto d = covpen::build_lag_matrix(r, 3);
        try {
            dof_ok &= covpen::fit_tls(d).hat_trace >= covpen::fit_ols(d).hat_trace;
        } catch (const covpen::Error&) {
        }
    }
    check("tls dof >= ols dof", dof_ok, "50 random designs");

    covpen::synthetic::FreshSampleOptions fo;
    fo.lag_p = 6;
    fo.n_reps = 200;
    fo.seed = seed;
    const auto fs = covpen::synthetic::fresh_sample_rho_oracle(
        [](const covpen::DesignMatrix& d) { return covpen::fit_ols(d); }, {{}, 1.0, 0.0}, fo);
    std::vector<double> corrected;
    for (std::size_t i = 0; i < fs.rho2_in.size(); ++i) {
        corrected.push_back(fs.rho2_in[i] - 2.0 * fs.hat_trace[i] / fs.n_obs[i]);
    }
    const auto out = covpen::synthetic::FreshSampleResult::summarize(fs.r2_out);
    const double corr_mean = covpen::stats::mean(corrected);
    check("mallows unbiasedness", std::abs(corr_mean - out.mean) < 4.0 * out.standard_error + 1e-3,
          "corrected=" + std::to_string(corr_mean) + " oos=" + std::to_string(out.mean));

    const double pm = covpen::adjust_pvalue(0.05, 10, covpen::HaircutMethod::Independent);
    check("haircut independent n=10", std::abs(pm - 0.401) < 5e-4, "p_multi=" + std::to_string(pm));
    check("cscv S=4 combinations", covpen::cscv_partitions(4).size() == 6, "");

    std::cout << (failures ? "verify: FAILED " + std::to_string(failures) + " check(s)\n" : "verify: all checks passed\n");
    return failures ? kExitPartial : kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"covpen: covariance-penalty backtests and multiple-testing diagnostics"};
    app.require_subcommand(1);
    app.set_version_flag("--version", std::string(COVPEN_TOOL_VERSION));

    CommonFlags flags;
    auto* backtest = app.add_subcommand("backtest", "walk-forward backtest over an asset table");
    auto* diagnose = app.add_subcommand("diagnose", "Romano-Wolf, haircut Sharpe and CSCV on a strategy panel");
    auto* simulate = app.add_subcommand("simulate", "generate a synthetic return universe");
    auto* verify = app.add_subcommand("verify", "run reduced oracle checks");
    for (auto* cmd : {backtest, diagnose, simulate, verify}) add_common(cmd, flags);

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        return app.exit(e) == 0 ? kExitOk : kExitConfig;
    }

    try {
        const covpen::ExperimentConfig config = resolve(flags);
        if (*backtest) return cmd_backtest(config);
        if (*diagnose) return cmd_diagnose(config);
        if (*simulate) return cmd_simulate(config);
        return cmd_verify(config.seed);
    } catch (const covpen::ConfigError& e) {
        std::cerr << "configuration error: " << e.what() << '\n';
        return kExitConfig;
    } catch (const covpen::ParseError& e) {
        std::cerr << "input error: " << e.what() << '\n';
        return kExitConfig;
    } catch (const covpen::IoError& e) {
        std::cerr << "i/o error: " << e.what() << '\n';
        return kExitConfig;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kExitPartial;
    }
}
