#include "covpen/experiment.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <fstream>
#include <map>
#include <thread>

#include "covpen/error.hpp"
#include "covpen/report.hpp"
#include "covpen/rng.hpp"
#include "covpen/stats.hpp"

#ifndef COVPEN_VERSION
#define COVPEN_VERSION "0.0.0"
#endif

namespace covpen {

std::string_view to_string(AssetStatus s) {
    switch (s) {
        case AssetStatus::Ok: return "ok";
        case AssetStatus::Partial: return "partial";
        case AssetStatus::Failed: return "failed";
    }
    return "?";
}

AssetTable simulate_universe(const SimulateConfig& config, std::uint64_t seed) {
    AssetTable table;
    constexpr std::int64_t kStart = 10957 + 2;  // 2000-01-03
    std::vector<std::string> dates(config.t_obs);
    for (std::size_t t = 0; t < config.t_obs; ++t) dates[t] = iso_date_from_days(kStart + static_cast<std::int64_t>(t));

    for (std::size_t i = 0; i < config.n_assets; ++i) {
        ReturnSeries s;
        std::string id = std::to_string(i + 1);
        s.asset_id = "SYN" + std::string(id.size() < 4 ? 4 - id.size() : 0, '0') + id;
        s.dates = dates;
        const std::uint64_t asset_seed = derive_seed(seed, i);
        if (config.kind == SimulateConfig::Kind::AR) {
            s.returns = synthetic::gen_ar_returns({config.ar, config.t_obs, asset_seed});
        } else {
            s.returns = synthetic::gen_joint_gaussian({config.joint, config.t_obs, asset_seed}).returns;
        }
        table.assets.push_back(std::move(s));
    }
    return table;
}

namespace {

std::string file_stem(const std::string& id) {
    std::string out = id;
    for (char& c : out) {
        const bool ok = (c >= 'a' && c <= 'z') || (c >= 'A' && c <= 'Z') || (c >= '0' && c <= '9') || c == '.' ||
                        c == '-' || c == '_';
        if (!ok) c = '_';
    }
    return out;
}

AssetOutcome run_one(const ExperimentConfig& config, const ReturnSeries& series,
                     const std::optional<ReturnSeries>& benchmark) {
    AssetOutcome out;
    out.asset_id = series.asset_id;
    BacktestConfig bt = config.backtest;
    if (benchmark) {
        try {
            bt.benchmark.series = aligned_benchmark(*benchmark, series);
        } catch (const Error& e) {
            out.status = AssetStatus::Failed;
            out.reasons.push_back(e.what());
            return out;
        }
    }
    for (Estimator est : config.estimators) {
        bt.estimator = est;
        try {
            auto reports = run_asset_methods(series.returns, bt, config.methods);
            for (auto& r : reports) {
                r.asset_id = series.asset_id;
                out.report_paths.push_back("reports/" + file_stem(series.asset_id) + "__" +
                                           std::string(to_string(est)) + "_" + std::string(to_string(r.method)) +
                                           "." + std::string(to_string(config.format)));
                out.reports.push_back(std::move(r));
            }
        } catch (const std::exception& e) {
            out.reasons.push_back(std::string(to_string(est)) + ": " + e.what());
        }
    }
    if (out.reports.empty()) {
        out.status = AssetStatus::Failed;
    } else if (!out.reasons.empty()) {
        out.status = AssetStatus::Partial;
    }
    return out;
}

SummaryStat summarize_values(const std::vector<double>& xs) {
    SummaryStat s;
    s.n = xs.size();
    if (xs.empty()) return s;
    s.mean = stats::mean(xs);
    if (xs.size() >= 2) s.standard_error = stats::sample_std(xs) / std::sqrt(static_cast<double>(xs.size()));
    return s;
}

std::string column_name(Estimator e, PenaltyMethod m) {
    return std::string(to_string(e)) + "-" + std::string(to_string(m));
}

}  // namespace

void summarize(RunManifest& manifest, const std::vector<Estimator>& estimators,
               const std::vector<PenaltyMethod>& methods) {
    struct Column {
        Estimator e;
        PenaltyMethod m;
        std::vector<std::optional<double>> sr;  // per asset
    };
    std::vector<Column> cols;
    manifest.summary.clear();
    manifest.comparisons.clear();

    for (Estimator e : estimators) {
        for (PenaltyMethod m : methods) {
            Column col{e, m, {}};
            std::vector<double> sr, mad, corr;
            for (const auto& a : manifest.assets) {
                const auto it = std::find_if(a.reports.begin(), a.reports.end(), [&](const BacktestReport& r) {
                    return r.estimator == e && r.method == m;
                });
                if (it == a.reports.end()) {
                    col.sr.push_back(std::nullopt);
                    continue;
                }
                col.sr.push_back(it->realized_sharpe);
                sr.push_back(it->realized_sharpe);
                if (it->mad) mad.push_back(*it->mad);
                if (it->corr) corr.push_back(*it->corr);
            }
            manifest.summary.push_back({e, m, summarize_values(sr), summarize_values(mad), summarize_values(corr)});
            cols.push_back(std::move(col));
        }
    }

    const std::size_t n_pairs = cols.size() * (cols.size() - 1) / 2;
    for (std::size_t i = 0; i < cols.size(); ++i) {
        for (std::size_t j = i + 1; j < cols.size(); ++j) {
            PairComparison pc;
            pc.first = column_name(cols[i].e, cols[i].m);
            pc.second = column_name(cols[j].e, cols[j].m);
            std::vector<double> a, b;
            for (std::size_t k = 0; k < cols[i].sr.size(); ++k) {
                if (cols[i].sr[k] && cols[j].sr[k]) {
                    a.push_back(*cols[i].sr[k]);
                    b.push_back(*cols[j].sr[k]);
                } else if (cols[i].sr[k] || cols[j].sr[k]) {
                    ++pc.excluded;
                }
            }
            pc.n = a.size();
            if (a.size() >= 2) {
                const auto t = stats::paired_t_test(a, b);
                pc.mean_diff = t.mean_diff;
                pc.t_stat = t.t_stat;
                pc.p_value = t.p_value;
                pc.p_bonferroni = std::min(1.0, t.p_value * static_cast<double>(n_pairs));
            }
            manifest.comparisons.push_back(pc);
        }
    }
}

RunManifest run_experiment(const ExperimentConfig& config, const AssetTable& table) {
    if (table.assets.empty()) throw ConfigError("run_experiment: the asset table is empty");
    config.backtest.validate();

    const std::size_t n = table.assets.size();
    std::vector<AssetOutcome> outcomes(n);
    std::atomic<std::size_t> next{0};
    auto worker = [&] {
        for (std::size_t i = next.fetch_add(1); i < n; i = next.fetch_add(1)) {
            outcomes[i] = run_one(config, table.assets[i], table.benchmark);
        }
    };
    const std::size_t n_workers = std::max<std::size_t>(1, std::min(config.jobs, n));
    if (n_workers == 1) {
        worker();
    } else {
        std::vector<std::thread> pool;
        for (std::size_t w = 0; w < n_workers; ++w) pool.emplace_back(worker);
        for (auto& t : pool) t.join();
    }

    RunManifest m;
    m.tool_version = COVPEN_VERSION;
    m.seed = config.seed;
    m.config_echo = config.echo();
    m.warnings = table.warnings;
    for (const auto& r : table.rejected) {
        AssetOutcome o;
        o.asset_id = r.asset_id;
        o.status = AssetStatus::Failed;
        o.reasons.push_back("rejected at ingest: " + r.reason);
        outcomes.push_back(std::move(o));
    }
    std::sort(outcomes.begin(), outcomes.end(),
              [](const AssetOutcome& a, const AssetOutcome& b) { return a.asset_id < b.asset_id; });
    for (const auto& o : outcomes) {
        if (o.status == AssetStatus::Ok) ++m.n_ok;
        if (o.status == AssetStatus::Partial) ++m.n_partial;
        if (o.status == AssetStatus::Failed) ++m.n_failed;
    }
    m.assets = std::move(outcomes);
    if (m.n_ok + m.n_partial == 0) {
        throw Error("run_experiment: every asset failed (first reason: " +
                    (m.assets.front().reasons.empty() ? std::string("unknown") : m.assets.front().reasons.front()) +
                    ")");
    }
    summarize(m, config.estimators, config.methods);
    m.manifest_hash = hex64(fnv1a64(manifest_to_json(m)));
    return m;
}

RunManifest run_experiment(const ExperimentConfig& config) {
    const AssetTable table =
        config.input.empty() ? simulate_universe(config.simulate, config.seed) : ingest_csv(config.input, config.benchmark_column);
    return run_experiment(config, table);
}

namespace {

void write_file(const std::filesystem::path& path, const std::string& content) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw IoError("cannot open " + path.string() + " for writing");
    out << content;
    out.close();
    if (!out) throw IoError("failed writing " + path.string());
}

}  // namespace

void write_outputs(const RunManifest& manifest, const std::filesystem::path& out_dir, OutputFormat format) {
    std::error_code ec;
    std::filesystem::create_directories(out_dir / "reports", ec);
    if (ec) throw IoError("cannot create " + (out_dir / "reports").string() + ": " + ec.message());

    for (const auto& a : manifest.assets) {
        for (std::size_t i = 0; i < a.reports.size(); ++i) {
            const auto& r = a.reports[i];
            write_file(out_dir / a.report_paths[i], format == OutputFormat::Json ? report_to_json(r) : report_to_csv(r));
        }
    }
    write_file(out_dir / "manifest.json", manifest_to_json(manifest));
    write_file(out_dir / "summary.csv", summary_to_csv(manifest));
    write_file(out_dir / "comparisons.csv", comparisons_to_csv(manifest));
}

}  // namespace covpen
