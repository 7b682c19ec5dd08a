#include "covpen/report.hpp"

#include <charconv>
#include <cmath>
#include <sstream>

#include "json.hpp"

#include "covpen/error.hpp"
#include "covpen/stats.hpp"

namespace covpen {

using json = nlohmann::ordered_json;

namespace {

json opt(const std::optional<double>& v) { return v ? json(*v) : json(nullptr); }

std::optional<double> opt_from(const json& j) {
    if (j.is_null()) return std::nullopt;
    return j.get<double>();
}

std::string num(double v) {
    if (!std::isfinite(v)) return "";
    char buf[32];
    const auto r = std::to_chars(buf, buf + sizeof buf, v);
    return std::string(buf, r.ptr);
}

std::string num(const std::optional<double>& v) { return v ? num(*v) : std::string(); }

json stat_json(const SummaryStat& s) {
    return json{{"n", s.n}, {"mean", opt(s.mean)}, {"standard_error", opt(s.standard_error)}};
}

json report_json(const BacktestReport& r) {
    json windows = json::array();
    for (const auto& w : r.per_window) {
        windows.push_back(json{{"window", w.index_k},
                               {"chosen_lag", w.chosen_lag},
                               {"expected_sr", opt(w.expected_sr)},
                               {"flat", w.flat},
                               {"failed_lags", w.failed_lags},
                               {"oos_returns", w.oos_returns}});
    }
    return json{{"schema_version", kSchemaVersion},
                {"asset_id", r.asset_id},
                {"estimator", std::string(to_string(r.estimator))},
                {"method", std::string(to_string(r.method))},
                {"realized_sharpe", r.realized_sharpe},
                {"realized_sharpe_annualized", r.realized_sharpe * kAnnualisation},
                {"mad", opt(r.mad)},
                {"corr", opt(r.corr)},
                {"mode_lag", r.mode_lag},
                {"clamp_warnings", r.clamp_warnings},
                {"vol_scale", opt(r.vol_scale)},
                {"conventions",
                 {{"std", "population"},
                  {"sharpe", "per period; annualized fields multiply by sqrt(252)"},
                  {"expected_sr", "sharpe_from_rho(sign(rho_in) * sqrt(max(rho2_corrected, 0)))"}}},
                {"windows", windows}};
}

}  // namespace

std::string report_to_json(const BacktestReport& report) { return report_json(report).dump(2) + "\n"; }

BacktestReport report_from_json(std::string_view text) {
    json j;
    try {
        j = json::parse(text);
    } catch (const json::parse_error& e) {
        throw ParseError(std::string("report JSON: ") + e.what(), e.byte);
    }
    try {
        if (j.at("schema_version").get<int>() != kSchemaVersion) {
            throw ParseError("report JSON: unsupported schema_version", 0);
        }
        BacktestReport r;
        r.asset_id = j.at("asset_id").get<std::string>();
        r.estimator = parse_estimator(j.at("estimator").get<std::string>());
        r.method = parse_penalty_method(j.at("method").get<std::string>());
        r.realized_sharpe = j.at("realized_sharpe").get<double>();
        r.mad = opt_from(j.at("mad"));
        r.corr = opt_from(j.at("corr"));
        r.mode_lag = j.at("mode_lag").get<int>();
        r.clamp_warnings = j.at("clamp_warnings").get<std::size_t>();
        r.vol_scale = opt_from(j.at("vol_scale"));
        for (const auto& w : j.at("windows")) {
            WindowRecord rec;
            rec.index_k = w.at("window").get<std::size_t>();
            rec.chosen_lag = w.at("chosen_lag").get<int>();
            rec.expected_sr = opt_from(w.at("expected_sr"));
            rec.flat = w.at("flat").get<bool>();
            rec.failed_lags = w.at("failed_lags").get<std::size_t>();
            rec.oos_returns = w.at("oos_returns").get<std::vector<double>>();
            r.per_window.push_back(std::move(rec));
        }
        return r;
    } catch (const json::exception& e) {
        throw ParseError(std::string("report JSON: ") + e.what(), 0);
    }
}

std::string report_to_csv(const BacktestReport& r) {
    std::ostringstream os;
    os << "schema_version,asset_id,estimator,method,window,chosen_lag,expected_sr,flat,failed_lags,n_oos,"
          "oos_mean,oos_std,scaled_oos_mean\n";
    for (const auto& w : r.per_window) {
        const double m = w.oos_returns.empty() ? NAN : stats::mean(w.oos_returns);
        const double s = w.oos_returns.empty() ? NAN : stats::population_std(w.oos_returns);
        os << kSchemaVersion << ',' << r.asset_id << ',' << to_string(r.estimator) << ',' << to_string(r.method)
           << ',' << w.index_k << ',' << w.chosen_lag << ',' << num(w.expected_sr) << ',' << (w.flat ? 1 : 0)
           << ',' << w.failed_lags << ',' << w.oos_returns.size() << ',' << num(m) << ',' << num(s) << ','
           << (r.vol_scale ? num(m * *r.vol_scale) : std::string()) << '\n';
    }
    return os.str();
}

std::string manifest_to_json(const RunManifest& m) {
    json assets = json::array();
    for (const auto& a : m.assets) {
        assets.push_back(json{{"asset_id", a.asset_id},
                              {"status", std::string(to_string(a.status))},
                              {"reasons", a.reasons},
                              {"reports", a.report_paths}});
    }
    json summary = json::array();
    for (const auto& s : m.summary) {
        summary.push_back(json{{"estimator", std::string(to_string(s.estimator))},
                               {"method", std::string(to_string(s.method))},
                               {"realized_sharpe", stat_json(s.realized_sharpe)},
                               {"mad", stat_json(s.mad)},
                               {"corr", stat_json(s.corr)}});
    }
    json comparisons = json::array();
    for (const auto& c : m.comparisons) {
        comparisons.push_back(json{{"first", c.first},
                                   {"second", c.second},
                                   {"n", c.n},
                                   {"excluded", c.excluded},
                                   {"mean_diff", c.mean_diff},
                                   {"t_stat", c.t_stat},
                                   {"p_value", c.p_value},
                                   {"p_bonferroni", c.p_bonferroni}});
    }
    const json j{{"schema_version", kSchemaVersion},
                 {"tool_version", m.tool_version},
                 {"seed", m.seed},
                 {"config", m.config_echo},
                 {"counts", {{"ok", m.n_ok}, {"partial", m.n_partial}, {"failed", m.n_failed}}},
                 {"warnings", m.warnings},
                 {"assets", assets},
                 {"summary", summary},
                 {"comparisons", comparisons},
                 {"manifest_hash", m.manifest_hash}};
    return j.dump(2) + "\n";
}

std::string summary_to_csv(const RunManifest& m) {
    std::ostringstream os;
    os << "schema_version,estimator,method,metric,n,mean,standard_error\n";
    for (const auto& s : m.summary) {
        auto row = [&](const char* metric, const SummaryStat& st, double scale) {
            os << kSchemaVersion << ',' << to_string(s.estimator) << ',' << to_string(s.method) << ',' << metric
               << ',' << st.n << ',' << (st.mean ? num(*st.mean * scale) : "") << ','
               << (st.standard_error ? num(*st.standard_error * scale) : "") << '\n';
        };
        row("realized_sharpe", s.realized_sharpe, 1.0);
        row("realized_sharpe_annualized", s.realized_sharpe, kAnnualisation);
        row("mad", s.mad, 1.0);
        row("corr", s.corr, 1.0);
    }
    return os.str();
}

std::string comparisons_to_csv(const RunManifest& m) {
    std::ostringstream os;
    os << "schema_version,first,second,n,excluded,mean_diff,t_stat,p_value,p_bonferroni\n";
    for (const auto& c : m.comparisons) {
        os << kSchemaVersion << ',' << c.first << ',' << c.second << ',' << c.n << ',' << c.excluded << ','
           << num(c.mean_diff) << ',' << num(c.t_stat) << ',' << num(c.p_value) << ',' << num(c.p_bonferroni)
           << '\n';
    }
    return os.str();
}

std::uint64_t fnv1a64(std::string_view bytes) {
    std::uint64_t h = 0xcbf29ce484222325ULL;
    for (unsigned char c : bytes) {
        h ^= c;
        h *= 0x100000001b3ULL;
    }
    return h;
}

std::string hex64(std::uint64_t v) {
    static constexpr char kDigits[] = "0123456789abcdef";
    std::string out(16, '0');
    for (int i = 15; i >= 0; --i, v >>= 4) out[static_cast<std::size_t>(i)] = kDigits[v & 0xf];
    return out;
}

}  // namespace covpen
