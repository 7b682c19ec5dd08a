#include "covpen/asset_table.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <iomanip>
#include <map>
#include <set>
#include <sstream>

#include "covpen/error.hpp"

namespace covpen {

const ReturnSeries* AssetTable::find(const std::string& asset_id) const {
    for (const auto& a : assets) {
        if (a.asset_id == asset_id) return &a;
    }
    return nullptr;
}

namespace {

std::string trim(std::string_view s) {
    const auto b = s.find_first_not_of(" \t\r");
    if (b == std::string_view::npos) return {};
    const auto e = s.find_last_not_of(" \t\r");
    return std::string(s.substr(b, e - b + 1));
}

std::vector<std::string> split(const std::string& line) {
    std::vector<std::string> out;
    std::size_t start = 0;
    while (true) {
        const auto comma = line.find(',', start);
        out.push_back(trim(std::string_view(line).substr(start, comma - start)));
        if (comma == std::string::npos) break;
        start = comma + 1;
    }
    return out;
}

double parse_return(const std::string& cell, std::size_t line) {
    double v = 0.0;
    const char* first = cell.data();
    const char* last = cell.data() + cell.size();
    if (!cell.empty() && *first == '+') ++first;
    const auto [ptr, ec] = std::from_chars(first, last, v);
    if (ec != std::errc() || ptr != last) throw ParseError("cannot parse return '" + cell + "'", line);
    if (!std::isfinite(v)) throw ParseError("non-finite return '" + cell + "'", line);
    return v;
}

void require_date(const std::string& d, std::size_t line) {
    if (!is_iso_date(d)) throw ParseError("invalid ISO-8601 date '" + d + "'", line);
}

struct Obs {
    std::string date;
    double value;
    std::size_t line;
};

void accept(AssetTable& table, const std::string& id, const std::vector<Obs>& obs) {
    ReturnSeries s;
    s.asset_id = id;
    for (std::size_t i = 0; i < obs.size(); ++i) {
        if (i > 0 && !(obs[i].date > obs[i - 1].date)) {
            const std::string reason = "dates not strictly increasing at line " + std::to_string(obs[i].line);
            table.rejected.push_back({id, reason});
            table.warnings.push_back("asset " + id + " rejected: " + reason);
            return;
        }
        s.dates.push_back(obs[i].date);
        s.returns.push_back(obs[i].value);
    }
    table.assets.push_back(std::move(s));
}

void finish(AssetTable& table, const std::string& benchmark_id) {
    std::sort(table.assets.begin(), table.assets.end(),
              [](const ReturnSeries& a, const ReturnSeries& b) { return a.asset_id < b.asset_id; });
    std::sort(table.rejected.begin(), table.rejected.end(),
              [](const RejectedAsset& a, const RejectedAsset& b) { return a.asset_id < b.asset_id; });
    if (benchmark_id.empty()) return;
    const auto it = std::find_if(table.assets.begin(), table.assets.end(),
                                 [&](const ReturnSeries& s) { return s.asset_id == benchmark_id; });
    if (it == table.assets.end()) throw ConfigError("benchmark column '" + benchmark_id + "' not found");
    table.benchmark = std::move(*it);
    table.assets.erase(it);
}

AssetTable parse_long(std::istream& in, std::size_t& line_no) {
    std::map<std::string, std::vector<Obs>> by_asset;
    std::map<std::pair<std::string, std::string>, std::size_t> seen;
    std::string line;
    while (std::getline(in, line)) {
        ++line_no;
        if (trim(line).empty()) continue;
        const auto cells = split(line);
        if (cells.size() != 3) throw ParseError("expected 3 fields, found " + std::to_string(cells.size()), line_no);
        require_date(cells[0], line_no);
        if (cells[1].empty()) throw ParseError("empty asset_id", line_no);
        const double v = parse_return(cells[2], line_no);
        const auto [it, inserted] = seen.emplace(std::make_pair(cells[0], cells[1]), line_no);
        if (!inserted) {
            throw ParseError("duplicate row for date " + cells[0] + ", asset " + cells[1] + " (first at line " +
                                 std::to_string(it->second) + ", again at line " + std::to_string(line_no) + ")",
                             line_no);
        }
        by_asset[cells[1]].push_back({cells[0], v, line_no});
    }
    AssetTable table;
    for (const auto& [id, obs] : by_asset) accept(table, id, obs);
    return table;
}

AssetTable parse_wide(std::istream& in, const std::vector<std::string>& header, std::size_t& line_no) {
    const std::size_t n_assets = header.size() - 1;
    std::set<std::string> ids;
    for (std::size_t j = 1; j < header.size(); ++j) {
        if (header[j].empty()) throw ParseError("empty asset id in header", line_no);
        if (!ids.insert(header[j]).second) throw ParseError("duplicate asset id '" + header[j] + "'", line_no);
    }

    std::vector<std::vector<Obs>> obs(n_assets);
    // First empty cell after an asset's data began, and whether data resumed
    // after it (an interior gap rather than a late end).
    std::vector<std::optional<std::size_t>> pending_gap(n_assets);
    std::vector<std::optional<std::size_t>> interior_gap(n_assets);
    std::string prev_date;
    std::size_t prev_line = 0;
    std::string line;
    while (std::getline(in, line)) {
        ++line_no;
        if (trim(line).empty()) continue;
        const auto cells = split(line);
        if (cells.size() != header.size()) {
            throw ParseError("expected " + std::to_string(header.size()) + " fields, found " +
                                 std::to_string(cells.size()),
                             line_no);
        }
        require_date(cells[0], line_no);
        if (!prev_date.empty() && !(cells[0] > prev_date)) {
            if (cells[0] == prev_date) {
                throw ParseError("duplicate date " + cells[0] + " (lines " + std::to_string(prev_line) + " and " +
                                     std::to_string(line_no) + ")",
                                 line_no);
            }
            throw ParseError("dates not strictly increasing", line_no);
        }
        prev_date = cells[0];
        prev_line = line_no;
        for (std::size_t j = 0; j < n_assets; ++j) {
            const std::string& cell = cells[j + 1];
            if (cell.empty()) {
                if (!obs[j].empty() && !pending_gap[j]) pending_gap[j] = line_no;
                continue;
            }
            const double v = parse_return(cell, line_no);
            if (pending_gap[j] && !interior_gap[j]) interior_gap[j] = pending_gap[j];
            obs[j].push_back({cells[0], v, line_no});
        }
    }

    AssetTable table;
    for (std::size_t j = 0; j < n_assets; ++j) {
        const std::string& id = header[j + 1];
        if (interior_gap[j]) {
            const std::string reason = "missing value inside the series at line " + std::to_string(*interior_gap[j]);
            table.rejected.push_back({id, reason});
            table.warnings.push_back("asset " + id + " rejected: " + reason);
            continue;
        }
        if (obs[j].empty()) {
            table.rejected.push_back({id, "no observations"});
            table.warnings.push_back("asset " + id + " rejected: no observations");
            continue;
        }
        accept(table, id, obs[j]);
    }
    return table;
}

}  // namespace

bool is_iso_date(const std::string& s) {
    if (s.size() != 10 || s[4] != '-' || s[7] != '-') return false;
    for (std::size_t i : {0, 1, 2, 3, 5, 6, 8, 9}) {
        if (s[i] < '0' || s[i] > '9') return false;
    }
    const int y = std::stoi(s.substr(0, 4));
    const int m = std::stoi(s.substr(5, 2));
    const int d = std::stoi(s.substr(8, 2));
    if (m < 1 || m > 12 || d < 1) return false;
    static constexpr int kDays[] = {31, 28, 31, 30, 31, 30, 31, 31, 30, 31, 30, 31};
    const bool leap = (y % 4 == 0 && y % 100 != 0) || y % 400 == 0;
    return d <= kDays[m - 1] + (m == 2 && leap ? 1 : 0);
}

std::string iso_date_from_days(std::int64_t days) {
    // Civil-from-days (proleptic Gregorian).
    days += 719468;
    const std::int64_t era = (days >= 0 ? days : days - 146096) / 146097;
    const std::int64_t doe = days - era * 146097;
    const std::int64_t yoe = (doe - doe / 1460 + doe / 36524 - doe / 146096) / 365;
    const std::int64_t doy = doe - (365 * yoe + yoe / 4 - yoe / 100);
    const std::int64_t mp = (5 * doy + 2) / 153;
    const std::int64_t d = doy - (153 * mp + 2) / 5 + 1;
    const std::int64_t m = mp < 10 ? mp + 3 : mp - 9;
    const std::int64_t y = yoe + era * 400 + (m <= 2 ? 1 : 0);
    std::ostringstream os;
    os << std::setfill('0') << std::setw(4) << y << '-' << std::setw(2) << m << '-' << std::setw(2) << d;
    return os.str();
}

std::vector<double> aligned_benchmark(const ReturnSeries& benchmark, const ReturnSeries& asset) {
    std::vector<double> out;
    out.reserve(asset.dates.size());
    std::size_t j = 0;
    for (const auto& d : asset.dates) {
        while (j < benchmark.dates.size() && benchmark.dates[j] < d) ++j;
        if (j == benchmark.dates.size() || benchmark.dates[j] != d) {
            throw DomainError("benchmark has no value on " + d + " for asset " + asset.asset_id);
        }
        out.push_back(benchmark.returns[j]);
    }
    return out;
}

AssetTable parse_csv(std::istream& in, const std::string& benchmark_id) {
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (!trim(line).empty()) break;
    }
    if (trim(line).empty()) throw ParseError("missing header row", line_no);
    const auto header = split(line);
    if (header.size() < 2 || header[0] != "date") throw ParseError("header must start with 'date'", line_no);

    AssetTable table = (header.size() == 3 && header[1] == "asset_id" && header[2] == "return")
                           ? parse_long(in, line_no)
                           : parse_wide(in, header, line_no);
    finish(table, benchmark_id);
    return table;
}

AssetTable ingest_csv(const std::filesystem::path& path, const std::string& benchmark_id) {
    std::ifstream in(path);
    if (!in) throw IoError("cannot open " + path.string());
    try {
        return parse_csv(in, benchmark_id);
    } catch (const ParseError& e) {
        throw ParseError(path.string() + ": " + e.what(), e.line());
    }
}

void write_wide_csv(std::ostream& out, const std::vector<ReturnSeries>& assets) {
    std::set<std::string> all_dates;
    for (const auto& a : assets) all_dates.insert(a.dates.begin(), a.dates.end());
    out << "date";
    for (const auto& a : assets) out << ',' << a.asset_id;
    out << '\n';
    std::vector<std::size_t> pos(assets.size(), 0);
    char buf[32];
    for (const auto& d : all_dates) {
        out << d;
        for (std::size_t j = 0; j < assets.size(); ++j) {
            out << ',';
            if (pos[j] < assets[j].dates.size() && assets[j].dates[pos[j]] == d) {
                const auto res = std::to_chars(buf, buf + sizeof buf, assets[j].returns[pos[j]]);
                out.write(buf, res.ptr - buf);
                ++pos[j];
            }
        }
        out << '\n';
    }
}

}  // namespace covpen
