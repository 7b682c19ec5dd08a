#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

// Return tables read from CSV. Two layouts are detected from the header:
//   long:  date,asset_id,return
//   wide:  date,<id1>,<id2>,...   (an empty cell means "no observation")
// Dates are ISO-8601 (YYYY-MM-DD); returns are decimal fractions.

namespace covpen {

struct ReturnSeries {
    std::string asset_id;
    std::vector<std::string> dates;
    std::vector<double> returns;
};

struct RejectedAsset {
    std::string asset_id;
    std::string reason;
};

struct AssetTable {
    /// Accepted assets, ordered by id.
    std::vector<ReturnSeries> assets;
    std::optional<ReturnSeries> benchmark;
    std::vector<RejectedAsset> rejected;
    std::vector<std::string> warnings;

    const ReturnSeries* find(const std::string& asset_id) const;
};

/// Benchmark values on the asset's dates. Throws DomainError when the
/// benchmark lacks one of them.
std::vector<double> aligned_benchmark(const ReturnSeries& benchmark, const ReturnSeries& asset);

/// Throws ParseError (with the offending line) on malformed rows, bad dates,
/// non-finite returns and duplicate (date, asset) rows; IoError when the file
/// cannot be read. Assets whose dates are not strictly increasing, or that
/// have an interior gap in a wide file, are moved to `rejected` with a warning.
/// `benchmark_id`, when non-empty, names the asset to use as the benchmark.
AssetTable ingest_csv(const std::filesystem::path& path, const std::string& benchmark_id = "");
AssetTable parse_csv(std::istream& in, const std::string& benchmark_id = "");

/// True for a valid calendar date written YYYY-MM-DD.
bool is_iso_date(const std::string& s);

/// YYYY-MM-DD for `days` after 1970-01-01.
std::string iso_date_from_days(std::int64_t days);

void write_wide_csv(std::ostream& out, const std::vector<ReturnSeries>& assets);

}  // namespace covpen
