#pragma once

#include <cstdint>
#include <string>
#include <string_view>

#include "covpen/backtest.hpp"
#include "covpen/experiment.hpp"

// Serialisation of backtest reports and run manifests. Field order is fixed,
// numbers are written in shortest round-trip form, and every file carries
// kSchemaVersion. Standard deviations follow the population convention;
// expected Sharpe ratios for RSquared and SURE are sharpe_from_rho of the
// signed root of the corrected squared correlation.

namespace covpen {

inline constexpr int kSchemaVersion = 1;
inline constexpr double kAnnualisation = 15.874507866387544;  // sqrt(252)

std::string report_to_json(const BacktestReport& report);
/// Inverse of report_to_json. Throws ParseError on malformed input or a
/// schema version mismatch.
BacktestReport report_from_json(std::string_view text);

/// One row per window.
std::string report_to_csv(const BacktestReport& report);

std::string manifest_to_json(const RunManifest& manifest);

/// Long format: estimator, method, metric, n, mean, standard_error.
std::string summary_to_csv(const RunManifest& manifest);
std::string comparisons_to_csv(const RunManifest& manifest);

std::uint64_t fnv1a64(std::string_view bytes);
std::string hex64(std::uint64_t v);

}  // namespace covpen
