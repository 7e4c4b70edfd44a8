#pragma once

#include <string>
#include <vector>

#include "dyadic/diagnostics.hpp"
#include "dyadic/experiments.hpp"

namespace dyadic::io {

inline constexpr const char* version_string = "dyadic 0.1.0";

/// Shortest decimal string that parses back to exactly the same double.
std::string format_double(double v);

/// Column layout of the per-sample time series (fixed order).
/// Optional fields are written as empty cells.
void write_timeseries_csv(const std::string& path,
                          const std::vector<diagnostics_record>& records);

/// Machine-readable record of a finished run: identification (version, seed,
/// parameter hash), the resolved plan, the constant set, per-kind summaries,
/// and the asserted checks.
void write_summary_json(const std::string& path, const run_artifact& art);

/// The resolved plan alone, for reproduction.
void write_plan_json(const std::string& path, const experiment_plan& plan);

/// Initial amplitudes, one per line; blank lines and '#' comments ignored.
/// Throws parse_error on malformed numbers.
std::vector<double> load_amplitudes(const std::string& path);

/// FNV-1a (64-bit) over the canonical rendering of the plan parameters,
/// formatted as 16 hex digits.  Stable across runs and platforms.
std::string param_hash(const experiment_plan& plan);

const char* kind_name(experiment_kind k);

}  // namespace dyadic::io
