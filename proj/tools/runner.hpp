#pragma once

#include <ostream>

#include "config.hpp"

namespace nlcurv::cli {

/// Runs the curvature pipeline described by cfg: one CSV row per
/// (point, sigma, direction), plus extrapolated limit rows when requested.
/// CSV goes to cfg.output_csv (stdout when empty), an optional JSON report to
/// cfg.output_json. Per-point numerical failures are logged to errlog and the
/// run continues. Returns 0 on success, 1 when any point failed.
int run_curvature(const RunConfig& cfg, std::ostream& errlog);

} // namespace nlcurv::cli
