#pragma once

#include <string>
#include <vector>

namespace nlcurv::verify {

/// One verification check. `value` is the achieved error or statistic and the
/// check passes when value <= target.
struct CheckResult {
    int criterion = 0; // acceptance criterion index, 1-based
    std::string name;
    bool passed = false;
    double value = 0.0;
    double target = 0.0;
    std::string detail;
    double seconds = 0.0;
};

/// Suite names in canonical order: specfun, sphere, identities, fracops,
/// perimeter.
const std::vector<std::string>& suite_names();

/// Runs one suite; throws ConfigError on an unknown name.
std::vector<CheckResult> run_suite(const std::string& suite);

} // namespace nlcurv::verify
