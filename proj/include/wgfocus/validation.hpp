#pragma once

#include <string>
#include <vector>

#include "wgfocus/config.hpp"

namespace wgfocus {

struct CheckResult {
    std::string name;
    bool passed = false;
    double value = 0.0;      ///< measured error or metric
    double tolerance = 0.0;  ///< pass bound on `value`
    std::string detail;
};

/// Fast invariant suite behind `wgfocus validate`: dispersion identities,
/// propagation energy and invertibility, two-level dynamics against closed
/// forms, dressed energies against an eigensolver and config round-trip.
std::vector<CheckResult> run_invariant_checks(const Config& config);

}  // namespace wgfocus
