#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "mrsys/system.hpp"

namespace mrsys {

enum class PropertyStatus { Pass, Fail, Skipped };

struct PropertyResult {
    std::string name;
    PropertyStatus status = PropertyStatus::Pass;
    double worst_error = 0.0;  ///< largest observed error (metric named in detail)
    double tolerance = 0.0;
    std::string detail;
};

struct VerifyReport {
    std::uint64_t seed = 0;
    int trials = 0;
    std::vector<PropertyResult> results;

    bool passed() const;
    /// First result with status Fail, or nullptr.
    const PropertyResult* first_failure() const;
};

std::string_view to_string(PropertyStatus status);

/// Run the invariant suites against one system with `trials` random draws
/// per property. Deterministic in (sys, trials, seed).
VerifyReport verify_system(const MultirateSystem& sys, int trials, std::uint64_t seed);

}  // namespace mrsys
