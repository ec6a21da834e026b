#pragma once

#include <cmath>
#include <limits>
#include <string>

namespace tracelab {

/// One measured quantity against its bound. `margin` is (bound - value)/|bound|
/// (absolute difference when bound = 0); NaN when no bound applies.
struct CheckRow {
    std::string check_name;
    int n = 0;
    double p = std::numeric_limits<double>::quiet_NaN();
    double q = std::numeric_limits<double>::quiet_NaN();
    double r = std::numeric_limits<double>::quiet_NaN();
    double beta = std::numeric_limits<double>::quiet_NaN();
    double h = std::numeric_limits<double>::quiet_NaN();
    double value = 0.0;
    double bound = std::numeric_limits<double>::quiet_NaN();
    double margin = std::numeric_limits<double>::quiet_NaN();
    bool passed = true;
};

inline double relative_margin(double value, double bound) {
    if (std::isnan(bound)) return std::numeric_limits<double>::quiet_NaN();
    return bound == 0.0 ? bound - value : (bound - value) / std::fabs(bound);
}

}  // namespace tracelab
