#pragma once

// Named boundary data and the seeded test corpus shared by the experiments.

#include <cstdint>
#include <functional>
#include <span>
#include <string>
#include <vector>

#include "tracelab/grid.hpp"

namespace tracelab {

using BoundaryProfile = std::function<double(std::span<const double>)>;

struct TestFunction {
    std::string name;
    BoundaryProfile profile;

    BoundaryGridFunction sample(const BoundaryGrid& grid) const { return sample_boundary(profile, grid); }
};

struct DataParams {
    double width = 0.3;   // gaussian sigma, indicator radius, plateau radius
    double alpha = 0.9;   // power-decay exponent
};

/// gaussian | indicator | plateau | power-decay. Throws DomainError otherwise.
TestFunction named_data(const std::string& kind, const DataParams& params = {});

/// Ten functions: fixed shapes plus two random bump sums drawn from seed.
std::vector<TestFunction> test_corpus(std::uint64_t seed);

}  // namespace tracelab
