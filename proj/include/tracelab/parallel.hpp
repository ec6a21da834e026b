#pragma once

// Worker pool sizing and deterministic reductions.
//
// Every parallel kernel in the library writes one partial result per fixed
// block (row, level, node) and combines the partials serially in index order,
// so results do not depend on the worker count.

#include <cmath>
#include <cstddef>
#include <functional>
#include <span>
#include <vector>

namespace tracelab {

/// Worker count: TRACELAB_THREADS if set and positive, else hardware concurrency.
std::size_t worker_count();

/// Runs body(i) for i in [0, count), split into contiguous chunks across workers.
/// body must only write state owned by index i.
void parallel_for(std::size_t count, const std::function<void(std::size_t)>& body);

/// Neumaier-compensated accumulator.
class CompensatedSum {
public:
    void add(double x) noexcept {
        const double t = sum_ + x;
        if (std::fabs(sum_) >= std::fabs(x))
            comp_ += (sum_ - t) + x;
        else
            comp_ += (x - t) + sum_;
        sum_ = t;
    }

    double value() const noexcept { return sum_ + comp_; }

private:
    double sum_ = 0.0;
    double comp_ = 0.0;
};

/// Pairwise (cascade) summation with a fixed split tree.
double pairwise_sum(std::span<const double> values);

}  // namespace tracelab
