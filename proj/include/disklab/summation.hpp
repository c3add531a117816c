#pragma once

// Deterministic compensated summation.  Every reduction in the library goes
// through one of these so that results do not depend on thread count or on
// incidental evaluation order.

#include <cmath>
#include <cstddef>
#include <span>
#include <vector>

namespace disklab {

// Neumaier variant of Kahan summation: running sum plus carried compensation.
struct CompensatedSum {
    double sum = 0.0;
    double carry = 0.0;

    void add(double x) {
        double t = sum + x;
        if (std::abs(sum) >= std::abs(x))
            carry += (sum - t) + x;
        else
            carry += (x - t) + sum;
        sum = t;
    }

    double value() const { return sum + carry; }
};

// Fixed-topology pairwise tree over the span, compensated within each leaf
// block.  The tree shape depends only on the length, so the result is a
// pure function of the input order.
inline double pairwise_sum(std::span<const double> terms) {
    constexpr std::size_t kLeaf = 32;
    const std::size_t n = terms.size();
    if (n <= kLeaf) {
        CompensatedSum acc;
        for (double x : terms) acc.add(x);
        return acc.value();
    }
    std::size_t half = n / 2;
    return pairwise_sum(terms.first(half)) + pairwise_sum(terms.subspan(half));
}

// Convenience: sum of f(i) for i in [0, n), materialised in index order.
template <typename F>
double pairwise_sum_indexed(std::size_t n, F&& f) {
    std::vector<double> terms(n);
    for (std::size_t i = 0; i < n; ++i) terms[i] = f(i);
    return pairwise_sum(terms);
}

} // namespace disklab
