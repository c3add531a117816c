#pragma once

// Dyadic Whitney decomposition of the disk.  Square (n, k), n >= 0,
// 0 <= k < 2^n, is the right-open cell
//   1 - 2^-n <= |z| < 1 - 2^-(n+1),
//   2 pi k / 2^n <= arg z < 2 pi (k+1) / 2^n,
// so each cell has comparable radial and angular extent at its scale.

#include <array>
#include <cstdint>
#include <span>
#include <vector>

#include "disklab/disk.hpp"
#include "disklab/sequence.hpp"

namespace disklab {

struct DyadicIndex {
    int n = 0;
    int64_t k = 0;

    friend bool operator==(const DyadicIndex&, const DyadicIndex&) = default;
};

struct DyadicSquare {
    DyadicIndex idx;
    double r_lo = 0.0, r_hi = 0.0;
    double theta_lo = 0.0, theta_hi = 0.0;
};

DyadicIndex square_of(DiskPoint z);
DyadicSquare square(DyadicIndex idx);

// Chessboard colouring in (generation parity, angular parity); classes
// 1..4.  Two squares of the same class are never edge-adjacent.
int color_class(DyadicIndex idx);

// Indices of the sequence partitioned by colour class of the containing
// square (canonical order preserved inside each class).
std::array<std::vector<std::size_t>, 4> split4(const GeneratedSequence& seq);

// Oscillation control across one square: (1 + d) / (1 - d) with d the
// pseudohyperbolic diameter of the closed cell (attained at corners; edge
// midpoints are included as a safeguard).
double harnack_factor(const DyadicSquare& sq);

// Per occupied square, the member of the given subset with the largest
// density (equivalently the smallest |B(lam)|), reported in order of first
// occupancy.
struct SquareExtreme {
    DyadicIndex sq;
    std::size_t point_index = 0;
    double density = 0.0;
};

std::vector<SquareExtreme> per_square_extreme(const GeneratedSequence& seq,
                                              std::span<const std::size_t> subset,
                                              std::span<const double> densities);

} // namespace disklab
