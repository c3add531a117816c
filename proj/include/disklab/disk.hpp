#pragma once

// Unit-disk geometry: Blaschke factors, pseudohyperbolic distance, and
// log-modulus of finite Blaschke products evaluated stably near the
// boundary.
//
// Conventions used throughout:
//   b_w(z) = (|w|/w) * (w - z) / (1 - conj(w) z),   b_0(z) = z,
// so b_w(0) = |w| >= 0.  The density of a finite sequence L at its i-th
// member is
//   phi_L(i) = sum_{j != i} log 1/|b_{L_j}(L_i)|,
// which is +infinity exactly when the sequence has a repeated point.

#include <complex>
#include <cstddef>
#include <limits>
#include <optional>
#include <span>
#include <vector>

namespace disklab {

using Complex = std::complex<double>;

struct DiskPoint {
    double re = 0.0;
    double im = 0.0;

    Complex c() const { return {re, im}; }
    double abs() const { return std::abs(c()); }
    double abs2() const { return re * re + im * im; }
};

// Validating constructors; throw std::invalid_argument unless |z| < 1.
DiskPoint disk_point(double re, double im);
DiskPoint disk_point(Complex z);

// Angle on the unit circle, kept normalised to [0, 2*pi).
struct BoundaryAngle {
    double theta = 0.0;
    Complex c() const { return {std::cos(theta), std::sin(theta)}; }
};

BoundaryAngle boundary_angle(double raw);

// log|B(z)| for a finite product; value <= 0, with -infinity represented
// explicitly so callers can distinguish "z equals a zero of B" from
// underflow.
struct LogModulus {
    double value = 0.0;
    bool finite = true;

    static LogModulus minus_infinity() { return {0.0, false}; }
    double as_double() const {
        return finite ? value : -std::numeric_limits<double>::infinity();
    }
};

// Single factor b_w(z).  z may lie anywhere in the closed disk.
Complex blaschke_factor(DiskPoint w, Complex z);

// rho(z, w) = |b_w(z)|, the pseudohyperbolic distance.
double pseudo_distance(DiskPoint z, DiskPoint w);

// log|b_w(z)| computed without forming the quotient when z is close to w
// or both points are close to the boundary.  Returns -infinity on exact
// coordinate equality.
double log_abs_factor(DiskPoint w, DiskPoint z);

// log|B(z)| for the product over pts, optionally skipping one index (used
// for densities, where the self-factor is omitted).  Deterministic
// pairwise reduction.
LogModulus log_blaschke_product(std::span<const DiskPoint> pts, DiskPoint z,
                                std::optional<std::size_t> skip = std::nullopt);

// phi_L at member i: -log|B_i(L_i)| with the i-th factor skipped.
// Returns +infinity when another member coincides with L_i.
double density_at_member(std::span<const DiskPoint> pts, std::size_t i);

// All member densities at once; optionally multithreaded (results are
// independent of the thread count).
std::vector<double> all_member_densities(std::span<const DiskPoint> pts,
                                         unsigned threads = 1);

} // namespace disklab
