#include "disklab/disk.hpp"

#include <cmath>
#include <stdexcept>
#include <vector>

#include "disklab/parallel.hpp"
#include "disklab/summation.hpp"

namespace disklab {

DiskPoint disk_point(double re, double im) {
    DiskPoint p{re, im};
    if (!(p.abs2() < 1.0))
        throw std::invalid_argument("disk_point: |z| must be < 1");
    return p;
}

DiskPoint disk_point(Complex z) { return disk_point(z.real(), z.imag()); }

BoundaryAngle boundary_angle(double raw) {
    if (!std::isfinite(raw))
        throw std::invalid_argument("boundary_angle: angle must be finite");
    constexpr double two_pi = 2.0 * 3.14159265358979323846;
    double t = std::fmod(raw, two_pi);
    if (t < 0.0) t += two_pi;
    if (t >= two_pi) t = 0.0; // fmod can land exactly on 2*pi after the add
    return BoundaryAngle{t};
}

Complex blaschke_factor(DiskPoint w, Complex z) {
    const Complex wc = w.c();
    if (wc == Complex(0.0, 0.0)) return z;
    const Complex num = wc - z;
    const Complex den = 1.0 - std::conj(wc) * z;
    return (w.abs() / wc) * (num / den);
}

namespace {

// 1 - |p|^2 without the cancellation of the naive 1 - re^2 - im^2; the
// fused multiply keeps (1-re)(1+re) exact before im^2 is removed.
inline double one_minus_abs2(DiskPoint p) {
    return std::fma(1.0 - p.re, 1.0 + p.re, -(p.im * p.im));
}

// Squared numerator/denominator of |b_w(z)|^2 = n2/d2, written out in
// reals to avoid intermediate overflow or needless rounding.
inline void factor_parts(DiskPoint w, DiskPoint z, double& n2, double& d2) {
    const double ar = w.re - z.re, ai = w.im - z.im;
    n2 = ar * ar + ai * ai;
    // 1 - Re(conj(w) z) = ((1-|w|^2) + (1-|z|^2) + |w-z|^2) / 2.  The naive
    // form 1 - (wr*zr + wi*zi) loses all significance once both points sit
    // within ~1e-8 of the boundary; this one never cancels.
    const double br = 0.5 * (one_minus_abs2(w) + one_minus_abs2(z) + n2);
    const double bi = w.re * z.im - w.im * z.re;
    d2 = br * br + bi * bi;
}

} // namespace

double pseudo_distance(DiskPoint z, DiskPoint w) {
    if (z.re == w.re && z.im == w.im) return 0.0;
    double n2, d2;
    factor_parts(w, z, n2, d2);
    return std::sqrt(n2 / d2);
}

double log_abs_factor(DiskPoint w, DiskPoint z) {
    if (z.re == w.re && z.im == w.im)
        return -std::numeric_limits<double>::infinity();
    double n2, d2;
    factor_parts(w, z, n2, d2);
    const double r2 = n2 / d2;
    if (r2 <= 0.5) return 0.5 * std::log(r2);
    // Near the boundary 1 - r2 suffers cancellation in the direct form;
    // use the identity 1 - |b_w(z)|^2 = (1-|w|^2)(1-|z|^2)/|1-conj(w)z|^2.
    const double q = one_minus_abs2(w) * one_minus_abs2(z) / d2;
    return 0.5 * std::log1p(-q);
}

LogModulus log_blaschke_product(std::span<const DiskPoint> pts, DiskPoint z,
                                std::optional<std::size_t> skip) {
    std::vector<double> terms;
    terms.reserve(pts.size());
    for (std::size_t j = 0; j < pts.size(); ++j) {
        if (skip && *skip == j) continue;
        const double t = log_abs_factor(pts[j], z);
        if (!std::isfinite(t)) return LogModulus::minus_infinity();
        terms.push_back(t);
    }
    return LogModulus{pairwise_sum(terms), true};
}

double density_at_member(std::span<const DiskPoint> pts, std::size_t i) {
    if (i >= pts.size())
        throw std::invalid_argument("density_at_member: index out of range");
    const LogModulus lm = log_blaschke_product(pts, pts[i], i);
    if (!lm.finite) return std::numeric_limits<double>::infinity();
    return -lm.value;
}

std::vector<double> all_member_densities(std::span<const DiskPoint> pts,
                                         unsigned threads) {
    std::vector<double> out(pts.size());
    parallel_for(pts.size(), threads,
                 [&](std::size_t i) { out[i] = density_at_member(pts, i); });
    return out;
}

} // namespace disklab
