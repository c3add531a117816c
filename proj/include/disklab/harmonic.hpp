#pragma once

// Poisson kernel, harmonic measure, boundary weights, and balayage of
// discrete measures.  Normalisation: the boundary carries the probability
// measure d theta / 2 pi, and
//   P_z(theta) = (1 - |z|^2) / |e^{i theta} - z|^2,
// so the kernel has boundary mean 1 for every z.

#include <cstddef>
#include <span>
#include <vector>

#include "disklab/disk.hpp"
#include "disklab/orlicz.hpp"
#include "disklab/sequence.hpp"

namespace disklab {

double poisson_kernel(DiskPoint z, BoundaryAngle t);

// Harmonic measure at z of the counterclockwise arc from a to b
// (0 < b - a <= 2 pi after unwrapping).  Closed form via the continuous
// antiderivative of the kernel; exact up to rounding, no quadrature.
double harmonic_measure_arc(DiskPoint z, double theta_a, double theta_b);

// Piecewise-constant boundary weight: values[i] on the right-open arc
// from breaks[i] to breaks[i+1] (cyclically; the last arc wraps to
// breaks[0]).  Breaks are strictly increasing within [0, 2 pi).
struct ArcWeight {
    std::vector<double> breaks;
    std::vector<double> values;
};

ArcWeight make_arc_weight(std::vector<double> breaks, std::vector<double> values);

// Pointwise sum and scalar multiple (break sets are merged exactly).
ArcWeight arc_add(const ArcWeight& a, const ArcWeight& b);
ArcWeight arc_scale(const ArcWeight& w, double c);

double arc_mean(const ArcWeight& w);                    // integral d theta/2pi
double arc_value_at(const ArcWeight& w, double theta);

// Exact Poisson extension: sum of values times arc harmonic measures.
double poisson_extension(const ArcWeight& w, DiskPoint z);

// Masses/values pairs for norm computations: one sample per arc, mass =
// arc length / 2 pi.  Exact for modulars of the weight itself.
WeightedSamples samples_of(const ArcWeight& w);

// Sum of scaled boundary shadows: each sequence member lam contributes
// height c0 on { |theta - arg lam| <= c (1 - |lam|) }.  Arcs wider than
// the whole circle contribute a constant instead.
ArcWeight shadow_weight(const GeneratedSequence& seq, double c0, double c);

// Finite positive combination of point masses in the disk.
struct DiscreteMeasure {
    std::vector<DiskPoint> atoms;
    std::vector<double> masses;
};

DiscreteMeasure make_measure(std::vector<DiskPoint> atoms,
                             std::vector<double> masses);

// Balayage (swept-out boundary density) of the measure at one angle:
// sum of masses times kernels.
double balayage_at(const DiscreteMeasure& nu, BoundaryAngle t);

// <w, nu> = sum_i m_i P[w](z_i), the exact pairing (each extension term is
// closed form).
double pairing(const ArcWeight& w, const DiscreteMeasure& nu);

// Quadrature grid on the boundary: a uniform base refined near each atom
// (window and spacing scale with 1 - |atom|), two-point Gauss rule per
// cell unless gauss2 is off.  Total mass is 1.
struct BoundaryGridOptions {
    std::size_t base = 4096;
    double window_widths = 16.0;  // half-window in units of 1 - |atom|
    double spacing_frac = 32.0;   // knots per 1 - |atom| inside the window
    bool gauss2 = true;
    unsigned threads = 1;
};

struct BoundaryGrid {
    std::vector<double> theta;
    std::vector<double> mass;
};

BoundaryGrid boundary_grid(const DiscreteMeasure& nu,
                           const BoundaryGridOptions& opts);

// Balayage sampled on the grid (mass from the grid, value = balayage).
WeightedSamples balayage_samples(const DiscreteMeasure& nu,
                                 const BoundaryGrid& grid,
                                 unsigned threads = 1);

// Weight sampled on the grid (approximate where cells straddle breaks).
WeightedSamples sample_weight(const ArcWeight& w, const BoundaryGrid& grid);

// Luxemburg norm of the sampled balayage with respect to the given
// (typically conjugate) shape.
double balayage_dual_norm(const DiscreteMeasure& nu, const OrliczShape& shape,
                          const BoundaryGridOptions& opts);

} // namespace disklab
