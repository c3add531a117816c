#pragma once

// Sequence generators and per-sequence summaries.
//
// The "crowded" generator places, for each stage n >= 2, points
//   lam_{n,k} = (1 - 2^-n) exp(2 pi i k / 2^n)
// for k in {-k_n, ..., k_n}, where k_n = floor(2^n / (n ln^(1+eps) n))
// with the natural logarithm.  Stage 2 (and only stage 2, for every
// eps > 0) has 2 k_n + 1 > 2^n, i.e. the literal k-range wraps the whole
// circle; such a stage emits the 2^n distinct angles k = -2^(n-1) ..
// 2^(n-1)-1 instead, so the sequence never contains repeated points.
//
// Canonical order everywhere: stage-major, k ascending within a stage.

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "disklab/disk.hpp"

namespace disklab {

// Provenance record carried by generated sequences and copied into run
// manifests.  Which fields are meaningful depends on the tag:
//   "section6":  eps, n_max
//   "radial":    q, count
//   "pairs":     q, count, eta
//   "explicit":  none
struct Generator {
    std::string tag = "explicit";
    double eps = 0.0;
    int n_max = 0;
    double q = 0.0;
    int count = 0;
    double eta = 0.0;
};

struct GeneratedSequence {
    std::vector<DiskPoint> points;
    std::vector<int> stage;      // generator stage of each point
    std::vector<int64_t> index;  // angular index k (radial: 0; pairs: 0 base / 1 offset)
    Generator generator;

    std::size_t size() const { return points.size(); }
};

// k_n and the emitted per-stage count min(2 k_n + 1, 2^n).
int64_t crowd_number(int n, double eps);
int64_t stage_population(int n, double eps);

GeneratedSequence gen_crowded(double eps, int n_max);

// Radial points 1 - q^j, j = 1..count, on the positive axis.
GeneratedSequence gen_radial(double q, int count);

// Radial base points, each followed by a partner at pseudohyperbolic
// distance exp(-eta), stepped outward along the same ray.
GeneratedSequence gen_perturbed_pairs(double q, int count, double eta);

GeneratedSequence gen_explicit(std::vector<DiskPoint> pts);

// Sum of (1 - |lam|) over the sequence; deterministic pairwise reduction.
double blaschke_sum(std::span<const DiskPoint> pts);

// Smallest pairwise pseudohyperbolic distance (1.0 for size <= 1).
// Plain all-pairs scan; the parallel row split does not change the result.
double separation_constant(std::span<const DiskPoint> pts, unsigned threads = 1);

// Certified upper bound on the density mass omitted when the crowded
// sequence is truncated after stage j_max, evaluated at lam with
// |lam| <= 1 - 2^-j_max.  bound decreases as j_max grows;
// comparison_constant is the 1/(2 rho_min^2) factor entering the bound.
struct TailEstimate {
    int j_max = 0;
    double bound = 0.0;
    double comparison_constant = 0.0;
};

TailEstimate crowded_tail_bound(double eps, DiskPoint lam, int j_max);

// Exact omitted mass for radial truncations: sum over j > j_last of
// log 1/rho(r, 1-q^j), for real r = 1 - u with u > q^(j_last+1).
// The series is geometric; it is summed to machine precision.
double radial_tail_mass(double q, double r, int j_last);

// Density of the crowded sequence truncated after stage j_max, evaluated
// at its own member lam_{n,0} (self-factor skipped), streamed stage by
// stage so the sequence is never materialised.
double crowded_density_truncated(double eps, int n, int j_max,
                                 unsigned threads = 1);

} // namespace disklab
