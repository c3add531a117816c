#pragma once

// Shape functions for Orlicz-type norms on the circle: convex nondecreasing
// phi with phi(0) = 0, their convex conjugates, and the induced Luxemburg
// norms over weighted boundary samples.
//
// Built-in families follow a common pattern: an analytic expression valid
// for t >= t0 and, below t0, the chord through the origin matching the
// value at t0.  (A line through the origin cannot match value and slope
// simultaneously, so the splice is continuous with a convex kink at t0.)
//   power(p):  t^p for t >= 1                      (p >= 1)
//   psi(e):    t (ln t)^e for t >= exp(1+e)        (e > 0)
//   loglog(e): t (ln ln t)^e for t >= exp(exp(1+e)), convexity checked on
//              a grid at construction
// plus explicit piecewise-linear tables and the identity shape.

#include <memory>
#include <span>
#include <string>
#include <utility>
#include <vector>

namespace disklab {

class OrliczShape {
public:
    struct Impl;

    // phi(t); t must be >= 0.  May return +infinity (conjugates saturate
    // once their value exceeds ~1e120, and are genuinely infinite beyond
    // the derivative supremum of a bounded-slope base).
    double value(double t) const;

    // Right derivative; +infinity past a conjugate's domain.
    double rderiv(double t) const;

    // Least t with phi(t) >= u.  Throws std::domain_error when u exceeds
    // the representable range of a saturated conjugate.
    double inverse(double u) const;

    double splice_point() const;  // t0 of the chord splice (0 if none)
    double deriv_sup() const;     // sup phi'; +infinity when unbounded
    std::string describe() const;

    static OrliczShape power(double p);
    static OrliczShape psi(double eps);
    static OrliczShape loglog(double eps);
    static OrliczShape from_table(std::vector<std::pair<double, double>> nodes);
    static OrliczShape linear();

    explicit OrliczShape(std::shared_ptr<const Impl> impl);

private:
    friend OrliczShape conjugate(const OrliczShape& shape);
    std::shared_ptr<const Impl> impl_;
};

// Convex conjugate phi*(s) = sup_t (s t - phi(t)), represented as an
// adaptive segment table carrying exact node values and maximizers; the
// conjugate of a conjugate (numeric biconjugation) goes through the same
// machinery.
OrliczShape conjugate(const OrliczShape& shape);

// Finitely many boundary samples with positive masses; for a probability
// grid the masses add to 1, but nothing here requires that.
struct WeightedSamples {
    std::vector<double> mass;
    std::vector<double> value;
};

// sum_i mass_i * phi(|value_i|), deterministic reduction.
double modular(const OrliczShape& shape, const WeightedSamples& samples);

// Luxemburg norm inf{ t > 0 : modular(samples / t) <= 1 }.  Samples are
// pre-scaled by max|value| so the result is exactly homogeneous; the
// bisection bracket is driven to 1e-13 relative (guaranteed: 1e-10).
double luxemburg_norm(const OrliczShape& shape, const WeightedSamples& samples);

// Norm adapted to log-scale growth: least t with
//   sum_i mass_i * phi(log+ (value_i / t)) <= t.
// Values must be >= 0.
double growth_fnorm(const OrliczShape& shape, const WeightedSamples& samples);

// Amemiya form inf_{k>0} (1 + modular(k * samples)) / k.  On a finite
// sample space this equals the sup of pairings against the unit Luxemburg
// ball of the conjugate shape, i.e. the exact dual norm; it lies between
// the Luxemburg norm and twice the Luxemburg norm.
double amemiya_norm(const OrliczShape& shape, const WeightedSamples& samples);

struct ProbeResult {
    bool holds = false;
    double c1 = 0.0;       // doubling: sup ratio M;    complement: factor d
    double c2 = 0.0;       // doubling: threshold K=0;  complement: probe start
    double witness_t = 0.0;
};

// sup phi(2t)/phi(t) over a log grid on [t_lo, t_hi]; holds when the sup
// stays below ratio_cap.
ProbeResult doubling_probe(const OrliczShape& shape, double t_lo, double t_hi,
                           int grid = 4096, double ratio_cap = 1e6);

// Searches d in {2, 4, 8, ..., 2^20} for 2 phi(t) <= phi(d t) / d on the
// grid; reports the first working d, or the worst violation at the
// largest d tried.
ProbeResult complement_doubling_probe(const OrliczShape& shape, double t_lo,
                                      double t_hi, int grid = 4096);

} // namespace disklab
