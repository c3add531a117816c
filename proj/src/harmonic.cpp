#include "disklab/harmonic.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "disklab/parallel.hpp"
#include "disklab/summation.hpp"

namespace disklab {

namespace {

constexpr double kPi = 3.14159265358979323846;
constexpr double kTwoPi = 2.0 * kPi;

void require(bool ok, const char* msg) {
    if (!ok) throw std::invalid_argument(msg);
}

// Continuous antiderivative of half the kernel: A'(x) = P_r(x) / 2,
// A(x + 2 pi) = A(x) + pi.  Harmonic measure of an arc is then an exact
// difference of two evaluations.
double kernel_antideriv(double x, double r) {
    const double turns = std::floor((x + kPi) / kTwoPi);
    const double rem = x - kTwoPi * turns; // in [-pi, pi)
    const double c = (1.0 + r) / (1.0 - r);
    return kPi * turns + std::atan(c * std::tan(0.5 * rem));
}

} // namespace

double poisson_kernel(DiskPoint z, BoundaryAngle t) {
    const double r2 = z.abs2();
    const double dre = std::cos(t.theta) - z.re;
    const double dim = std::sin(t.theta) - z.im;
    return (1.0 - r2) / (dre * dre + dim * dim);
}

double harmonic_measure_arc(DiskPoint z, double theta_a, double theta_b) {
    require(std::isfinite(theta_a) && std::isfinite(theta_b),
            "harmonic_measure_arc: angles must be finite");
    double len = theta_b - theta_a;
    require(len > 0.0, "harmonic_measure_arc: arc must have positive length");
    if (len >= kTwoPi) return 1.0;
    const double r = z.abs();
    const double alpha = std::atan2(z.im, z.re);
    return (kernel_antideriv(theta_b - alpha, r) -
            kernel_antideriv(theta_a - alpha, r)) /
           kPi;
}

// ------------------------------------------------------------- arc weights

ArcWeight make_arc_weight(std::vector<double> breaks,
                          std::vector<double> values) {
    require(!breaks.empty(), "arc weight: needs at least one arc");
    require(breaks.size() == values.size(),
            "arc weight: breaks/values size mismatch");
    for (std::size_t i = 0; i < breaks.size(); ++i) {
        require(std::isfinite(breaks[i]) && breaks[i] >= 0.0 &&
                    breaks[i] < kTwoPi,
                "arc weight: breaks must lie in [0, 2 pi)");
        require(i == 0 || breaks[i] > breaks[i - 1],
                "arc weight: breaks must strictly increase");
        require(std::isfinite(values[i]), "arc weight: values must be finite");
    }
    return ArcWeight{std::move(breaks), std::move(values)};
}

double arc_value_at(const ArcWeight& w, double theta) {
    double t = std::fmod(theta, kTwoPi);
    if (t < 0.0) t += kTwoPi;
    // Last arc wraps: anything before the first break belongs to it.
    auto it = std::upper_bound(w.breaks.begin(), w.breaks.end(), t);
    if (it == w.breaks.begin()) return w.values.back();
    return w.values[std::size_t(it - w.breaks.begin()) - 1];
}

ArcWeight arc_add(const ArcWeight& a, const ArcWeight& b) {
    std::vector<double> breaks;
    breaks.reserve(a.breaks.size() + b.breaks.size());
    std::merge(a.breaks.begin(), a.breaks.end(), b.breaks.begin(),
               b.breaks.end(), std::back_inserter(breaks));
    breaks.erase(std::unique(breaks.begin(), breaks.end()), breaks.end());
    std::vector<double> values;
    values.reserve(breaks.size());
    for (double t : breaks) values.push_back(arc_value_at(a, t) + arc_value_at(b, t));
    return ArcWeight{std::move(breaks), std::move(values)};
}

ArcWeight arc_scale(const ArcWeight& w, double c) {
    ArcWeight out = w;
    for (double& v : out.values) v *= c;
    return out;
}

namespace {

// Arc lengths (cyclic, the last one wraps around to breaks[0] + 2 pi).
std::vector<double> arc_lengths(const ArcWeight& w) {
    const std::size_t n = w.breaks.size();
    std::vector<double> len(n);
    for (std::size_t i = 0; i + 1 < n; ++i) len[i] = w.breaks[i + 1] - w.breaks[i];
    len[n - 1] = w.breaks[0] + kTwoPi - w.breaks[n - 1];
    return len;
}

} // namespace

double arc_mean(const ArcWeight& w) {
    const auto len = arc_lengths(w);
    return pairwise_sum_indexed(len.size(), [&](std::size_t i) {
        return w.values[i] * len[i] / kTwoPi;
    });
}

double poisson_extension(const ArcWeight& w, DiskPoint z) {
    const std::size_t n = w.breaks.size();
    if (n == 1) return w.values[0];
    return pairwise_sum_indexed(n, [&](std::size_t i) {
        const double a = w.breaks[i];
        const double b = i + 1 < n ? w.breaks[i + 1] : w.breaks[0] + kTwoPi;
        return w.values[i] * harmonic_measure_arc(z, a, b);
    });
}

WeightedSamples samples_of(const ArcWeight& w) {
    const auto len = arc_lengths(w);
    WeightedSamples s;
    s.mass.resize(len.size());
    s.value = w.values;
    for (std::size_t i = 0; i < len.size(); ++i) s.mass[i] = len[i] / kTwoPi;
    return s;
}

ArcWeight shadow_weight(const GeneratedSequence& seq, double c0, double c) {
    require(c0 > 0.0 && c > 0.0, "shadow_weight: scales must be > 0");
    // Circular interval-stabbing sweep.  Wrapping arcs (hi < lo after
    // normalisation) are counted as active at angle 0.
    struct Event {
        double at;
        int delta;
    };
    std::vector<Event> events;
    int base = 0;
    for (const DiskPoint& p : seq.points) {
        const double half = c * (1.0 - p.abs());
        if (half >= kPi) {
            ++base;
            continue;
        }
        double alpha = std::atan2(p.im, p.re);
        double lo = std::fmod(alpha - half, kTwoPi);
        double hi = std::fmod(alpha + half, kTwoPi);
        if (lo < 0.0) lo += kTwoPi;
        if (hi < 0.0) hi += kTwoPi;
        if (hi < lo) ++base; // wraps through 0
        events.push_back({lo, +1});
        events.push_back({hi, -1});
    }
    if (events.empty())
        return ArcWeight{{0.0}, {c0 * double(base)}};
    std::sort(events.begin(), events.end(), [](const Event& a, const Event& b) {
        if (a.at != b.at) return a.at < b.at;
        return a.delta > b.delta; // open before close at identical angles
    });
    std::vector<double> breaks;
    std::vector<double> values;
    int active = base;
    std::size_t i = 0;
    if (events[0].at > 0.0) {
        breaks.push_back(0.0);
        values.push_back(c0 * double(active));
    }
    while (i < events.size()) {
        const double at = events[i].at;
        while (i < events.size() && events[i].at == at) {
            active += events[i].delta;
            ++i;
        }
        if (!breaks.empty() && breaks.back() == at)
            values.back() = c0 * double(active);
        else {
            breaks.push_back(at);
            values.push_back(c0 * double(active));
        }
    }
    // Adjacent equal values are harmless but bloat downstream merges.
    std::vector<double> cb, cv;
    for (std::size_t j = 0; j < breaks.size(); ++j) {
        if (!cv.empty() && cv.back() == values[j]) continue;
        cb.push_back(breaks[j]);
        cv.push_back(values[j]);
    }
    return ArcWeight{std::move(cb), std::move(cv)};
}

// --------------------------------------------------------------- measures

DiscreteMeasure make_measure(std::vector<DiskPoint> atoms,
                             std::vector<double> masses) {
    require(atoms.size() == masses.size(),
            "measure: atoms/masses size mismatch");
    require(!atoms.empty(), "measure: needs at least one atom");
    for (double m : masses)
        require(std::isfinite(m) && m > 0.0, "measure: masses must be > 0");
    return DiscreteMeasure{std::move(atoms), std::move(masses)};
}

double balayage_at(const DiscreteMeasure& nu, BoundaryAngle t) {
    return pairwise_sum_indexed(nu.atoms.size(), [&](std::size_t i) {
        return nu.masses[i] * poisson_kernel(nu.atoms[i], t);
    });
}

double pairing(const ArcWeight& w, const DiscreteMeasure& nu) {
    return pairwise_sum_indexed(nu.atoms.size(), [&](std::size_t i) {
        return nu.masses[i] * poisson_extension(w, nu.atoms[i]);
    });
}

BoundaryGrid boundary_grid(const DiscreteMeasure& nu,
                           const BoundaryGridOptions& opts) {
    require(opts.base >= 8, "boundary_grid: base too small");
    std::vector<double> knots;
    knots.reserve(opts.base + nu.atoms.size() * 64);
    for (std::size_t j = 0; j < opts.base; ++j)
        knots.push_back(kTwoPi * double(j) / double(opts.base));
    for (const DiskPoint& z : nu.atoms) {
        const double scale = 1.0 - z.abs();
        const double half = std::min(opts.window_widths * scale, kPi);
        const double step = scale / opts.spacing_frac;
        const double alpha = std::atan2(z.im, z.re);
        for (double off = step; off <= half; off += step) {
            for (double t : {alpha - off, alpha + off}) {
                double tt = std::fmod(t, kTwoPi);
                if (tt < 0.0) tt += kTwoPi;
                knots.push_back(tt);
            }
        }
        double ta = std::fmod(alpha, kTwoPi);
        if (ta < 0.0) ta += kTwoPi;
        knots.push_back(ta);
    }
    std::sort(knots.begin(), knots.end());
    knots.erase(std::unique(knots.begin(), knots.end()), knots.end());

    BoundaryGrid grid;
    const std::size_t n = knots.size();
    grid.theta.reserve(2 * n);
    grid.mass.reserve(2 * n);
    constexpr double kGaussOff = 0.28867513459481288; // 1/(2 sqrt 3)
    for (std::size_t j = 0; j < n; ++j) {
        const double a = knots[j];
        const double b = j + 1 < n ? knots[j + 1] : knots[0] + kTwoPi;
        const double len = b - a;
        if (len <= 0.0) continue;
        if (opts.gauss2) {
            const double mid = 0.5 * (a + b);
            grid.theta.push_back(mid - len * kGaussOff);
            grid.mass.push_back(0.5 * len / kTwoPi);
            grid.theta.push_back(mid + len * kGaussOff);
            grid.mass.push_back(0.5 * len / kTwoPi);
        } else {
            grid.theta.push_back(0.5 * (a + b));
            grid.mass.push_back(len / kTwoPi);
        }
    }
    return grid;
}

WeightedSamples balayage_samples(const DiscreteMeasure& nu,
                                 const BoundaryGrid& grid, unsigned threads) {
    WeightedSamples s;
    s.mass = grid.mass;
    s.value.resize(grid.theta.size());
    parallel_for(grid.theta.size(), threads, [&](std::size_t i) {
        s.value[i] = balayage_at(nu, BoundaryAngle{grid.theta[i]});
    });
    return s;
}

WeightedSamples sample_weight(const ArcWeight& w, const BoundaryGrid& grid) {
    WeightedSamples s;
    s.mass = grid.mass;
    s.value.resize(grid.theta.size());
    for (std::size_t i = 0; i < grid.theta.size(); ++i)
        s.value[i] = arc_value_at(w, grid.theta[i]);
    return s;
}

double balayage_dual_norm(const DiscreteMeasure& nu, const OrliczShape& shape,
                          const BoundaryGridOptions& opts) {
    const BoundaryGrid grid = boundary_grid(nu, opts);
    return luxemburg_norm(shape, balayage_samples(nu, grid, opts.threads));
}

} // namespace disklab
