#include "disklab/orlicz.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <functional>
#include <limits>
#include <stdexcept>

#include "disklab/summation.hpp"

namespace disklab {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

// Conjugate tables stop once the value passes this cap; beyond it they
// report +infinity.  Any sample mass above 1e-120 then forces a modular
// past 1, so Luxemburg bisections are unaffected by the saturation.
constexpr double kValueCap = 1e120;

void require(bool ok, const char* msg) {
    if (!ok) throw std::invalid_argument(msg);
}

} // namespace

struct OrliczShape::Impl {
    virtual ~Impl() = default;
    virtual double value(double t) const = 0;
    virtual double rderiv(double t) const = 0;
    virtual double inverse(double u) const = 0;
    virtual double splice_point() const = 0;
    virtual double deriv_sup() const = 0;
    virtual std::string describe() const = 0;
    // Slopes at which the derivative jumps (or kinks); the conjugate
    // builder pins table knots at these so kinked segments come out exact.
    virtual std::vector<double> kink_slopes() const = 0;
};

namespace {

using Impl = OrliczShape::Impl;

// ---------------------------------------------------------------- analytic

enum class Fam { power, psi, loglog };

class AnalyticImpl final : public Impl {
public:
    AnalyticImpl(Fam fam, double a) : fam_(fam), a_(a) {
        switch (fam_) {
        case Fam::power:
            t0_ = 1.0;
            break;
        case Fam::psi:
            t0_ = std::exp(1.0 + a_);
            break;
        case Fam::loglog:
            t0_ = std::exp(std::exp(1.0 + a_));
            break;
        }
        g0_ = curve(t0_) / t0_;
    }

    double value(double t) const override {
        require(t >= 0.0, "shape value: argument must be >= 0");
        if (t <= t0_) return g0_ * t;
        return curve(t);
    }

    double rderiv(double t) const override {
        require(t >= 0.0, "shape rderiv: argument must be >= 0");
        if (t < t0_) return g0_;
        return curve_deriv(t);
    }

    double inverse(double u) const override {
        require(u >= 0.0, "shape inverse: argument must be >= 0");
        if (u <= g0_ * t0_) return u / g0_;
        if (fam_ == Fam::power) return std::pow(u, 1.0 / a_);
        // Monotone above t0; bracket by doubling, then bisect.
        double lo = t0_, hi = 2.0 * t0_;
        while (curve(hi) < u) {
            lo = hi;
            hi *= 2.0;
            if (hi > 1e300)
                throw std::domain_error("shape inverse: argument out of range");
        }
        for (int i = 0; i < 200 && (hi - lo) > 1e-15 * hi; ++i) {
            const double mid = 0.5 * (lo + hi);
            (curve(mid) < u ? lo : hi) = mid;
        }
        return 0.5 * (lo + hi);
    }

    double splice_point() const override { return t0_; }

    double deriv_sup() const override {
        return (fam_ == Fam::power && a_ == 1.0) ? 1.0 : kInf;
    }

    std::string describe() const override {
        switch (fam_) {
        case Fam::power: return "power:" + format(a_);
        case Fam::psi: return "psi:" + format(a_);
        case Fam::loglog: return "loglog:" + format(a_);
        }
        return {};
    }

    std::vector<double> kink_slopes() const override {
        return {g0_, curve_deriv(t0_)};
    }

    // Grid convexity check used by the loglog factory; the analytic second
    // derivative changes sign in ways that are easy to get wrong, so the
    // constructed shape is verified directly.
    void check_convex_on_grid() const {
        const int n = 256;
        double prev_slope = -kInf;
        double prev_t = t0_, prev_v = curve(t0_);
        for (int i = 1; i <= n; ++i) {
            const double t = t0_ * std::pow(1e8, double(i) / n);
            const double v = curve(t);
            const double slope = (v - prev_v) / (t - prev_t);
            if (slope < prev_slope * (1.0 - 1e-9))
                throw std::runtime_error(
                    "loglog shape: convexity check failed on grid");
            prev_slope = slope;
            prev_t = t;
            prev_v = v;
        }
    }

private:
    static std::string format(double x) {
        char buf[32];
        std::snprintf(buf, sizeof buf, "%g", x);
        return buf;
    }

    double curve(double t) const {
        switch (fam_) {
        case Fam::power: return std::pow(t, a_);
        case Fam::psi: return t * std::pow(std::log(t), a_);
        case Fam::loglog: return t * std::pow(std::log(std::log(t)), a_);
        }
        return 0.0;
    }

    double curve_deriv(double t) const {
        switch (fam_) {
        case Fam::power:
            return a_ * std::pow(t, a_ - 1.0);
        case Fam::psi: {
            const double lt = std::log(t);
            return std::pow(lt, a_) + a_ * std::pow(lt, a_ - 1.0);
        }
        case Fam::loglog: {
            const double lt = std::log(t);
            const double llt = std::log(lt);
            return std::pow(llt, a_) + a_ * std::pow(llt, a_ - 1.0) / lt;
        }
        }
        return 0.0;
    }

    Fam fam_;
    double a_ = 0.0;
    double t0_ = 1.0;
    double g0_ = 1.0;
};

// ------------------------------------------------------------------- table

class TableImpl final : public Impl {
public:
    explicit TableImpl(std::vector<std::pair<double, double>> nodes) {
        require(!nodes.empty(), "table shape: needs at least one node");
        if (nodes.front().first > 0.0) nodes.insert(nodes.begin(), {0.0, 0.0});
        require(nodes.front().first == 0.0 && nodes.front().second == 0.0,
                "table shape: first node must be (0, 0)");
        double prev_slope = 0.0;
        for (std::size_t i = 1; i < nodes.size(); ++i) {
            const auto [t0, y0] = nodes[i - 1];
            const auto [t1, y1] = nodes[i];
            require(t1 > t0, "table shape: abscissae must increase");
            require(y1 >= y0, "table shape: values must not decrease");
            const double slope = (y1 - y0) / (t1 - t0);
            require(slope >= prev_slope * (1.0 - 1e-12),
                    "table shape: nodes must be convex");
            prev_slope = slope;
        }
        nodes_ = std::move(nodes);
    }

    double value(double t) const override {
        require(t >= 0.0, "shape value: argument must be >= 0");
        const std::size_t i = segment(t);
        const auto [ta, ya] = nodes_[i];
        return ya + slope_of(i) * (t - ta);
    }

    double rderiv(double t) const override {
        require(t >= 0.0, "shape rderiv: argument must be >= 0");
        return slope_of(segment(t));
    }

    double inverse(double u) const override {
        require(u >= 0.0, "shape inverse: argument must be >= 0");
        for (std::size_t i = 0; i + 1 < nodes_.size(); ++i)
            if (nodes_[i + 1].second >= u) {
                const double m = slope_of(i);
                if (m == 0.0) return nodes_[i + 1].first;
                return nodes_[i].first + (u - nodes_[i].second) / m;
            }
        const double m = slope_of(nodes_.size() - 1);
        if (m == 0.0)
            throw std::domain_error("table shape inverse: value never reached");
        return nodes_.back().first + (u - nodes_.back().second) / m;
    }

    double splice_point() const override { return 0.0; }

    double deriv_sup() const override { return slope_of(nodes_.size() - 1); }

    std::string describe() const override {
        return "table:" + std::to_string(nodes_.size());
    }

    std::vector<double> kink_slopes() const override {
        std::vector<double> out;
        for (std::size_t i = 1; i < nodes_.size(); ++i) out.push_back(slope_of(i));
        return out;
    }

private:
    // Index of the segment whose right-open interval contains t; the last
    // segment extends to infinity with its own slope.
    std::size_t segment(double t) const {
        std::size_t lo = 0, hi = nodes_.size() - 1;
        while (lo < hi) {
            const std::size_t mid = (lo + hi + 1) / 2;
            if (nodes_[mid].first <= t) lo = mid;
            else hi = mid - 1;
        }
        return lo;
    }

    double slope_of(std::size_t i) const {
        if (i + 1 < nodes_.size()) {
            const auto [t0, y0] = nodes_[i];
            const auto [t1, y1] = nodes_[i + 1];
            return (y1 - y0) / (t1 - t0);
        }
        return i == 0 ? 0.0
                      : (nodes_[i].second - nodes_[i - 1].second) /
                            (nodes_[i].first - nodes_[i - 1].first);
    }

    std::vector<std::pair<double, double>> nodes_;
};

// --------------------------------------------------------- conjugate table

// Cubic Hermite segments with exact endpoint values and derivatives.  For
// conjugates the derivative is the maximizer t*(s), known exactly at every
// node, so linear stretches of the conjugate are reproduced bit-for-bit
// and smooth stretches to ~1e-10 relative.
struct Segment {
    double s0, s1, v0, v1, d0, d1;
};

class SegTableImpl final : public Impl {
public:
    SegTableImpl(std::vector<Segment> segs, double s_lo, double s_hi,
                 bool saturated, std::string name)
        : segs_(std::move(segs)), s_lo_(s_lo), s_hi_(s_hi),
          saturated_(saturated), name_(std::move(name)) {}

    double value(double s) const override {
        require(s >= 0.0, "shape value: argument must be >= 0");
        if (s <= s_lo_) return 0.0;
        if (s > s_hi_) return kInf;
        const Segment& g = segs_[find(s)];
        // The interpolant can undershoot by an ulp on nearly flat
        // segments; the conjugate itself is nonnegative.
        return std::max(0.0, hermite(g, s));
    }

    double rderiv(double s) const override {
        require(s >= 0.0, "shape rderiv: argument must be >= 0");
        if (s < s_lo_) return 0.0;
        if (s >= s_hi_) return saturated_ || segs_.empty() ? kInf
                                                          : segs_.back().d1;
        if (segs_.empty()) return 0.0;
        const Segment& g = segs_[find(s)];
        return std::max(0.0, hermite_deriv(g, s));
    }

    double inverse(double u) const override {
        require(u >= 0.0, "shape inverse: argument must be >= 0");
        if (u == 0.0) return 0.0;
        if (segs_.empty() || u > segs_.back().v1) {
            if (saturated_)
                throw std::domain_error(
                    "conjugate inverse: value beyond saturation cap");
            return s_hi_; // value jumps to +infinity here
        }
        std::size_t i = 0;
        while (segs_[i].v1 < u) ++i;
        const Segment& g = segs_[i];
        double lo = g.s0, hi = g.s1;
        for (int it = 0; it < 90 && (hi - lo) > 1e-16 * hi; ++it) {
            const double mid = 0.5 * (lo + hi);
            (hermite(g, mid) < u ? lo : hi) = mid;
        }
        return 0.5 * (lo + hi);
    }

    double splice_point() const override { return 0.0; }

    double deriv_sup() const override { return kInf; }

    std::string describe() const override { return name_; }

    std::vector<double> kink_slopes() const override {
        std::vector<double> out{0.0};
        for (const Segment& g : segs_) {
            out.push_back(g.d0);
            out.push_back(g.d1);
        }
        std::sort(out.begin(), out.end());
        out.erase(std::unique(out.begin(), out.end()), out.end());
        return out;
    }

private:
    std::size_t find(double s) const {
        std::size_t lo = 0, hi = segs_.size() - 1;
        while (lo < hi) {
            const std::size_t mid = (lo + hi + 1) / 2;
            if (segs_[mid].s0 <= s) lo = mid;
            else hi = mid - 1;
        }
        return lo;
    }

    static double hermite(const Segment& g, double s) {
        const double h = g.s1 - g.s0;
        const double x = (s - g.s0) / h;
        const double x2 = x * x, x3 = x2 * x;
        return g.v0 * (2 * x3 - 3 * x2 + 1) + g.v1 * (3 * x2 - 2 * x3) +
               h * (g.d0 * (x3 - 2 * x2 + x) + g.d1 * (x3 - x2));
    }

    static double hermite_deriv(const Segment& g, double s) {
        const double h = g.s1 - g.s0;
        const double x = (s - g.s0) / h;
        const double x2 = x * x;
        return (g.v0 * (6 * x2 - 6 * x) + g.v1 * (6 * x - 6 * x2)) / h +
               g.d0 * (3 * x2 - 4 * x + 1) + g.d1 * (3 * x2 - 2 * x);
    }

    std::vector<Segment> segs_;
    double s_lo_, s_hi_;
    bool saturated_;
    std::string name_;
};

// Largest maximizer of s t - phi(t): the smallest t with phi'(t) > s,
// falling back to ">= s" when the slope never strictly exceeds s (flat
// final segment of a table shape).
double conj_maximizer(const Impl& base, double s) {
    if (base.rderiv(0.0) > s) return 0.0;
    double hi = std::max(1.0, base.splice_point());
    bool strict = true;
    while (!(base.rderiv(hi) > s)) {
        hi *= 2.0;
        if (hi > 1e280) {
            strict = false;
            break;
        }
    }
    if (!strict) {
        hi = std::max(1.0, base.splice_point());
        while (base.rderiv(hi) < s) {
            hi *= 2.0;
            if (hi > 1e290)
                throw std::runtime_error("conjugate: maximizer out of range");
        }
    }
    double lo = 0.0;
    for (int i = 0; i < 160 && (hi - lo) > 1e-16 * hi; ++i) {
        const double mid = 0.5 * (lo + hi);
        const double d = base.rderiv(mid);
        const bool above = strict ? (d > s) : (d >= s);
        (above ? hi : lo) = mid;
    }
    return hi;
}

struct ConjNode {
    double s, v, t; // abscissa, conjugate value, maximizer
};

ConjNode conj_node(const Impl& base, double s) {
    const double t = conj_maximizer(base, s);
    double v = s * t - base.value(t);
    if (v < 0.0) v = 0.0; // rounding near the zero region
    return {s, v, t};
}

std::shared_ptr<const Impl> build_conjugate(const Impl& base) {
    const double g0 = base.rderiv(0.0);
    const double dsup = base.deriv_sup();

    // Upper end of the table: the derivative supremum if finite, else the
    // point where the conjugate passes the value cap.
    double s_hi;
    bool saturated = false;
    if (std::isfinite(dsup)) {
        s_hi = dsup;
    } else {
        s_hi = std::max(2.0 * g0, g0 + 1.0);
        int guard = 0;
        while (conj_node(base, s_hi).v < kValueCap) {
            s_hi *= 2.0;
            if (++guard > 2000)
                throw std::runtime_error("conjugate: cap never reached");
        }
        saturated = true;
    }

    const std::string name = "conj(" + base.describe() + ")";
    if (!(s_hi > g0)) // linear base: conjugate is 0 up to the slope, then +inf
        return std::make_shared<SegTableImpl>(std::vector<Segment>{}, g0, s_hi,
                                              false, name);

    // Skeleton: derivative kinks of the base, plus geometric fill.
    std::vector<double> knots{g0, s_hi};
    for (double m : base.kink_slopes())
        if (m > g0 && m < s_hi) knots.push_back(m);
    for (double s = std::max(2.0 * g0, g0 + 1.0); s < s_hi; s *= 2.0)
        knots.push_back(s);
    std::sort(knots.begin(), knots.end());
    knots.erase(std::unique(knots.begin(), knots.end()), knots.end());

    std::vector<Segment> segs;
    const auto emit = [&](const ConjNode& a, const ConjNode& b) {
        segs.push_back(Segment{a.s, b.s, a.v, b.v, a.t, b.t});
    };
    // Depth-first refinement until the Hermite midpoint error is small.
    const auto refine = [&](const ConjNode& a, const ConjNode& b,
                            const auto& self, int depth) -> void {
        const double sm =
            b.s > 2.0 * a.s && a.s > 0.0 ? std::sqrt(a.s * b.s) : 0.5 * (a.s + b.s);
        if (depth >= 46 || (b.s - a.s) <= 1e-13 * b.s) {
            emit(a, b);
            return;
        }
        const ConjNode m = conj_node(base, sm);
        const Segment trial{a.s, b.s, a.v, b.v, a.t, b.t};
        const double h = trial.s1 - trial.s0;
        const double x = (sm - trial.s0) / h, x2 = x * x, x3 = x2 * x;
        const double interp = trial.v0 * (2 * x3 - 3 * x2 + 1) +
                              trial.v1 * (3 * x2 - 2 * x3) +
                              h * (trial.d0 * (x3 - 2 * x2 + x) +
                                   trial.d1 * (x3 - x2));
        if (std::abs(interp - m.v) <= 1e-10 * std::max(m.v, 1e-300)) {
            emit(a, b);
            return;
        }
        if (segs.size() > 600000)
            throw std::runtime_error("conjugate: node budget exceeded");
        self(a, m, self, depth + 1);
        self(m, b, self, depth + 1);
    };

    ConjNode prev = conj_node(base, knots.front());
    prev.v = 0.0; // exact at the zero-region boundary
    for (std::size_t i = 1; i < knots.size(); ++i) {
        const ConjNode next = conj_node(base, knots[i]);
        refine(prev, next, refine, 0);
        prev = next;
    }
    return std::make_shared<SegTableImpl>(std::move(segs), g0, s_hi, saturated,
                                          name);
}

} // namespace

// ---------------------------------------------------------------- OrliczShape

OrliczShape::OrliczShape(std::shared_ptr<const Impl> impl)
    : impl_(std::move(impl)) {}

double OrliczShape::value(double t) const { return impl_->value(t); }
double OrliczShape::rderiv(double t) const { return impl_->rderiv(t); }
double OrliczShape::inverse(double u) const { return impl_->inverse(u); }
double OrliczShape::splice_point() const { return impl_->splice_point(); }
double OrliczShape::deriv_sup() const { return impl_->deriv_sup(); }
std::string OrliczShape::describe() const { return impl_->describe(); }

OrliczShape OrliczShape::power(double p) {
    require(p >= 1.0, "power shape: exponent must be >= 1");
    return OrliczShape(std::make_shared<AnalyticImpl>(Fam::power, p));
}

OrliczShape OrliczShape::psi(double eps) {
    require(eps > 0.0, "psi shape: eps must be > 0");
    return OrliczShape(std::make_shared<AnalyticImpl>(Fam::psi, eps));
}

OrliczShape OrliczShape::loglog(double eps) {
    require(eps > 0.0, "loglog shape: eps must be > 0");
    auto impl = std::make_shared<AnalyticImpl>(Fam::loglog, eps);
    impl->check_convex_on_grid();
    return OrliczShape(impl);
}

OrliczShape OrliczShape::from_table(
    std::vector<std::pair<double, double>> nodes) {
    return OrliczShape(std::make_shared<TableImpl>(std::move(nodes)));
}

OrliczShape OrliczShape::linear() { return power(1.0); }

OrliczShape conjugate(const OrliczShape& shape) {
    return OrliczShape(build_conjugate(*shape.impl_));
}

// ----------------------------------------------------------------- norms

double modular(const OrliczShape& shape, const WeightedSamples& samples) {
    require(samples.mass.size() == samples.value.size(),
            "modular: mass/value size mismatch");
    return pairwise_sum_indexed(samples.mass.size(), [&](std::size_t i) {
        return samples.mass[i] * shape.value(std::abs(samples.value[i]));
    });
}

namespace {

// Shared bisection for inf{ t : crit(t) <= level } with crit nonincreasing.
double lower_envelope_bisect(const std::function<double(double)>& crit,
                             double level, const char* what) {
    double hi = 1.0;
    int guard = 0;
    while (crit(hi) > level) {
        hi *= 2.0;
        if (++guard > 2000) throw std::runtime_error(std::string(what) + ": no upper bracket");
    }
    double lo = hi;
    guard = 0;
    while (crit(lo) <= level) {
        hi = lo;
        lo *= 0.5;
        if (lo < 1e-300) return 0.0;
        if (++guard > 2000) throw std::runtime_error(std::string(what) + ": no lower bracket");
    }
    for (int i = 0; i < 200 && (hi - lo) > 1e-13 * hi; ++i) {
        const double mid = 0.5 * (lo + hi);
        (crit(mid) <= level ? hi : lo) = mid;
    }
    return hi;
}

} // namespace

double luxemburg_norm(const OrliczShape& shape, const WeightedSamples& samples) {
    require(samples.mass.size() == samples.value.size(),
            "luxemburg_norm: mass/value size mismatch");
    double vmax = 0.0;
    for (double v : samples.value) vmax = std::max(vmax, std::abs(v));
    if (vmax == 0.0) return 0.0;
    const std::size_t n = samples.mass.size();
    std::vector<double> scaled(n);
    for (std::size_t i = 0; i < n; ++i)
        scaled[i] = std::abs(samples.value[i]) / vmax;
    std::vector<double> terms(n);
    const auto crit = [&](double tau) {
        for (std::size_t i = 0; i < n; ++i)
            terms[i] = samples.mass[i] * shape.value(scaled[i] / tau);
        return pairwise_sum(terms);
    };
    const double tau = lower_envelope_bisect(crit, 1.0, "luxemburg_norm");
    return vmax * tau;
}

double growth_fnorm(const OrliczShape& shape, const WeightedSamples& samples) {
    require(samples.mass.size() == samples.value.size(),
            "growth_fnorm: mass/value size mismatch");
    double vmax = 0.0;
    for (double v : samples.value) {
        require(v >= 0.0, "growth_fnorm: values must be >= 0");
        vmax = std::max(vmax, v);
    }
    if (vmax == 0.0) return 0.0;
    const std::size_t n = samples.mass.size();
    std::vector<double> terms(n);
    // crit(t) = modular(log+ (f/t)) - t is strictly decreasing; its root is
    // the norm.  Reuse the envelope bisection with level 0.
    const auto crit = [&](double t) {
        for (std::size_t i = 0; i < n; ++i) {
            const double x = samples.value[i] / t;
            terms[i] = x > 1.0 ? samples.mass[i] * shape.value(std::log(x)) : 0.0;
        }
        return pairwise_sum(terms) - t;
    };
    return lower_envelope_bisect(crit, 0.0, "growth_fnorm");
}

double amemiya_norm(const OrliczShape& shape, const WeightedSamples& samples) {
    require(samples.mass.size() == samples.value.size(),
            "amemiya_norm: mass/value size mismatch");
    const double lux = luxemburg_norm(shape, samples);
    if (lux == 0.0) return 0.0;
    const std::size_t n = samples.mass.size();
    std::vector<double> terms(n);
    // g(k) = (1 + modular(k f)) / k is unimodal in k; golden section on log k.
    const auto g = [&](double logk) {
        const double k = std::exp(logk);
        for (std::size_t i = 0; i < n; ++i)
            terms[i] = samples.mass[i] * shape.value(k * std::abs(samples.value[i]));
        const double j = pairwise_sum(terms);
        if (!std::isfinite(j)) return std::numeric_limits<double>::infinity();
        return (1.0 + j) / k;
    };
    // At k0 = 1/lux the modular equals ~1 and g = ~2*lux; the minimizer sits
    // within a moderate factor of k0 for any convex shape.
    const double c0 = std::log(1.0 / lux);
    double a = c0 - 18.0, b = c0 + 40.0;
    const double gr = 0.6180339887498949;
    double x1 = b - gr * (b - a), x2 = a + gr * (b - a);
    double f1 = g(x1), f2 = g(x2);
    for (int it = 0; it < 180; ++it) {
        if (f1 <= f2) {
            b = x2;
            x2 = x1;
            f2 = f1;
            x1 = b - gr * (b - a);
            f1 = g(x1);
        } else {
            a = x1;
            x1 = x2;
            f1 = f2;
            x2 = a + gr * (b - a);
            f2 = g(x2);
        }
    }
    // Shapes with a jump conjugate (e.g. linear) push the minimizer to the
    // bracket edge; the edge value is then the correct limit up to 1e-15 rel.
    return std::min(f1, f2);
}

// ----------------------------------------------------------------- probes

ProbeResult doubling_probe(const OrliczShape& shape, double t_lo, double t_hi,
                           int grid, double ratio_cap) {
    require(t_lo > 0.0 && t_hi > t_lo, "doubling_probe: bad range");
    require(grid >= 2, "doubling_probe: grid too small");
    double worst = 0.0, at = t_lo;
    for (int i = 0; i < grid; ++i) {
        const double t = t_lo * std::pow(t_hi / t_lo, double(i) / (grid - 1));
        const double p = shape.value(t);
        if (p <= 0.0) continue;
        const double ratio = shape.value(2.0 * t) / p;
        if (ratio > worst) {
            worst = ratio;
            at = t;
        }
    }
    return ProbeResult{worst <= ratio_cap, worst, 0.0, at};
}

ProbeResult complement_doubling_probe(const OrliczShape& shape, double t_lo,
                                      double t_hi, int grid) {
    require(t_lo > 0.0 && t_hi > t_lo, "complement_doubling_probe: bad range");
    require(grid >= 2, "complement_doubling_probe: grid too small");
    double last_d = 0.0, worst_t = t_lo;
    for (double d = 2.0; d <= 1048576.0; d *= 2.0) {
        last_d = d;
        bool ok = true;
        double worst_gap = -kInf;
        for (int i = 0; i < grid; ++i) {
            const double t = t_lo * std::pow(t_hi / t_lo, double(i) / (grid - 1));
            const double gap = 2.0 * shape.value(t) - shape.value(d * t) / d;
            if (gap > 0.0) ok = false;
            if (gap > worst_gap) {
                worst_gap = gap;
                worst_t = t;
            }
        }
        if (ok) return ProbeResult{true, d, t_lo, 0.0};
    }
    return ProbeResult{false, last_d, t_lo, worst_t};
}

} // namespace disklab
