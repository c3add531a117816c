#include "disklab/sequence.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "disklab/parallel.hpp"
#include "disklab/summation.hpp"

namespace disklab {

namespace {
constexpr double kPi = 3.14159265358979323846;

void require(bool ok, const char* msg) {
    if (!ok) throw std::invalid_argument(msg);
}
} // namespace

int64_t crowd_number(int n, double eps) {
    require(n >= 2, "crowd_number: stage must be >= 2");
    require(eps > 0.0, "crowd_number: eps must be > 0");
    const double x =
        std::exp2(double(n)) / (double(n) * std::pow(std::log(double(n)), 1.0 + eps));
    return static_cast<int64_t>(std::floor(x));
}

int64_t stage_population(int n, double eps) {
    const int64_t full = int64_t{1} << n;
    return std::min(2 * crowd_number(n, eps) + 1, full);
}

GeneratedSequence gen_crowded(double eps, int n_max) {
    require(n_max >= 2, "gen_crowded: n_max must be >= 2");
    require(eps > 0.0, "gen_crowded: eps must be > 0");
    GeneratedSequence seq;
    seq.generator = Generator{"section6", eps, n_max, 0.0, 0, 0.0};
    for (int n = 2; n <= n_max; ++n) {
        const int64_t kn = crowd_number(n, eps);
        const int64_t half = int64_t{1} << (n - 1);
        const bool wraps = 2 * kn + 1 > 2 * half;
        const int64_t k_lo = wraps ? -half : -kn;
        const int64_t k_hi = wraps ? half - 1 : kn;
        const double r = 1.0 - std::exp2(double(-n));
        const double step = 2.0 * kPi / std::exp2(double(n));
        for (int64_t k = k_lo; k <= k_hi; ++k) {
            const double th = step * double(k);
            seq.points.push_back(DiskPoint{r * std::cos(th), r * std::sin(th)});
            seq.stage.push_back(n);
            seq.index.push_back(k);
        }
    }
    return seq;
}

GeneratedSequence gen_radial(double q, int count) {
    require(q > 0.0 && q < 1.0, "gen_radial: q must lie in (0,1)");
    require(count >= 1, "gen_radial: count must be >= 1");
    GeneratedSequence seq;
    seq.generator = Generator{"radial", 0.0, 0, q, count, 0.0};
    double qj = 1.0;
    for (int j = 1; j <= count; ++j) {
        qj *= q;
        seq.points.push_back(DiskPoint{1.0 - qj, 0.0});
        seq.stage.push_back(j);
        seq.index.push_back(0);
    }
    return seq;
}

GeneratedSequence gen_perturbed_pairs(double q, int count, double eta) {
    require(eta > 0.0, "gen_perturbed_pairs: eta must be > 0");
    GeneratedSequence base = gen_radial(q, count);
    GeneratedSequence seq;
    seq.generator = Generator{"pairs", 0.0, 0, q, count, eta};
    const double d = std::exp(-eta);
    for (int j = 0; j < count; ++j) {
        const DiskPoint lam = base.points[std::size_t(j)];
        const double r = lam.re; // base points are real
        // Partner outward along the ray at pseudohyperbolic distance d.
        const double r2 = (r + d) / (1.0 + r * d);
        seq.points.push_back(lam);
        seq.stage.push_back(j + 1);
        seq.index.push_back(0);
        seq.points.push_back(DiskPoint{r2, 0.0});
        seq.stage.push_back(j + 1);
        seq.index.push_back(1);
    }
    return seq;
}

GeneratedSequence gen_explicit(std::vector<DiskPoint> pts) {
    GeneratedSequence seq;
    seq.generator = Generator{"explicit"};
    seq.stage.assign(pts.size(), 0);
    seq.index.resize(pts.size());
    for (std::size_t i = 0; i < pts.size(); ++i)
        seq.index[i] = int64_t(i);
    seq.points = std::move(pts);
    return seq;
}

double blaschke_sum(std::span<const DiskPoint> pts) {
    return pairwise_sum_indexed(pts.size(),
                                [&](std::size_t i) { return 1.0 - pts[i].abs(); });
}

double separation_constant(std::span<const DiskPoint> pts, unsigned threads) {
    const std::size_t n = pts.size();
    if (n <= 1) return 1.0;
    std::vector<double> row_min(n, 2.0);
    parallel_for(n, threads, [&](std::size_t i) {
        double m = 2.0;
        for (std::size_t j = i + 1; j < n; ++j)
            m = std::min(m, pseudo_distance(pts[i], pts[j]));
        row_min[i] = m;
    });
    double m = 1.0;
    for (double v : row_min) m = std::min(m, v);
    return m;
}

TailEstimate crowded_tail_bound(double eps, DiskPoint lam, int j_max) {
    require(eps > 0.0, "crowded_tail_bound: eps must be > 0");
    require(j_max >= 2, "crowded_tail_bound: j_max must be >= 2");
    const double r = lam.abs();
    // Every omitted point sits at radius >= s = 1 - 2^-(j_max+1), so its
    // pseudohyperbolic distance to lam is >= rho_min below.  Together with
    // log(1/rho) = -0.5 log(1 - (1-rho^2)) <= (1-rho^2) / (2 rho^2) this
    // turns the omitted mass into a weighted kernel sum, which the stage
    // radii make summable.  The bound is valid (if weak) for any point
    // strictly inside that shell.
    const double s = 1.0 - std::exp2(double(-(j_max + 1)));
    require(r < s,
            "crowded_tail_bound: point lies beyond the truncation radius");
    const double rho_min = (s - r) / (1.0 - r * s);
    const double C = 1.0 / (2.0 * rho_min * rho_min);

    const int j_big = j_max + 64;
    CompensatedSum S;
    for (int j = j_max + 1; j <= j_big; ++j) {
        const double p2 = std::exp2(double(j));
        double kj = p2 / (double(j) * std::pow(std::log(double(j)), 1.0 + eps));
        if (p2 < 9.007199254740992e15) kj = std::floor(kj);
        const double cnt = std::min(2.0 * kj + 1.0, p2);
        const double d = 1.0 - r * (1.0 - 1.0 / p2);
        S.add(cnt * (2.0 / p2) / (d * d));
    }
    // Beyond j_big: count_j 2^(1-j) <= 4/(j ln^(1+eps) j) + 2^(1-j), and the
    // denominator is at least (1-r)^2; integral test on the first piece.
    const double inv1r = 1.0 / (1.0 - r);
    const double rem = inv1r * inv1r *
                       (4.0 / (eps * std::pow(std::log(double(j_big)), eps)) +
                        2.0 * std::exp2(double(-j_big)));
    const double bound = C * (1.0 - r * r) * (S.value() + rem);
    return TailEstimate{j_max, bound, C};
}

double radial_tail_mass(double q, double r, int j_last) {
    require(q > 0.0 && q < 1.0, "radial_tail_mass: q must lie in (0,1)");
    require(r >= 0.0 && r < 1.0, "radial_tail_mass: r must lie in [0,1)");
    const double u = 1.0 - r;
    require(u > std::pow(q, double(j_last + 1)),
            "radial_tail_mass: point lies beyond the truncation radius");
    // For real points 1-u and 1-v, v < u:
    //   1/rho = 1 + v (2-u) / (u-v),
    // and v = q^j decays geometrically, so 200 terms reach underflow.
    CompensatedSum acc;
    double v = std::pow(q, double(j_last));
    for (int j = j_last + 1; j <= j_last + 200; ++j) {
        v *= q;
        const double t = std::log1p(v * (2.0 - u) / (u - v));
        acc.add(t);
        if (t < 1e-300) break;
    }
    return acc.value();
}

double crowded_density_truncated(double eps, int n, int j_max, unsigned threads) {
    require(n >= 2, "crowded_density_truncated: n must be >= 2");
    require(j_max >= n, "crowded_density_truncated: j_max must be >= n");
    const double r = 1.0 - std::exp2(double(-n));
    const double r2 = r * r;

    CompensatedSum total;
    std::vector<double> block_sums;
    for (int j = 2; j <= j_max; ++j) {
        const int64_t kn = crowd_number(j, eps);
        const int64_t half = int64_t{1} << (j - 1);
        const bool wraps = 2 * kn + 1 > 2 * half;
        const int64_t k_lo = wraps ? -half : -kn;
        const int64_t k_hi = wraps ? half - 1 : kn;
        const double s = 1.0 - std::exp2(double(-j));
        const double s2 = s * s;
        const double step = 2.0 * kPi / std::exp2(double(j));
        const int64_t m = k_hi - k_lo + 1;

        // Fixed 64k blocks; block sums are combined in order, so the value
        // is independent of the thread count.
        const int64_t kBlock = 65536;
        const int64_t nblocks = (m + kBlock - 1) / kBlock;
        block_sums.assign(std::size_t(nblocks), 0.0);
        parallel_for(std::size_t(nblocks), threads, [&](std::size_t b) {
            const int64_t lo = k_lo + int64_t(b) * kBlock;
            const int64_t hi = std::min(lo + kBlock - 1, k_hi);
            std::vector<double> terms;
            terms.reserve(std::size_t(hi - lo + 1));
            for (int64_t k = lo; k <= hi; ++k) {
                if (j == n && k == 0) continue; // self-factor
                const double th = step * double(k);
                const double sc = s * std::cos(th);
                const double ss = s * std::sin(th);
                const double dre = sc - r;
                const double n2 = dre * dre + ss * ss;
                const double br = 1.0 - sc * r;
                const double d2 = br * br + ss * ss * r2;
                const double rr = n2 / d2;
                double term;
                if (rr <= 0.5)
                    term = -0.5 * std::log(rr);
                else
                    term = -0.5 * std::log1p(-(1.0 - s2) * (1.0 - r2) / d2);
                terms.push_back(term);
            }
            block_sums[b] = pairwise_sum(terms);
        });
        for (double v : block_sums) total.add(v);
    }
    return total.value();
}

} // namespace disklab
