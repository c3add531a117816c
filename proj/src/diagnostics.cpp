#include "disklab/diagnostics.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <numeric>
#include <stdexcept>

#include "disklab/parallel.hpp"
#include "disklab/summation.hpp"

namespace disklab {

namespace {

constexpr double kPi = 3.14159265358979323846;
constexpr double kInf = std::numeric_limits<double>::infinity();

void require(bool ok, const char* msg) {
    if (!ok) throw std::invalid_argument(msg);
}

} // namespace

// ------------------------------------------------------------- uniform inf

CarlesonResult carleson_check(const GeneratedSequence& seq,
                              std::span<const double> tail_mass,
                              double growth_tol, unsigned threads) {
    require(seq.size() > 0, "carleson_check: empty sequence");
    require(tail_mass.empty() || tail_mass.size() == seq.size(),
            "carleson_check: tail mass must cover every member");
    CarlesonResult res;
    const auto dens = all_member_densities(seq.points, threads);
    res.sup_density = -kInf;
    for (std::size_t i = 0; i < dens.size(); ++i) {
        if (dens[i] > res.sup_density) {
            res.sup_density = dens[i];
            res.argmax = i;
        }
    }
    res.inf_abs_b = std::exp(-res.sup_density);
    res.sup_density_completed = res.sup_density;
    if (!tail_mass.empty()) {
        double m = -kInf;
        for (std::size_t i = 0; i < dens.size(); ++i)
            m = std::max(m, dens[i] + tail_mass[i]);
        res.sup_density_completed = m;
    }
    res.inf_abs_b_completed = std::exp(-res.sup_density_completed);

    // Half-length truncation: if the sup is still climbing, the truncation
    // cannot vouch for the infinite sequence.
    const std::size_t half = (seq.size() + 1) / 2;
    if (half >= 2) {
        std::span<const DiskPoint> head(seq.points.data(), half);
        const auto hd = all_member_densities(head, threads);
        res.half_sup_density = *std::max_element(hd.begin(), hd.end());
    } else {
        res.half_sup_density = res.sup_density;
    }
    const bool climbing =
        res.half_sup_density > 0.0 &&
        res.sup_density > growth_tol * res.half_sup_density;
    res.verdict = climbing ? "not-carleson-at-truncation" : "carleson";
    return res;
}

// --------------------------------------------------------------- majorant

DiagnosticReport majorant_check(const GeneratedSequence& seq, const ArcWeight& w,
                                std::span<const double> tail_mass,
                                unsigned threads) {
    require(seq.size() > 0, "majorant_check: empty sequence");
    require(tail_mass.empty() || tail_mass.size() == seq.size(),
            "majorant_check: tail mass must cover every member");
    DiagnosticReport rep;
    const auto dens = all_member_densities(seq.points, threads);
    rep.rows.resize(seq.size());
    parallel_for(seq.size(), threads, [&](std::size_t i) {
        ReportRow& row = rep.rows[i];
        row.index = i;
        row.z = seq.points[i];
        row.stage = seq.stage[i];
        row.density = dens[i];
        row.tail = tail_mass.empty() ? 0.0 : tail_mass[i];
        row.extension = poisson_extension(w, seq.points[i]);
        row.deficit = row.extension - row.density;
        row.slack = row.deficit + row.tail;
    });
    rep.sup_density = -kInf;
    rep.min_deficit = kInf;
    rep.min_slack = kInf;
    for (const ReportRow& row : rep.rows) {
        rep.sup_density = std::max(rep.sup_density, row.density);
        rep.min_deficit = std::min(rep.min_deficit, row.deficit);
        rep.min_slack = std::min(rep.min_slack, row.slack);
    }
    rep.inf_abs_b = std::exp(-rep.sup_density);
    rep.separation = separation_constant(seq.points, threads);
    rep.verdict = rep.min_slack >= 0.0 ? "majorized" : "not-majorized";
    return rep;
}

MinimalScale minimal_shadow_scale(const GeneratedSequence& seq,
                                  const ArcWeight& unit_shadow,
                                  unsigned threads) {
    require(seq.size() > 0, "minimal_shadow_scale: empty sequence");
    const auto dens = all_member_densities(seq.points, threads);
    std::vector<double> ext(seq.size());
    parallel_for(seq.size(), threads, [&](std::size_t i) {
        ext[i] = poisson_extension(unit_shadow, seq.points[i]);
    });
    MinimalScale out;
    for (std::size_t i = 0; i < seq.size(); ++i) {
        require(ext[i] > 0.0,
                "minimal_shadow_scale: shadow vanishes at a member");
        const double c = dens[i] / ext[i];
        if (c > out.c0) {
            out.c0 = c;
            out.at = i;
        }
    }
    return out;
}

// --------------------------------------------------- weight class series

namespace {

// psi_d(k+1) - psi_d(k) for psi_d(t) = t ln^d t, computed without the
// catastrophic cancellation of the naive difference.
double shape_increment(double k, double d) {
    const double L = std::log(k);
    const double x = std::log1p(1.0 / k);   // ln(k+1) - ln k
    const double L1 = L + x;
    // k (ln^d(k+1) - ln^d k) + ln^d(k+1)
    return k * std::pow(L, d) * std::expm1(d * std::log1p(x / L)) +
           std::pow(L1, d);
}

// f(t) = psi_d'(t) / (t ln^(1+eps) t), the integrand enveloping the terms.
double envelope(double t, double d, double eps) {
    const double L = std::log(t);
    return (std::pow(L, d) + d * std::pow(L, d - 1.0)) /
           (t * std::pow(L, 1.0 + eps));
}

// Integral of the envelope from a to infinity (finite when d < eps).
double envelope_tail_integral(double a, double d, double eps) {
    const double L = std::log(a);
    return std::pow(L, d - eps) / (eps - d) +
           d * std::pow(L, d - eps - 1.0) / (1.0 + eps - d);
}

} // namespace

SeriesMembership shadow_membership_series(double delta, double eps, double c0,
                                          int64_t k_terms, double class_bound) {
    require(delta > 0.0 && eps > 0.0,
            "shadow_membership_series: exponents must be > 0");
    require(c0 >= 0.0, "shadow_membership_series: scale must be >= 0");
    require(k_terms >= 100, "shadow_membership_series: too few terms");
    SeriesMembership out;
    if (c0 == 0.0) {
        out.verdict = "member";
        return out;
    }

    std::vector<double> terms(std::size_t(k_terms - 1));
    for (int64_t k = 2; k <= k_terms; ++k) {
        const double kk = double(k);
        terms[std::size_t(k - 2)] = shape_increment(kk, delta) /
                                    (kk * std::pow(std::log(kk), 1.0 + eps));
    }
    out.terms = k_terms - 1;
    out.partial_sum = pairwise_sum(terms);

    if (delta < eps) {
        const double K1 = double(k_terms + 1);
        const double lower = envelope_tail_integral(K1, delta, eps);
        // The increments compare to the envelope one index ahead; a factor
        // (1 + 1/(K ln K))^delta absorbs the shift.
        const double fudge =
            std::pow(1.0 + 1.0 / (double(k_terms) * std::log(double(k_terms))),
                     delta);
        const double upper =
            fudge * (envelope(K1, delta, eps) + lower);
        out.value_lo = c0 * (out.partial_sum + lower);
        out.value_hi = c0 * (out.partial_sum + upper);
        out.bracket_width = out.value_hi - out.value_lo;
        if (out.value_hi <= class_bound)
            out.verdict = "member";
        else if (out.value_lo > class_bound)
            out.verdict = "not-member";
        else
            out.verdict = "undecided";
        return out;
    }

    // Divergent regime: certify how far the partial sums must run to pass
    // the bound, using only the first (decreasing) piece of the envelope:
    //   term_k >= 1 / (k ln^(1+eps-delta) k).
    const double target =
        (std::isfinite(class_bound) ? class_bound / c0 : 10.0) + 0.5;
    const double gap = std::max(target - out.partial_sum, 0.0);
    const double a = double(k_terms + 1);
    const double La = std::log(a);
    double logK;
    if (delta == eps) {
        logK = std::exp(std::log(La) + gap); // ln ln K grows by the gap
    } else {
        const double p = delta - eps;
        logK = std::pow(std::pow(La, p) + p * gap, 1.0 / p);
    }
    out.value_lo = c0 * out.partial_sum;
    out.value_hi = kInf;
    out.bracket_width = kInf;
    out.log_k_exceed = logK;
    out.verdict = "not-member";
    return out;
}

// ------------------------------------------------------ dual ratio search

namespace {

struct LuxWorkspace {
    const OrliczShape* shape = nullptr;
    std::span<const double> mass;
    std::vector<double> buf;

    double modular_at(std::span<const double> v, double t) {
        const std::size_t n = mass.size();
        buf.resize(n);
        for (std::size_t i = 0; i < n; ++i)
            buf[i] = mass[i] * shape->value(v[i] / t);
        return pairwise_sum(buf);
    }

    // Modular and its derivative in t (one fused pass).
    std::pair<double, double> modular_slope(std::span<const double> v,
                                            double t) {
        const std::size_t n = mass.size();
        buf.resize(n);
        std::vector<double> dbuf(n);
        for (std::size_t i = 0; i < n; ++i) {
            const double x = v[i] / t;
            buf[i] = mass[i] * shape->value(x);
            dbuf[i] = -mass[i] * shape->rderiv(x) * x / t;
        }
        return {pairwise_sum(buf), pairwise_sum(dbuf)};
    }

    // Luxemburg norm of nonnegative v with a warm start; Newton steps
    // safeguarded by a maintained bracket.
    double norm(std::span<const double> v, double warm) {
        double vmax = 0.0;
        for (double x : v) vmax = std::max(vmax, x);
        if (vmax == 0.0) return 0.0;
        double t = warm > 0.0 ? warm : vmax;
        t = std::clamp(t, vmax * 1e-9, vmax * 1e9);
        double hi = t, lo = t;
        int guard = 0;
        while (modular_at(v, hi) > 1.0) {
            hi *= 2.0;
            if (++guard > 400)
                throw std::runtime_error("dual search: norm bracket failed");
        }
        guard = 0;
        while (modular_at(v, lo) <= 1.0) {
            hi = std::min(hi, lo);
            lo *= 0.5;
            if (lo < vmax * 1e-18) break;
            if (++guard > 400)
                throw std::runtime_error("dual search: norm bracket failed");
        }
        // Newton from the feasible side, bisection fallback.
        t = hi;
        for (int it = 0; it < 80 && (hi - lo) > 1e-14 * hi; ++it) {
            const auto [J, dJ] = modular_slope(v, t);
            (J <= 1.0 ? hi : lo) = t;
            double next = 0.0;
            if (std::isfinite(J) && dJ < 0.0) next = t - (J - 1.0) / dJ;
            if (!(next > lo && next < hi)) next = 0.5 * (lo + hi);
            t = next;
        }
        return hi;
    }
};

} // namespace

DualSearchResult dual_ratio_search(const GeneratedSequence& seq,
                                   const OrliczShape& shape,
                                   std::span<const double> densities,
                                   const DualSearchOptions& opts) {
    const std::size_t n = seq.size();
    require(n > 0, "dual_ratio_search: empty sequence");
    require(densities.size() == n,
            "dual_ratio_search: densities must cover every member");
    require(opts.budget >= 0, "dual_ratio_search: bad budget");

    const OrliczShape conj = conjugate(shape);
    const DiscreteMeasure probe =
        make_measure(seq.points, std::vector<double>(n, 1.0));
    const BoundaryGrid grid = boundary_grid(probe, opts.grid);
    const std::size_t G = grid.theta.size();

    const auto kernel_row = [&](std::size_t i, std::vector<double>& row) {
        row.resize(G);
        for (std::size_t g = 0; g < G; ++g)
            row[g] = poisson_kernel(seq.points[i], BoundaryAngle{grid.theta[g]});
    };

    LuxWorkspace lux{&conj, grid.mass, {}};

    // Single-atom norms and ratios; the best one seeds the search.
    std::vector<double> atom_norm(n);
    {
        parallel_for(n, opts.threads, [&](std::size_t i) {
            thread_local std::vector<double> row;
            thread_local LuxWorkspace tl_lux;
            tl_lux.shape = &conj;
            tl_lux.mass = grid.mass;
            kernel_row(i, row);
            atom_norm[i] = tl_lux.norm(row, 0.0);
        });
    }
    std::size_t seed = 0;
    double seed_ratio = -kInf;
    for (std::size_t i = 0; i < n; ++i) {
        const double r = atom_norm[i] > 0.0 ? densities[i] / atom_norm[i] : 0.0;
        if (r > seed_ratio) {
            seed_ratio = r;
            seed = i;
        }
    }

    DualSearchResult res;
    res.coeffs.assign(n, 0.0);
    res.coeffs[seed] = 1.0 / atom_norm[seed];

    std::vector<double> V(G, 0.0);
    std::vector<double> row;
    kernel_row(seed, row);
    for (std::size_t g = 0; g < G; ++g) V[g] = res.coeffs[seed] * row[g];

    const auto objective_of = [&]() {
        return pairwise_sum_indexed(
            n, [&](std::size_t i) { return res.coeffs[i] * densities[i]; });
    };

    double O = objective_of();
    double N = lux.norm(V, 1.0);
    double ratio = N > 0.0 ? O / N : 0.0;

    const auto push_trace = [&](int iter, std::size_t adjusted) {
        std::size_t supp = 0;
        for (double c : res.coeffs)
            if (c > 0.0) ++supp;
        res.trace.push_back(DualSearchRow{iter, supp, O, N, ratio, adjusted,
                                          res.coeffs[adjusted]});
    };
    push_trace(1, seed);

    // Gradient of the norm in each coordinate via the contact condition;
    // recomputed every refresh_every adjustments, consumed best-first.
    std::vector<std::size_t> queue;
    const auto refresh_queue = [&]() {
        queue.clear();
        std::vector<double> wphi(G);
        for (std::size_t g = 0; g < G; ++g)
            wphi[g] = grid.mass[g] * conj.rderiv(V[g] / N);
        const double D = pairwise_sum_indexed(G, [&](std::size_t g) {
            return wphi[g] * V[g] / N;
        });
        if (!(D > 0.0)) return;
        std::vector<double> score(n, 0.0);
        parallel_for(n, opts.threads, [&](std::size_t i) {
            thread_local std::vector<double> r;
            kernel_row(i, r);
            double dn = 0.0;
            {
                thread_local std::vector<double> prod;
                prod.resize(G);
                for (std::size_t g = 0; g < G; ++g) prod[g] = wphi[g] * r[g];
                dn = pairwise_sum(prod) / D;
            }
            const double drho = (densities[i] - ratio * dn) / N;
            score[i] = res.coeffs[i] > 0.0 ? std::abs(drho)
                                           : std::max(drho, 0.0);
        });
        std::vector<std::size_t> idx(n);
        std::iota(idx.begin(), idx.end(), 0);
        std::stable_sort(idx.begin(), idx.end(), [&](std::size_t a, std::size_t b) {
            return score[a] > score[b];
        });
        for (std::size_t i : idx)
            if (score[i] > 1e-18) queue.push_back(i);
    };

    std::vector<double> base(G), cand(G);
    int iter = 1;
    for (int step = 0; step < opts.budget; ++step) {
        if (step % std::max(opts.refresh_every, 1) == 0 || queue.empty()) {
            refresh_queue();
            if (queue.empty()) break;
        }
        const std::size_t i = queue.front();
        queue.erase(queue.begin());

        kernel_row(i, row);
        const double ci = res.coeffs[i];
        double rmax = 0.0;
        for (std::size_t g = 0; g < G; ++g) {
            base[g] = V[g] - ci * row[g];
            rmax = std::max(rmax, row[g]);
        }
        const double c_unit = rmax > 0.0 ? N / rmax : 1.0;
        const double hi = 2.0 * ci + 4.0 * c_unit;

        double warm = N;
        const auto ratio_at = [&](double x) {
            for (std::size_t g = 0; g < G; ++g) cand[g] = base[g] + x * row[g];
            const double nn = lux.norm(cand, warm);
            warm = nn > 0.0 ? nn : warm;
            const double oo = O + (x - ci) * densities[i];
            return nn > 0.0 ? oo / nn : 0.0;
        };

        // Golden section on [0, hi].
        const double invphi = 0.6180339887498949;
        double a = 0.0, b = hi;
        double x1 = b - invphi * (b - a), x2 = a + invphi * (b - a);
        double f1 = ratio_at(x1), f2 = ratio_at(x2);
        for (int it2 = 0; it2 < opts.golden_iters; ++it2) {
            if (f1 >= f2) {
                b = x2;
                x2 = x1;
                f2 = f1;
                x1 = b - invphi * (b - a);
                f1 = ratio_at(x1);
            } else {
                a = x1;
                x1 = x2;
                f1 = f2;
                x2 = a + invphi * (b - a);
                f2 = ratio_at(x2);
            }
        }
        double best_x = f1 >= f2 ? x1 : x2;
        double best_f = std::max(f1, f2);
        // The boundary x = 0 (dropping the atom) is a legitimate optimum.
        const double f0 = ratio_at(0.0);
        if (f0 > best_f) {
            best_x = 0.0;
            best_f = f0;
        }
        if (best_f >= ratio) {
            res.coeffs[i] = best_x;
            for (std::size_t g = 0; g < G; ++g)
                V[g] = base[g] + best_x * row[g];
            O = objective_of();
            N = lux.norm(V, warm);
            ratio = N > 0.0 ? O / N : 0.0;
        }
        ++iter;
        push_trace(iter, i);
    }

    for (std::size_t i = 0; i < n; ++i)
        if (res.coeffs[i] > 0.0) res.support.push_back(i);
    res.objective = O;
    res.constraint = N;
    res.ratio = ratio;
    return res;
}

// -------------------------------------------------- growth vs point rule

std::vector<GrowthRow> growth_vs_pointeval(double eps, int n_lo, int n_hi,
                                           int j_offset,
                                           std::span<const double> cf,
                                           unsigned threads) {
    require(n_lo >= 2 && n_hi >= n_lo, "growth_vs_pointeval: bad stage range");
    require(j_offset >= 1, "growth_vs_pointeval: bad offset");
    const OrliczShape psi = OrliczShape::psi(eps);
    std::vector<GrowthRow> rows;
    for (int n = n_lo; n <= n_hi; ++n) {
        GrowthRow row;
        row.n = n;
        row.r = 1.0 - std::exp2(double(-n));
        const int J = n + j_offset;
        row.phi_trunc = crowded_density_truncated(eps, n, J, threads);
        row.tail_bound =
            crowded_tail_bound(eps, DiskPoint{row.r, 0.0}, J).bound;
        row.phi_upper = row.phi_trunc + row.tail_bound;
        row.tail_fraction = row.tail_bound / row.phi_upper;
        const double one_minus_r = std::exp2(double(-n));
        row.model = 4.0 / (one_minus_r *
                           std::pow(std::log(double(n) * std::log(2.0)), eps));
        row.band_ratio = row.phi_upper / row.model;
        row.band_ratio_trunc = row.phi_trunc / row.model;
        const double lnln = std::pow(std::log(double(n) * std::log(2.0)), eps);
        row.scaled_upper = row.phi_upper * one_minus_r * lnln;
        row.scaled_trunc = row.phi_trunc * one_minus_r * lnln;
        for (double c : cf) {
            const double pinv = psi.inverse(c / one_minus_r);
            row.psi_inv.push_back(pinv);
            row.incompat.push_back(row.phi_upper / pinv);
        }
        rows.push_back(std::move(row));
    }
    // Flag rows whose tail-inclusive ratio strays from the pack.
    std::vector<double> ratios;
    for (const GrowthRow& r : rows) ratios.push_back(r.band_ratio);
    std::vector<double> sorted = ratios;
    std::sort(sorted.begin(), sorted.end());
    const double median = sorted[sorted.size() / 2];
    for (GrowthRow& r : rows)
        r.flagged = r.band_ratio > 1.5 * median || r.band_ratio < median / 1.5;
    return rows;
}

// ------------------------------------------------------- split and verify

SplitResult comparable_split(const GeneratedSequence& seq, double delta,
                             unsigned threads) {
    require(delta > 0.0, "comparable_split: delta must be > 0");
    SplitResult out;
    out.separation_full = separation_constant(seq.points, threads);
    require(out.separation_full >= delta * (1.0 - 1e-12),
            "comparable_split: sequence is not delta-separated");

    std::vector<std::size_t> order(seq.size());
    std::iota(order.begin(), order.end(), 0);
    std::vector<int> layer(seq.size());
    std::vector<double> arg(seq.size());
    for (std::size_t i = 0; i < seq.size(); ++i) {
        layer[i] = square_of(seq.points[i]).n;
        double a = std::atan2(seq.points[i].im, seq.points[i].re);
        if (a < 0.0) a += 2.0 * kPi;
        arg[i] = a;
    }
    std::stable_sort(order.begin(), order.end(),
                     [&](std::size_t a, std::size_t b) {
                         if (layer[a] != layer[b]) return layer[a] < layer[b];
                         if (arg[a] != arg[b]) return arg[a] < arg[b];
                         return seq.points[a].abs() < seq.points[b].abs();
                     });
    for (std::size_t pos = 0; pos < order.size(); ++pos)
        out.parts[pos % 2].push_back(order[pos]);
    for (int p = 0; p < 2; ++p) {
        std::sort(out.parts[p].begin(), out.parts[p].end());
        std::vector<DiskPoint> pts;
        for (std::size_t i : out.parts[std::size_t(p)])
            pts.push_back(seq.points[i]);
        out.separation_part[std::size_t(p)] =
            separation_constant(pts, threads);
    }
    return out;
}

ComparabilityEstimate comparability_verify(const GeneratedSequence& seq,
                                           const SplitResult& split,
                                           double delta,
                                           const ComparabilityOptions& opts) {
    require(delta > 0.0, "comparability_verify: delta must be > 0");
    require(opts.grid_scale >= 1, "comparability_verify: bad grid scale");
    std::array<std::vector<DiskPoint>, 2> part_pts;
    for (int p = 0; p < 2; ++p)
        for (std::size_t i : split.parts[std::size_t(p)])
            part_pts[std::size_t(p)].push_back(seq.points[i]);
    require(!part_pts[0].empty() && !part_pts[1].empty(),
            "comparability_verify: both parts must be nonempty");

    // Log-densities of both part products on a clear grid.
    const auto make_xy = [&](int scale, std::vector<double>& xs,
                             std::vector<double>& ys, std::size_t& count) {
        const int layers = 35 * scale;
        const int angles = 32 * scale;
        xs.clear();
        ys.clear();
        std::vector<DiskPoint> zs;
        for (int m = 0; m < layers; ++m) {
            const double r = 1.0 - 0.75 * std::exp2(-double(m) / scale);
            for (int a = 0; a < angles; ++a) {
                const double th = 2.0 * kPi * double(a) / angles;
                const DiskPoint z{r * std::cos(th), r * std::sin(th)};
                bool clear = true;
                for (const DiskPoint& lam : seq.points)
                    if (pseudo_distance(z, lam) <= opts.exclusion_frac * delta) {
                        clear = false;
                        break;
                    }
                if (clear) zs.push_back(z);
            }
        }
        count = zs.size();
        xs.resize(zs.size());
        ys.resize(zs.size());
        parallel_for(zs.size(), opts.threads, [&](std::size_t j) {
            xs[j] = -log_blaschke_product(part_pts[0], zs[j]).as_double();
            ys[j] = -log_blaschke_product(part_pts[1], zs[j]).as_double();
        });
    };

    const auto fit_b = [&](const std::vector<double>& xs,
                           const std::vector<double>& ys, double& alpha_out) {
        const double alpha_cap = -std::log(opts.a_floor);
        double fallback_alpha = kInf;
        double fallback_b = opts.b_cap;
        for (double b = 1.0; b <= opts.b_cap + 1e-9; b += 0.01) {
            double alpha = 0.0;
            for (std::size_t j = 0; j < xs.size(); ++j) {
                alpha = std::max(alpha, xs[j] / b - ys[j]);
                alpha = std::max(alpha, ys[j] - b * xs[j]);
            }
            if (alpha <= alpha_cap) {
                alpha_out = alpha;
                return b;
            }
            if (alpha < fallback_alpha) {
                fallback_alpha = alpha;
                fallback_b = b;
            }
        }
        alpha_out = fallback_alpha;
        return -fallback_b; // negative marks a failed fit
    };

    ComparabilityEstimate est;
    std::vector<double> xs, ys;
    make_xy(opts.grid_scale, xs, ys, est.grid_size);
    double alpha = 0.0;
    double b = fit_b(xs, ys, alpha);
    est.fit_ok = b > 0.0;
    est.b = std::abs(b);
    est.alpha = alpha;
    est.a = std::exp(-alpha);
    est.c = est.b / (est.b + 1.0);

    if (opts.refine_check) {
        std::vector<double> xs2, ys2;
        std::size_t n2 = 0;
        make_xy(opts.grid_scale * 2, xs2, ys2, n2);
        double alpha2 = 0.0;
        est.b_refined = std::abs(fit_b(xs2, ys2, alpha2));
    }

    // Defect of phi_part >= c phi_full - eta at every member.
    const auto full_dens = all_member_densities(seq.points, opts.threads);
    est.eta = -kInf;
    for (int p = 0; p < 2; ++p) {
        const auto& part = split.parts[std::size_t(p)];
        const auto part_dens =
            all_member_densities(part_pts[std::size_t(p)], opts.threads);
        for (std::size_t j = 0; j < part.size(); ++j) {
            const double defect =
                est.c * full_dens[part[j]] - part_dens[j];
            if (defect > est.eta) {
                est.eta = defect;
                est.witness = seq.points[part[j]];
            }
        }
    }
    est.verify_ok = est.fit_ok && est.eta <= opts.eta_cap;
    return est;
}

// -------------------------------------------------------- combined report

CrowdedReport crowded_report(const CrowdedReportOptions& opts) {
    require(opts.n_lo >= 2 && opts.n_hi >= opts.n_lo,
            "crowded_report: bad stage range");
    CrowdedReport rep;
    rep.opts = opts;
    rep.rows = growth_vs_pointeval(opts.eps, opts.n_lo, opts.n_hi,
                                   opts.j_offset, opts.cf, opts.threads);

    const GeneratedSequence seq = gen_crowded(opts.eps, opts.n_hi);
    rep.separation = separation_constant(seq.points, opts.threads);
    std::vector<double> tails(seq.size());
    for (std::size_t i = 0; i < seq.size(); ++i)
        tails[i] =
            crowded_tail_bound(opts.eps, seq.points[i], opts.n_hi).bound;
    rep.carleson = carleson_check(seq, tails, 1.05, opts.threads);

    rep.shadow_half = shadow_membership_series(0.5 * opts.eps, opts.eps, 1.0,
                                               opts.series_terms);
    rep.shadow_full = shadow_membership_series(opts.eps, opts.eps, 1.0,
                                               opts.series_terms);

    // Separation attained at shallow stages, so one stage less must agree.
    double sep_prev = rep.separation;
    if (opts.n_hi > opts.n_lo) {
        const GeneratedSequence prev = gen_crowded(opts.eps, opts.n_hi - 1);
        sep_prev = separation_constant(prev.points, opts.threads);
    }
    // The constant converges to 1/3 with O(2^-n) truncation corrections;
    // stable means the last step's drift is consistent with that rate.
    const bool sep_stable =
        std::abs(sep_prev - rep.separation) <=
        2.0 * std::exp2(double(-opts.n_hi)) * rep.separation;

    double band_lo = kInf, band_hi = -kInf;
    for (const GrowthRow& row : rep.rows) {
        band_lo = std::min(band_lo, row.band_ratio);
        band_hi = std::max(band_hi, row.band_ratio);
    }
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.6f", band_hi / band_lo);
    rep.verdicts["carleson"] = rep.carleson.verdict;
    rep.verdicts["shadow_eps_half"] = rep.shadow_half.verdict;
    rep.verdicts["shadow_eps"] = rep.shadow_full.verdict;
    rep.verdicts["separation_stable"] = sep_stable ? "stable" : "drifting";
    rep.verdicts["band_spread"] = buf;
    return rep;
}

} // namespace disklab
