#include <cmath>
#include <random>

#include "doctest.h"

#include "disklab/harmonic.hpp"

using namespace disklab;

namespace {

std::mt19937 rng(31415u);

DiskPoint random_point(double max_abs = 0.995) {
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    std::uniform_real_distribution<double> angle(0.0, 2.0 * M_PI);
    const double r = max_abs * std::sqrt(unit(rng));
    const double t = angle(rng);
    return disk_point(r * std::cos(t), r * std::sin(t));
}

// Adaptive Simpson of the Poisson kernel over [a, b] (d theta / 2 pi).
double simpson(DiskPoint z, double a, double b, double fa, double fm,
               double fb, double whole, int depth) {
    const double m = 0.5 * (a + b);
    const double lm = 0.5 * (a + m), rm = 0.5 * (m + b);
    const double flm = poisson_kernel(z, boundary_angle(lm));
    const double frm = poisson_kernel(z, boundary_angle(rm));
    const double left = (m - a) / 6.0 * (fa + 4.0 * flm + fm);
    const double right = (b - m) / 6.0 * (fm + 4.0 * frm + fb);
    if (depth <= 0 || std::abs(left + right - whole) < 1e-14)
        return left + right;
    return simpson(z, a, m, fa, flm, fm, left, depth - 1) +
           simpson(z, m, b, fm, frm, fb, right, depth - 1);
}

double quad_arc_measure(DiskPoint z, double a, double b) {
    const double fa = poisson_kernel(z, boundary_angle(a));
    const double fb = poisson_kernel(z, boundary_angle(b));
    const double fm = poisson_kernel(z, boundary_angle(0.5 * (a + b)));
    const double whole = (b - a) / 6.0 * (fa + 4.0 * fm + fb);
    return simpson(z, a, b, fa, fm, fb, whole, 48) / (2.0 * M_PI);
}

} // namespace

TEST_CASE("poisson kernel closed form") {
    const DiskPoint z = disk_point(0.3, -0.4);
    for (double t : {0.0, 1.0, 2.5, 5.0}) {
        const Complex e(std::cos(t), std::sin(t));
        const double expect = (1.0 - z.abs2()) / std::norm(e - z.c());
        CHECK(poisson_kernel(z, boundary_angle(t)) ==
              doctest::Approx(expect).epsilon(1e-14));
    }
    // At the origin the kernel is identically one (up to the rounding of
    // cos^2 + sin^2 in the denominator).
    for (double t : {0.1, 3.0})
        CHECK(poisson_kernel(disk_point(0.0, 0.0), boundary_angle(t)) ==
              doctest::Approx(1.0).epsilon(1e-15));
}

TEST_CASE("full-circle harmonic measure is one") {
    for (int i = 0; i < 200; ++i) {
        const DiskPoint z = random_point();
        CHECK(harmonic_measure_arc(z, 0.0, 2.0 * M_PI) ==
              doctest::Approx(1.0).epsilon(1e-12));
    }
}

TEST_CASE("arc measure at the origin is proportional length") {
    CHECK(harmonic_measure_arc(disk_point(0.0, 0.0), 0.3, 1.3) ==
          doctest::Approx(1.0 / (2.0 * M_PI)).epsilon(1e-13));
}

TEST_CASE("arc measure is additive and matches quadrature") {
    for (int i = 0; i < 50; ++i) {
        const DiskPoint z = random_point(0.95);
        std::uniform_real_distribution<double> u(0.0, 2.0 * M_PI);
        double a = u(rng), b = u(rng);
        if (b < a) std::swap(a, b);
        if (b - a < 1e-6) continue;
        const double m = 0.5 * (a + b);
        CHECK(harmonic_measure_arc(z, a, m) + harmonic_measure_arc(z, m, b) ==
              doctest::Approx(harmonic_measure_arc(z, a, b)).epsilon(1e-12));
        CHECK(harmonic_measure_arc(z, a, b) ==
              doctest::Approx(quad_arc_measure(z, a, b)).epsilon(1e-9));
    }
}

TEST_CASE("arc weight construction and lookup") {
    const ArcWeight w = make_arc_weight({0.0, 1.0, 4.0}, {2.0, 0.5, 3.0});
    CHECK(arc_value_at(w, 0.5) == 2.0);
    CHECK(arc_value_at(w, 2.0) == 0.5);
    CHECK(arc_value_at(w, 5.0) == 3.0);
    // The last arc wraps through 2 pi back to the first break.
    CHECK(arc_value_at(w, 6.28) == 3.0);
    CHECK_THROWS_AS(make_arc_weight({1.0, 0.5}, {1.0, 1.0}),
                    std::invalid_argument);
    CHECK_THROWS_AS(make_arc_weight({0.0, 7.0}, {1.0, 1.0}),
                    std::invalid_argument);
}

TEST_CASE("arc mean and scaling") {
    const ArcWeight w = make_arc_weight({0.0, M_PI}, {1.0, 3.0});
    CHECK(arc_mean(w) == doctest::Approx(2.0).epsilon(1e-14));
    CHECK(arc_mean(arc_scale(w, 0.5)) == doctest::Approx(1.0).epsilon(1e-14));
}

TEST_CASE("arc addition merges break sets pointwise") {
    const ArcWeight a = make_arc_weight({0.0, 2.0}, {1.0, 0.0});
    const ArcWeight b = make_arc_weight({1.0, 3.0}, {2.0, 5.0});
    const ArcWeight sum = arc_add(a, b);
    for (double t : {0.5, 1.5, 2.5, 4.0})
        CHECK(arc_value_at(sum, t) ==
              doctest::Approx(arc_value_at(a, t) + arc_value_at(b, t))
                  .epsilon(1e-14));
    const DiskPoint z = random_point();
    CHECK(poisson_extension(sum, z) ==
          doctest::Approx(poisson_extension(a, z) + poisson_extension(b, z))
              .epsilon(1e-12));
}

TEST_CASE("extension of a constant weight is the constant") {
    const ArcWeight c = make_arc_weight({0.0}, {2.5});
    for (int i = 0; i < 100; ++i)
        CHECK(poisson_extension(c, random_point()) ==
              doctest::Approx(2.5).epsilon(1e-12));
}

TEST_CASE("extension of an indicator is the arc measure") {
    const ArcWeight ind = make_arc_weight({1.0, 2.0}, {1.0, 0.0});
    for (int i = 0; i < 50; ++i) {
        const DiskPoint z = random_point();
        CHECK(poisson_extension(ind, z) ==
              doctest::Approx(harmonic_measure_arc(z, 1.0, 2.0))
                  .epsilon(1e-12));
    }
}

TEST_CASE("samples carry normalised arc masses") {
    const ArcWeight w = make_arc_weight({0.0, 1.0, 4.0}, {2.0, 0.5, 3.0});
    const WeightedSamples s = samples_of(w);
    REQUIRE(s.mass.size() == 3);
    double total = 0.0;
    for (double m : s.mass) total += m;
    CHECK(total == doctest::Approx(1.0).epsilon(1e-14));
    CHECK(s.value[0] == 2.0);
    CHECK(s.mass[1] == doctest::Approx(3.0 / (2.0 * M_PI)).epsilon(1e-14));
}

TEST_CASE("shadow weight of one member") {
    GeneratedSequence seq = gen_explicit({disk_point(0.9, 0.0)});
    const ArcWeight w = shadow_weight(seq, 2.0, 1.0); // half-width 0.1
    CHECK(arc_value_at(w, 0.05) == 2.0);
    CHECK(arc_value_at(w, 2.0 * M_PI - 0.05) == 2.0);
    CHECK(arc_value_at(w, 0.2) == 0.0);
    CHECK(arc_value_at(w, M_PI) == 0.0);
    CHECK(arc_mean(w) == doctest::Approx(2.0 * 0.2 / (2.0 * M_PI))
                             .epsilon(1e-12));
}

TEST_CASE("overlapping shadows add their heights") {
    GeneratedSequence seq =
        gen_explicit({disk_point(0.9, 0.0), disk_point(0.92, 0.0)});
    const ArcWeight w = shadow_weight(seq, 1.0, 1.0);
    // Near theta = 0 both shadows cover; the wider one alone further out.
    CHECK(arc_value_at(w, 0.01) == 2.0);
    CHECK(arc_value_at(w, 0.09) == 1.0);
    CHECK(arc_value_at(w, 0.5) == 0.0);
}

TEST_CASE("giant shadows fall back to a constant contribution") {
    GeneratedSequence seq = gen_explicit({disk_point(0.1, 0.0)});
    const ArcWeight w = shadow_weight(seq, 3.0, 10.0); // half-width 9 > pi
    for (double t : {0.0, 1.0, M_PI, 5.0})
        CHECK(arc_value_at(w, t) == 3.0);
}

TEST_CASE("measure construction validates masses") {
    CHECK_THROWS_AS(make_measure({disk_point(0.1, 0.0)}, {0.0}),
                    std::invalid_argument);
    CHECK_THROWS_AS(make_measure({disk_point(0.1, 0.0)}, {1.0, 2.0}),
                    std::invalid_argument);
}

TEST_CASE("pairing closed forms") {
    const DiscreteMeasure nu =
        make_measure({disk_point(0.4, 0.1), disk_point(-0.2, 0.3)},
                     {0.7, 0.4});
    // Against a constant weight the pairing is the total mass times it.
    const ArcWeight c = make_arc_weight({0.0}, {2.0});
    CHECK(pairing(c, nu) == doctest::Approx(2.0 * 1.1).epsilon(1e-12));
    // Against an indicator it is the summed arc measures.
    const ArcWeight ind = make_arc_weight({0.5, 2.5}, {1.0, 0.0});
    const double expect =
        0.7 * harmonic_measure_arc(nu.atoms[0], 0.5, 2.5) +
        0.4 * harmonic_measure_arc(nu.atoms[1], 0.5, 2.5);
    CHECK(pairing(ind, nu) == doctest::Approx(expect).epsilon(1e-12));
}

TEST_CASE("balayage pointwise is the mass-weighted kernel sum") {
    const DiscreteMeasure nu =
        make_measure({disk_point(0.5, 0.2), disk_point(0.0, -0.6)},
                     {1.0, 0.5});
    const BoundaryAngle t = boundary_angle(1.2);
    CHECK(balayage_at(nu, t) ==
          doctest::Approx(1.0 * poisson_kernel(nu.atoms[0], t) +
                          0.5 * poisson_kernel(nu.atoms[1], t))
              .epsilon(1e-14));
}

TEST_CASE("boundary grid masses form a probability") {
    const DiscreteMeasure nu =
        make_measure({disk_point(0.9, 0.0), disk_point(0.0, 0.99)},
                     {0.3, 0.6});
    for (bool gauss : {false, true}) {
        const BoundaryGrid grid =
            boundary_grid(nu, BoundaryGridOptions{512, 8.0, 8.0, gauss, 1});
        double total = 0.0;
        for (double m : grid.mass) total += m;
        CHECK(total == doctest::Approx(1.0).epsilon(1e-12));
        CHECK(grid.theta.size() == grid.mass.size());
        for (std::size_t i = 1; i < grid.theta.size(); ++i)
            CHECK(grid.theta[i] > grid.theta[i - 1]);
    }
}

TEST_CASE("balayage integrates back to the total mass") {
    const DiscreteMeasure nu =
        make_measure({disk_point(0.95, 0.0), disk_point(-0.3, 0.4)},
                     {0.25, 0.5});
    const BoundaryGrid grid =
        boundary_grid(nu, BoundaryGridOptions{2048, 12.0, 16.0, true, 1});
    const WeightedSamples vals = balayage_samples(nu, grid);
    double integral = 0.0;
    for (std::size_t i = 0; i < vals.mass.size(); ++i)
        integral += vals.mass[i] * vals.value[i];
    CHECK(integral == doctest::Approx(0.75).epsilon(1e-6));
}

TEST_CASE("grid pairing approximates the exact pairing") {
    const DiscreteMeasure nu =
        make_measure({disk_point(0.8, 0.1), disk_point(0.2, -0.5)},
                     {0.4, 0.6});
    const ArcWeight w = make_arc_weight({0.2, 1.0, 3.0}, {1.5, 0.0, 0.7});
    const double exact = pairing(w, nu);
    const BoundaryGrid grid =
        boundary_grid(nu, BoundaryGridOptions{4096, 12.0, 16.0, true, 1});
    const WeightedSamples vals = balayage_samples(nu, grid);
    const WeightedSamples ws = sample_weight(w, grid);
    double approx = 0.0;
    for (std::size_t i = 0; i < vals.mass.size(); ++i)
        approx += vals.mass[i] * vals.value[i] * ws.value[i];
    // Cells straddling weight breaks are the dominant error; the grid only
    // refines near atoms, so this is a coarse consistency check.
    CHECK(approx == doctest::Approx(exact).epsilon(2e-2));
}

TEST_CASE("balayage results are thread-count independent") {
    const DiscreteMeasure nu =
        make_measure({disk_point(0.9, 0.3), disk_point(0.5, -0.7)},
                     {0.5, 0.5});
    const BoundaryGrid g1 =
        boundary_grid(nu, BoundaryGridOptions{1024, 8.0, 8.0, true, 1});
    const BoundaryGrid g4 =
        boundary_grid(nu, BoundaryGridOptions{1024, 8.0, 8.0, true, 4});
    REQUIRE(g1.theta.size() == g4.theta.size());
    for (std::size_t i = 0; i < g1.theta.size(); ++i) {
        CHECK(g1.theta[i] == g4.theta[i]);
        CHECK(g1.mass[i] == g4.mass[i]);
    }
    const WeightedSamples v1 = balayage_samples(nu, g1, 1);
    const WeightedSamples v4 = balayage_samples(nu, g1, 4);
    for (std::size_t i = 0; i < v1.value.size(); ++i)
        CHECK(v1.value[i] == v4.value[i]); // bitwise
}

TEST_CASE("dual norm is stable under grid refinement") {
    const DiscreteMeasure nu =
        make_measure({disk_point(0.97, 0.0), disk_point(0.0, 0.9),
                      disk_point(-0.5, -0.5)},
                     {0.2, 0.3, 0.1});
    const OrliczShape conj = conjugate(OrliczShape::psi(1.0));
    const double coarse = balayage_dual_norm(
        nu, conj, BoundaryGridOptions{2048, 12.0, 16.0, true, 1});
    const double fine = balayage_dual_norm(
        nu, conj, BoundaryGridOptions{4096, 12.0, 32.0, true, 1});
    CHECK(coarse == doctest::Approx(fine).epsilon(1e-5));
}
