#include <cmath>
#include <random>

#include "doctest.h"

#include "disklab/disk.hpp"

using namespace disklab;

namespace {

std::mt19937 rng(20240901u);

DiskPoint random_point(double max_abs = 0.999) {
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    std::uniform_real_distribution<double> angle(0.0, 2.0 * M_PI);
    const double r = max_abs * std::sqrt(unit(rng));
    const double t = angle(rng);
    return disk_point(r * std::cos(t), r * std::sin(t));
}

} // namespace

TEST_CASE("disk point validation") {
    CHECK_THROWS_AS(disk_point(1.0, 0.0), std::invalid_argument);
    CHECK_THROWS_AS(disk_point(0.8, 0.7), std::invalid_argument);
    CHECK(disk_point(0.0, 0.0).abs() == 0.0);
    CHECK(disk_point(0.3, -0.4).abs() == doctest::Approx(0.5));
}

TEST_CASE("boundary angle normalisation") {
    CHECK(boundary_angle(0.0).theta == 0.0);
    CHECK(boundary_angle(2.0 * M_PI).theta == doctest::Approx(0.0));
    CHECK(boundary_angle(-M_PI / 2).theta == doctest::Approx(3.0 * M_PI / 2));
    CHECK(boundary_angle(7.0 * M_PI).theta == doctest::Approx(M_PI));
}

TEST_CASE("elementary factor values") {
    // b_w(0) = |w|, and b_0 is the identity.
    CHECK(blaschke_factor(disk_point(0.5, 0.0), Complex(0.0, 0.0)) ==
          Complex(0.5, 0.0));
    const Complex z(0.3, 0.2);
    CHECK(blaschke_factor(disk_point(0.0, 0.0), z) == z);
    // b_w(w) = 0.
    const DiskPoint w = disk_point(0.4, -0.7);
    CHECK(std::abs(blaschke_factor(w, w.c())) == 0.0);
}

TEST_CASE("pseudohyperbolic distance closed forms") {
    // Real points: |0.3 - 0.5| / |1 - 0.15|.
    CHECK(pseudo_distance(disk_point(0.3, 0.0), disk_point(0.5, 0.0)) ==
          doctest::Approx(0.2 / 0.85).epsilon(1e-14));
    CHECK(pseudo_distance(disk_point(0.5, 0.0), disk_point(-0.5, 0.0)) ==
          doctest::Approx(0.8).epsilon(1e-14));
    // Symmetry.
    for (int i = 0; i < 100; ++i) {
        const DiskPoint a = random_point(), b = random_point();
        CHECK(pseudo_distance(a, b) ==
              doctest::Approx(pseudo_distance(b, a)).epsilon(1e-13));
    }
}

TEST_CASE("log modulus agrees with the direct quotient") {
    for (int i = 0; i < 1000; ++i) {
        const DiskPoint w = random_point(), z = random_point();
        const double direct = std::abs(blaschke_factor(w, z.c()));
        if (direct == 0.0) continue;
        CHECK(std::exp(log_abs_factor(w, z)) ==
              doctest::Approx(direct).epsilon(1e-13));
    }
}

TEST_CASE("log modulus on coincident points is minus infinity") {
    const DiskPoint w = disk_point(0.3, 0.4);
    CHECK(std::isinf(log_abs_factor(w, w)));
    CHECK(log_abs_factor(w, w) < 0.0);
}

TEST_CASE("log modulus is stable near the boundary") {
    // Points with exact dyadic gaps g and g/2 pushed toward the boundary:
    // rho = (g/2)/(3g/2 - g^2/2) = 1/(3-g), so log rho must track
    // -log(3-g) instead of degrading to 0 or -inf.  (Exact gaps matter:
    // a double near 1 only resolves its gap to ~1.1e-16 absolutely, so a
    // partner built by Mobius arithmetic could not pin rho this tightly.)
    for (int k = 3; k <= 45; ++k) {
        const double g = std::ldexp(1.0, -k);
        const double r = 1.0 - g;
        const double partner = 1.0 - 0.5 * g;
        const double got =
            log_abs_factor(disk_point(r, 0.0), disk_point(partner, 0.0));
        CHECK(got == doctest::Approx(-std::log(3.0 - g)).epsilon(1e-13));
    }
}

TEST_CASE("identity 1 - rho^2 = (1-|z|^2)(1-|w|^2)/|1-conj(w) z|^2") {
    for (int i = 0; i < 1000; ++i) {
        const DiskPoint z = random_point(), w = random_point();
        const double rho = pseudo_distance(z, w);
        const double d2 = std::norm(Complex(1.0, 0.0) -
                                    std::conj(w.c()) * z.c());
        const double expect = (1.0 - z.abs2()) * (1.0 - w.abs2()) / d2;
        CHECK(1.0 - rho * rho == doctest::Approx(expect).epsilon(1e-12));
    }
}

TEST_CASE("Mobius invariance of the distance") {
    for (int i = 0; i < 500; ++i) {
        const DiskPoint a = random_point(0.95);
        const DiskPoint z = random_point(), w = random_point();
        const DiskPoint tz = disk_point(blaschke_factor(a, z.c()));
        const DiskPoint tw = disk_point(blaschke_factor(a, w.c()));
        CHECK(pseudo_distance(tz, tw) ==
              doctest::Approx(pseudo_distance(z, w)).epsilon(1e-12));
    }
}

TEST_CASE("boundary unimodularity") {
    for (int i = 0; i < 1000; ++i) {
        const DiskPoint w = random_point();
        std::uniform_real_distribution<double> angle(0.0, 2.0 * M_PI);
        const double t = angle(rng);
        const Complex zeta(std::cos(t), std::sin(t));
        CHECK(std::abs(blaschke_factor(w, zeta)) ==
              doctest::Approx(1.0).epsilon(1e-13));
    }
}

TEST_CASE("product log modulus matches the factor sum") {
    std::vector<DiskPoint> pts;
    for (int i = 0; i < 40; ++i) pts.push_back(random_point());
    const DiskPoint z = random_point();
    double sum = 0.0;
    for (const DiskPoint& w : pts) sum += log_abs_factor(w, z);
    const LogModulus lm = log_blaschke_product(pts, z);
    REQUIRE(lm.finite);
    CHECK(lm.value == doctest::Approx(sum).epsilon(1e-12));
}

TEST_CASE("skip index removes exactly one factor") {
    std::vector<DiskPoint> pts;
    for (int i = 0; i < 25; ++i) pts.push_back(random_point());
    const DiskPoint z = random_point();
    const double full = log_blaschke_product(pts, z).as_double();
    for (std::size_t skip : {std::size_t{0}, std::size_t{12}, pts.size() - 1}) {
        const double without = log_blaschke_product(pts, z, skip).as_double();
        CHECK(full - without ==
              doctest::Approx(log_abs_factor(pts[skip], z)).epsilon(1e-11));
    }
}

TEST_CASE("two-point density") {
    const std::vector<DiskPoint> pair = {disk_point(0.5, 0.0),
                                         disk_point(-0.5, 0.0)};
    CHECK(density_at_member(pair, 0) ==
          doctest::Approx(std::log(1.25)).epsilon(1e-14));
    CHECK(density_at_member(pair, 1) ==
          doctest::Approx(std::log(1.25)).epsilon(1e-14));
    const std::vector<DiskPoint> one = {disk_point(0.2, 0.1)};
    CHECK(density_at_member(one, 0) == 0.0);
}

TEST_CASE("repeated member gives infinite density") {
    const std::vector<DiskPoint> pts = {disk_point(0.5, 0.0),
                                        disk_point(0.1, 0.2),
                                        disk_point(0.5, 0.0)};
    // The duplicate lives at positions 0 and 2; evaluating at either one
    // hits the other duplicate, while the middle member stays finite.
    CHECK(std::isinf(density_at_member(pts, 0)));
    CHECK(density_at_member(pts, 0) > 0.0);
    CHECK(std::isfinite(density_at_member(pts, 1)));
}

TEST_CASE("all member densities are thread-count independent") {
    std::vector<DiskPoint> pts;
    for (int i = 0; i < 60; ++i) pts.push_back(random_point());
    const std::vector<double> serial = all_member_densities(pts, 1);
    const std::vector<double> parallel = all_member_densities(pts, 4);
    REQUIRE(serial.size() == pts.size());
    for (std::size_t i = 0; i < pts.size(); ++i)
        CHECK(serial[i] == parallel[i]); // bitwise, by design
    for (std::size_t i = 0; i < pts.size(); ++i)
        CHECK(serial[i] ==
              doctest::Approx(density_at_member(pts, i)).epsilon(1e-12));
}
