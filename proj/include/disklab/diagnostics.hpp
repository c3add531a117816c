#pragma once

// Sequence-level diagnostics: boundedness of the density, harmonic
// majorants, boundary weight class membership, the dual ratio search that
// certifies lower bounds for interpolation constants, comparable-part
// splitting, and the combined report for the crowded generator.

#include <array>
#include <cstdint>
#include <limits>
#include <map>
#include <span>
#include <string>
#include <vector>

#include "disklab/disk.hpp"
#include "disklab/dyadic.hpp"
#include "disklab/harmonic.hpp"
#include "disklab/orlicz.hpp"
#include "disklab/sequence.hpp"

namespace disklab {

// ------------------------------------------------------------- uniform inf

// inf |B(lam)| and sup density over the members, plus tail-completed
// values when per-member omitted-mass figures are supplied.  The verdict
// compares the sup of the half-length truncated product against the full
// one: a sup still climbing at the truncation cannot certify uniform
// separation of the full sequence.
struct CarlesonResult {
    double inf_abs_b = 1.0;
    double sup_density = 0.0;
    std::size_t argmax = 0;
    double inf_abs_b_completed = 1.0;
    double sup_density_completed = 0.0;
    double half_sup_density = 0.0;
    std::string verdict; // "carleson" | "not-carleson-at-truncation"
};

CarlesonResult carleson_check(const GeneratedSequence& seq,
                              std::span<const double> tail_mass = {},
                              double growth_tol = 1.1, unsigned threads = 1);

// --------------------------------------------------------------- majorant

struct ReportRow {
    std::size_t index = 0;
    DiskPoint z{};
    int stage = 0;
    double density = 0.0;
    double tail = 0.0;
    double extension = 0.0;  // P[w] at the member
    double deficit = 0.0;    // extension - density
    double slack = 0.0;      // deficit + tail
};

struct DiagnosticReport {
    std::vector<ReportRow> rows;
    double inf_abs_b = 1.0;
    double sup_density = 0.0;
    double separation = 1.0;
    double min_deficit = 0.0;
    double min_slack = 0.0;
    std::string verdict; // "majorized" | "not-majorized"
};

// Does the Poisson extension of w dominate the density at every member?
// Deficits within the per-member tail allowance still count as majorised,
// since the truncated density is only known up to that much.
DiagnosticReport majorant_check(const GeneratedSequence& seq, const ArcWeight& w,
                                std::span<const double> tail_mass = {},
                                unsigned threads = 1);

// Smallest c0 for which c0 * (unit shadow) majorises the density:
// max over members of density / extension.
struct MinimalScale {
    double c0 = 0.0;
    std::size_t at = 0;
};

MinimalScale minimal_shadow_scale(const GeneratedSequence& seq,
                                  const ArcWeight& unit_shadow,
                                  unsigned threads = 1);

// --------------------------------------------------- weight class series

// Membership series sum_k (psi_d(k+1) - psi_d(k)) / (k ln^(1+eps) k) with
// psi_d(t) = t ln^d t, from k = 2, scaled by c0.  Converges exactly when
// d < eps.  The convergent remainder is bracketed by integral envelopes;
// divergence is certified by an analytic lower bound on how far the
// partial sums must be taken to pass the bound (reported as ln K, since K
// itself is usually far beyond any enumeration).
struct SeriesMembership {
    std::string verdict; // "member" | "not-member" | "undecided"
    int64_t terms = 0;
    double partial_sum = 0.0;
    double value_lo = 0.0;
    double value_hi = 0.0;
    double bracket_width = 0.0;
    double log_k_exceed = 0.0;
};

SeriesMembership shadow_membership_series(
    double delta, double eps, double c0 = 1.0, int64_t k_terms = 1000000,
    double class_bound = std::numeric_limits<double>::infinity());

// ------------------------------------------------------ dual ratio search

// Coordinate-ascent maximisation of
//   ratio(c) = sum_i c_i density_i / || sum_i c_i P_i ||_(conjugate shape)
// over nonnegative coefficients.  Start from the best single atom, then
// repeatedly pick a promising coordinate (largest ratio derivative,
// refreshed every few steps) and optimise it by golden section, until the
// adjustment budget is exhausted.  Every computed ratio is a certified
// lower bound for the interpolation constant of the truncation; the
// search being deterministic, traces are reproducible byte for byte.
struct DualSearchOptions {
    int budget = 96;
    int golden_iters = 24;
    int refresh_every = 4; // gradient recomputation interval
    BoundaryGridOptions grid{1024, 4.0, 4.0, false, 1};
    unsigned threads = 1;
};

struct DualSearchRow {
    int iteration = 0;
    std::size_t support = 0;
    double objective = 0.0;
    double constraint = 0.0;
    double ratio = 0.0;
    std::size_t adjusted = 0;
    double coeff = 0.0;
};

struct DualSearchResult {
    std::vector<double> coeffs; // full length, mostly zero
    std::vector<std::size_t> support;
    double objective = 0.0;
    double constraint = 0.0;
    double ratio = 0.0;
    std::vector<DualSearchRow> trace;
};

DualSearchResult dual_ratio_search(const GeneratedSequence& seq,
                                   const OrliczShape& shape,
                                   std::span<const double> densities,
                                   const DualSearchOptions& opts);

// -------------------------------------------------- growth vs point rule

// Per-stage comparison of the truncated density of the crowded sequence
// at lam_{n,0} against the growth model 4 / ((1-r) ln^eps ln 1/(1-r)) and
// against what pointwise evaluation of functions with
// psi_eps-integrable boundary growth could tolerate,
// psi_eps^{-1}(cf / (1-r)).  band_ratio uses the tail-inclusive upper
// density; rows whose band_ratio strays from the median by more than 1.5x
// are flagged.
struct GrowthRow {
    int n = 0;
    double r = 0.0;
    double phi_trunc = 0.0;
    double tail_bound = 0.0;
    double phi_upper = 0.0;
    double tail_fraction = 0.0;
    double model = 0.0;
    double band_ratio = 0.0;       // phi_upper / model
    double band_ratio_trunc = 0.0; // phi_trunc / model
    double scaled_upper = 0.0;     // phi_upper * (1-r) * (ln ln 1/(1-r))^eps
    double scaled_trunc = 0.0;     // same with phi_trunc
    std::vector<double> psi_inv;   // one per cf entry
    std::vector<double> incompat;  // phi_upper / psi_inv
    bool flagged = false;
};

std::vector<GrowthRow> growth_vs_pointeval(double eps, int n_lo, int n_hi,
                                           int j_offset,
                                           std::span<const double> cf,
                                           unsigned threads = 1);

// ------------------------------------------------------- split and verify

// Splits a delta-separated sequence into two parts by alternating along
// the (dyadic layer, argument) order.  Throws if the separation
// precondition fails.
struct SplitResult {
    std::array<std::vector<std::size_t>, 2> parts;
    double separation_full = 0.0;
    std::array<double, 2> separation_part{1.0, 1.0};
};

SplitResult comparable_split(const GeneratedSequence& seq, double delta,
                             unsigned threads = 1);

// Fits two-sided comparability x/b - alpha <= y <= b x + alpha between
// the part log-densities x, y on a deterministic grid kept
// pseudohyperbolically clear of the sequence, then measures the defect of
//   phi_part >= c phi_full - eta,  c = b/(b+1),
// at every member.  Failures are reported with a witness, not thrown.
struct ComparabilityEstimate {
    double b = 1.0;
    double a = 1.0;   // exp(-alpha)
    double alpha = 0.0;
    double c = 0.5;
    double eta = 0.0;
    bool fit_ok = false;
    bool verify_ok = false;
    DiskPoint witness{};
    std::size_t grid_size = 0;
    double b_refined = 0.0; // from a doubled grid, for stability reporting
};

struct ComparabilityOptions {
    double exclusion_frac = 0.5; // grid keeps rho > exclusion_frac * delta
    double b_cap = 8.0;
    double a_floor = 1e-4;
    double eta_cap = 10.0;
    int grid_scale = 1;
    bool refine_check = true;
    unsigned threads = 1;
};

ComparabilityEstimate comparability_verify(
    const GeneratedSequence& seq, const SplitResult& split, double delta,
    const ComparabilityOptions& opts);

// -------------------------------------------------------- combined report

struct CrowdedReportOptions {
    double eps = 1.0;
    int n_lo = 8;
    int n_hi = 14;
    int j_offset = 16;
    std::vector<double> cf = {1.0, 10.0, 100.0};
    int64_t series_terms = 1000000;
    unsigned threads = 1;
};

struct CrowdedReport {
    CrowdedReportOptions opts;
    std::vector<GrowthRow> rows;
    double separation = 0.0;       // of the n_hi truncation
    CarlesonResult carleson;       // on the n_hi truncation
    SeriesMembership shadow_half;  // delta = eps/2
    SeriesMembership shadow_full;  // delta = eps
    std::map<std::string, std::string> verdicts;
};

CrowdedReport crowded_report(const CrowdedReportOptions& opts);

} // namespace disklab
