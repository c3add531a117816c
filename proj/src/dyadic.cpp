#include "disklab/dyadic.hpp"

#include <cmath>
#include <map>
#include <stdexcept>

namespace disklab {

namespace {
constexpr double kPi = 3.14159265358979323846;
}

DyadicIndex square_of(DiskPoint z) {
    const double r = z.abs();
    int n = 0;
    if (r >= 0.5) n = int(std::floor(-std::log2(1.0 - r)));
    if (n < 0) n = 0;
    double th = std::atan2(z.im, z.re);
    if (th < 0.0) th += 2.0 * kPi;
    const double width = std::exp2(double(n));
    int64_t k = int64_t(std::floor(th / (2.0 * kPi) * width));
    if (k >= int64_t(width)) k = int64_t(width) - 1; // guard the wrap seam
    return DyadicIndex{n, k};
}

DyadicSquare square(DyadicIndex idx) {
    if (idx.n < 0 || idx.k < 0 || idx.k >= (int64_t{1} << idx.n))
        throw std::invalid_argument("square: index out of range");
    const double w = 2.0 * kPi / std::exp2(double(idx.n));
    return DyadicSquare{idx, 1.0 - std::exp2(double(-idx.n)),
                        1.0 - std::exp2(double(-idx.n - 1)),
                        double(idx.k) * w, double(idx.k + 1) * w};
}

int color_class(DyadicIndex idx) {
    return 1 + 2 * (idx.n & 1) + int(idx.k & 1);
}

std::array<std::vector<std::size_t>, 4> split4(const GeneratedSequence& seq) {
    std::array<std::vector<std::size_t>, 4> out;
    for (std::size_t i = 0; i < seq.size(); ++i)
        out[std::size_t(color_class(square_of(seq.points[i])) - 1)].push_back(i);
    return out;
}

double harnack_factor(const DyadicSquare& sq) {
    const double rs[3] = {sq.r_lo, 0.5 * (sq.r_lo + sq.r_hi), sq.r_hi};
    const double ts[3] = {sq.theta_lo, 0.5 * (sq.theta_lo + sq.theta_hi),
                          sq.theta_hi};
    DiskPoint pts[9];
    int m = 0;
    for (double r : rs)
        for (double t : ts)
            pts[m++] = DiskPoint{r * std::cos(t), r * std::sin(t)};
    double d = 0.0;
    for (int i = 0; i < m; ++i)
        for (int j = i + 1; j < m; ++j)
            d = std::max(d, pseudo_distance(pts[i], pts[j]));
    return (1.0 + d) / (1.0 - d);
}

std::vector<SquareExtreme> per_square_extreme(
    const GeneratedSequence& seq, std::span<const std::size_t> subset,
    std::span<const double> densities) {
    if (densities.size() != seq.size())
        throw std::invalid_argument(
            "per_square_extreme: densities must cover the whole sequence");
    std::vector<SquareExtreme> out;
    std::map<std::pair<int, int64_t>, std::size_t> slot;
    for (std::size_t i : subset) {
        const DyadicIndex sq = square_of(seq.points[i]);
        const auto key = std::make_pair(sq.n, sq.k);
        auto it = slot.find(key);
        if (it == slot.end()) {
            slot.emplace(key, out.size());
            out.push_back(SquareExtreme{sq, i, densities[i]});
        } else if (densities[i] > out[it->second].density) {
            out[it->second] = SquareExtreme{sq, i, densities[i]};
        }
    }
    return out;
}

} // namespace disklab
