#include "acop/autocopula.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <numeric>
#include <stdexcept>
#include <string>

#include "acop/error.hpp"
#include "acop/simd/kernels.hpp"
#include "acop/stats.hpp"

namespace acop {

PitSeries pit_transform(const ObservationSeries& data, const MarginalModel& marginal) {
    PitSeries out;
    out.dates.reserve(data.size());
    out.values.reserve(data.size());
    for (const auto& r : data.records()) {
        const double v = marginal.cdf(r.date, r.value);
        if (!std::isfinite(v)) throw NumericError("pit_transform: non-finite CDF value at " + format_date(r.date));
        out.dates.push_back(r.date);
        out.values.push_back(std::clamp(v, kPitClamp, 1.0 - kPitClamp));
    }
    return out;
}

std::vector<PitPair> lag_pairs(const PitSeries& pit) {
    std::vector<PitPair> out;
    for (std::size_t t = 1; t < pit.values.size(); ++t) {
        if (pit.dates[t] - pit.dates[t - 1] == std::chrono::days{1}) out.push_back({pit.values[t - 1], pit.values[t]});
    }
    return out;
}

std::vector<PitPair> lag_pairs(std::span<const double> values) {
    std::vector<PitPair> out;
    if (values.size() < 2) return out;
    out.reserve(values.size() - 1);
    for (std::size_t t = 1; t < values.size(); ++t) out.push_back({values[t - 1], values[t]});
    return out;
}

// ---------------------------------------------------------------------------
// Partition

RectPartition::RectPartition(std::vector<Rect> rects, std::size_t total_count)
    : rects_(std::move(rects)), total_(total_count) {
    std::size_t sum = 0;
    for (const auto& r : rects_) {
        if (r.count == 0) throw std::invalid_argument("partition rectangle with zero count");
        if (!(0.0 <= r.u1_lo && r.u1_lo < r.u1_hi && r.u1_hi <= 1.0 && 0.0 <= r.u2_lo && r.u2_lo < r.u2_hi &&
              r.u2_hi <= 1.0)) {
            throw std::invalid_argument("partition rectangle outside the unit square or empty");
        }
        sum += r.count;
    }
    if (sum != total_) throw std::invalid_argument("partition counts do not sum to total_count");
    if (rects_.empty()) throw std::invalid_argument("empty partition");
}

std::size_t default_target_per_rect(std::size_t pair_count) {
    return std::max<std::size_t>(32, (pair_count + 255) / 256);
}

namespace {

constexpr double kTieSpread = 1e-12;

// Spreads runs of equal values symmetrically (one-sided at 0 and 1) so that
// all coordinates become distinct; a run's total spread is at most 1e-12.
std::vector<double> separate_ties(std::span<const double> values) {
    std::vector<double> out(values.begin(), values.end());
    std::vector<std::size_t> order(values.size());
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return values[a] < values[b]; });
    std::size_t i = 0;
    while (i < order.size()) {
        std::size_t j = i + 1;
        while (j < order.size() && values[order[j]] == values[order[i]]) ++j;
        const std::size_t run = j - i;
        if (run > 1) {
            const double v = values[order[i]];
            const double below = i > 0 ? v - values[order[i - 1]] : v;
            const double above = j < order.size() ? values[order[j]] - v : 1.0 - v;
            double offset_lo;
            double span;
            if (below <= 0.0) {
                span = std::min(kTieSpread, 0.5 * above);
                offset_lo = 0.0;
            } else if (above <= 0.0) {
                span = std::min(kTieSpread, 0.5 * below);
                offset_lo = -span;
            } else {
                span = std::min({kTieSpread, below, above});
                offset_lo = -0.5 * span;
            }
            const double step = span / static_cast<double>(run - 1);
            for (std::size_t k = 0; k < run; ++k) out[order[i + k]] = v + offset_lo + step * static_cast<double>(k);
            for (std::size_t k = 1; k < run; ++k) {
                if (!(out[order[i + k]] > out[order[i + k - 1]])) {
                    throw NumericError("build_partition: too many tied coordinates at " + std::to_string(v) +
                                       " to separate within 1e-12");
                }
            }
        }
        i = j;
    }
    return out;
}

struct Splitter {
    const std::vector<double>& a;  // prev axis
    const std::vector<double>& b;  // next axis
    std::size_t target;
    std::vector<Rect> leaves;

    void split(std::vector<std::size_t>& idx, std::size_t first, std::size_t last, Rect box, int axis) {
        const std::size_t n = last - first;
        if (n <= target) {
            box.count = n;
            leaves.push_back(box);
            return;
        }
        const auto& coord = axis == 0 ? a : b;
        auto begin = idx.begin() + static_cast<std::ptrdiff_t>(first);
        auto end = idx.begin() + static_cast<std::ptrdiff_t>(last);
        std::sort(begin, end, [&](std::size_t p, std::size_t q) { return coord[p] < coord[q]; });
        const std::size_t k = n / 2;
        const double cut = 0.5 * (coord[idx[first + k - 1]] + coord[idx[first + k]]);
        Rect lo = box;
        Rect hi = box;
        if (axis == 0) {
            lo.u1_hi = cut;
            hi.u1_lo = cut;
        } else {
            lo.u2_hi = cut;
            hi.u2_lo = cut;
        }
        split(idx, first, first + k, lo, 1 - axis);
        split(idx, first + k, last, hi, 1 - axis);
    }
};

}  // namespace

RectPartition build_partition(std::span<const PitPair> pairs, std::size_t target_per_rect) {
    if (target_per_rect < 1) throw std::invalid_argument("build_partition: target_per_rect must be >= 1");
    if (pairs.size() < 4 * target_per_rect) {
        throw DataError("build_partition: need at least " + std::to_string(4 * target_per_rect) +
                        " pairs for target " + std::to_string(target_per_rect) + ", got " +
                        std::to_string(pairs.size()));
    }
    std::vector<double> a(pairs.size());
    std::vector<double> b(pairs.size());
    for (std::size_t i = 0; i < pairs.size(); ++i) {
        if (!(pairs[i].prev >= 0.0 && pairs[i].prev <= 1.0 && pairs[i].next >= 0.0 && pairs[i].next <= 1.0)) {
            throw DataError("build_partition: pair " + std::to_string(i) + " outside [0,1]^2");
        }
        a[i] = pairs[i].prev;
        b[i] = pairs[i].next;
    }
    a = separate_ties(a);
    b = separate_ties(b);
    std::vector<std::size_t> idx(pairs.size());
    std::iota(idx.begin(), idx.end(), 0);
    Splitter s{a, b, target_per_rect, {}};
    s.split(idx, 0, idx.size(), Rect{0.0, 1.0, 0.0, 1.0, 0}, 0);
    return RectPartition(std::move(s.leaves), pairs.size());
}

// ---------------------------------------------------------------------------
// Piecewise-linear helpers

namespace {

// Index i with knots[i] <= v < knots[i+1], clamped to [0, n-2].
std::size_t segment_of(std::span<const double> knots, double v) {
    const auto it = std::upper_bound(knots.begin(), knots.end(), v);
    const auto i = static_cast<std::size_t>(std::max<std::ptrdiff_t>(it - knots.begin() - 1, 0));
    return std::min(i, knots.size() - 2);
}

double interpolate(std::span<const double> xs, std::span<const double> ys, double v) {
    const std::size_t i = segment_of(xs, v);
    const double t = (v - xs[i]) / (xs[i + 1] - xs[i]);
    return ys[i] + t * (ys[i + 1] - ys[i]);
}

}  // namespace

double PiecewiseLinear::operator()(double u) const { return interpolate(x, y, std::clamp(u, x.front(), x.back())); }

double inverse_conditional(const PiecewiseLinear& f, double target) {
    if (f.x.size() < 2 || f.x.size() != f.y.size()) throw std::invalid_argument("inverse_conditional: bad knots");
    if (!(target >= f.y.front() && target <= f.y.back())) {
        throw DomainError("inverse_conditional: target outside the function's range");
    }
    std::size_t lo = 0;
    std::size_t hi = f.y.size() - 1;
    while (hi - lo > 1) {
        const std::size_t mid = lo + (hi - lo) / 2;
        if (f.y[mid] <= target) lo = mid;
        else hi = mid;
    }
    const double dy = f.y[hi] - f.y[lo];
    if (!(dy > 0.0)) return f.x[lo];
    return f.x[lo] + (target - f.y[lo]) / dy * (f.x[hi] - f.x[lo]);
}

// ---------------------------------------------------------------------------
// Empirical autocopula

EmpiricalAutocopula::EmpiricalAutocopula(RectPartition partition) : partition_(std::move(partition)) {
    const auto rects = partition_.rects();
    for (const auto& r : rects) {
        x_edges_.push_back(r.u1_lo);
        x_edges_.push_back(r.u1_hi);
        y_edges_.push_back(r.u2_lo);
        y_edges_.push_back(r.u2_hi);
    }
    for (auto* e : {&x_edges_, &y_edges_}) {
        std::sort(e->begin(), e->end());
        e->erase(std::unique(e->begin(), e->end()), e->end());
        if (e->front() != 0.0 || e->back() != 1.0) throw NumericError("copula partition does not span [0,1]");
    }
    const std::size_t nx = x_edges_.size();
    const std::size_t ny = y_edges_.size();
    if (nx * ny > kMaxRefinedGridCorners) {
        throw NumericError("copula refined grid too large (" + std::to_string(nx) + " x " + std::to_string(ny) +
                           "); increase target_per_rect");
    }

    // Cell masses are held as integer multiples of 2^-52 so that every partial sum, and with it every
    // rectangle difference of the cumulative table, is exact. Rectangle masses count/N are apportioned
    // by largest remainder, first across rectangles to total exactly 1, then across each rectangle's
    // refined cells.
    constexpr double kUnit = 4503599627370496.0;  // 2^52
    const auto apportion = [](std::int64_t total, const std::vector<double>& shares, std::vector<std::int64_t>& out) {
        out.assign(shares.size(), 0);
        std::vector<std::pair<double, std::size_t>> rem(shares.size());
        std::int64_t used = 0;
        for (std::size_t k = 0; k < shares.size(); ++k) {
            const double f = std::floor(shares[k]);
            out[k] = static_cast<std::int64_t>(f);
            used += out[k];
            rem[k] = {shares[k] - f, k};
        }
        std::stable_sort(rem.begin(), rem.end(), [](const auto& a, const auto& b) { return a.first > b.first; });
        for (std::size_t k = 0; used < total; k = (k + 1) % rem.size(), ++used) ++out[rem[k].second];
    };

    density_.assign((nx - 1) * (ny - 1), -1.0);
    std::vector<std::int64_t> units((nx - 1) * (ny - 1), 0);
    const double total = static_cast<double>(partition_.total_count());
    std::vector<double> shares(rects.size());
    for (std::size_t k = 0; k < rects.size(); ++k) shares[k] = static_cast<double>(rects[k].count) / total * kUnit;
    std::vector<std::int64_t> rect_units;
    apportion(static_cast<std::int64_t>(kUnit), shares, rect_units);

    std::vector<std::int64_t> cell_units;
    for (std::size_t k = 0; k < rects.size(); ++k) {
        const auto& r = rects[k];
        const auto i0 = static_cast<std::size_t>(std::lower_bound(x_edges_.begin(), x_edges_.end(), r.u1_lo) - x_edges_.begin());
        const auto i1 = static_cast<std::size_t>(std::lower_bound(x_edges_.begin(), x_edges_.end(), r.u1_hi) - x_edges_.begin());
        const auto j0 = static_cast<std::size_t>(std::lower_bound(y_edges_.begin(), y_edges_.end(), r.u2_lo) - y_edges_.begin());
        const auto j1 = static_cast<std::size_t>(std::lower_bound(y_edges_.begin(), y_edges_.end(), r.u2_hi) - y_edges_.begin());
        const double d = static_cast<double>(r.count) / (total * r.area());
        shares.clear();
        for (std::size_t i = i0; i < i1; ++i) {
            for (std::size_t j = j0; j < j1; ++j) {
                double& cell = density_[i * (ny - 1) + j];
                if (cell >= 0.0) throw NumericError("copula partition rectangles overlap");
                cell = d;
                const double area = (x_edges_[i + 1] - x_edges_[i]) * (y_edges_[j + 1] - y_edges_[j]);
                shares.push_back(static_cast<double>(rect_units[k]) * area / r.area());
            }
        }
        apportion(rect_units[k], shares, cell_units);
        std::size_t c = 0;
        for (std::size_t i = i0; i < i1; ++i)
            for (std::size_t j = j0; j < j1; ++j) units[i * (ny - 1) + j] = cell_units[c++];
    }
    for (double d : density_)
        if (d < 0.0) throw NumericError("copula partition leaves part of the square uncovered");

    // Cumulative masses: per-column running sums in y, then accumulated in x, all in integer units.
    std::vector<std::int64_t> cum(nx * ny, 0);
    for (std::size_t i = 0; i + 1 < nx; ++i) {
        std::int64_t run = 0;
        cum[(i + 1) * ny] = cum[i * ny];
        for (std::size_t j = 0; j + 1 < ny; ++j) {
            run += units[i * (ny - 1) + j];
            cum[(i + 1) * ny + j + 1] = cum[i * ny + j + 1] + run;
        }
    }
    if (cum.back() != static_cast<std::int64_t>(kUnit)) throw NumericError("copula mass table does not total one");
    mass_.resize(nx * ny);
    for (std::size_t k = 0; k < cum.size(); ++k) mass_[k] = static_cast<double>(cum[k]) / kUnit;

    p1_.resize(nx);
    p2_.resize(ny);
    for (std::size_t i = 0; i < nx; ++i) p1_[i] = mass_[i * ny + ny - 1];
    for (std::size_t j = 0; j < ny; ++j) p2_[j] = mass_[(nx - 1) * ny + j];
    for (std::size_t i = 1; i < nx; ++i)
        if (!(p1_[i] > p1_[i - 1])) throw NumericError("copula margin Phi1 not strictly increasing");
    for (std::size_t j = 1; j < ny; ++j)
        if (!(p2_[j] > p2_[j - 1])) throw NumericError("copula margin Phi2 not strictly increasing");
}

double EmpiricalAutocopula::phi(double x, double y) const {
    x = std::clamp(x, 0.0, 1.0);
    y = std::clamp(y, 0.0, 1.0);
    const std::size_t ny = y_edges_.size();
    const std::size_t i = segment_of(x_edges_, x);
    const std::size_t j = segment_of(y_edges_, y);
    const double s = (x - x_edges_[i]) / (x_edges_[i + 1] - x_edges_[i]);
    const double t = (y - y_edges_[j]) / (y_edges_[j + 1] - y_edges_[j]);
    const double m00 = mass_[i * ny + j];
    const double m01 = mass_[i * ny + j + 1];
    const double m10 = mass_[(i + 1) * ny + j];
    const double m11 = mass_[(i + 1) * ny + j + 1];
    return (1 - s) * ((1 - t) * m00 + t * m01) + s * ((1 - t) * m10 + t * m11);
}

double EmpiricalAutocopula::density(double x, double y) const {
    const std::size_t i = segment_of(x_edges_, std::clamp(x, 0.0, 1.0));
    const std::size_t j = segment_of(y_edges_, std::clamp(y, 0.0, 1.0));
    return density_[i * (y_edges_.size() - 1) + j];
}

double EmpiricalAutocopula::phi1(double x) const { return interpolate(x_edges_, p1_, std::clamp(x, 0.0, 1.0)); }
double EmpiricalAutocopula::phi2(double y) const { return interpolate(y_edges_, p2_, std::clamp(y, 0.0, 1.0)); }
double EmpiricalAutocopula::phi1_inverse(double u) const { return interpolate(p1_, x_edges_, std::clamp(u, 0.0, 1.0)); }
double EmpiricalAutocopula::phi2_inverse(double u) const { return interpolate(p2_, y_edges_, std::clamp(u, 0.0, 1.0)); }

double EmpiricalAutocopula::evaluate(double u1, double u2) const {
    // C is bilinear on the grid p1 x p2 with corner values mass_.
    u1 = std::clamp(u1, 0.0, 1.0);
    u2 = std::clamp(u2, 0.0, 1.0);
    const std::size_t ny = y_edges_.size();
    const std::size_t i = segment_of(p1_, u1);
    const std::size_t j = segment_of(p2_, u2);
    const double s = (u1 - p1_[i]) / (p1_[i + 1] - p1_[i]);
    const double t = (u2 - p2_[j]) / (p2_[j + 1] - p2_[j]);
    const double m00 = mass_[i * ny + j];
    const double m01 = mass_[i * ny + j + 1];
    const double m10 = mass_[(i + 1) * ny + j];
    const double m11 = mass_[(i + 1) * ny + j + 1];
    return (1 - s) * ((1 - t) * m00 + t * m01) + s * ((1 - t) * m10 + t * m11);
}

double EmpiricalAutocopula::copula_density(double u1, double u2) const {
    const std::size_t i = segment_of(p1_, std::clamp(u1, 0.0, 1.0));
    const std::size_t j = segment_of(p2_, std::clamp(u2, 0.0, 1.0));
    const double cell_mass = density_[i * (y_edges_.size() - 1) + j] * (x_edges_[i + 1] - x_edges_[i]) *
                             (y_edges_[j + 1] - y_edges_[j]);
    return cell_mass / ((p1_[i + 1] - p1_[i]) * (p2_[j + 1] - p2_[j]));
}

std::size_t EmpiricalAutocopula::column_of(double u1) const { return segment_of(p1_, u1); }

double EmpiricalAutocopula::conditional_knot(std::size_t i, double t, double u1, std::size_t j,
                                             ConditioningMode mode) const {
    const std::size_t ny = y_edges_.size();
    const double lo = mass_[i * ny + j];
    const double hi = mass_[(i + 1) * ny + j];
    if (mode == ConditioningMode::partial || i == 0) return (hi - lo) / (p1_[i + 1] - p1_[i]);
    return ((1 - t) * lo + t * hi) / u1;
}

PiecewiseLinear EmpiricalAutocopula::conditional_cdf(double u1) const {
    if (!(u1 > 0.0 && u1 <= 1.0)) throw DomainError("conditional_cdf: u1 must lie in (0,1]");
    const std::size_t i = column_of(u1);
    const double t = (u1 - p1_[i]) / (p1_[i + 1] - p1_[i]);
    PiecewiseLinear f{p2_, std::vector<double>(p2_.size())};
    for (std::size_t j = 0; j < p2_.size(); ++j) f.y[j] = conditional_knot(i, t, u1, j, ConditioningMode::cumulative);
    f.y.front() = 0.0;
    f.y.back() = 1.0;
    return f;
}

PiecewiseLinear EmpiricalAutocopula::conditional_partial_cdf(double u1) const {
    if (!(u1 >= 0.0 && u1 <= 1.0)) throw DomainError("conditional_partial_cdf: u1 must lie in [0,1]");
    const std::size_t i = column_of(u1);
    PiecewiseLinear f{p2_, std::vector<double>(p2_.size())};
    for (std::size_t j = 0; j < p2_.size(); ++j) f.y[j] = conditional_knot(i, 0.0, u1, j, ConditioningMode::partial);
    f.y.front() = 0.0;
    f.y.back() = 1.0;
    return f;
}

double EmpiricalAutocopula::sample_conditional(double u1, double uniform, ConditioningMode mode) const {
    if (!(uniform > 0.0 && uniform < 1.0)) throw DomainError("sample_conditional: U must lie in (0,1)");
    u1 = std::clamp(u1, 0.0, 1.0);
    const std::size_t i = column_of(u1);
    const double t = (u1 - p1_[i]) / (p1_[i + 1] - p1_[i]);
    const std::size_t last = p2_.size() - 1;
    auto g = [&](std::size_t j) {
        if (j == 0) return 0.0;
        if (j == last) return 1.0;
        return conditional_knot(i, t, u1, j, mode);
    };
    std::size_t lo = 0;
    std::size_t hi = last;
    while (hi - lo > 1) {
        const std::size_t mid = lo + (hi - lo) / 2;
        if (g(mid) <= uniform) lo = mid;
        else hi = mid;
    }
    const double glo = g(lo);
    const double ghi = g(hi);
    const double frac = ghi > glo ? std::clamp((uniform - glo) / (ghi - glo), 0.0, 1.0) : 0.0;
    return p2_[lo] + frac * (p2_[hi] - p2_[lo]);
}

// ---------------------------------------------------------------------------
// Tail dependence

namespace {

void check_grid(std::span<const double> grid) {
    for (double u : grid)
        if (!(u > 0.0 && u < 1.0)) throw DomainError("tail dependence grid values must lie in (0,1)");
}

}  // namespace

TailCurves tail_dependence_curves(std::span<const PitPair> pairs, std::span<const double> grid) {
    check_grid(grid);
    if (pairs.empty()) throw DataError("tail_dependence_curves: no pairs");
    std::vector<double> a(pairs.size());
    std::vector<double> b(pairs.size());
    for (std::size_t i = 0; i < pairs.size(); ++i) {
        a[i] = pairs[i].prev;
        b[i] = pairs[i].next;
    }
    const auto r = ordinal_ranks(a);
    const auto s = ordinal_ranks(b);
    const double n = static_cast<double>(pairs.size());
    TailCurves out{{grid.begin(), grid.end()}, {}, {}};
    const auto& k = simd::kernels();
    for (double u : grid) {
        const auto kk = static_cast<std::int32_t>(std::floor(u * n));
        const auto counts = k.joint_tail_counts(r, s, kk);
        out.lower.push_back(std::clamp(static_cast<double>(counts.lower) / n / u, 0.0, 1.0));
        out.upper.push_back(std::clamp(static_cast<double>(counts.upper) / n / (1.0 - u), 0.0, 1.0));
    }
    return out;
}

TailCurves tail_dependence_curves(const CopulaFunction& copula, std::span<const double> grid) {
    check_grid(grid);
    TailCurves out{{grid.begin(), grid.end()}, {}, {}};
    for (double u : grid) {
        const double cuu = copula(u, u);
        out.lower.push_back(std::clamp(cuu / u, 0.0, 1.0));
        out.upper.push_back(std::clamp((1.0 - copula(1.0, u) - copula(u, 1.0) + cuu) / (1.0 - u), 0.0, 1.0));
    }
    return out;
}

std::vector<double> probability_grid(double start, double stop, double step) {
    if (!(step > 0.0) || !(stop >= start)) throw std::invalid_argument("probability_grid: bad range");
    const auto n = static_cast<std::size_t>(std::floor((stop - start) / step + 1e-9)) + 1;
    std::vector<double> out(n);
    for (std::size_t i = 0; i < n; ++i) out[i] = std::round((start + step * static_cast<double>(i)) * 1e12) / 1e12;
    return out;
}

}  // namespace acop
