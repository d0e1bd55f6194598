#pragma once

// Exact least-squares and least-absolute-deviation fits over the concrete
// function classes used in the rate experiments:
//
//  * single bounded interval bumps {c * 1_[a,b] : |c| <= 1, b-a >= min_len},
//  * bounded step functions with at most k segments (DP, exact),
//  * the same under absolute loss (segment medians via an order-statistic
//    Fenwick tree),
//  * isotonic regression (pool adjacent violators, then box clamp),
//  * one-dimensional linear regression through the origin.
//
// Fits are in-sample-exact on the sorted design; they are converted to
// functions on [0,1] by cutting at midpoints between neighbouring design
// points and extending the end segments to 0 and 1.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <limits>
#include <numeric>
#include <stdexcept>
#include <vector>

#include "piecewise.hpp"

namespace htrl {

struct RegressionData {
    std::vector<double> x;
    std::vector<double> y;
    std::vector<double> xi;  // optional true noise, for oracles
};

namespace detail {

struct SortedData {
    std::vector<double> x, y;
    std::vector<std::size_t> order;  // sorted position -> original index
};

inline SortedData sort_by_x(const RegressionData& data) {
    if (data.x.size() != data.y.size())
        throw std::invalid_argument("RegressionData: length mismatch");
    const std::size_t n = data.x.size();
    SortedData s;
    s.order.resize(n);
    std::iota(s.order.begin(), s.order.end(), std::size_t{0});
    std::stable_sort(s.order.begin(), s.order.end(),
                     [&](std::size_t a, std::size_t b) { return data.x[a] < data.x[b]; });
    s.x.resize(n);
    s.y.resize(n);
    for (std::size_t i = 0; i < n; ++i) {
        s.x[i] = data.x[s.order[i]];
        s.y[i] = data.y[s.order[i]];
    }
    return s;
}

// Converts a segmentation of the sorted design into a function on [0,1];
// boundaries sit at midpoints between neighbouring design points. Zero-width
// segments from duplicate design points are dropped.
inline PiecewiseConstantFn fn_from_segments(const std::vector<double>& xs,
                                            const std::vector<std::size_t>& seg_start,
                                            const std::vector<double>& levels, double bound) {
    PiecewiseConstantFn fn;
    fn.level_bound = bound;
    fn.breakpoints.push_back(0.0);
    for (std::size_t s = 0; s < levels.size(); ++s) {
        double right = 1.0;
        if (s + 1 < levels.size()) {
            const std::size_t cut = seg_start[s + 1];
            right = 0.5 * (xs[cut - 1] + xs[cut]);
        }
        right = std::min(std::max(right, fn.breakpoints.back()), 1.0);
        if (right > fn.breakpoints.back()) {
            fn.breakpoints.push_back(right);
            fn.levels.push_back(levels[s]);
        }
    }
    if (fn.breakpoints.back() < 1.0) {
        // All remaining cuts collapsed; extend the last level to 1.
        fn.breakpoints.push_back(1.0);
        fn.levels.push_back(levels.back());
    }
    return fn;
}

inline double clamp_level(double v, double bound) { return std::clamp(v, -bound, bound); }

}  // namespace detail

// ---------------------------------------------------------------------------
// Interval LSE over {c 1_[a,b] : |c| <= 1, b-a >= min_len} union {0}.
// ---------------------------------------------------------------------------

struct IntervalLseFit {
    PiecewiseConstantFn fn;
    double rss = 0.0;
    bool is_zero = true;
    std::size_t lo = 0, hi = 0;  // maximizing window on the sorted design
    double level = 0.0;
    double a = 0.0, b = 0.0;  // realized interval

    double l2_norm() const { return is_zero ? 0.0 : std::fabs(level) * std::sqrt(b - a); }
};

// Exact minimizer by scanning all index windows whose containing interval can
// reach length min_len without swallowing a neighbouring design point (room
// check); among equal-cost windows the scan-order-first one is kept.
inline IntervalLseFit fit_interval_lse(const RegressionData& data, double min_len) {
    const std::size_t n = data.x.size();
    if (n == 0) throw std::invalid_argument("fit_interval_lse: empty data");
    auto s = detail::sort_by_x(data);

    double syy = 0.0;
    for (double v : s.y) syy += v * v;
    IntervalLseFit fit;
    fit.fn = PiecewiseConstantFn::constant(0.0);
    fit.rss = syy;
    if (min_len > 1.0) return fit;

    std::vector<double> prefix(n + 1, 0.0);
    for (std::size_t i = 0; i < n; ++i) prefix[i + 1] = prefix[i] + s.y[i];

    double best_imp = 0.0;
    std::size_t best_lo = 0, best_hi = 0;
    bool have = false;
    std::size_t j_floor = 0;
    for (std::size_t i = 0; i < n; ++i) {
        const double left = (i == 0) ? 0.0 : s.x[i - 1];
        if (j_floor < i) j_floor = i;
        while (j_floor < n &&
               ((j_floor + 1 < n ? s.x[j_floor + 1] : 1.0) - left) < min_len)
            ++j_floor;
        for (std::size_t j = j_floor; j < n; ++j) {
            const double sum = prefix[j + 1] - prefix[i];
            const double m = static_cast<double>(j - i + 1);
            const double a = std::fabs(sum);
            const double imp = (a <= m) ? a * a / m : 2.0 * a - m;
            if (imp > best_imp) {
                best_imp = imp;
                best_lo = i;
                best_hi = j;
                have = true;
            }
        }
    }
    if (!have) return fit;

    fit.is_zero = false;
    fit.lo = best_lo;
    fit.hi = best_hi;
    const double sum = prefix[best_hi + 1] - prefix[best_lo];
    const double m = static_cast<double>(best_hi - best_lo + 1);
    fit.level = detail::clamp_level(sum / m, 1.0);
    fit.rss = syy - (2.0 * fit.level * sum - fit.level * fit.level * m);

    const double left = (best_lo == 0) ? 0.0 : s.x[best_lo - 1];
    const double right = (best_hi + 1 < n) ? s.x[best_hi + 1] : 1.0;
    const double span = s.x[best_hi] - s.x[best_lo];
    double len = std::max(span, min_len);
    fit.a = std::clamp(s.x[best_lo] - 0.5 * (len - span), left, right - len);
    fit.a = std::clamp(fit.a, 0.0, 1.0 - len);
    if (len == 0.0) {  // point interval: represent with negligible width
        len = 1e-15;
        fit.a = std::min(fit.a, 1.0 - len);
    }
    fit.b = fit.a + len;

    fit.fn.breakpoints.clear();
    fit.fn.levels.clear();
    fit.fn.level_bound = 1.0;
    fit.fn.breakpoints.push_back(0.0);
    if (fit.a > 0.0) {
        fit.fn.breakpoints.push_back(fit.a);
        fit.fn.levels.push_back(0.0);
    }
    fit.fn.breakpoints.push_back(fit.b);
    fit.fn.levels.push_back(fit.level);
    if (fit.b < 1.0) {
        fit.fn.breakpoints.push_back(1.0);
        fit.fn.levels.push_back(0.0);
    }
    return fit;
}

// ---------------------------------------------------------------------------
// Bounded segmented least squares / least absolute deviation, exact DP.
// ---------------------------------------------------------------------------

struct SegmentedFit {
    PiecewiseConstantFn fn;
    double cost = 0.0;                      // rss (LSE) or sad (LAD)
    std::vector<std::size_t> segment_start;  // indices into the sorted design
    std::vector<double> segment_level;
};

namespace detail {

// Shared suffix-DP driver. make_cost_row(i) must return a callable cost(j)
// that is evaluated at j = i, i+1, ..., n-1 in that exact order, so that the
// reconstruction pass recomputes bit-identical costs. The reconstruction
// walks left to right taking the smallest optimal segment end, which yields
// the lexicographically smallest breakpoint sequence among minimizers.
template <typename MakeCostRow, typename LevelOf>
SegmentedFit segmented_dp(const std::vector<double>& xs, std::size_t n, std::size_t k,
                          double bound, const MakeCostRow& make_cost_row,
                          const LevelOf& level_of) {
    constexpr double inf = std::numeric_limits<double>::infinity();
    // dp[s][i]: optimal cost of covering sorted points i..n-1 with <= s segments.
    std::vector<std::vector<double>> dp(k + 1, std::vector<double>(n + 1, inf));
    for (std::size_t s = 0; s <= k; ++s) dp[s][n] = 0.0;
    for (std::size_t ii = n; ii-- > 0;) {
        auto cost = make_cost_row(ii);
        for (std::size_t j = ii; j < n; ++j) {
            const double c = cost(j);
            for (std::size_t s = 1; s <= k; ++s) {
                const double cand = c + dp[s - 1][j + 1];
                if (cand < dp[s][ii]) dp[s][ii] = cand;
            }
        }
    }

    SegmentedFit fit;
    fit.cost = dp[k][0];
    std::size_t pos = 0, s = k;
    while (pos < n) {
        auto cost = make_cost_row(pos);
        bool advanced = false;
        for (std::size_t j = pos; j < n; ++j) {
            const double c = cost(j);
            if (c + dp[s - 1][j + 1] == dp[s][pos]) {
                fit.segment_start.push_back(pos);
                fit.segment_level.push_back(level_of(pos, j));
                pos = j + 1;
                --s;
                advanced = true;
                break;
            }
        }
        if (!advanced) throw std::logic_error("segmented_dp: reconstruction failed");
    }
    fit.fn = fn_from_segments(xs, fit.segment_start, fit.segment_level, bound);
    return fit;
}

}  // namespace detail

// Exact global minimizer of the in-sample RSS over at most k segments with
// per-segment level clamp(mean, +-level_bound). O(k n^2).
inline SegmentedFit fit_segmented_lse(const RegressionData& data, std::size_t k,
                                      double level_bound = 1.0) {
    const std::size_t n = data.x.size();
    if (k < 1 || k > n) throw std::invalid_argument("fit_segmented_lse: need 1 <= k <= n");
    auto s = detail::sort_by_x(data);
    std::vector<double> sy(n + 1, 0.0), syy(n + 1, 0.0);
    for (std::size_t i = 0; i < n; ++i) {
        sy[i + 1] = sy[i] + s.y[i];
        syy[i + 1] = syy[i] + s.y[i] * s.y[i];
    }
    auto level_of = [&](std::size_t i, std::size_t j) {
        const double m = static_cast<double>(j - i + 1);
        return detail::clamp_level((sy[j + 1] - sy[i]) / m, level_bound);
    };
    auto make_row = [&](std::size_t i) {
        return [&, i](std::size_t j) {
            const double m = static_cast<double>(j - i + 1);
            const double sum = sy[j + 1] - sy[i];
            const double c = detail::clamp_level(sum / m, level_bound);
            return (syy[j + 1] - syy[i]) - 2.0 * c * sum + c * c * m;
        };
    };
    return detail::segmented_dp(s.x, n, k, level_bound, make_row, level_of);
}

namespace detail {

// Fenwick tree over value ranks holding counts and sums; supports inserts,
// prefix count/sum at a value, and the order statistic for medians.
class RankedSums {
  public:
    explicit RankedSums(std::vector<double> sorted_values)
        : vals_(std::move(sorted_values)), cnt_(vals_.size() + 1, 0),
          sum_(vals_.size() + 1, 0.0) {}

    void clear() {
        std::fill(cnt_.begin(), cnt_.end(), 0);
        std::fill(sum_.begin(), sum_.end(), 0.0);
        total_ = 0;
    }

    void insert(double v) {
        ++total_;
        for (std::size_t i = rank_of(v); i < cnt_.size(); i += i & (~i + 1)) {
            cnt_[i] += 1;
            sum_[i] += v;
        }
    }

    // Number of inserted elements <= v and their sum.
    std::pair<std::size_t, double> le(double v) const {
        std::size_t idx = static_cast<std::size_t>(
            std::upper_bound(vals_.begin(), vals_.end(), v) - vals_.begin());
        std::size_t c = 0;
        double s = 0.0;
        for (; idx > 0; idx -= idx & (~idx + 1)) {
            c += cnt_[idx];
            s += sum_[idx];
        }
        return {c, s};
    }

    // The r-th smallest inserted element (1-based).
    double order_statistic(std::size_t r) const {
        std::size_t pos = 0, rem = r;
        std::size_t mask = 1;
        while (mask * 2 < cnt_.size()) mask *= 2;
        for (; mask > 0; mask /= 2) {
            const std::size_t next = pos + mask;
            if (next < cnt_.size() && cnt_[next] < rem) {
                rem -= cnt_[next];
                pos = next;
            }
        }
        return vals_[pos];  // pos is 0-based rank of the answer
    }

    std::size_t size() const { return total_; }

  private:
    std::size_t rank_of(double v) const {
        return static_cast<std::size_t>(
                   std::lower_bound(vals_.begin(), vals_.end(), v) - vals_.begin()) +
               1;
    }

    std::vector<double> vals_;
    std::vector<std::size_t> cnt_;
    std::vector<double> sum_;
    std::size_t total_ = 0;
};

}  // namespace detail

// Segmented LAD: per-segment level clamp(lower median, +-level_bound),
// exact DP with O(log n) segment costs.
inline SegmentedFit fit_segmented_lad(const RegressionData& data, std::size_t k,
                                      double level_bound = 1.0) {
    const std::size_t n = data.x.size();
    if (k < 1 || k > n) throw std::invalid_argument("fit_segmented_lad: need 1 <= k <= n");
    auto s = detail::sort_by_x(data);
    std::vector<double> sorted_y = s.y;
    std::sort(sorted_y.begin(), sorted_y.end());
    detail::RankedSums tree(std::move(sorted_y));
    auto level_of = [&](std::size_t i, std::size_t j) {
        std::vector<double> w(s.y.begin() + static_cast<std::ptrdiff_t>(i),
                              s.y.begin() + static_cast<std::ptrdiff_t>(j + 1));
        const std::size_t r = (w.size() + 1) / 2;  // lower median
        std::nth_element(w.begin(), w.begin() + static_cast<std::ptrdiff_t>(r - 1), w.end());
        return detail::clamp_level(w[r - 1], level_bound);
    };
    auto make_row = [&](std::size_t i) {
        tree.clear();
        double running_sum = 0.0;
        return [&, i, running_sum](std::size_t j) mutable {
            tree.insert(s.y[j]);
            running_sum += s.y[j];
            const std::size_t m = j - i + 1;
            const double med = tree.order_statistic((m + 1) / 2);  // lower median
            const double c = detail::clamp_level(med, level_bound);
            const auto [cnt_le, sum_le] = tree.le(c);
            const double above = running_sum - sum_le;
            const std::size_t n_above = m - cnt_le;
            return (above - c * static_cast<double>(n_above)) +
                   (c * static_cast<double>(cnt_le) - sum_le);
        };
    };
    return detail::segmented_dp(s.x, n, k, level_bound, make_row, level_of);
}

// ---------------------------------------------------------------------------
// Isotonic LSE: pool adjacent violators, then clamp to the box. Clamping
// after PAVA is the exact projection onto the order-and-box constraint set.
// ---------------------------------------------------------------------------

inline PiecewiseConstantFn fit_isotonic(const RegressionData& data, double level_bound = 1.0) {
    const std::size_t n = data.x.size();
    if (n == 0) throw std::invalid_argument("fit_isotonic: empty data");
    auto s = detail::sort_by_x(data);

    struct Block {
        double sum;
        std::size_t count;
        std::size_t start;
    };
    std::vector<Block> blocks;
    blocks.reserve(n);
    for (std::size_t i = 0; i < n; ++i) {
        Block b{s.y[i], 1, i};
        while (!blocks.empty() &&
               blocks.back().sum * static_cast<double>(b.count) >=
                   b.sum * static_cast<double>(blocks.back().count)) {
            b.sum += blocks.back().sum;
            b.count += blocks.back().count;
            b.start = blocks.back().start;
            blocks.pop_back();
        }
        blocks.push_back(b);
    }
    std::vector<std::size_t> starts;
    std::vector<double> levels;
    for (const auto& b : blocks) {
        starts.push_back(b.start);
        levels.push_back(
            detail::clamp_level(b.sum / static_cast<double>(b.count), level_bound));
    }
    return detail::fn_from_segments(s.x, starts, levels, level_bound);
}

// ---------------------------------------------------------------------------
// One-dimensional linear LSE through the origin: alpha = sum x y / sum x^2.
// ---------------------------------------------------------------------------

inline double fit_linear_1d(const RegressionData& data) {
    if (data.x.size() != data.y.size() || data.x.empty())
        throw std::invalid_argument("fit_linear_1d: bad data");
    double sxy = 0.0, sxx = 0.0;
    for (std::size_t i = 0; i < data.x.size(); ++i) {
        sxy += data.x[i] * data.y[i];
        sxx += data.x[i] * data.x[i];
    }
    if (sxx == 0.0) throw std::runtime_error("fit_linear_1d: degenerate design, sum x^2 = 0");
    return sxy / sxx;
}

}  // namespace htrl
