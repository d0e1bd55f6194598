#pragma once

// Exact suprema of weighted empirical sums over the interval-indicator class:
//   sup over closed intervals I of |sum_i w_i 1[x_i in I]|, subject to a
//   length constraint. The supremum over real intervals is attained at
//   design-point-delimited index windows, so the search runs over windows
//   [i..j] with x_j - x_i <= max_len; min_len <= 1 is always satisfiable by
//   extending the window's span inside [0,1] and only rules everything out
//   when min_len > 1. Sliding-window extrema of the prefix sums give O(n).

#include <algorithm>
#include <cstddef>
#include <deque>
#include <stdexcept>
#include <vector>

namespace htrl {

// Sorted design points on [0,1] paired with weights (multipliers, signs,
// or residuals).
struct DesignSample {
    std::vector<double> x;
    std::vector<double> w;
};

inline void validate(const DesignSample& s) {
    if (s.x.size() != s.w.size()) throw std::invalid_argument("DesignSample: length mismatch");
    for (std::size_t i = 0; i < s.x.size(); ++i) {
        if (!(s.x[i] >= 0.0 && s.x[i] <= 1.0))
            throw std::invalid_argument("DesignSample: x outside [0,1]");
        if (i > 0 && s.x[i] < s.x[i - 1])
            throw std::invalid_argument("DesignSample: x not sorted");
    }
}

struct IntervalConstraint {
    double min_len = 0.0;
    double max_len = 1.0;
};

inline void validate(const IntervalConstraint& c) {
    if (!(c.min_len >= 0.0 && c.min_len <= c.max_len && c.max_len <= 1.0))
        throw std::invalid_argument("IntervalConstraint: need 0 <= min_len <= max_len <= 1");
}

struct IntervalSupResult {
    double value = 0.0;
    std::size_t lo = 0, hi = 0;  // maximizing index window, inclusive
    double a = 0.0, b = 0.0;     // a realized interval of admissible length
};

namespace detail {

// Realizes window [x_lo, x_hi] as an interval of length >= min_len in [0,1].
inline void realize_interval(double x_lo, double x_hi, double min_len, double& a, double& b) {
    const double span = x_hi - x_lo;
    const double len = std::max(span, min_len);
    a = std::clamp(x_lo - 0.5 * (len - span), 0.0, 1.0 - len);
    b = a + len;
}

}  // namespace detail

inline IntervalSupResult sup_interval_sum(const DesignSample& sample,
                                          const IntervalConstraint& c = {}) {
    validate(sample);
    validate(c);
    const std::size_t n = sample.x.size();
    if (n == 0) throw std::invalid_argument("sup_interval_sum: empty sample");
    if (c.min_len > 1.0) throw std::invalid_argument("sup_interval_sum: min_len > 1 infeasible");

    std::vector<double> prefix(n + 1, 0.0);
    for (std::size_t i = 0; i < n; ++i) prefix[i + 1] = prefix[i] + sample.w[i];

    // Monotone deques over prefix indices; ties keep the earliest index so
    // the reported window is the lexicographically smallest maximizer.
    std::deque<std::size_t> min_dq, max_dq;
    IntervalSupResult best;
    bool have = false;
    std::size_t lo = 0;  // smallest admissible window start for current j
    for (std::size_t j = 0; j < n; ++j) {
        while (min_dq.size() && prefix[min_dq.back()] > prefix[j]) min_dq.pop_back();
        min_dq.push_back(j);
        while (max_dq.size() && prefix[max_dq.back()] < prefix[j]) max_dq.pop_back();
        max_dq.push_back(j);
        while (sample.x[j] - sample.x[lo] > c.max_len) {
            if (min_dq.front() == lo) min_dq.pop_front();
            if (max_dq.front() == lo) max_dq.pop_front();
            ++lo;
        }
        // Candidates: positive-sum window (subtract min prefix) and
        // negative-sum window (subtract from max prefix).
        const std::size_t i_pos = min_dq.front(), i_neg = max_dq.front();
        const double v_pos = prefix[j + 1] - prefix[i_pos];
        const double v_neg = prefix[i_neg] - prefix[j + 1];
        auto consider = [&](double v, std::size_t i_start) {
            if (!have || v > best.value ||
                (v == best.value && (i_start < best.lo || (i_start == best.lo && j < best.hi)))) {
                have = true;
                best.value = v;
                best.lo = i_start;
                best.hi = j;
            }
        };
        if (v_pos >= v_neg) {
            consider(v_pos, i_pos);
            consider(v_neg, i_neg);
        } else {
            consider(v_neg, i_neg);
            consider(v_pos, i_pos);
        }
    }
    detail::realize_interval(sample.x[best.lo], sample.x[best.hi], c.min_len, best.a, best.b);
    return best;
}

}  // namespace htrl
