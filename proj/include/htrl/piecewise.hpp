#pragma once

// Piecewise-constant functions on [0,1]: estimators, truths, and their exact
// L2(P) distance under the uniform design measure (closed form by merging
// breakpoints, no quadrature).

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <stdexcept>
#include <string>
#include <vector>

namespace htrl {

struct PiecewiseConstantFn {
    std::vector<double> breakpoints;  // strictly increasing, first 0, last 1
    std::vector<double> levels;       // one per segment
    double level_bound = 1.0;

    static PiecewiseConstantFn constant(double level, double bound = 1.0) {
        return PiecewiseConstantFn{{0.0, 1.0}, {level}, bound};
    }

    double operator()(double x) const {
        auto it = std::upper_bound(breakpoints.begin(), breakpoints.end(), x);
        std::size_t seg = (it == breakpoints.begin())
                              ? 0
                              : static_cast<std::size_t>(it - breakpoints.begin()) - 1;
        if (seg >= levels.size()) seg = levels.size() - 1;
        return levels[seg];
    }
};

inline void validate(const PiecewiseConstantFn& f) {
    if (f.breakpoints.size() != f.levels.size() + 1)
        throw std::invalid_argument("PiecewiseConstantFn: breakpoints must be levels+1");
    if (f.breakpoints.front() != 0.0 || f.breakpoints.back() != 1.0)
        throw std::invalid_argument("PiecewiseConstantFn: domain must be [0,1]");
    for (std::size_t i = 1; i < f.breakpoints.size(); ++i)
        if (!(f.breakpoints[i] > f.breakpoints[i - 1]))
            throw std::invalid_argument("PiecewiseConstantFn: breakpoints not increasing");
    for (double lv : f.levels)
        if (std::fabs(lv) > f.level_bound * (1.0 + 1e-12))
            throw std::invalid_argument("PiecewiseConstantFn: level exceeds bound");
}

// Serialized fit record {breakpoints, levels, rss} with full precision.
inline std::string to_json_record(const PiecewiseConstantFn& f, double rss) {
    auto num = [](double v) {
        char buf[40];
        std::snprintf(buf, sizeof(buf), "%.17g", v);
        return std::string(buf);
    };
    std::string out = "{\"breakpoints\": [";
    for (std::size_t i = 0; i < f.breakpoints.size(); ++i)
        out += (i ? ", " : "") + num(f.breakpoints[i]);
    out += "], \"levels\": [";
    for (std::size_t i = 0; i < f.levels.size(); ++i) out += (i ? ", " : "") + num(f.levels[i]);
    out += "], \"rss\": " + num(rss) + "}";
    return out;
}

// Exact || f - g ||_{L2(P)} with P uniform on [0,1].
inline double l2_risk(const PiecewiseConstantFn& f, const PiecewiseConstantFn& g) {
    double acc = 0.0;
    std::size_t i = 0, j = 0;
    double x = 0.0;
    while (x < 1.0) {
        const double next = std::min(f.breakpoints[i + 1], g.breakpoints[j + 1]);
        const double d = f.levels[i] - g.levels[j];
        acc += d * d * (next - x);
        x = next;
        if (f.breakpoints[i + 1] <= x && i + 1 < f.levels.size()) ++i;
        if (g.breakpoints[j + 1] <= x && j + 1 < g.levels.size()) ++j;
    }
    return std::sqrt(acc);
}

}  // namespace htrl
