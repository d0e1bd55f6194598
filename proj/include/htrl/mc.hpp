#pragma once

#include <cmath>
#include <cstddef>
#include <vector>

namespace htrl {

// A Monte Carlo mean with its standard error.
struct McEstimate {
    double mean = 0.0;
    double se = 0.0;
    std::size_t reps = 0;
};

inline McEstimate mc_summarize(const std::vector<double>& values) {
    McEstimate out;
    out.reps = values.size();
    if (values.empty()) return out;
    double sum = 0.0;
    for (double v : values) sum += v;
    out.mean = sum / static_cast<double>(values.size());
    if (values.size() > 1) {
        double ss = 0.0;
        for (double v : values) {
            const double d = v - out.mean;
            ss += d * d;
        }
        out.se = std::sqrt(ss / (static_cast<double>(values.size() - 1) *
                                 static_cast<double>(values.size())));
    }
    return out;
}

}  // namespace htrl
