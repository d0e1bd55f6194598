#pragma once

// Least non-decreasing concave majorant of points {(k, v_k)}, v_k >= 0,
// anchored at (0, 0). Built as the upper convex hull followed by monotone
// flattening: past the hull's peak the least admissible extension is flat.
// Evaluation is piecewise-linear between knots and flat beyond the last one.

#include <algorithm>
#include <cstddef>
#include <stdexcept>
#include <utility>
#include <vector>

namespace htrl {

class ConcaveMajorant {
  public:
    ConcaveMajorant() = default;
    explicit ConcaveMajorant(std::vector<std::pair<double, double>> knots)
        : knots_(std::move(knots)) {}

    const std::vector<std::pair<double, double>>& knots() const { return knots_; }
    double max_knot() const { return knots_.empty() ? 0.0 : knots_.back().first; }

    double operator()(double k) const {
        if (!(k >= 0.0)) throw std::invalid_argument("ConcaveMajorant: negative argument");
        if (knots_.empty()) return 0.0;
        if (k <= knots_.front().first) return knots_.front().second;
        if (k >= knots_.back().first) return knots_.back().second;
        auto it = std::upper_bound(knots_.begin(), knots_.end(), k,
                                   [](double v, const auto& kn) { return v < kn.first; });
        const auto& hi = *it;
        const auto& lo = *(it - 1);
        const double t = (k - lo.first) / (hi.first - lo.first);
        return lo.second + t * (hi.second - lo.second);
    }

    // Slope of the first linear piece (the steepest one).
    double initial_slope() const {
        if (knots_.size() < 2) return 0.0;
        return (knots_[1].second - knots_[0].second) / (knots_[1].first - knots_[0].first);
    }

  private:
    std::vector<std::pair<double, double>> knots_;  // increasing in k, starts at (0,0)
};

inline ConcaveMajorant least_concave_majorant(std::vector<std::pair<double, double>> pts) {
    bool has_origin = false;
    for (const auto& [k, v] : pts) {
        if (!(k >= 0.0)) throw std::invalid_argument("least_concave_majorant: negative k");
        if (v < 0.0) throw std::invalid_argument("least_concave_majorant: negative value");
        if (k == 0.0) {
            if (v != 0.0)
                throw std::invalid_argument("least_concave_majorant: point at 0 must be (0,0)");
            has_origin = true;
        }
    }
    if (!has_origin) pts.emplace_back(0.0, 0.0);
    std::sort(pts.begin(), pts.end());
    // Collapse duplicate abscissae to their max value.
    std::vector<std::pair<double, double>> uniq;
    for (const auto& p : pts) {
        if (!uniq.empty() && uniq.back().first == p.first)
            uniq.back().second = std::max(uniq.back().second, p.second);
        else
            uniq.push_back(p);
    }
    // Upper hull, left to right.
    std::vector<std::pair<double, double>> hull;
    for (const auto& p : uniq) {
        while (hull.size() >= 2) {
            const auto& a = hull[hull.size() - 2];
            const auto& b = hull[hull.size() - 1];
            const double cross = (b.first - a.first) * (p.second - a.second) -
                                 (p.first - a.first) * (b.second - a.second);
            if (cross >= 0.0)
                hull.pop_back();  // b below chord a-p
            else
                break;
        }
        hull.push_back(p);
    }
    // Monotone flattening: truncate at the peak and extend flat.
    std::vector<std::pair<double, double>> out;
    out.push_back(hull.front());
    for (std::size_t i = 1; i < hull.size(); ++i) {
        if (hull[i].second < out.back().second) break;
        out.push_back(hull[i]);
    }
    if (out.back().first < hull.back().first)
        out.emplace_back(hull.back().first, out.back().second);
    return ConcaveMajorant(std::move(out));
}

}  // namespace htrl
