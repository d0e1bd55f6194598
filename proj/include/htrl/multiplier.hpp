#pragma once

// Multiplier and symmetrized empirical-process suprema over the interval
// class, and the concave-majorant multiplier bound
//
//     E sup |sum_i xi_i f(X_i)|  <=  4 * integral over t of
//                                        psi(n * P(|xi| > t)) dt,
//
// evaluated exactly for piecewise-linear psi via per-law tail quantiles and
// partial expectations. Power-shaped psi(k) = kappa0 * k^{1/gamma} reduces in
// closed form to 4 * kappa0 * n^{1/gamma} * ||xi||_{gamma,1}.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <stdexcept>
#include <vector>

#include "concave_majorant.hpp"
#include "error_law.hpp"
#include "interval_sup.hpp"
#include "mc.hpp"
#include "noise_stats.hpp"
#include "parallel.hpp"
#include "rng.hpp"

namespace htrl {

namespace detail {

inline DesignSample draw_design(std::size_t n, CounterRng& rng) {
    DesignSample s;
    s.x.resize(n);
    for (std::size_t i = 0; i < n; ++i) s.x[i] = rng.unit_oo();
    std::sort(s.x.begin(), s.x.end());
    s.w.resize(n);
    return s;
}

}  // namespace detail

// E sup over the constrained interval class with Rademacher weights,
// X_i i.i.d. uniform on [0,1].
inline McEstimate rademacher_sup_mc(std::size_t n, const IntervalConstraint& c, std::size_t reps,
                                    std::uint64_t seed, unsigned threads = 0) {
    if (n < 1 || reps < 1) throw std::invalid_argument("rademacher_sup_mc: n, reps >= 1");
    std::vector<double> vals(reps);
    parallel_for(
        reps,
        [&](std::size_t r) {
            CounterRng rng_x(seed, {r, 0});
            CounterRng rng_w(seed, {r, 1});
            DesignSample s = detail::draw_design(n, rng_x);
            for (std::size_t i = 0; i < n; ++i) s.w[i] = rng_w.rademacher();
            vals[r] = sup_interval_sum(s, c).value;
        },
        threads);
    return mc_summarize(vals);
}

// Same with weights drawn from an error law, independent of the X_i.
inline McEstimate multiplier_sup_mc(const ErrorLaw& law, std::size_t n,
                                    const IntervalConstraint& c, std::size_t reps,
                                    std::uint64_t seed, unsigned threads = 0) {
    if (n < 1 || reps < 1) throw std::invalid_argument("multiplier_sup_mc: n, reps >= 1");
    std::vector<double> vals(reps);
    parallel_for(
        reps,
        [&](std::size_t r) {
            CounterRng rng_x(seed, {r, 0});
            CounterRng rng_w(seed, {r, 1});
            DesignSample s = detail::draw_design(n, rng_x);
            for (std::size_t i = 0; i < n; ++i) s.w[i] = law.sample_one(rng_w);
            vals[r] = sup_interval_sum(s, c).value;
        },
        threads);
    return mc_summarize(vals);
}

struct KEstimate {
    std::size_t k = 0;
    McEstimate est;
};

// Rademacher supremum estimates at a grid of sample sizes (shared class, so
// the target E sup is non-decreasing in k).
inline std::vector<KEstimate> rademacher_sup_profile(const std::vector<std::size_t>& ks,
                                                     const IntervalConstraint& c,
                                                     std::size_t reps, std::uint64_t seed,
                                                     unsigned threads = 0) {
    std::vector<KEstimate> out(ks.size());
    for (std::size_t j = 0; j < ks.size(); ++j) {
        out[j].k = ks[j];
        out[j].est = rademacher_sup_mc(ks[j], c, reps, derive_key(seed, {ks[j]}), threads);
    }
    return out;
}

// Prefix of a profile that stays valid as a majorant source on [0, n]: all
// grid points <= n plus the first one beyond it, so the gap (k_last, n] is
// still covered by a measured value.
inline std::vector<KEstimate> profile_through(const std::vector<KEstimate>& profile,
                                              std::size_t n) {
    std::vector<KEstimate> out;
    for (const auto& ke : profile) {
        out.push_back(ke);
        if (ke.k >= n) break;
    }
    return out;
}

// Builds a psi that majorizes the true Rademacher supremum profile with high
// confidence: each estimate is inflated by n_sigmas standard errors, and the
// value attached to a grid point k_j is the inflated estimate at k_{j+1}, so
// monotonicity of the true profile covers the gap between grid points. The
// least concave majorant of those points is returned.
inline ConcaveMajorant stderr_inflated_majorant(const std::vector<KEstimate>& profile,
                                                double n_sigmas = 3.0) {
    if (profile.empty()) throw std::invalid_argument("stderr_inflated_majorant: empty profile");
    std::vector<std::pair<double, double>> pts;
    pts.reserve(profile.size());
    auto inflated = [&](const KEstimate& e) { return e.est.mean + n_sigmas * e.est.se; };
    for (std::size_t j = 0; j + 1 < profile.size(); ++j) {
        if (profile[j].k >= profile[j + 1].k)
            throw std::invalid_argument("stderr_inflated_majorant: grid not increasing");
        pts.emplace_back(static_cast<double>(profile[j].k),
                         std::max(inflated(profile[j]), inflated(profile[j + 1])));
    }
    pts.emplace_back(static_cast<double>(profile.back().k), inflated(profile.back()));
    return least_concave_majorant(std::move(pts));
}

// The multiplier bound 4 * integral of psi(n * tail_prob(t)) dt for
// piecewise-linear psi: exact via tail quantiles and partial expectations.
// Returns +inf when the integral diverges (psi rising at 0 and tail index
// <= 1). psi is evaluated flat beyond its last knot.
inline double multiplier_bound(const ConcaveMajorant& psi, const ErrorLaw& law, std::size_t n) {
    if (n < 1) throw std::invalid_argument("multiplier_bound: n >= 1");
    const auto& knots = psi.knots();
    if (knots.size() < 2 || knots.back().second == 0.0) return 0.0;
    if (psi.initial_slope() > 0.0 && law.tail_index() <= 1.0) return kInf;

    const double nn = static_cast<double>(n);
    // Breakpoints in u = n * tail_prob(t), clipped to (0, n].
    std::vector<double> us;
    for (const auto& [k, v] : knots)
        if (k > 0.0 && k < nn) us.push_back(k);
    us.push_back(nn);
    double total = 0.0;
    double u_lo = 0.0;
    for (double u_hi : us) {
        const double p_lo = psi(u_lo), p_hi = psi(u_hi);
        const double beta = (p_hi - p_lo) / (u_hi - u_lo);
        const double alpha = p_hi - beta * u_hi;
        const double t_hi = (u_hi >= nn) ? 0.0 : law.tail_quantile(u_hi / nn);
        if (u_lo <= 0.0) {
            total += beta * nn * law.tail_integral(t_hi);
        } else {
            const double t_lo = law.tail_quantile(u_lo / nn);
            total += alpha * (t_lo - t_hi) +
                     beta * nn * (law.tail_integral(t_hi) - law.tail_integral(t_lo));
        }
        u_lo = u_hi;
    }
    return 4.0 * total;
}

// Closed form for psi(k) = kappa0 * k^{1/gamma}: 4 kappa0 n^{1/gamma}
// ||xi||_{gamma,1}. Infinite when the norm diverges (gamma >= tail index).
inline double multiplier_bound_power(double kappa0, double gamma, const ErrorLaw& law,
                                     std::size_t n) {
    if (!(gamma >= 1.0)) throw std::invalid_argument("multiplier_bound_power: gamma >= 1");
    if (!(kappa0 >= 0.0)) throw std::invalid_argument("multiplier_bound_power: kappa0 >= 0");
    if (kappa0 == 0.0) return 0.0;
    const Lp1Value norm = lp1_norm(law, gamma);
    if (norm.infinite) return kInf;
    return 4.0 * kappa0 * std::pow(static_cast<double>(n), 1.0 / gamma) * norm.value;
}

struct OrderStatsBound {
    McEstimate lhs;                        // E sup |sum xi_i f(X_i)|
    McEstimate rhs;                        // E sum_k (eta_(k)-eta_(k+1)) g(k), eta = 2 xi
    std::vector<double> rademacher_levels;  // tabulated g(k), k = 1..n
};

// Diagnostic for the reversed-order-statistics decomposition: the multiplier
// supremum is dominated by the weighted sum of Rademacher suprema at every
// scale k <= n, weighted by spacings of the order statistics of 2|xi|.
inline OrderStatsBound check_order_statistics_bound(const ErrorLaw& law, std::size_t n,
                                                    const IntervalConstraint& c, std::size_t reps,
                                                    std::uint64_t seed, unsigned threads = 0) {
    if (n < 1 || n > 64)
        throw std::invalid_argument("check_order_statistics_bound: n must be in [1, 64]");
    OrderStatsBound out;
    out.rademacher_levels.resize(n + 1, 0.0);
    for (std::size_t k = 1; k <= n; ++k)
        out.rademacher_levels[k] =
            rademacher_sup_mc(k, c, reps, derive_key(seed, {0, k}), threads).mean;
    out.lhs = multiplier_sup_mc(law, n, c, reps, derive_key(seed, {1}), threads);

    std::vector<double> rhs_vals(reps);
    parallel_for(
        reps,
        [&](std::size_t r) {
            CounterRng rng(seed, {2, r});
            std::vector<double> eta(n);
            for (std::size_t i = 0; i < n; ++i) eta[i] = 2.0 * std::fabs(law.sample_one(rng));
            std::sort(eta.begin(), eta.end(), std::greater<>());
            double acc = 0.0;
            for (std::size_t k = 1; k <= n; ++k) {
                const double next = (k < n) ? eta[k] : 0.0;
                acc += (eta[k - 1] - next) * out.rademacher_levels[k];
            }
            rhs_vals[r] = acc;
        },
        threads);
    out.rhs = mc_summarize(rhs_vals);
    return out;
}

// Paley-Zygmund: P(Z > eps E Z) >= ((1-eps) EZ / (E Z^q)^{1/q})^{q'},
// q' = q/(q-1), clipped to [0,1].
inline double pz_lower_bound(double mean, double q_moment, double q, double eps) {
    if (!(mean >= 0.0)) throw std::invalid_argument("pz_lower_bound: mean < 0");
    if (!(q > 1.0)) throw std::invalid_argument("pz_lower_bound: q must exceed 1");
    if (!(eps > 0.0 && eps < 1.0)) throw std::invalid_argument("pz_lower_bound: eps in (0,1)");
    if (q_moment < std::pow(mean, q) * (1.0 - 1e-12))
        throw std::invalid_argument("pz_lower_bound: q_moment violates Jensen");
    if (mean == 0.0) return 0.0;
    const double ratio = (1.0 - eps) * mean / std::pow(q_moment, 1.0 / q);
    const double value = std::pow(ratio, q / (q - 1.0));
    return std::clamp(value, 0.0, 1.0);
}

}  // namespace htrl
