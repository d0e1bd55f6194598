#pragma once

// L_{p,1} norms and expected-maximum diagnostics for error laws.
//
// The L_{p,1} norm of xi is the integral over t of P(|xi| > t)^{1/p}.
// Finiteness is decided analytically: the integrand decays like t^{-q/p}
// where q is the tail index, so the norm is finite iff p < q.

#include <cmath>
#include <cstdint>
#include <stdexcept>

#include "error_law.hpp"
#include "mc.hpp"
#include "quadrature.hpp"

namespace htrl {

struct Lp1Value {
    double p = 1.0;
    double value = 0.0;
    bool infinite = false;
    double quadrature_error = 0.0;
};

namespace detail {

// Tail integral of (1 + t^q)^{-1/p} over [T, inf) via the binomial series of
// (1 + t^{-q})^{-1/p}; exact up to the returned truncation bound. T must
// exceed 1; terms decay geometrically like T^{-q}.
inline QuadratureResult pareto_lp1_tail(double q, double p, double T) {
    QuadratureResult out;
    const double b = 1.0 / p;
    double coef = 1.0;  // binom(-1/p, j) including sign
    double tpow = std::pow(T, 1.0 - q * b);
    const double ratio = std::pow(T, -q);
    for (int j = 0; j < 500; ++j) {
        const double denom = q * b + q * j - 1.0;
        out.value += coef * tpow / denom;
        coef *= (-b - j) / (j + 1.0);
        tpow *= ratio;
        const double next = std::fabs(coef) * tpow / (q * b + q * (j + 1) - 1.0);
        if (next < 1e-18 * (1.0 + std::fabs(out.value))) {
            out.error += next / (1.0 - ratio);
            break;
        }
    }
    return out;
}

}  // namespace detail

// The L_{p,1} norm of the law; infinite exactly when p >= tail index.
inline Lp1Value lp1_norm(const ErrorLaw& law, double p) {
    if (!(p >= 1.0)) throw std::invalid_argument("lp1_norm: p must be >= 1");
    Lp1Value out;
    out.p = p;
    if (p >= law.tail_index()) {
        out.infinite = true;
        out.value = kInf;
        return out;
    }
    const double s = law.scale();
    switch (law.kind()) {
        case LawKind::pareto_symmetric: {
            const double q = law.param();
            const double T = 2.0;
            auto head = adaptive_simpson(
                [&](double t) { return std::pow(1.0 + std::pow(t, q), -1.0 / p); }, 0.0, T, 1e-12);
            auto tail = detail::pareto_lp1_tail(q, p, T);
            out.value = s * (head.value + tail.value);
            out.quadrature_error = s * (head.error + tail.error);
            return out;
        }
        case LawKind::gaussian: {
            const double T = std::sqrt(180.0 * p);
            auto head = adaptive_simpson(
                [&](double t) { return std::pow(2.0 * normal_upper_tail(t), 1.0 / p); }, 0.0, T,
                1e-12);
            // Tail below exp(-T^2/(2p)) * p / T, i.e. ~1e-39.
            const double tail_bound = std::exp(-T * T / (2.0 * p)) * p / T;
            out.value = s * head.value;
            out.quadrature_error = s * (head.error + tail_bound);
            return out;
        }
        case LawKind::student_t: {
            const double nu = law.param();
            const double T = std::max(8.0, 4.0 * std::sqrt(nu));
            // Tail of the unit-scale law; the scale factors out in front.
            auto base_tail = [&](double z) { return law.tail_prob(z * s); };
            auto head = adaptive_simpson(
                [&](double t) { return std::pow(base_tail(t), 1.0 / p); }, 0.0, T, 1e-12);
            // Beyond T substitute t = T * u^{-gamma}; the integrand becomes
            // ~ u^{gamma(nu/p - 1) - 1}, and gamma is chosen to tame the
            // endpoint so Simpson converges at full accuracy.
            const double decay = nu / p - 1.0;  // > 0 in the finite case
            const double gamma = std::min(64.0, std::max(1.0, 4.0 / decay));
            auto tail_f = [&](double u) {
                if (u <= 0.0) return 0.0;
                const double t = T * std::pow(u, -gamma);
                const double g = std::pow(base_tail(t), 1.0 / p);
                return T * gamma * g * std::pow(u, -gamma - 1.0);
            };
            auto tail = adaptive_simpson(tail_f, 0.0, 1.0, 1e-12);
            out.value = s * (head.value + tail.value);
            out.quadrature_error = s * (head.error + tail.error);
            return out;
        }
    }
    return out;
}

struct MomentValue {
    double p = 1.0;
    double value = 0.0;
    bool infinite = false;
};

// Ordinary moment norm (E|xi|^p)^{1/p}, exact closed forms:
//   Pareto(q):    E|xi|^p = p pi / (q sin(pi p / q))          for p < q
//   Gaussian:     E|xi|^p = sigma^p 2^{p/2} Gamma((p+1)/2) / sqrt(pi)
//   Student(nu):  E|xi|^p = nu^{p/2} B((p+1)/2, (nu-p)/2) / B(1/2, nu/2)
// Finite on exactly the same p-range as the L_{p,1} norm for these laws;
// the two norms are reported side by side in experiment summaries.
inline MomentValue lp_norm(const ErrorLaw& law, double p) {
    if (!(p >= 1.0)) throw std::invalid_argument("lp_norm: p must be >= 1");
    MomentValue out;
    out.p = p;
    if (p >= law.tail_index()) {
        out.infinite = true;
        out.value = kInf;
        return out;
    }
    auto log_beta = [](double a, double b) {
        return std::lgamma(a) + std::lgamma(b) - std::lgamma(a + b);
    };
    double moment = 0.0;
    switch (law.kind()) {
        case LawKind::pareto_symmetric: {
            const double q = law.param();
            moment = p * M_PI / (q * std::sin(M_PI * p / q));
            break;
        }
        case LawKind::gaussian:
            moment = std::exp(0.5 * p * std::log(2.0) + std::lgamma(0.5 * (p + 1.0))) /
                     std::sqrt(M_PI);
            break;
        case LawKind::student_t: {
            const double nu = law.param();
            moment = std::exp(0.5 * p * std::log(nu) +
                              log_beta(0.5 * (p + 1.0), 0.5 * (nu - p)) -
                              log_beta(0.5, 0.5 * nu));
            break;
        }
    }
    out.value = law.scale() * std::pow(moment, 1.0 / p);
    return out;
}

// Monte Carlo estimate of E max_{i<=n} |xi_i|.
inline McEstimate expected_max_mc(const ErrorLaw& law, std::size_t n, std::size_t reps,
                                  std::uint64_t seed) {
    if (n < 1 || reps < 1) throw std::invalid_argument("expected_max_mc: n, reps must be >= 1");
    std::vector<double> maxima(reps);
    for (std::size_t r = 0; r < reps; ++r) {
        CounterRng rng(seed, {r});
        double m = 0.0;
        for (std::size_t i = 0; i < n; ++i) m = std::max(m, std::fabs(law.sample_one(rng)));
        maxima[r] = m;
    }
    return mc_summarize(maxima);
}

}  // namespace htrl
