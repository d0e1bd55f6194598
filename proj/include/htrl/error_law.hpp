#pragma once

// Symmetric error laws with exact tail functions.
//
// Every law is symmetric about 0 and is represented as scale * base where
// base is one of: ParetoSymmetric(q) with P(|xi| > t) = 1/(1 + t^q),
// StudentT(dof), or standard Gaussian. All tail-side quantities
// (tail probability, tail quantile, partial expectation of |xi|) are exact
// closed forms or certified quadrature; divergence is decided analytically
// from tail exponents, never from overflow.

#include <cmath>
#include <cstdint>
#include <limits>
#include <stdexcept>
#include <string>
#include <vector>

#include "quadrature.hpp"
#include "rng.hpp"
#include "special.hpp"

namespace htrl {

inline constexpr double kInf = std::numeric_limits<double>::infinity();

enum class LawKind { pareto_symmetric, student_t, gaussian };

class ErrorLaw {
  public:
    static ErrorLaw pareto_symmetric(double tail_index) {
        if (!(tail_index > 0.0)) throw std::invalid_argument("pareto_symmetric: tail_index <= 0");
        return ErrorLaw(LawKind::pareto_symmetric, tail_index, 1.0);
    }
    static ErrorLaw student_t(double dof) {
        if (!(dof > 0.0)) throw std::invalid_argument("student_t: dof <= 0");
        return ErrorLaw(LawKind::student_t, dof, 1.0);
    }
    static ErrorLaw gaussian(double sigma) {
        if (!(sigma > 0.0)) throw std::invalid_argument("gaussian: sigma <= 0");
        return ErrorLaw(LawKind::gaussian, 1.0, sigma);
    }
    // Law of scale * base. Nested scalings flatten.
    static ErrorLaw scaled(const ErrorLaw& base, double scale) {
        if (!(scale > 0.0)) throw std::invalid_argument("scaled: scale <= 0");
        return ErrorLaw(base.kind_, base.param_, base.scale_ * scale);
    }

    LawKind kind() const { return kind_; }
    double param() const { return param_; }
    double scale() const { return scale_; }

    // Supremum of p with E|xi|^p < infinity; +inf for the Gaussian.
    double tail_index() const {
        switch (kind_) {
            case LawKind::pareto_symmetric: return param_;
            case LawKind::student_t: return param_;
            case LawKind::gaussian: return kInf;
        }
        return kInf;
    }

    // P(|xi| > t), exact.
    double tail_prob(double t) const {
        if (!(t >= 0.0)) throw std::invalid_argument("tail_prob: t < 0");
        const double z = t / scale_;
        switch (kind_) {
            case LawKind::pareto_symmetric: return 1.0 / (1.0 + std::pow(z, param_));
            case LawKind::student_t: {
                if (z == 0.0) return 1.0;
                const double nu = param_;
                return inc_beta(0.5 * nu, 0.5, nu / (nu + z * z));
            }
            case LawKind::gaussian: return 2.0 * normal_upper_tail(z);
        }
        return 0.0;
    }

    // inf{t >= 0 : tail_prob(t) <= u} for u in (0, 1].
    double tail_quantile(double u) const {
        if (!(u > 0.0 && u <= 1.0)) throw std::invalid_argument("tail_quantile: u outside (0,1]");
        switch (kind_) {
            case LawKind::pareto_symmetric:
                return scale_ * std::pow(1.0 / u - 1.0, 1.0 / param_);
            case LawKind::gaussian:
                return u >= 1.0 ? 0.0 : scale_ * normal_quantile(1.0 - 0.5 * u);
            case LawKind::student_t: {
                if (u >= 1.0) return 0.0;
                // Bisection on the exact tail; monotone, so deterministic.
                double lo = 0.0, hi = 1.0;
                while (tail_prob(hi) > u) hi *= 2.0;
                for (int it = 0; it < 200 && hi - lo > 1e-15 * (1.0 + hi); ++it) {
                    const double mid = 0.5 * (lo + hi);
                    (tail_prob(mid) > u ? lo : hi) = mid;
                }
                return 0.5 * (lo + hi);
            }
        }
        return 0.0;
    }

    // Partial expectation: integral of tail_prob over [t0, inf), i.e. E(|xi| - t0)^+.
    // Returns +inf when the tail index is <= 1.
    double tail_integral(double t0) const {
        if (!(t0 >= 0.0)) throw std::invalid_argument("tail_integral: t0 < 0");
        const double z = t0 / scale_;
        switch (kind_) {
            case LawKind::pareto_symmetric: return scale_ * pareto_tail_integral(param_, z);
            case LawKind::student_t: {
                const double nu = param_;
                if (nu <= 1.0) return kInf;
                const double a = std::exp(std::lgamma(0.5 * (nu + 1.0)) - std::lgamma(0.5 * nu)) /
                                 std::sqrt(nu * M_PI);
                const double partial =
                    2.0 * a * nu / (nu - 1.0) * std::pow(1.0 + z * z / nu, -0.5 * (nu - 1.0));
                return scale_ * (partial - z * tail_prob(t0));
            }
            case LawKind::gaussian:
                return scale_ * 2.0 * (normal_pdf(z) - z * normal_upper_tail(z));
        }
        return 0.0;
    }

    // CDF of the (signed, symmetric) law.
    double cdf(double t) const {
        const double tp = tail_prob(std::fabs(t));
        return (t >= 0.0) ? 1.0 - 0.5 * tp : 0.5 * tp;
    }

    // One draw; consumes exactly two counter slots for every law.
    double sample_one(CounterRng& rng) const {
        switch (kind_) {
            case LawKind::pareto_symmetric: {
                const double u = rng.unit_oc();
                const double sign = rng.rademacher();
                return sign * scale_ * std::pow(1.0 / u - 1.0, 1.0 / param_);
            }
            case LawKind::gaussian: {
                const double u = rng.unit_oc();
                const double sign = rng.rademacher();
                return sign * scale_ * (u >= 1.0 ? 0.0 : normal_quantile(1.0 - 0.5 * u));
            }
            case LawKind::student_t: {
                // Bailey's polar form: exact t(dof) from two uniforms.
                const double u = rng.unit_oc();
                const double v = rng.unit_oo();
                const double nu = param_;
                const double r = std::sqrt(nu * (std::pow(u, -2.0 / nu) - 1.0));
                return scale_ * r * std::cos(2.0 * M_PI * v);
            }
        }
        return 0.0;
    }

    // n i.i.d. draws, deterministic in (law, seed, n).
    std::vector<double> sample(std::uint64_t seed, std::size_t n) const {
        std::vector<double> out(n);
        CounterRng rng(seed);
        for (std::size_t i = 0; i < n; ++i) out[i] = sample_one(rng);
        return out;
    }

    std::string describe() const {
        const bool unit = scale_ == 1.0;
        std::string body;
        switch (kind_) {
            case LawKind::pareto_symmetric:
                body = "kind = \"pareto\", tail_index = " + num(param_);
                break;
            case LawKind::student_t:
                body = "kind = \"student_t\", dof = " + num(param_);
                break;
            case LawKind::gaussian:
                return "{ kind = \"gaussian\", sigma = " + num(scale_) + " }";
        }
        if (!unit) body += ", scale = " + num(scale_);
        return "{ " + body + " }";
    }

  private:
    ErrorLaw(LawKind kind, double param, double scale)
        : kind_(kind), param_(param), scale_(scale) {}

    static std::string num(double v) {
        char buf[40];
        std::snprintf(buf, sizeof(buf), "%.17g", v);
        return buf;
    }

    // Integral of 1/(1+t^q) over [z, inf) for the unit-scale law.
    static double pareto_tail_integral(double q, double z) {
        if (q <= 1.0) return kInf;
        double acc = 0.0;
        double lo = z;
        const double t_series = std::max(2.0, z);
        if (z < t_series) {
            acc += adaptive_simpson([&](double t) { return 1.0 / (1.0 + std::pow(t, q)); }, z,
                                    t_series, 1e-13)
                       .value;
            lo = t_series;
        }
        // 1/(1+t^q) = sum_j (-1)^j t^{-q(j+1)} for t > 1, integrated termwise.
        double term_pow = std::pow(lo, 1.0 - q);
        const double ratio = std::pow(lo, -q);
        for (int j = 0;; ++j) {
            const double term = term_pow / (q * (j + 1) - 1.0);
            acc += (j % 2 == 0) ? term : -term;
            term_pow *= ratio;
            if (term_pow / (q * (j + 2) - 1.0) < 1e-17 * (1.0 + acc) || j > 400) break;
        }
        return acc;
    }

    LawKind kind_;
    double param_;
    double scale_;
};

}  // namespace htrl
