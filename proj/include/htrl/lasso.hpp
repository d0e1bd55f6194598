#pragma once

// Lasso with the heavy-tail tuning rule lambda = 2 L ||xi||_{1/alpha,1} *
// sqrt(log d / n): cyclic coordinate descent with soft thresholding, a KKT
// residual check, a randomized upper estimate of the compatibility constant
// phi(L, S), and the Gaussian-approximation shape bound for E max_j |sum_i
// eps_i X_ij|.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <fstream>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "error_law.hpp"
#include "noise_stats.hpp"
#include "rng.hpp"

namespace htrl {

// Minimal dense row-major matrix.
struct Matrix {
    std::size_t rows = 0, cols = 0;
    std::vector<double> data;

    Matrix() = default;
    Matrix(std::size_t r, std::size_t c) : rows(r), cols(c), data(r * c, 0.0) {}
    double& operator()(std::size_t i, std::size_t j) { return data[i * cols + j]; }
    double operator()(std::size_t i, std::size_t j) const { return data[i * cols + j]; }
};

struct LassoProblem {
    Matrix design;                 // n x d
    std::vector<double> response;  // n
    double lambda = 0.0;
};

inline void validate(const LassoProblem& p) {
    if (p.design.rows != p.response.size())
        throw std::invalid_argument("LassoProblem: row count mismatch");
    if (!(p.lambda >= 0.0)) throw std::invalid_argument("LassoProblem: lambda < 0");
    for (double v : p.design.data)
        if (!std::isfinite(v)) throw std::invalid_argument("LassoProblem: non-finite design");
    for (double v : p.response)
        if (!std::isfinite(v)) throw std::invalid_argument("LassoProblem: non-finite response");
}

struct LassoFit {
    std::vector<double> theta;
    double kkt_residual = 0.0;  // max subgradient violation, the duality proxy
    bool converged = false;
    std::size_t iterations = 0;
};

// Max violation of the subgradient conditions for
// (1/n)||Y - X theta||^2 + lambda ||theta||_1:
//   |(2/n) X_j' (Y - X theta)| <= lambda          if theta_j = 0
//   (2/n) X_j' (Y - X theta)  = lambda sign(theta_j) otherwise.
inline double lasso_kkt_residual(const LassoProblem& p, const std::vector<double>& theta) {
    const std::size_t n = p.design.rows, d = p.design.cols;
    std::vector<double> resid(p.response);
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < d; ++j) resid[i] -= p.design(i, j) * theta[j];
    double worst = 0.0;
    for (std::size_t j = 0; j < d; ++j) {
        double g = 0.0;
        for (std::size_t i = 0; i < n; ++i) g += p.design(i, j) * resid[i];
        g *= 2.0 / static_cast<double>(n);
        const double viol = (theta[j] == 0.0) ? std::max(0.0, std::fabs(g) - p.lambda)
                                              : std::fabs(g - p.lambda * (theta[j] > 0 ? 1.0 : -1.0));
        worst = std::max(worst, viol);
    }
    return worst;
}

// Cyclic coordinate descent with soft thresholding. Stops when the largest
// coordinate update falls below tol; non-convergence at max_iter is flagged
// on the result, not thrown.
inline LassoFit fit_lasso_cd(const LassoProblem& p, double tol = 1e-10,
                             std::size_t max_iter = 100000) {
    validate(p);
    if (!(tol > 0.0)) throw std::invalid_argument("fit_lasso_cd: tol must be positive");
    const std::size_t n = p.design.rows, d = p.design.cols;
    LassoFit fit;
    fit.theta.assign(d, 0.0);
    if (n == 0 || d == 0) {
        fit.converged = true;
        return fit;
    }
    std::vector<double> col_sq(d, 0.0);
    for (std::size_t j = 0; j < d; ++j) {
        double ss = 0.0;
        for (std::size_t i = 0; i < n; ++i) ss += p.design(i, j) * p.design(i, j);
        col_sq[j] = ss;
    }
    std::vector<double> resid(p.response);  // Y - X theta, theta = 0
    const double thr = 0.5 * p.lambda * static_cast<double>(n);
    auto sweep = [&](bool active_only) {
        double max_delta = 0.0;
        for (std::size_t j = 0; j < d; ++j) {
            if (active_only && fit.theta[j] == 0.0) continue;
            if (col_sq[j] == 0.0) continue;
            double rho = 0.0;
            for (std::size_t i = 0; i < n; ++i) rho += p.design(i, j) * resid[i];
            rho += col_sq[j] * fit.theta[j];
            const double soft = std::fabs(rho) <= thr ? 0.0
                                                      : (rho > 0 ? rho - thr : rho + thr);
            const double next = soft / col_sq[j];
            const double delta = next - fit.theta[j];
            if (delta != 0.0) {
                for (std::size_t i = 0; i < n; ++i) resid[i] -= p.design(i, j) * delta;
                fit.theta[j] = next;
            }
            max_delta = std::max(max_delta, std::fabs(delta));
        }
        return max_delta;
    };
    bool full_pass = true;
    for (; fit.iterations < max_iter; ++fit.iterations) {
        const double max_delta = sweep(!full_pass);
        if (max_delta < tol) {
            if (full_pass) {
                fit.converged = true;
                break;
            }
            full_pass = true;  // active set stalled; verify with a full sweep
        } else {
            full_pass = false;
        }
    }
    fit.kkt_residual = lasso_kkt_residual(p, fit.theta);
    return fit;
}

// Tuning rule lambda = 2 L ||xi||_{1/alpha,1} sqrt(log d / n).
inline double lasso_lambda_rule(const ErrorLaw& noise, double alpha, double L, std::size_t n,
                                std::size_t d) {
    if (!(alpha >= 0.25 && alpha <= 0.5))
        throw std::invalid_argument("lasso_lambda_rule: alpha must lie in [1/4, 1/2]");
    if (!(L > 0.0)) throw std::invalid_argument("lasso_lambda_rule: L must be positive");
    if (n < 1 || d < 2) throw std::invalid_argument("lasso_lambda_rule: need n >= 1, d >= 2");
    const Lp1Value norm = lp1_norm(noise, 1.0 / alpha);
    if (norm.infinite)
        throw std::invalid_argument(
            "lasso_lambda_rule: ||xi||_{1/alpha,1} is infinite; raise the noise tail index or "
            "alpha");
    return 2.0 * L * norm.value * std::sqrt(std::log(static_cast<double>(d)) /
                                            static_cast<double>(n));
}

// Randomized upper estimate of the compatibility constant
//   phi(L,S) = sqrt(|S|) min { ||X(theta_S - theta_{S^c})||_2 / sqrt(n) :
//                              ||theta_S||_1 = 1, ||theta_{S^c}||_1 <= L }.
// Random feasible directions plus coordinatewise local descent; the smallest
// objective found is an upper bound on the true minimum.
inline double estimate_compatibility(const Matrix& design, const std::vector<std::size_t>& S,
                                     double L, std::size_t search_budget, std::uint64_t seed) {
    const std::size_t n = design.rows, d = design.cols;
    if (S.empty()) throw std::invalid_argument("estimate_compatibility: S must be nonempty");
    if (!(L >= 0.0)) throw std::invalid_argument("estimate_compatibility: L < 0");
    std::vector<bool> in_s(d, false);
    for (std::size_t j : S) {
        if (j >= d) throw std::invalid_argument("estimate_compatibility: index out of range");
        in_s[j] = true;
    }
    std::vector<std::size_t> sc;
    for (std::size_t j = 0; j < d; ++j)
        if (!in_s[j]) sc.push_back(j);

    auto objective = [&](const std::vector<double>& theta) {
        double acc = 0.0;
        for (std::size_t i = 0; i < n; ++i) {
            double dot = 0.0;
            for (std::size_t j = 0; j < d; ++j) dot += design(i, j) * theta[j];
            acc += dot * dot;
        }
        return std::sqrt(acc / static_cast<double>(n));
    };
    // theta encodes theta_S - theta_{S^c} directly; feasibility is
    // ||theta_S||_1 = 1 and ||theta_{S^c}||_1 <= L (signs free).
    auto project = [&](std::vector<double>& theta) {
        double s1 = 0.0;
        for (std::size_t j : S) s1 += std::fabs(theta[j]);
        if (s1 == 0.0) {
            theta[S[0]] = 1.0;
            s1 = 1.0;
        }
        for (std::size_t j : S) theta[j] /= s1;
        double c1 = 0.0;
        for (std::size_t j : sc) c1 += std::fabs(theta[j]);
        if (c1 > L && c1 > 0.0)
            for (std::size_t j : sc) theta[j] *= L / c1;
    };

    CounterRng rng(seed);
    double best = kInf;
    std::vector<double> best_theta;
    const std::size_t n_starts = std::max<std::size_t>(1, search_budget / 4);
    for (std::size_t trial = 0; trial < n_starts; ++trial) {
        std::vector<double> theta(d, 0.0);
        for (std::size_t j : S) theta[j] = rng.unit_oo() * rng.rademacher();
        for (std::size_t j : sc) theta[j] = L * rng.unit_oo() * rng.rademacher();
        project(theta);
        const double v = objective(theta);
        if (v < best) {
            best = v;
            best_theta = theta;
        }
    }
    // Local descent around the best start.
    std::vector<double> cur = best_theta;
    double step = 0.25;
    for (std::size_t it = 0; it < search_budget; ++it) {
        const std::size_t j = static_cast<std::size_t>(rng.next_u64() % d);
        std::vector<double> cand = cur;
        cand[j] += step * rng.rademacher() * (1.0 + std::fabs(cand[j]));
        project(cand);
        const double v = objective(cand);
        if (v < best) {
            best = v;
            cur = cand;
        } else if (it % 50 == 49) {
            step *= 0.7;
        }
    }
    return std::sqrt(static_cast<double>(S.size())) * best;
}

// Shape of the Gaussian-approximation bound for E max_j |sum_{i<=k} eps_i X_ij|:
//   (k log^3 d (M4 or log^2 d, whichever larger))^{1/4} + (k log d)^{1/2}.
inline double gaussian_approx_bound(std::size_t k, std::size_t d, double m4) {
    if (d < 2) throw std::invalid_argument("gaussian_approx_bound: d must be >= 2");
    if (k < 1 || !(m4 >= 0.0)) throw std::invalid_argument("gaussian_approx_bound: bad k or M4");
    const double kk = static_cast<double>(k);
    const double ld = std::log(static_cast<double>(d));
    return std::pow(kk * ld * ld * ld * std::max(m4, ld * ld), 0.25) + std::sqrt(kk * ld);
}

// Loads a lasso problem from CSV: first column response, remaining columns
// the design matrix. Plain numeric CSV with an optional header row.
inline LassoProblem load_lasso_csv(const std::string& path, double lambda) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("load_lasso_csv: cannot open " + path);
    std::vector<std::vector<double>> rows;
    std::string line;
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        std::stringstream ss(line);
        std::vector<double> row;
        std::string cell;
        bool numeric = true;
        while (std::getline(ss, cell, ',')) {
            try {
                std::size_t used = 0;
                row.push_back(std::stod(cell, &used));
            } catch (const std::exception&) {
                numeric = false;
                break;
            }
        }
        if (!numeric) {
            if (rows.empty()) continue;  // header
            throw std::runtime_error("load_lasso_csv: non-numeric row in " + path);
        }
        if (!rows.empty() && row.size() != rows.front().size())
            throw std::runtime_error("load_lasso_csv: ragged rows in " + path);
        rows.push_back(std::move(row));
    }
    if (rows.empty() || rows.front().size() < 2)
        throw std::runtime_error("load_lasso_csv: need at least two columns");
    LassoProblem p;
    p.lambda = lambda;
    const std::size_t n = rows.size(), d = rows.front().size() - 1;
    p.design = Matrix(n, d);
    p.response.resize(n);
    for (std::size_t i = 0; i < n; ++i) {
        p.response[i] = rows[i][0];
        for (std::size_t j = 0; j < d; ++j) p.design(i, j) = rows[i][j + 1];
    }
    return p;
}

}  // namespace htrl
