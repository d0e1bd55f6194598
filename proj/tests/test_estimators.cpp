#include <catch2/catch_amalgamated.hpp>

#include <algorithm>
#include <cmath>
#include <numeric>
#include <vector>

#include "htrl/estimators.hpp"
#include "htrl/piecewise.hpp"
#include "htrl/rng.hpp"

using namespace htrl;

namespace {

RegressionData make_reg_data(CounterRng& rng, std::size_t n, double spread = 2.0) {
    RegressionData d;
    d.x.resize(n);
    d.y.resize(n);
    for (auto& v : d.x) v = rng.unit_oo();
    for (auto& v : d.y) v = (rng.unit_oo() - 0.5) * 2.0 * spread;
    return d;
}

struct SortedXY {
    std::vector<double> x, y;
};

SortedXY sorted_xy(const RegressionData& d) {
    std::vector<std::size_t> idx(d.x.size());
    std::iota(idx.begin(), idx.end(), std::size_t{0});
    std::stable_sort(idx.begin(), idx.end(),
                     [&](std::size_t a, std::size_t b) { return d.x[a] < d.x[b]; });
    SortedXY s;
    for (std::size_t i : idx) {
        s.x.push_back(d.x[i]);
        s.y.push_back(d.y[i]);
    }
    return s;
}

double window_cost_lse(const std::vector<double>& y, std::size_t i, std::size_t j,
                       double bound) {
    double sum = 0.0, m = 0.0;
    for (std::size_t t = i; t <= j; ++t) {
        sum += y[t];
        m += 1.0;
    }
    const double c = std::clamp(sum / m, -bound, bound);
    double cost = 0.0;
    for (std::size_t t = i; t <= j; ++t) cost += (y[t] - c) * (y[t] - c);
    return cost;
}

double window_cost_lad(const std::vector<double>& y, std::size_t i, std::size_t j,
                       double bound) {
    std::vector<double> w(y.begin() + static_cast<std::ptrdiff_t>(i),
                          y.begin() + static_cast<std::ptrdiff_t>(j + 1));
    std::sort(w.begin(), w.end());
    const double med = w[(w.size() + 1) / 2 - 1];
    const double c = std::clamp(med, -bound, bound);
    double cost = 0.0;
    for (double v : w) cost += std::fabs(v - c);
    return cost;
}

// Exhaustive minimum over all segmentations with at most k segments.
template <typename CostFn>
double exhaustive_partition(const std::vector<double>& y, std::size_t k, double bound,
                            const CostFn& cost) {
    const std::size_t n = y.size();
    std::vector<std::vector<double>> dp(k + 1, std::vector<double>(n + 1, 1e300));
    for (std::size_t s = 0; s <= k; ++s) dp[s][n] = 0.0;
    for (std::size_t i = n; i-- > 0;)
        for (std::size_t s = 1; s <= k; ++s)
            for (std::size_t j = i; j < n; ++j)
                dp[s][i] = std::min(dp[s][i], cost(y, i, j, bound) + dp[s - 1][j + 1]);
    return dp[k][0];
}

// Brute-force interval LSE with the same feasibility rule (the containing
// interval must reach min_len without swallowing a neighbouring point).
double brute_interval_rss(const SortedXY& s, double min_len) {
    const std::size_t n = s.x.size();
    double syy = 0.0;
    for (double v : s.y) syy += v * v;
    double best = syy;
    if (min_len > 1.0) return best;
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = i; j < n; ++j) {
            const double left = (i == 0) ? 0.0 : s.x[i - 1];
            const double right = (j + 1 < n) ? s.x[j + 1] : 1.0;
            if (right - left < min_len) continue;
            double sum = 0.0;
            for (std::size_t t = i; t <= j; ++t) sum += s.y[t];
            const double m = static_cast<double>(j - i + 1);
            const double c = std::clamp(sum / m, -1.0, 1.0);
            best = std::min(best, syy - (2.0 * c * sum - c * c * m));
        }
    return best;
}

}  // namespace

TEST_CASE("interval LSE handles the stated edge cases") {
    RegressionData zero{{0.2, 0.5, 0.8}, {0.0, 0.0, 0.0}, {}};
    auto z = fit_interval_lse(zero, 0.0);
    CHECK(z.is_zero);
    CHECK(z.rss == 0.0);

    // One huge outlier: singleton window, level clamped to 1.
    RegressionData d;
    for (int i = 0; i < 11; ++i) {
        d.x.push_back(0.05 + 0.09 * i);
        d.y.push_back(0.0);
    }
    d.y[6] = 10.0;
    auto fit = fit_interval_lse(d, 0.0);
    REQUIRE_FALSE(fit.is_zero);
    CHECK(fit.lo == 6);
    CHECK(fit.hi == 6);
    CHECK(fit.level == 1.0);
    CHECK(fit.rss == Catch::Approx(100.0 - 19.0));

    // min_len > 1 degenerates to the zero function.
    CHECK(fit_interval_lse(d, 1.5).is_zero);
}

TEST_CASE("interval LSE equals brute force") {
    CounterRng rng(77);
    for (int inst = 0; inst < 300; ++inst) {
        const std::size_t n = 1 + static_cast<std::size_t>(rng.next_u64() % 24);
        auto d = make_reg_data(rng, n);
        const double min_len = (inst % 3 == 0) ? 0.0 : rng.unit_oo() * 0.4;
        const auto fit = fit_interval_lse(d, min_len);
        const auto s = sorted_xy(d);
        const double oracle = brute_interval_rss(s, min_len);
        CHECK(std::fabs(fit.rss - oracle) <= 1e-9);
    }
}

TEST_CASE("segmented LSE examples and oracle equality") {
    CounterRng rng(91);

    // k = 1 with levels inside the box: plain mean and its rss.
    auto d = make_reg_data(rng, 9, 0.4);
    auto f1 = fit_segmented_lse(d, 1, 1.0);
    double mean = 0.0;
    for (double v : d.y) mean += v;
    mean /= 9.0;
    CHECK(f1.segment_level[0] == Catch::Approx(mean));
    double rss = 0.0;
    for (double v : d.y) rss += (v - mean) * (v - mean);
    CHECK(f1.cost == Catch::Approx(rss));

    // k = n interpolates whatever the box allows.
    auto d2 = make_reg_data(rng, 6, 0.8);
    auto fn_fit = fit_segmented_lse(d2, 6, 1.0);
    CHECK(fn_fit.cost == Catch::Approx(0.0).margin(1e-12));
    auto d3 = make_reg_data(rng, 6, 3.0);
    auto fn_fit3 = fit_segmented_lse(d3, 6, 1.0);
    double clamped = 0.0;
    for (double v : d3.y) {
        const double c = std::clamp(v, -1.0, 1.0);
        clamped += (v - c) * (v - c);
    }
    CHECK(fn_fit3.cost == Catch::Approx(clamped));

    for (int inst = 0; inst < 200; ++inst) {
        const std::size_t n = 2 + static_cast<std::size_t>(rng.next_u64() % 11);
        const std::size_t k = 1 + static_cast<std::size_t>(rng.next_u64() % 3);
        auto data = make_reg_data(rng, n);
        const auto fit = fit_segmented_lse(data, std::min(k, n), 1.0);
        const auto s = sorted_xy(data);
        const double oracle = exhaustive_partition(s.y, std::min(k, n), 1.0, window_cost_lse);
        CHECK(std::fabs(fit.cost - oracle) <= 1e-9);
    }
}

TEST_CASE("segmented LSE invariants") {
    CounterRng rng(13);
    for (int inst = 0; inst < 40; ++inst) {
        const std::size_t n = 4 + static_cast<std::size_t>(rng.next_u64() % 9);
        auto data = make_reg_data(rng, n, 0.5);
        double prev = 1e300;
        for (std::size_t k = 1; k <= std::min<std::size_t>(n, 4); ++k) {
            const double cost = fit_segmented_lse(data, k, 1.0).cost;
            CHECK(cost <= prev + 1e-12);
            prev = cost;
        }
        // Location equivariance while no clamp is active.
        auto base = fit_segmented_lse(data, 2, 10.0);
        auto shifted_data = data;
        const double c = 0.25;
        for (auto& v : shifted_data.y) v += c;
        auto shifted = fit_segmented_lse(shifted_data, 2, 10.0);
        REQUIRE(shifted.segment_start == base.segment_start);
        for (std::size_t s = 0; s < base.segment_level.size(); ++s)
            CHECK(shifted.segment_level[s] == Catch::Approx(base.segment_level[s] + c));
    }
}

TEST_CASE("segmented DP tie-breaking and duplicate design points") {
    // Constant data (exact in binary): every segmentation ties and the
    // reconstruction prefers the lexicographically smallest breakpoint
    // sequence, i.e. the earliest cuts.
    RegressionData flat{{0.1, 0.3, 0.5, 0.7, 0.9}, {0.5, 0.5, 0.5, 0.5, 0.5}, {}};
    auto fit = fit_segmented_lse(flat, 3, 1.0);
    REQUIRE(fit.segment_start == std::vector<std::size_t>{0, 1, 2});
    for (double lv : fit.segment_level) CHECK(lv == 0.5);
    // The realized function is still the constant 0.5.
    CHECK(l2_risk(fit.fn, PiecewiseConstantFn::constant(0.5)) == 0.0);

    // Duplicate design points collapse zero-width segments in the function.
    RegressionData dup{{0.2, 0.5, 0.5, 0.8}, {0.0, 1.0, -1.0, 0.5}, {}};
    auto fit2 = fit_segmented_lse(dup, 4, 1.0);
    CHECK_NOTHROW(validate(fit2.fn));
    auto fit3 = fit_segmented_lad(dup, 2, 1.0);
    CHECK_NOTHROW(validate(fit3.fn));
}

TEST_CASE("segmented LAD examples and oracle equality") {
    CounterRng rng(29);

    // Median robustness: one outlier, k = 1.
    RegressionData d;
    for (int i = 0; i < 11; ++i) {
        d.x.push_back((i + 0.5) / 11.0);
        d.y.push_back(0.0);
    }
    d.y[10] = 100.0;
    auto f = fit_segmented_lad(d, 1, 1.0);
    CHECK(f.segment_level[0] == 0.0);
    CHECK(f.cost == Catch::Approx(100.0));

    // Odd n, k = 1: plain median.
    auto d2 = make_reg_data(rng, 9, 0.8);
    auto f2 = fit_segmented_lad(d2, 1, 1.0);
    std::vector<double> w = d2.y;
    std::sort(w.begin(), w.end());
    CHECK(f2.segment_level[0] == Catch::Approx(w[4]));

    // Even count: the lower median.
    auto d3 = make_reg_data(rng, 6, 0.8);
    auto f3 = fit_segmented_lad(d3, 1, 1.0);
    std::vector<double> w3 = d3.y;
    std::sort(w3.begin(), w3.end());
    CHECK(f3.segment_level[0] == w3[2]);

    for (int inst = 0; inst < 200; ++inst) {
        const std::size_t n = 2 + static_cast<std::size_t>(rng.next_u64() % 9);
        const std::size_t k = 1 + static_cast<std::size_t>(rng.next_u64() % 2);
        auto data = make_reg_data(rng, n);
        const auto fit = fit_segmented_lad(data, std::min(k, n), 1.0);
        const auto s = sorted_xy(data);
        const double oracle = exhaustive_partition(s.y, std::min(k, n), 1.0, window_cost_lad);
        CHECK(std::fabs(fit.cost - oracle) <= 1e-9);
    }

    // Cost non-increasing in k.
    auto data = make_reg_data(rng, 10);
    double prev = 1e300;
    for (std::size_t k = 1; k <= 4; ++k) {
        const double cost = fit_segmented_lad(data, k, 1.0).cost;
        CHECK(cost <= prev + 1e-12);
        prev = cost;
    }
}

TEST_CASE("isotonic fit equals the composition oracle") {
    CounterRng rng(37);
    for (int inst = 0; inst < 100; ++inst) {
        const std::size_t n = 2 + static_cast<std::size_t>(rng.next_u64() % 7);
        auto data = make_reg_data(rng, n, 1.6);
        auto fn = fit_isotonic(data, 1.0);
        auto s = sorted_xy(data);
        std::vector<double> fitted(n);
        for (std::size_t i = 0; i < n; ++i) fitted[i] = fn(s.x[i]);
        for (std::size_t i = 1; i < n; ++i) CHECK(fitted[i] >= fitted[i - 1] - 1e-12);
        double rss = 0.0;
        for (std::size_t i = 0; i < n; ++i) rss += (s.y[i] - fitted[i]) * (s.y[i] - fitted[i]);

        // Oracle: all block compositions, clamp(block mean), monotone filter.
        double best = 1e300;
        for (std::size_t mask = 0; mask < (std::size_t{1} << (n - 1)); ++mask) {
            std::vector<double> levels;
            std::vector<std::size_t> starts{0};
            for (std::size_t i = 0; i + 1 < n; ++i)
                if (mask & (std::size_t{1} << i)) starts.push_back(i + 1);
            starts.push_back(n);
            bool ok = true;
            double cost = 0.0;
            double prev_level = -1e300;
            for (std::size_t b = 0; b + 1 < starts.size(); ++b) {
                double sum = 0.0;
                for (std::size_t i = starts[b]; i < starts[b + 1]; ++i) sum += s.y[i];
                const double m = static_cast<double>(starts[b + 1] - starts[b]);
                const double lv = std::clamp(sum / m, -1.0, 1.0);
                if (lv < prev_level - 1e-12) {
                    ok = false;
                    break;
                }
                prev_level = lv;
                for (std::size_t i = starts[b]; i < starts[b + 1]; ++i)
                    cost += (s.y[i] - lv) * (s.y[i] - lv);
            }
            if (ok) best = std::min(best, cost);
        }
        CHECK(std::fabs(rss - best) <= 1e-9);
    }
}

TEST_CASE("isotonic examples and pool means") {
    // Already non-decreasing data within bounds is reproduced.
    RegressionData inc{{0.1, 0.4, 0.7, 0.9}, {-0.5, -0.1, 0.2, 0.8}, {}};
    auto fn = fit_isotonic(inc, 1.0);
    for (std::size_t i = 0; i < inc.x.size(); ++i)
        CHECK(fn(inc.x[i]) == Catch::Approx(inc.y[i]));

    // Strictly decreasing data pools completely.
    RegressionData dec{{0.1, 0.5, 0.9}, {0.9, 0.3, -0.6}, {}};
    auto fn2 = fit_isotonic(dec, 1.0);
    const double mean = (0.9 + 0.3 - 0.6) / 3.0;
    for (double x : dec.x) CHECK(fn2(x) == Catch::Approx(mean));

    // Unclamped pools have zero mean residuals.
    CounterRng rng(41);
    auto data = make_reg_data(rng, 24, 0.7);
    auto fit = fit_isotonic(data, 1.0);
    auto s = sorted_xy(data);
    std::vector<double> fitted(24);
    for (std::size_t i = 0; i < 24; ++i) fitted[i] = fit(s.x[i]);
    std::size_t i = 0;
    while (i < 24) {
        std::size_t j = i;
        while (j + 1 < 24 && fitted[j + 1] == fitted[i]) ++j;
        if (std::fabs(fitted[i]) < 1.0) {  // pool not clamped
            double resid = 0.0;
            for (std::size_t t = i; t <= j; ++t) resid += s.y[t] - fitted[t];
            CHECK(std::fabs(resid) < 1e-9);
        }
        i = j + 1;
    }
}

TEST_CASE("linear 1d closed form") {
    RegressionData exact{{0.1, 0.4, 0.9}, {0.2, 0.8, 1.8}, {}};
    CHECK(fit_linear_1d(exact) == Catch::Approx(2.0));
    RegressionData flat{{1.0, 2.0, 3.0}, {1.0, 1.0, 1.0}, {}};
    CHECK(fit_linear_1d(flat) == Catch::Approx(6.0 / 14.0));
    RegressionData neg{{0.2, 0.6}, {-0.2, -0.6}, {}};
    CHECK(fit_linear_1d(neg) == Catch::Approx(-1.0));
    RegressionData degenerate{{0.0, 0.0}, {1.0, 2.0}, {}};
    CHECK_THROWS_AS(fit_linear_1d(degenerate), std::runtime_error);
}

TEST_CASE("piecewise functions validate and serialize") {
    PiecewiseConstantFn good{{0.0, 0.25, 1.0}, {0.5, -0.25}, 1.0};
    CHECK_NOTHROW(validate(good));
    PiecewiseConstantFn bad_domain{{0.1, 1.0}, {0.0}, 1.0};
    CHECK_THROWS_AS(validate(bad_domain), std::invalid_argument);
    PiecewiseConstantFn bad_level{{0.0, 1.0}, {1.5}, 1.0};
    CHECK_THROWS_AS(validate(bad_level), std::invalid_argument);

    const std::string rec = to_json_record(good, 0.125);
    CHECK(rec == "{\"breakpoints\": [0, 0.25, 1], \"levels\": [0.5, -0.25], \"rss\": 0.125}");
}

TEST_CASE("l2 risk closed forms and triangle inequality") {
    auto zero = PiecewiseConstantFn::constant(0.0);
    auto one = PiecewiseConstantFn::constant(1.0);
    CHECK(l2_risk(zero, zero) == 0.0);
    CHECK(l2_risk(one, zero) == 1.0);
    PiecewiseConstantFn half{{0.0, 0.5, 1.0}, {1.0, 0.0}, 1.0};
    CHECK(l2_risk(half, zero) == Catch::Approx(std::sqrt(0.5)));

    CounterRng rng(53);
    auto random_fn = [&]() {
        const std::size_t segs = 1 + rng.next_u64() % 4;
        PiecewiseConstantFn f;
        f.breakpoints.push_back(0.0);
        std::vector<double> cuts;
        for (std::size_t i = 0; i + 1 < segs; ++i) cuts.push_back(rng.unit_oo());
        std::sort(cuts.begin(), cuts.end());
        for (double c : cuts)
            if (c > f.breakpoints.back()) f.breakpoints.push_back(c);
        f.breakpoints.push_back(1.0);
        for (std::size_t i = 0; i + 1 < f.breakpoints.size(); ++i)
            f.levels.push_back(2.0 * rng.unit_oo() - 1.0);
        return f;
    };
    for (int inst = 0; inst < 200; ++inst) {
        auto a = random_fn(), b = random_fn(), c = random_fn();
        CHECK(l2_risk(a, c) <= l2_risk(a, b) + l2_risk(b, c) + 1e-12);
    }
}
