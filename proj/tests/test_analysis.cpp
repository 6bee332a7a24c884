#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <random>
#include <set>

#include "banditlab/analysis.hpp"
#include "oracle.hpp"

using namespace banditlab;

namespace {

BanditInstance anchor() { return oracle::bernoulli({0.96, 0.2}, {0.95, 0.0}, {1.0, 1.0}); }

// Pull bound of a suboptimal arm as a function of the split eps in (0, gap).
long double pull_bound(long double g, long double c1, long double gap, long double eps) {
    return 1.0L + 5.0L * c1 / (eps * eps) + 2.0L * g / ((gap - eps) * (gap - eps));
}

BanditInstance random_instance(std::mt19937_64& rng) {
    std::uniform_real_distribution<double> unif(0.0, 1.0);
    for (;;) {
        const std::size_t k = 2 + rng() % 5;
        std::vector<double> mu, lo, hi;
        for (std::size_t i = 0; i < k; ++i) {
            const double m = 0.01 + 0.98 * unif(rng);
            mu.push_back(m);
            lo.push_back(m * std::pow(unif(rng), 0.2));
            hi.push_back(m + (1 - m) * unif(rng));
        }
        std::set<double> distinct(mu.begin(), mu.end());
        if (distinct.size() == k) return oracle::bernoulli(mu, lo, hi);
    }
}

}  // namespace

TEST_CASE("asymptotic anchors") {
    const auto inst = anchor();
    CHECK(std::abs(asymptotic_bound(Algorithm::Glue, inst) - 0.29965) <= 1e-4);
    CHECK(std::abs(asymptotic_bound(Algorithm::BKlUcb, inst) - 0.36488) <= 1e-4);
    CHECK(std::abs(asymptotic_bound(Algorithm::Ossb, inst) - 0.36488) <= 1e-4);
    const double c = static_cast<double>(oracle::sigma_sq_unit(0.95L, 1.0L));
    CHECK(asymptotic_bound(Algorithm::Glue, inst) == doctest::Approx(2.0 * c / 0.76).epsilon(1e-12));
    CHECK(asymptotic_bound(Algorithm::KlUcb, inst) ==
          doctest::Approx(static_cast<double>(0.76L / oracle::kl(0.2L, 0.96L))).epsilon(1e-12));
    CHECK(asymptotic_bound(Algorithm::Ucb, inst) == doctest::Approx(0.5 / 0.76));
}

TEST_CASE("single arm gives zero for every algorithm") {
    const auto inst = oracle::bernoulli({0.4}, {0.0}, {1.0});
    for (Algorithm a : all_algorithms()) CHECK(asymptotic_bound(a, inst) == 0.0);
}

TEST_CASE("algorithm names round-trip") {
    for (Algorithm a : all_algorithms()) CHECK(algorithm_from_string(to_string(a)) == a);
    CHECK_THROWS(algorithm_from_string("thompson"));
}

TEST_CASE("ties are rejected") {
    const auto inst = oracle::bernoulli({0.5, 0.5}, {0.0, 0.0}, {1.0, 1.0});
    CHECK_THROWS_AS(asymptotic_bound(Algorithm::Glue, inst), ValidationError);
    CHECK_THROWS_AS(finite_time_bound(inst, 100), ValidationError);
}

TEST_CASE("kl rows need the unit support") {
    auto inst = anchor();
    inst.support = Support(0.0, 2.0);
    CHECK_THROWS(asymptotic_bound(Algorithm::KlUcb, inst));
    CHECK_NOTHROW(asymptotic_bound(Algorithm::Glue, inst));
    const auto rep = bound_report(inst, {100});
    for (const auto& r : rep) CHECK(r.algorithm.find("kl") == std::string::npos);
}

TEST_CASE("partition examples") {
    const auto open = oracle::bernoulli({0.9, 0.3, 0.5}, {0, 0, 0}, {1, 1, 1});
    CHECK(partition(open, 0.0).k1.empty());
    CHECK(partition(open, 0.0).k2.size() == 2u);
    const auto clip = oracle::bernoulli({0.985, 0.2}, {0.0, 0.0}, {1.0, 0.5});
    CHECK(partition(clip, 0.0).k1 == std::vector<std::size_t>{1});
}

TEST_CASE("partition is monotone in delta") {
    // a larger delta only moves arms out of K1 into K2
    std::mt19937_64 rng(1);
    for (int trial = 0; trial < 300; ++trial) {
        const auto inst = random_instance(rng);
        auto prev = partition(inst, 0.0);
        for (double d = 0.01; d < 1.0; d += 0.01) {
            const auto p = partition(inst, d);
            CHECK(p.k1.size() + p.k2.size() == prev.k1.size() + prev.k2.size());
            for (std::size_t k : p.k1) CHECK(std::find(prev.k1.begin(), prev.k1.end(), k) != prev.k1.end());
            prev = p;
        }
        CHECK(prev.k1.empty());
    }
}

TEST_CASE("coefficient orderings") {
    std::mt19937_64 rng(2);
    for (int trial = 0; trial < 500; ++trial) {
        const auto inst = random_instance(rng);
        const double glue = asymptotic_bound(Algorithm::Glue, inst);
        const double bucb = asymptotic_bound(Algorithm::BUcb, inst);
        const double ucb = asymptotic_bound(Algorithm::Ucb, inst);
        const double bkl = asymptotic_bound(Algorithm::BKlUcb, inst);
        const double kl = asymptotic_bound(Algorithm::KlUcb, inst);
        CHECK(glue >= 0.0);
        CHECK(glue <= bucb * (1 + 1e-12));
        CHECK(bucb <= ucb * (1 + 1e-12));
        CHECK(bkl <= kl * (1 + 1e-12));
        CHECK(bkl == asymptotic_bound(Algorithm::Ossb, inst));
    }
}

TEST_CASE("h equals the pull bound at the chosen split") {
    for (double c1 : {0.01, 0.1, 0.25, 0.5, 1.0}) {
        for (double g : {0.5, 3.0, 40.0, 1e4}) {
            for (double gap : {0.05, 0.3, 0.9}) {
                const long double alpha = std::cbrt(2.0L / (5.0L * c1));
                const long double eps = gap / (alpha * std::cbrt(static_cast<long double>(g)) + 1.0L);
                const long double rest = 1.0L + 5.0L * c1 / (gap * gap) + 2.0L * g / (gap * gap);
                const long double h = pull_bound(g, c1, gap, eps) - rest;
                CHECK(std::abs(bound_h(g, c1, gap) - static_cast<double>(h)) <= 1e-9 * static_cast<double>(h));
                // golden-section optimum over eps: h can never undercut it
                long double lo = 0.0L, hi = gap;
                const long double r = (std::sqrt(5.0L) - 1.0L) / 2.0L;
                for (int i = 0; i < 200; ++i) {
                    const long double a = hi - r * (hi - lo), b = lo + r * (hi - lo);
                    if (pull_bound(g, c1, gap, a) < pull_bound(g, c1, gap, b)) {
                        hi = b;
                    } else {
                        lo = a;
                    }
                }
                const long double best = pull_bound(g, c1, gap, 0.5L * (lo + hi)) - rest;
                CHECK(static_cast<double>(best) <= bound_h(g, c1, gap) * (1 + 1e-9));
            }
        }
    }
}

TEST_CASE("the closed form printed with the lemma undercuts h for small c1") {
    const double g = 20.0, gap = 0.5;
    for (double c1 : {0.01, 0.1, 0.3}) {
        const double k = std::cbrt(20.0 * c1);
        const double printed = (k * (1.0 + k) * std::cbrt(g * g) + 3.0 * std::cbrt(50.0 * c1 * c1) * std::cbrt(g)) /
                               (gap * gap);
        CHECK(printed < bound_h(g, c1, gap));
    }
}

TEST_CASE("finite-time bound matches a direct evaluation") {
    const auto inst = anchor();
    const long double c = oracle::sigma_sq_unit(0.95L, 1.0L);
    const long double sigma = 0.25L;
    const long double gap = 0.76L;
    for (std::size_t n : {1u, 10u, 1000u, 1000000u}) {
        const long double L = std::log(oracle::f(static_cast<long double>(n)));
        const long double g = c * L + std::sqrt(c * sigma * M_PI * L) + sigma;
        const long double alpha = std::cbrt(2.0L / (5.0L * c));
        const long double eps = gap / (alpha * std::cbrt(g) + 1.0L);
        const long double expected = gap * pull_bound(g, c, gap, eps);
        const auto b = finite_time_bound(inst, n, {0.5});
        CHECK(std::abs(b.value - static_cast<double>(expected)) <= 1e-9 * static_cast<double>(expected));
        REQUIRE(b.arms.size() == 1u);
        CHECK_FALSE(b.arms[0].meta_pruned);
    }
}

TEST_CASE("finite-time bound is non-decreasing in n") {
    std::mt19937_64 rng(3);
    for (int trial = 0; trial < 100; ++trial) {
        const auto inst = random_instance(rng);
        double prev = 0.0;
        for (std::size_t n = 1; n <= 100000000; n *= 7) {
            const double v = finite_time_bound(inst, n).value;
            CHECK(v >= prev * (1 - 1e-12));
            prev = v;
        }
    }
}

TEST_CASE("all suboptimal arms meta-pruned: bound constant in n") {
    const auto inst = oracle::bernoulli({0.9, 0.3}, {0.5, 0.0}, {1.0, 0.7});
    const double a = finite_time_bound(inst, 10, {0.05}).value;
    const double b = finite_time_bound(inst, 100000000, {0.05}).value;
    CHECK(a == b);
    const double c1 = static_cast<double>(oracle::sigma_sq_unit(0.5L, 1.0L));
    CHECK(a == doctest::Approx(5.0 * c1 * 0.6 / (0.2 * 0.2)));
}

TEST_CASE("delta grid") {
    CHECK_THROWS_AS(finite_time_bound(anchor(), 100, {}), ValidationError);
    CHECK_THROWS_AS(finite_time_bound(anchor(), 100, {0.0}), ValidationError);
    const auto grid = default_delta_grid(anchor());
    CHECK(grid.size() == 64u);
    for (std::size_t i = 1; i < grid.size(); ++i) CHECK(grid[i] > grid[i - 1]);
    const auto lone = oracle::bernoulli({0.9, 0.3}, {0.8, 0.0}, {1.0, 0.5});  // arm 2 pruned
    CHECK(default_delta_grid(lone) == std::vector<double>{1.0});
    CHECK(finite_time_bound(lone, 1000).value == 0.0);
}

TEST_CASE("bound over ln f(n) approaches the asymptotic coefficient") {
    std::mt19937_64 rng(4);
    std::vector<BanditInstance> cases = {anchor()};
    for (int i = 0; i < 30; ++i) cases.push_back(random_instance(rng));
    for (const auto& inst : cases) {
        const double coef = asymptotic_bound(Algorithm::Glue, inst);
        const double L = 1e12;
        const auto grid = default_delta_grid(inst);
        const double ratio = finite_time_bound_log(inst, L, grid).value / L;
        CHECK(std::abs(ratio - coef) <= 0.05 * coef + 1e-6);
    }
}

TEST_CASE("heatmap anchor and grid") {
    const MeanBounds b({0.95, 0.0}, {1.0, 1.0});
    const auto cells = heatmap({0.96}, {0.2}, b);
    REQUIRE(cells.size() == 1u);
    REQUIRE(cells[0].ratio.has_value());
    CHECK(std::abs(*cells[0].ratio - 0.29965 / 0.36488) < 1e-3);
    CHECK(std::abs(*cells[0].ratio - 0.8212) < 1e-4);

    const auto invalid = heatmap({0.96, 0.5}, {0.97, 0.2}, b);
    CHECK_FALSE(invalid[0].ratio.has_value());  // mu1 < mu2
    CHECK_FALSE(invalid[2].ratio.has_value());  // mu1 outside [0.95, 1]

    const auto [m1, m2] = heatmap_grid(0.95, 50);
    CHECK(m1.size() == 50u);
    CHECK(m2.size() == 50u);
    CHECK(m1.front() == 0.95);
    CHECK(m2.front() == 0.0);
}

TEST_CASE("sub-unit region grows with l") {
    // fixed grid inside the tighter bounds
    std::vector<double> m1, m2;
    for (int i = 0; i < 40; ++i) m1.push_back(0.98 + 0.02 * i / 40.0);
    for (int i = 0; i < 40; ++i) m2.push_back(i / 40.0);
    std::vector<std::size_t> previous;
    bool first = true;
    for (double l : {0.92, 0.94, 0.96, 0.98}) {
        const auto cells = heatmap(m1, m2, MeanBounds({l, 0.0}, {1.0, 1.0}));
        std::vector<std::size_t> red;
        for (std::size_t i = 0; i < cells.size(); ++i) {
            if (cells[i].ratio && *cells[i].ratio < 1.0) red.push_back(i);
        }
        if (!first) {
            for (std::size_t i : previous) CHECK(std::find(red.begin(), red.end(), i) != red.end());
        }
        previous = red;
        first = false;
    }
    CHECK_FALSE(previous.empty());
}

TEST_CASE("ratio above one when the variance term loses") {
    // mu2 close to 0 makes kl large relative to the gap
    const auto cells = heatmap({0.999}, {0.001}, MeanBounds({0.5, 0.0}, {1.0, 1.0}));
    REQUIRE(cells[0].ratio.has_value());
    CHECK(*cells[0].ratio > 1.0);
}

TEST_CASE("corollary addon") {
    BoundedWithFailure f;
    f.failure_prob = {0.0, 0.0};
    CHECK(corollary_regret_addon(f, 1000) == 0.0);
    f.failure_prob = {0.01, 0.02};
    CHECK(corollary_regret_addon(f, 1000) == doctest::Approx(30.0));
    f.failure_prob.assign(4, 1.0 / 500.0);
    CHECK(corollary_regret_addon(f, 500) == doctest::Approx(4.0));
    f.failure_prob = {1.5};
    CHECK_THROWS(corollary_regret_addon(f, 10));
}

TEST_CASE("bound report") {
    const auto rep = bound_report(anchor(), {1000, 1000000});
    REQUIRE(rep.size() == 6u);
    CHECK(rep[0].algorithm == "glue");
    CHECK(rep[0].finite_time.size() == 2u);
    CHECK(rep[0].finite_time[0] <= rep[0].finite_time[1]);
}
