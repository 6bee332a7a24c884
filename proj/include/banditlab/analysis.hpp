// Closed-form regret bounds: asymptotic coefficients of every policy, the
// explicit finite-time bound for GLUE, and GLUE / B-kl-UCB ratio grids.
#pragma once

#include <cstddef>
#include <optional>
#include <string>
#include <vector>

#include "banditlab/core.hpp"
#include "banditlab/policies.hpp"

namespace banditlab {

enum class Algorithm { Ucb, BUcb, KlUcb, BKlUcb, Ossb, Glue };

std::string to_string(Algorithm algorithm);
Algorithm algorithm_from_string(const std::string& name);
std::vector<Algorithm> all_algorithms();

/// limsup R_n / ln n. Rejects ties between the best arm and another arm, and
/// kl-based rows on supports other than [0, 1].
double asymptotic_bound(Algorithm algorithm, const BanditInstance& instance);

/// Split of the retained suboptimal arms (original ids) for a given delta.
struct ArmPartition {
    std::vector<std::size_t> k1;  // mu* > u_k + delta
    std::vector<std::size_t> k2;  // mu* <= u_k + delta
    double delta = 0.0;
};

ArmPartition partition(const BanditInstance& instance, double delta);

struct ArmTerms {
    std::size_t arm = 0;
    double gap = 0.0;
    double sigma_sq = 0.0;
    double pseudo_var = 0.0;
    double g = 0.0;
    double h = 0.0;
    double expected_pulls = 0.0;  // bound on E[T_k(n)] at the minimizing delta
    bool meta_pruned = false;     // arm sat in K1 at the minimizing delta
};

struct FiniteTimeBound {
    double value = 0.0;
    double delta = 0.0;
    std::vector<ArmTerms> arms;
};

/// 64 geometric points on [1e-4 min gap, max(0, max_k(mu* - u_k)) + max gap];
/// {1} when there is no suboptimal retained arm.
std::vector<double> default_delta_grid(const BanditInstance& instance);

/// Finite-time GLUE bound at horizon n, minimized over the delta grid.
/// Rejects an empty grid and non-positive deltas.
FiniteTimeBound finite_time_bound(const BanditInstance& instance, std::size_t n,
                                  const std::vector<double>& delta_grid);
/// Same, on the default grid.
FiniteTimeBound finite_time_bound(const BanditInstance& instance, std::size_t n);

/// Same bound written in terms of L = ln f(n) directly, so arbitrarily large
/// horizons can be evaluated.
FiniteTimeBound finite_time_bound_log(const BanditInstance& instance, double log_f,
                                      const std::vector<double>& delta_grid);

/// g(n) and h(n) of the sub-optimal-arm pull bound, c1 being the best arm's c.
/// h is the pull bound evaluated at eps = gap / (alpha g^{1/3} + 1),
/// alpha = (2 / (5 c1))^{1/3}, minus the 1 + 5 c1/gap^2 + 2 g/gap^2 part.
double bound_g(double c, double sigma_sq, double log_f);
double bound_h(double g, double c1, double gap);

/// n * sum_k p_k.
double corollary_regret_addon(const BoundedWithFailure& failure, std::size_t n);

struct BoundReport {
    std::string algorithm;
    double asymptotic = 0.0;  // kl rows are left out on supports other than [0, 1]
    std::vector<std::size_t> horizons;
    std::vector<double> finite_time;  // GLUE only
};

std::vector<BoundReport> bound_report(const BanditInstance& instance, const std::vector<std::size_t>& horizons);

struct HeatmapCell {
    double mu1 = 0.0;
    double mu2 = 0.0;
    std::optional<double> ratio;  // empty unless mu1 > mu2 and both means lie in their bounds
};

/// GLUE / B-kl-UCB asymptotic ratio for Bernoulli pairs with the given
/// two-arm bounds, row-major over mu1_grid then mu2_grid.
std::vector<HeatmapCell> heatmap(const std::vector<double>& mu1_grid, const std::vector<double>& mu2_grid,
                                 const MeanBounds& bounds);

/// mu1 = l + (1 - l) i / G and mu2 = i / G for i = 0..G-1.
std::pair<std::vector<double>, std::vector<double>> heatmap_grid(double l, std::size_t g);

}  // namespace banditlab
