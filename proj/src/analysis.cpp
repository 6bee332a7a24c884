#include "banditlab/analysis.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "banditlab/concentration.hpp"

namespace banditlab {

namespace {

// Suboptimal arms must have a strictly positive gap.
void reject_ties(const BanditInstance& instance) {
    const std::size_t best = instance.best_arm();
    const double mu_star = instance.best_mean();
    for (std::size_t k = 0; k < instance.num_arms(); ++k) {
        if (k != best && instance.arms[k].mean == mu_star) {
            throw ValidationError("mean tie between arm " + std::to_string(best + 1) + " and arm " +
                                  std::to_string(k + 1) + ": asymptotic bounds are infinite");
        }
    }
}

void require_unit_support(const BanditInstance& instance, Algorithm algorithm) {
    if (!instance.support.is_unit()) {
        throw ValidationError(to_string(algorithm) + " bound needs Bernoulli rewards on [0, 1]");
    }
}

// Retained arms and their c / sigma^2, indexed by original id.
struct RetainedView {
    std::vector<std::size_t> arms;
    std::vector<double> sigma_sq;
    std::vector<double> pseudo_var;
};

RetainedView retained_view(const BanditInstance& instance) {
    const PruneResult pruned = prune(instance.bounds());
    const VarianceProfile profile = variance_profile(instance.support, pruned.bounds);
    RetainedView view;
    view.arms = pruned.retained;
    view.sigma_sq.assign(instance.num_arms(), 0.0);
    view.pseudo_var.assign(instance.num_arms(), 0.0);
    for (std::size_t i = 0; i < pruned.num_retained(); ++i) {
        view.sigma_sq[pruned.retained[i]] = profile.sigma_sq[i];
        view.pseudo_var[pruned.retained[i]] = profile.pseudo_var[i];
    }
    return view;
}

double kl_term(double mu, double mu_star) {
    const double d = kl_bernoulli(mu, mu_star);
    if (!std::isfinite(d) || d <= 0.0) return 0.0;
    return (mu_star - mu) / d;
}

}  // namespace

std::string to_string(Algorithm algorithm) {
    switch (algorithm) {
        case Algorithm::Ucb: return "ucb";
        case Algorithm::BUcb: return "b-ucb";
        case Algorithm::KlUcb: return "kl-ucb";
        case Algorithm::BKlUcb: return "b-kl-ucb";
        case Algorithm::Ossb: return "ossb";
        case Algorithm::Glue: return "glue";
    }
    return "?";
}

Algorithm algorithm_from_string(const std::string& name) {
    for (Algorithm a : all_algorithms()) {
        if (to_string(a) == name) return a;
    }
    throw ValidationError("unknown algorithm '" + name + "'");
}

std::vector<Algorithm> all_algorithms() {
    return {Algorithm::Glue, Algorithm::Ucb, Algorithm::BUcb, Algorithm::KlUcb, Algorithm::BKlUcb, Algorithm::Ossb};
}

ArmPartition partition(const BanditInstance& instance, double delta) {
    if (!(delta >= 0.0)) throw ValidationError("delta must be >= 0");
    const PruneResult pruned = prune(instance.bounds());
    const std::size_t best = instance.best_arm();
    const double mu_star = instance.best_mean();
    ArmPartition out;
    out.delta = delta;
    for (std::size_t k : pruned.retained) {
        if (k == best) continue;
        if (mu_star > instance.arms[k].upper + delta) {
            out.k1.push_back(k);
        } else {
            out.k2.push_back(k);
        }
    }
    return out;
}

double asymptotic_bound(Algorithm algorithm, const BanditInstance& instance) {
    require_valid(instance);
    reject_ties(instance);
    const std::size_t best = instance.best_arm();
    const double mu_star = instance.best_mean();
    const double w = instance.support.width();
    double total = 0.0;
    switch (algorithm) {
        case Algorithm::Ucb:
            for (std::size_t k = 0; k < instance.num_arms(); ++k) {
                if (k != best) total += 2.0 / instance.gap(k) * w * w / 4.0;
            }
            return total;
        case Algorithm::KlUcb:
            require_unit_support(instance, algorithm);
            for (std::size_t k = 0; k < instance.num_arms(); ++k) {
                if (k != best) total += kl_term(instance.arms[k].mean, mu_star);
            }
            return total;
        case Algorithm::BUcb:
            for (std::size_t k : partition(instance, 0.0).k2) total += 2.0 / instance.gap(k) * w * w / 4.0;
            return total;
        case Algorithm::BKlUcb:
        case Algorithm::Ossb:
            require_unit_support(instance, algorithm);
            for (std::size_t k : partition(instance, 0.0).k2) total += kl_term(instance.arms[k].mean, mu_star);
            return total;
        case Algorithm::Glue: {
            const RetainedView view = retained_view(instance);
            for (std::size_t k : partition(instance, 0.0).k2) total += 2.0 * view.pseudo_var[k] / instance.gap(k);
            return total;
        }
    }
    return total;
}

double bound_g(double c, double sigma_sq, double log_f) {
    return c * log_f + std::sqrt(c * sigma_sq * M_PI * log_f) + sigma_sq;
}

double bound_h(double g, double c1, double gap) {
    const double g13 = std::cbrt(g);
    return (3.0 * std::cbrt(20.0 * c1) * g13 * g13 + 3.0 * std::cbrt(50.0 * c1 * c1) * g13) / (gap * gap);
}

std::vector<double> default_delta_grid(const BanditInstance& instance) {
    const PruneResult pruned = prune(instance.bounds());
    const std::size_t best = instance.best_arm();
    const double mu_star = instance.best_mean();
    double gap_min = std::numeric_limits<double>::infinity();
    double gap_max = 0.0;
    double below = 0.0;
    for (std::size_t k : pruned.retained) {
        if (k == best) continue;
        const double gap = instance.gap(k);
        if (gap > 0.0) gap_min = std::min(gap_min, gap);
        gap_max = std::max(gap_max, gap);
        below = std::max(below, mu_star - instance.arms[k].upper);
    }
    if (!std::isfinite(gap_min)) return {1.0};
    const double lo = 1e-4 * gap_min;
    const double hi = below + gap_max;
    constexpr std::size_t points = 64;
    std::vector<double> grid;
    grid.reserve(points);
    for (std::size_t i = 0; i < points; ++i) {
        grid.push_back(lo * std::pow(hi / lo, static_cast<double>(i) / (points - 1)));
    }
    return grid;
}

FiniteTimeBound finite_time_bound_log(const BanditInstance& instance, double log_f,
                                      const std::vector<double>& delta_grid) {
    require_valid(instance);
    reject_ties(instance);
    if (delta_grid.empty()) throw ValidationError("delta grid is empty");
    if (!(log_f >= 0.0)) throw ValidationError("ln f(n) must be >= 0");
    const RetainedView view = retained_view(instance);
    const std::size_t best = instance.best_arm();
    const double mu_star = instance.best_mean();
    const double c1 = view.pseudo_var[best];

    FiniteTimeBound out;
    out.value = std::numeric_limits<double>::infinity();
    for (double delta : delta_grid) {
        if (!(delta > 0.0)) throw ValidationError("delta grid entries must be > 0");
        const ArmPartition part = partition(instance, delta);
        std::vector<ArmTerms> terms;
        double total = 0.0;
        for (std::size_t k : part.k1) {
            ArmTerms t;
            t.arm = k;
            t.gap = instance.gap(k);
            t.sigma_sq = view.sigma_sq[k];
            t.pseudo_var = view.pseudo_var[k];
            t.meta_pruned = true;
            const double sep = std::max(delta, mu_star - instance.arms[k].upper);
            t.expected_pulls = 5.0 * c1 / (sep * sep);
            total += t.gap * t.expected_pulls;
            terms.push_back(t);
        }
        for (std::size_t k : part.k2) {
            ArmTerms t;
            t.arm = k;
            t.gap = instance.gap(k);
            t.sigma_sq = view.sigma_sq[k];
            t.pseudo_var = view.pseudo_var[k];
            t.g = bound_g(t.pseudo_var, t.sigma_sq, log_f);
            t.h = bound_h(t.g, c1, t.gap);
            const double gap_sq = t.gap * t.gap;
            t.expected_pulls = 1.0 + 5.0 * c1 / gap_sq + 2.0 * t.g / gap_sq + t.h;
            total += t.gap * t.expected_pulls;
            terms.push_back(t);
        }
        if (total < out.value) {
            out.value = total;
            out.delta = delta;
            out.arms = std::move(terms);
        }
    }
    std::sort(out.arms.begin(), out.arms.end(), [](const ArmTerms& x, const ArmTerms& y) { return x.arm < y.arm; });
    return out;
}

FiniteTimeBound finite_time_bound(const BanditInstance& instance, std::size_t n,
                                  const std::vector<double>& delta_grid) {
    if (n == 0) throw ValidationError("horizon must be >= 1");
    return finite_time_bound_log(instance, std::log(exploration_function(static_cast<double>(n))), delta_grid);
}

FiniteTimeBound finite_time_bound(const BanditInstance& instance, std::size_t n) {
    return finite_time_bound(instance, n, default_delta_grid(instance));
}

double corollary_regret_addon(const BoundedWithFailure& failure, std::size_t n) {
    double total = 0.0;
    for (double p : failure.failure_prob) {
        if (!(p >= 0.0 && p <= 1.0)) throw ValidationError("failure probabilities must lie in [0, 1]");
        total += p;
    }
    return static_cast<double>(n) * total;
}

std::vector<BoundReport> bound_report(const BanditInstance& instance, const std::vector<std::size_t>& horizons) {
    std::vector<BoundReport> out;
    for (Algorithm a : all_algorithms()) {
        const bool kl = a == Algorithm::KlUcb || a == Algorithm::BKlUcb || a == Algorithm::Ossb;
        if (kl && !instance.support.is_unit()) continue;
        BoundReport r;
        r.algorithm = to_string(a);
        r.asymptotic = asymptotic_bound(a, instance);
        if (a == Algorithm::Glue) {
            r.horizons = horizons;
            for (std::size_t n : horizons) r.finite_time.push_back(finite_time_bound(instance, n).value);
        }
        out.push_back(std::move(r));
    }
    return out;
}

std::vector<HeatmapCell> heatmap(const std::vector<double>& mu1_grid, const std::vector<double>& mu2_grid,
                                 const MeanBounds& bounds) {
    if (bounds.size() != 2) throw ValidationError("heatmap needs two-arm bounds");
    std::vector<HeatmapCell> cells;
    cells.reserve(mu1_grid.size() * mu2_grid.size());
    for (double mu1 : mu1_grid) {
        for (double mu2 : mu2_grid) {
            HeatmapCell cell{mu1, mu2, std::nullopt};
            const bool inside = mu1 >= bounds.lower[0] && mu1 <= bounds.upper[0] && mu2 >= bounds.lower[1] &&
                                mu2 <= bounds.upper[1] && mu1 >= 0.0 && mu1 <= 1.0 && mu2 >= 0.0;
            if (inside && mu1 > mu2) {
                BanditInstance inst;
                inst.arms = {ArmSpec{mu1, DistKind::Bernoulli, 0.1, bounds.lower[0], bounds.upper[0]},
                             ArmSpec{mu2, DistKind::Bernoulli, 0.1, bounds.lower[1], bounds.upper[1]}};
                const double denom = asymptotic_bound(Algorithm::BKlUcb, inst);
                if (denom > 0.0) cell.ratio = asymptotic_bound(Algorithm::Glue, inst) / denom;
            }
            cells.push_back(cell);
        }
    }
    return cells;
}

std::pair<std::vector<double>, std::vector<double>> heatmap_grid(double l, std::size_t g) {
    if (g == 0) throw ValidationError("grid size must be >= 1");
    if (!(l >= 0.0 && l < 1.0)) throw ValidationError("l must lie in [0, 1)");
    std::vector<double> mu1, mu2;
    for (std::size_t i = 0; i < g; ++i) {
        const double frac = static_cast<double>(i) / static_cast<double>(g);
        mu1.push_back(l + (1.0 - l) * frac);
        mu2.push_back(frac);
    }
    return {mu1, mu2};
}

}  // namespace banditlab
