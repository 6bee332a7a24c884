// Arm-selection policies for bandits with mean bounds: GLUE, UCB, B-UCB,
// kl-UCB, B-kl-UCB and the Bernoulli closed form of OSSB.
#pragma once

#include <cstddef>
#include <optional>
#include <string>
#include <vector>

#include "banditlab/concentration.hpp"
#include "banditlab/core.hpp"

namespace banditlab {

enum class PolicyFamily { Glue, Ucb, BUcb, KlUcb, BKlUcb, Ossb };

struct PolicyKind {
    PolicyFamily family = PolicyFamily::Glue;
    double ossb_eps = 0.0;
    double ossb_gamma = 0.0;

    PolicyKind() = default;
    explicit PolicyKind(PolicyFamily f, double eps = 0.0, double gamma = 0.0);

    /// Accepts glue | ucb | b-ucb | kl-ucb | b-kl-ucb | ossb.
    static PolicyKind parse(const std::string& name, double ossb_eps = 0.0, double ossb_gamma = 0.0);

    std::string name() const;
    /// Indices are capped at the arm's upper bound.
    bool clips() const;
    bool kl_based() const { return family == PolicyFamily::KlUcb || family == PolicyFamily::BKlUcb; }
};

/// f(t) = 1 + t ln^2 t, with f(0) = 1.
double exploration_function(double t);

/// min(u, mean + sqrt(2 c ln f(t + 1) / pulls)).
double glue_index(double mean, std::size_t pulls, double c, double u, std::size_t t);

/// Bernoulli KL divergence d(p, q); +inf when q in {0, 1} and p != q.
double kl_bernoulli(double p, double q);

inline constexpr double kKlUcbTolerance = 1e-9;

/// sup { q in [mean, 1] : pulls * d(mean, q) <= ln f(t + 1) }, by bisection,
/// optionally capped at u_clip. Works in [0, 1] units.
double klucb_index(double mean, std::size_t pulls, std::size_t t,
                   std::optional<double> u_clip = std::nullopt);

/// Closed-form optimal exploration rates for Bernoulli arms with mean bounds.
/// theta_hat must already be truncated into [lower, upper].
std::vector<double> ossb_allocation(const std::vector<double>& theta_hat, const MeanBounds& bounds);

/// Mutable learning state for one run of one policy on a pruned arm set.
/// select_arm and update must alternate on a single thread.
class PolicyState {
public:
    PolicyState(PolicyKind kind, const Support& support, MeanBounds bounds);

    std::size_t select_arm();
    void update(std::size_t arm, double reward);

    const PolicyKind& kind() const { return kind_; }
    const Support& support() const { return support_; }
    const MeanBounds& bounds() const { return bounds_; }
    std::size_t num_arms() const { return pulls_.size(); }
    std::size_t step() const { return step_; }

    std::size_t pulls(std::size_t arm) const { return pulls_.at(arm); }
    /// Requires at least one pull of the arm.
    double empirical_mean(std::size_t arm) const;
    /// U_k(t): the (possibly clipped) index compared by select_arm.
    double index(std::size_t arm) const { return index_.at(arm); }
    /// Index before clipping at u_k; +inf for unplayed arms. Breaks ties
    /// between equal clipped indices.
    double raw_index(std::size_t arm) const { return raw_index_.at(arm); }
    double pseudo_variance(std::size_t arm) const { return scale_.at(arm); }
    const VarianceProfile& variance() const { return variance_; }

    /// OSSB only: the allocation used at the most recent decision.
    const std::vector<double>& ossb_allocation_last() const { return ossb_eta_; }
    std::size_t ossb_exploration_rounds() const { return ossb_rounds_; }

private:
    void refresh_indices();
    std::size_t select_by_index() const;
    std::size_t select_ossb();
    std::vector<double> truncated_means() const;

    PolicyKind kind_;
    Support support_;
    MeanBounds bounds_;
    VarianceProfile variance_;
    std::vector<double> scale_;  // c_k used in the exploration bonus

    std::size_t step_ = 0;
    std::vector<std::size_t> pulls_;
    std::vector<double> reward_sum_;
    std::vector<double> index_;
    std::vector<double> raw_index_;

    std::vector<double> ossb_eta_;
    std::size_t ossb_rounds_ = 0;
};

}  // namespace banditlab
