// Mean bounds from confounded logs.
//
// An oracle sees the full context (z, u), always plays the best arm for it and
// logs only (z, k, y). From such a log, together with separation gaps between
// the best and the other arms, every arm receives an interval for its mean
// under the visible context z alone, including arms that never appear in the
// log.
#pragma once

#include <cstddef>
#include <cstdint>
#include <string>
#include <utility>
#include <vector>

#include "banditlab/core.hpp"

namespace banditlab {

/// The oracle's world: visible contexts z, hidden contexts u, P(u | z) and
/// the full-context mean table mu[k][z][u]. Every (z, u) has a unique best arm.
struct LatentInstance {
    std::size_t num_arms = 0;
    std::vector<std::string> visible;
    std::vector<std::string> hidden;
    std::vector<std::vector<double>> p_u_given_z;        // [z][u]
    std::vector<std::vector<std::vector<double>>> means;  // [k][z][u]
    std::vector<double> z_weights;                        // empty: uniform over z

    std::size_t num_visible() const { return visible.size(); }
    std::size_t num_hidden() const { return hidden.size(); }
    double mean(std::size_t k, std::size_t z, std::size_t u) const { return means[k][z][u]; }

    std::size_t best_arm(std::size_t z, std::size_t u) const;
    double best_mean(std::size_t z, std::size_t u) const;
    /// mu_{k,z} = sum_u mu_{k,z,u} P(u | z)
    double agent_mean(std::size_t k, std::size_t z) const;
    double agent_best_mean(std::size_t z) const;
    std::size_t agent_best_arm(std::size_t z) const;
    /// Marginal probability of visible context z.
    double z_probability(std::size_t z) const;
};

/// Shape, stochasticity, mean range and unique-best-arm checks.
ValidationReport validate_latent(const LatentInstance& latent);
void require_valid(const LatentInstance& latent);

struct ContextStats {
    std::vector<double> p;     // p_z(k): how often the oracle played k
    double mu = 0.0;           // mu_z: average logged reward
    std::vector<double> mu_k;  // mu_z(k): contribution of arm k to mu_z
    double gap_lo = 0.0;       // lower separation gap
    double gap_hi = 1.0;       // upper separation gap
    std::size_t count = 0;     // records behind the estimates; 0 for exact statistics
};

struct LogStatistics {
    std::vector<ContextStats> contexts;

    std::size_t num_contexts() const { return contexts.size(); }
    std::size_t num_arms() const { return contexts.empty() ? 0 : contexts.front().p.size(); }
};

struct LogRecord {
    std::size_t z = 0;
    std::size_t k = 0;
    double y = 0.0;
};

struct ArmInterval {
    double lower = 0.0;
    double upper = 1.0;
    double raw_lower = 0.0;  // before clamping into [0, 1]
    double raw_upper = 1.0;
    double failure_prob = 0.0;
    std::vector<std::size_t> large_reward_arms;  // K_>(k, z), 0-based
};

struct TransferredBounds {
    std::vector<std::vector<ArmInterval>> intervals;  // [z][k]
    double confidence = 1.0;
    double per_quantity_failure = 0.0;
    std::size_t quantities_per_context = 0;

    std::size_t num_contexts() const { return intervals.size(); }
    std::size_t num_arms() const { return intervals.empty() ? 0 : intervals.front().size(); }
    const ArmInterval& at(std::size_t k, std::size_t z) const { return intervals.at(z).at(k); }
    MeanBounds bounds_for(std::size_t z) const;
};

/// Tightest valid gaps per visible context:
/// lo = min_u (best - second best), hi = max_u (best - worst).
/// Rejects single-arm instances and contexts with lo <= 0.
std::vector<std::pair<double, double>> gaps(const LatentInstance& latent);

/// Exact (infinite-log) statistics, with the tightest gaps attached.
LogStatistics oracle_statistics(const LatentInstance& latent);

/// Replaces the gaps of `stats` by externally supplied ones. When `truth` is
/// given, supplied gaps must be no tighter than the true tightest gaps.
void apply_gaps(LogStatistics& stats, const std::vector<std::pair<double, double>>& supplied,
                const LatentInstance* truth = nullptr);

/// Upper and lower transferred bounds for every (k, z).
TransferredBounds transfer_bounds(const LogStatistics& stats);

/// Plug-in estimates for context z from a finite log.
ContextStats empirical_statistics(const std::vector<LogRecord>& records, std::size_t z,
                                  std::size_t num_arms, double gap_lo, double gap_hi);

/// Estimates for every context 0..gaps.size()-1.
LogStatistics empirical_statistics(const std::vector<LogRecord>& records, std::size_t num_arms,
                                   const std::vector<std::pair<double, double>>& gaps);

/// Bounds valid with probability >= confidence for finite logs: every
/// estimated scalar is widened by a Hoeffding interval, the failure budget
/// split evenly over all scalars of all contexts.
TransferredBounds finite_log_bounds(const LogStatistics& estimate, double confidence);

/// i.i.d. oracle log of n records: z from the visible marginal, u ~ P(u | z),
/// the full-context best arm and a Bernoulli reward.
std::vector<LogRecord> sample_log(const LatentInstance& latent, std::size_t n, std::uint64_t seed);

struct AdmissibilityReport {
    std::vector<std::string> violations;
    bool ok() const { return violations.empty(); }
};

/// Does `candidate` reproduce the reference log statistics and respect its gaps?
AdmissibilityReport admissible_check(const LatentInstance& candidate, const LogStatistics& reference,
                                     double tol);
/// As above, and the best arm of every full context must also match `reference`.
AdmissibilityReport admissible_check(const LatentInstance& candidate, const LatentInstance& reference,
                                     double tol);

/// Admissible instance in which every arm's agent mean equals its upper bound.
LatentInstance tight_upper_instance(const LatentInstance& latent);

/// Admissible instance in which arm k's agent mean equals its lower bound in
/// every visible context.
LatentInstance tight_lower_instance(const LatentInstance& latent, std::size_t k);

}  // namespace banditlab
