// Monte-Carlo engine: runs policies on reward environments and records
// cumulative pseudo-regret at checkpoints.
//
// Seeding contract: episode seed i of a batch is derive_seed(root, {i}). Within
// an episode, arm k under visible context z draws its rewards from stream
// derive_seed(episode, {Reward, z, k}) and visible contexts come from
// derive_seed(episode, {Context}). Streams do not depend on the policy, so
// every policy in a batch faces the same reward sequences.
#pragma once

#include <cstddef>
#include <cstdint>
#include <string>
#include <vector>

#include "banditlab/core.hpp"
#include "banditlab/policies.hpp"
#include "banditlab/random.hpp"
#include "banditlab/transfer.hpp"

namespace banditlab {

/// E[clip(N(location, scale^2), a, b)].
double clipped_gaussian_mean(double location, double scale, double a, double b);

/// Location whose clipped mean equals `mean`; mean must lie strictly inside (a, b).
double clipped_gaussian_location(double mean, double scale, double a, double b);

struct ArmSampler {
    DistKind kind = DistKind::Bernoulli;
    double mean = 0.0;      // post-clipping mean for clipped Gaussians
    double scale = 0.0;
    double location = 0.0;  // pre-clipping Gaussian location
};

class Environment {
public:
    explicit Environment(const BanditInstance& instance);

    const Support& support() const { return support_; }
    std::size_t num_arms() const { return arms_.size(); }
    const std::vector<double>& means() const { return means_; }
    double best_mean() const { return best_; }

    /// One reward of `arm`; always inside the support.
    double draw(std::size_t arm, Rng& rng) const;

private:
    Support support_;
    std::vector<ArmSampler> arms_;
    std::vector<double> means_;
    double best_ = 0.0;
};

struct RegretTrace {
    std::string policy;
    std::uint64_t seed = 0;
    std::size_t context = 0;
    std::vector<std::size_t> checkpoints;
    std::vector<double> cum_regret;
    std::vector<std::size_t> pulls;  // per original arm at the horizon
    std::vector<std::size_t> arms;   // full play sequence (original ids) when requested
};

/// Geometric grid of `points` steps in [1, horizon], deduplicated, ending at horizon.
std::vector<std::size_t> default_checkpoints(std::size_t horizon, std::size_t points = 50);

struct EpisodeOptions {
    std::vector<std::size_t> checkpoints;  // empty: default grid
    bool record_arms = false;
};

/// Prune, then run the policy for `horizon` steps. Deterministic in `seed`.
RegretTrace run_episode(const Environment& env, const PolicyKind& kind, const MeanBounds& bounds,
                        std::size_t horizon, std::uint64_t seed, const EpisodeOptions& options = {});

struct RunConfig {
    BanditInstance instance;
    std::vector<PolicyKind> policies;
    std::size_t horizon = 1000;
    std::vector<std::uint64_t> seeds;  // seed ids; distinct
    std::uint64_t root_seed = 0;
    std::vector<std::size_t> checkpoints;  // empty: default grid
    double quantile_lo = 0.25;
    double quantile_hi = 0.75;
    bool keep_traces = true;
    /// 0: read BANDITLAB_THREADS, falling back to 1.
    unsigned threads = 0;
};

/// Consecutive seed ids 0..n-1.
std::vector<std::uint64_t> seed_range(std::size_t n);

struct PolicyAggregate {
    std::string policy;
    std::vector<std::size_t> checkpoints;
    std::vector<double> mean;
    std::vector<double> stderr_;
    std::vector<double> q_lo;
    std::vector<double> q_hi;
    std::vector<double> mean_pulls;  // per original arm at the horizon

    double final_mean() const { return mean.back(); }
    double final_stderr() const { return stderr_.back(); }
};

struct BatchResult {
    std::vector<PolicyAggregate> aggregates;  // config.policies order
    std::vector<RegretTrace> traces;          // policy-major, then seed order

    const PolicyAggregate& aggregate(const std::string& policy) const;
};

/// Aggregates traces that share a checkpoint grid.
PolicyAggregate aggregate_traces(const std::string& policy, const std::vector<const RegretTrace*>& traces,
                                 double quantile_lo, double quantile_hi);

BatchResult run_batch(const RunConfig& config);

/// Episode seed of seed id `id` under `root`.
std::uint64_t episode_seed(std::uint64_t root, std::uint64_t id);

/// One full-context reward for arm k in visible context z from a single
/// uniform draw. The reward is 1 exactly when `uniform` < mu_{k,z}; the
/// hidden context is then resolved from the same draw with the right
/// conditional law. Returns {u, y}.
std::pair<std::size_t, double> full_context_reward(const LatentInstance& latent, std::size_t z,
                                                   std::size_t k, double uniform);

/// Per-visible-context learning: one independent policy per z, instantiated
/// with that context's transferred bounds. Regret of context z is measured
/// against the best agent-space mean of z; checkpoints are global steps.
std::vector<RegretTrace> run_contextual(const LatentInstance& latent, const TransferredBounds& bounds,
                                        const PolicyKind& kind, std::size_t horizon, std::uint64_t seed,
                                        const EpisodeOptions& options = {});

/// The agent-space bandit of visible context z: Bernoulli arms with means
/// mu_{k,z} and the given bounds.
BanditInstance agent_instance(const LatentInstance& latent, const TransferredBounds& bounds,
                              std::size_t z);

struct ContextualConfig {
    LatentInstance latent;
    TransferredBounds bounds;
    std::vector<PolicyKind> policies;
    std::size_t horizon = 1000;
    std::vector<std::uint64_t> seeds;
    std::uint64_t root_seed = 0;
    std::vector<std::size_t> checkpoints;
    double quantile_lo = 0.25;
    double quantile_hi = 0.75;
    bool keep_traces = true;
    unsigned threads = 0;
};

struct ContextualResult {
    std::vector<PolicyAggregate> aggregates;  // policy-major, then visible context
    std::vector<std::size_t> contexts;        // visible context of each aggregate
    std::vector<RegretTrace> traces;          // policy, seed, context order
};

ContextualResult run_contextual_batch(const ContextualConfig& config);

unsigned configured_threads();

}  // namespace banditlab
