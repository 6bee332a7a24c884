#include "banditlab/simulator.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdlib>
#include <numeric>
#include <stdexcept>
#include <thread>

namespace banditlab {

namespace {

double normal_cdf(double x) { return 0.5 * std::erfc(-x / std::sqrt(2.0)); }
double normal_pdf(double x) { return std::exp(-0.5 * x * x) / std::sqrt(2.0 * M_PI); }

std::uint64_t reward_stream(std::uint64_t episode, std::size_t z, std::size_t k) {
    return derive_seed(episode, {static_cast<std::uint64_t>(StreamDomain::Reward), z, k});
}

double quantile_sorted(const std::vector<double>& sorted, double q) {
    if (sorted.size() == 1) return sorted.front();
    const double pos = q * static_cast<double>(sorted.size() - 1);
    const auto lo = static_cast<std::size_t>(std::floor(pos));
    const std::size_t hi = std::min(lo + 1, sorted.size() - 1);
    const double frac = pos - static_cast<double>(lo);
    return sorted[lo] + frac * (sorted[hi] - sorted[lo]);
}

template <typename Job>
void parallel_for(std::size_t count, unsigned threads, Job job) {
    threads = std::max(1u, std::min<unsigned>(threads, static_cast<unsigned>(count)));
    if (threads <= 1) {
        for (std::size_t i = 0; i < count; ++i) job(i);
        return;
    }
    std::atomic<std::size_t> next{0};
    std::exception_ptr failure;
    std::atomic<bool> failed{false};
    std::vector<std::thread> pool;
    for (unsigned t = 0; t < threads; ++t) {
        pool.emplace_back([&] {
            for (std::size_t i = next++; i < count; i = next++) {
                try {
                    job(i);
                } catch (...) {
                    if (!failed.exchange(true)) failure = std::current_exception();
                    return;
                }
            }
        });
    }
    for (auto& th : pool) th.join();
    if (failure) std::rethrow_exception(failure);
}

void validate_checkpoints(const std::vector<std::size_t>& cps, std::size_t horizon) {
    if (cps.empty() || cps.back() != horizon) {
        throw ValidationError("checkpoints must be non-empty and end at the horizon");
    }
    for (std::size_t i = 0; i < cps.size(); ++i) {
        if (cps[i] == 0 || (i && cps[i] <= cps[i - 1])) {
            throw ValidationError("checkpoints must be strictly increasing and >= 1");
        }
    }
}

}  // namespace

double clipped_gaussian_mean(double location, double scale, double a, double b) {
    const double alpha = (a - location) / scale;
    const double beta = (b - location) / scale;
    const double pa = normal_cdf(alpha);
    const double pb = normal_cdf(beta);
    return a * pa + b * (1.0 - pb) + location * (pb - pa) + scale * (normal_pdf(alpha) - normal_pdf(beta));
}

double clipped_gaussian_location(double mean, double scale, double a, double b) {
    if (!(mean > a && mean < b)) {
        throw ValidationError("clipped gaussian mean must lie strictly inside (a, b)");
    }
    if (!(scale > 0.0)) throw ValidationError("clipped gaussian scale must be positive");
    double lo = a - scale;
    double hi = b + scale;
    while (clipped_gaussian_mean(lo, scale, a, b) > mean) lo -= 2.0 * (hi - lo);
    while (clipped_gaussian_mean(hi, scale, a, b) < mean) hi += 2.0 * (hi - lo);
    for (int i = 0; i < 200 && hi - lo > 1e-15 * std::max(1.0, std::abs(lo)); ++i) {
        const double mid = 0.5 * (lo + hi);
        if (clipped_gaussian_mean(mid, scale, a, b) < mean) {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    return 0.5 * (lo + hi);
}

Environment::Environment(const BanditInstance& instance) : support_(instance.support) {
    require_valid(instance);
    for (const ArmSpec& spec : instance.arms) {
        ArmSampler s;
        s.kind = spec.kind;
        s.mean = spec.mean;
        s.scale = spec.scale;
        if (spec.kind == DistKind::ClippedGaussian) {
            s.location = clipped_gaussian_location(spec.mean, spec.scale, support_.a, support_.b);
        }
        arms_.push_back(s);
        means_.push_back(spec.mean);
    }
    best_ = *std::max_element(means_.begin(), means_.end());
}

double Environment::draw(std::size_t arm, Rng& rng) const {
    const ArmSampler& s = arms_.at(arm);
    switch (s.kind) {
        case DistKind::Bernoulli:
        case DistKind::TwoPoint:
            return rng.uniform() < support_.normalize(s.mean) ? support_.b : support_.a;
        case DistKind::ClippedGaussian: {
            std::normal_distribution<double> gauss(s.location, s.scale);
            return std::clamp(gauss(rng.engine()), support_.a, support_.b);
        }
    }
    return support_.a;
}

std::vector<std::size_t> default_checkpoints(std::size_t horizon, std::size_t points) {
    if (horizon == 0) throw ValidationError("horizon must be >= 1");
    std::vector<std::size_t> out;
    points = std::max<std::size_t>(points, 1);
    const double top = std::log(static_cast<double>(horizon));
    for (std::size_t i = 0; i < points; ++i) {
        const double frac = points == 1 ? 1.0 : static_cast<double>(i) / static_cast<double>(points - 1);
        auto step = static_cast<std::size_t>(std::llround(std::exp(frac * top)));
        step = std::clamp<std::size_t>(step, 1, horizon);
        if (out.empty() || step > out.back()) out.push_back(step);
    }
    if (out.back() != horizon) out.push_back(horizon);
    return out;
}

RegretTrace run_episode(const Environment& env, const PolicyKind& kind, const MeanBounds& bounds,
                        std::size_t horizon, std::uint64_t seed, const EpisodeOptions& options) {
    if (horizon == 0) throw ValidationError("horizon must be >= 1");
    if (bounds.size() != env.num_arms()) {
        throw ValidationError("bounds and environment differ in arm count");
    }
    const std::vector<std::size_t> checkpoints =
        options.checkpoints.empty() ? default_checkpoints(horizon) : options.checkpoints;
    validate_checkpoints(checkpoints, horizon);

    const PruneResult pruned = prune(bounds);
    PolicyState state(kind, env.support(), pruned.bounds);

    std::vector<Rng> streams;
    streams.reserve(pruned.num_retained());
    for (std::size_t original : pruned.retained) streams.emplace_back(reward_stream(seed, 0, original));

    RegretTrace trace;
    trace.policy = kind.name();
    trace.seed = seed;
    trace.checkpoints = checkpoints;
    trace.pulls.assign(env.num_arms(), 0);
    if (options.record_arms) trace.arms.reserve(horizon);

    double regret = 0.0;
    std::size_t next_cp = 0;
    for (std::size_t t = 1; t <= horizon; ++t) {
        const std::size_t arm = state.select_arm();
        const std::size_t original = pruned.retained[arm];
        const double reward = env.draw(original, streams[arm]);
        state.update(arm, reward);
        regret += env.best_mean() - env.means()[original];
        ++trace.pulls[original];
        if (options.record_arms) trace.arms.push_back(original);
        if (t == checkpoints[next_cp]) {
            trace.cum_regret.push_back(regret);
            ++next_cp;
        }
    }
    return trace;
}

std::vector<std::uint64_t> seed_range(std::size_t n) {
    std::vector<std::uint64_t> out(n);
    std::iota(out.begin(), out.end(), 0);
    return out;
}

std::uint64_t episode_seed(std::uint64_t root, std::uint64_t id) { return derive_seed(root, {id}); }

unsigned configured_threads() {
    if (const char* env = std::getenv("BANDITLAB_THREADS")) {
        char* end = nullptr;
        const long value = std::strtol(env, &end, 10);
        if (end != env && value > 0) return static_cast<unsigned>(value);
    }
    return 1;
}

const PolicyAggregate& BatchResult::aggregate(const std::string& policy) const {
    for (const auto& agg : aggregates) {
        if (agg.policy == policy) return agg;
    }
    throw std::out_of_range("no aggregate for policy " + policy);
}

PolicyAggregate aggregate_traces(const std::string& policy, const std::vector<const RegretTrace*>& traces,
                                 double quantile_lo, double quantile_hi) {
    if (traces.empty()) throw ValidationError("cannot aggregate zero traces");
    PolicyAggregate agg;
    agg.policy = policy;
    agg.checkpoints = traces.front()->checkpoints;
    const std::size_t n = traces.size();
    const std::size_t m = agg.checkpoints.size();
    std::vector<double> column(n);
    for (std::size_t c = 0; c < m; ++c) {
        for (std::size_t i = 0; i < n; ++i) column[i] = traces[i]->cum_regret.at(c);
        const double mean = std::accumulate(column.begin(), column.end(), 0.0) / static_cast<double>(n);
        double ss = 0.0;
        for (double v : column) ss += (v - mean) * (v - mean);
        const double se = n > 1 ? std::sqrt(ss / static_cast<double>(n - 1) / static_cast<double>(n)) : 0.0;
        std::sort(column.begin(), column.end());
        agg.mean.push_back(mean);
        agg.stderr_.push_back(se);
        agg.q_lo.push_back(quantile_sorted(column, quantile_lo));
        agg.q_hi.push_back(quantile_sorted(column, quantile_hi));
    }
    agg.mean_pulls.assign(traces.front()->pulls.size(), 0.0);
    for (const RegretTrace* tr : traces) {
        for (std::size_t k = 0; k < tr->pulls.size(); ++k) {
            agg.mean_pulls[k] += static_cast<double>(tr->pulls[k]) / static_cast<double>(n);
        }
    }
    return agg;
}

BatchResult run_batch(const RunConfig& config) {
    if (config.policies.empty()) throw ValidationError("run_batch needs at least one policy");
    if (config.seeds.empty()) throw ValidationError("run_batch needs at least one seed");
    {
        std::vector<std::uint64_t> sorted = config.seeds;
        std::sort(sorted.begin(), sorted.end());
        if (std::adjacent_find(sorted.begin(), sorted.end()) != sorted.end()) {
            throw ValidationError("seed ids must be distinct");
        }
    }
    if (!(config.quantile_lo >= 0.0 && config.quantile_lo <= config.quantile_hi && config.quantile_hi <= 1.0)) {
        throw ValidationError("quantile band must satisfy 0 <= lo <= hi <= 1");
    }
    const Environment env(config.instance);
    const MeanBounds bounds = config.instance.bounds();
    EpisodeOptions options;
    options.checkpoints =
        config.checkpoints.empty() ? default_checkpoints(config.horizon) : config.checkpoints;
    validate_checkpoints(options.checkpoints, config.horizon);

    const std::size_t ns = config.seeds.size();
    std::vector<RegretTrace> traces(config.policies.size() * ns);
    const unsigned threads = config.threads ? config.threads : configured_threads();
    parallel_for(traces.size(), threads, [&](std::size_t job) {
        const std::size_t p = job / ns;
        const std::size_t s = job % ns;
        RegretTrace tr = run_episode(env, config.policies[p], bounds, config.horizon,
                                     episode_seed(config.root_seed, config.seeds[s]), options);
        tr.seed = config.seeds[s];
        traces[job] = std::move(tr);
    });

    BatchResult result;
    for (std::size_t p = 0; p < config.policies.size(); ++p) {
        std::vector<const RegretTrace*> group;
        for (std::size_t s = 0; s < ns; ++s) group.push_back(&traces[p * ns + s]);
        result.aggregates.push_back(
            aggregate_traces(config.policies[p].name(), group, config.quantile_lo, config.quantile_hi));
    }
    if (config.keep_traces) result.traces = std::move(traces);
    return result;
}

std::pair<std::size_t, double> full_context_reward(const LatentInstance& latent, std::size_t z,
                                                   std::size_t k, double uniform) {
    // [0, mu_{k,z}) is split into P(u|z) mu_{k,z,u} pieces (reward 1), the rest
    // into P(u|z) (1 - mu_{k,z,u}) pieces (reward 0).
    const double mean = latent.agent_mean(k, z);
    const bool success = uniform < mean;
    double acc = success ? 0.0 : mean;
    std::size_t last = 0;
    for (std::size_t u = 0; u < latent.num_hidden(); ++u) {
        const double w = latent.p_u_given_z[z][u];
        const double piece = w * (success ? latent.means[k][z][u] : 1.0 - latent.means[k][z][u]);
        if (piece <= 0.0) continue;
        last = u;
        acc += piece;
        if (uniform < acc) return {u, success ? 1.0 : 0.0};
    }
    return {last, success ? 1.0 : 0.0};
}

BanditInstance agent_instance(const LatentInstance& latent, const TransferredBounds& bounds, std::size_t z) {
    BanditInstance inst;
    inst.support = Support(0.0, 1.0);
    for (std::size_t k = 0; k < latent.num_arms; ++k) {
        ArmSpec arm;
        arm.kind = DistKind::Bernoulli;
        arm.mean = latent.agent_mean(k, z);
        arm.lower = bounds.at(k, z).lower;
        arm.upper = bounds.at(k, z).upper;
        // tight bounds can miss the mean by round-off
        if (arm.mean < arm.lower && arm.lower - arm.mean < 1e-9) arm.lower = arm.mean;
        if (arm.mean > arm.upper && arm.mean - arm.upper < 1e-9) arm.upper = arm.mean;
        inst.arms.push_back(arm);
    }
    return inst;
}

std::vector<RegretTrace> run_contextual(const LatentInstance& latent, const TransferredBounds& bounds,
                                        const PolicyKind& kind, std::size_t horizon, std::uint64_t seed,
                                        const EpisodeOptions& options) {
    require_valid(latent);
    if (horizon == 0) throw ValidationError("horizon must be >= 1");
    if (bounds.num_contexts() != latent.num_visible() || bounds.num_arms() != latent.num_arms) {
        throw ValidationError("missing transferred bounds: need one interval per (arm, visible context)");
    }
    const std::vector<std::size_t> checkpoints =
        options.checkpoints.empty() ? default_checkpoints(horizon) : options.checkpoints;
    validate_checkpoints(checkpoints, horizon);

    const std::size_t nz = latent.num_visible();
    std::vector<double> z_weights = latent.z_weights;
    if (z_weights.empty()) z_weights.assign(nz, 1.0);
    const double z_total = std::accumulate(z_weights.begin(), z_weights.end(), 0.0);

    struct ContextRun {
        PruneResult pruned;
        PolicyState state;
        std::vector<Rng> streams;
        std::vector<double> agent_means;
        double best = 0.0;
        double regret = 0.0;
    };
    std::vector<ContextRun> runs;
    std::vector<RegretTrace> traces(nz);
    for (std::size_t z = 0; z < nz; ++z) {
        PruneResult pruned = prune(bounds.bounds_for(z));
        PolicyState state(kind, Support(0.0, 1.0), pruned.bounds);
        std::vector<Rng> streams;
        for (std::size_t original : pruned.retained) streams.emplace_back(reward_stream(seed, z, original));
        std::vector<double> means;
        for (std::size_t k = 0; k < latent.num_arms; ++k) means.push_back(latent.agent_mean(k, z));
        const double best = *std::max_element(means.begin(), means.end());
        runs.push_back(ContextRun{std::move(pruned), std::move(state), std::move(streams), std::move(means), best, 0.0});

        traces[z].policy = kind.name();
        traces[z].seed = seed;
        traces[z].context = z;
        traces[z].checkpoints = checkpoints;
        traces[z].pulls.assign(latent.num_arms, 0);
    }

    Rng context_rng(derive_seed(seed, {static_cast<std::uint64_t>(StreamDomain::Context)}));
    std::size_t next_cp = 0;
    for (std::size_t t = 1; t <= horizon; ++t) {
        std::size_t z = 0;
        if (nz > 1) {
            const double target = context_rng.uniform() * z_total;
            double acc = 0.0;
            for (z = 0; z + 1 < nz; ++z) {
                acc += z_weights[z];
                if (target < acc && z_weights[z] > 0.0) break;
            }
        }
        ContextRun& run = runs[z];
        const std::size_t arm = run.state.select_arm();
        const std::size_t original = run.pruned.retained[arm];
        const auto [u, y] = full_context_reward(latent, z, original, run.streams[arm].uniform());
        (void)u;
        run.state.update(arm, y);
        run.regret += run.best - run.agent_means[original];
        ++traces[z].pulls[original];
        if (options.record_arms) traces[z].arms.push_back(original);
        if (t == checkpoints[next_cp]) {
            for (std::size_t c = 0; c < nz; ++c) traces[c].cum_regret.push_back(runs[c].regret);
            ++next_cp;
        }
    }
    return traces;
}

ContextualResult run_contextual_batch(const ContextualConfig& config) {
    if (config.policies.empty()) throw ValidationError("run_contextual_batch needs at least one policy");
    if (config.seeds.empty()) throw ValidationError("run_contextual_batch needs at least one seed");
    EpisodeOptions options;
    options.checkpoints =
        config.checkpoints.empty() ? default_checkpoints(config.horizon) : config.checkpoints;
    validate_checkpoints(options.checkpoints, config.horizon);

    const std::size_t ns = config.seeds.size();
    std::vector<std::vector<RegretTrace>> runs(config.policies.size() * ns);
    const unsigned threads = config.threads ? config.threads : configured_threads();
    parallel_for(runs.size(), threads, [&](std::size_t job) {
        const std::size_t p = job / ns;
        const std::size_t s = job % ns;
        auto traces = run_contextual(config.latent, config.bounds, config.policies[p], config.horizon,
                                     episode_seed(config.root_seed, config.seeds[s]), options);
        for (auto& tr : traces) tr.seed = config.seeds[s];
        runs[job] = std::move(traces);
    });

    ContextualResult result;
    const std::size_t nz = config.latent.num_visible();
    for (std::size_t p = 0; p < config.policies.size(); ++p) {
        for (std::size_t z = 0; z < nz; ++z) {
            std::vector<const RegretTrace*> group;
            for (std::size_t s = 0; s < ns; ++s) group.push_back(&runs[p * ns + s][z]);
            result.aggregates.push_back(
                aggregate_traces(config.policies[p].name(), group, config.quantile_lo, config.quantile_hi));
            result.contexts.push_back(z);
        }
    }
    if (config.keep_traces) {
        for (auto& run : runs) {
            for (auto& tr : run) result.traces.push_back(std::move(tr));
        }
    }
    return result;
}

}  // namespace banditlab
