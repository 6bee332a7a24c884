#include "banditlab/transfer.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <sstream>

#include "banditlab/concentration.hpp"
#include "banditlab/random.hpp"

namespace banditlab {

namespace {

constexpr double kStochasticTol = 1e-9;

std::size_t sample_index(const std::vector<double>& weights, double uniform) {
    double total = std::accumulate(weights.begin(), weights.end(), 0.0);
    double target = uniform * total;
    double acc = 0.0;
    std::size_t last_positive = 0;
    for (std::size_t i = 0; i < weights.size(); ++i) {
        if (weights[i] <= 0.0) continue;
        last_positive = i;
        acc += weights[i];
        if (target < acc) return i;
    }
    return last_positive;
}

std::string where(std::size_t z, std::size_t u) {
    return "(z=" + std::to_string(z) + ", u=" + std::to_string(u) + ")";
}

}  // namespace

std::size_t LatentInstance::best_arm(std::size_t z, std::size_t u) const {
    std::size_t best = 0;
    for (std::size_t k = 1; k < num_arms; ++k) {
        if (means[k][z][u] > means[best][z][u]) best = k;
    }
    return best;
}

double LatentInstance::best_mean(std::size_t z, std::size_t u) const {
    return means[best_arm(z, u)][z][u];
}

double LatentInstance::agent_mean(std::size_t k, std::size_t z) const {
    double total = 0.0;
    for (std::size_t u = 0; u < num_hidden(); ++u) total += means[k][z][u] * p_u_given_z[z][u];
    return total;
}

double LatentInstance::agent_best_mean(std::size_t z) const {
    return agent_mean(agent_best_arm(z), z);
}

std::size_t LatentInstance::agent_best_arm(std::size_t z) const {
    std::size_t best = 0;
    for (std::size_t k = 1; k < num_arms; ++k) {
        if (agent_mean(k, z) > agent_mean(best, z)) best = k;
    }
    return best;
}

double LatentInstance::z_probability(std::size_t z) const {
    if (z_weights.empty()) return 1.0 / static_cast<double>(num_visible());
    return z_weights[z] / std::accumulate(z_weights.begin(), z_weights.end(), 0.0);
}

MeanBounds TransferredBounds::bounds_for(std::size_t z) const {
    MeanBounds out;
    for (const ArmInterval& iv : intervals.at(z)) {
        out.lower.push_back(iv.lower);
        out.upper.push_back(iv.upper);
    }
    return out;
}

ValidationReport validate_latent(const LatentInstance& latent) {
    ValidationReport report;
    auto fail = [&](std::string what) { report.violations.push_back({std::nullopt, std::move(what)}); };
    const std::size_t nz = latent.num_visible();
    const std::size_t nu = latent.num_hidden();
    if (latent.num_arms == 0 || nz == 0 || nu == 0) {
        fail("latent instance needs at least one arm, visible and hidden context");
        return report;
    }
    if (latent.p_u_given_z.size() != nz) {
        fail("p_u_given_z must have one row per visible context");
        return report;
    }
    if (latent.means.size() != latent.num_arms) {
        fail("means must have one slice per arm");
        return report;
    }
    for (std::size_t k = 0; k < latent.num_arms; ++k) {
        if (latent.means[k].size() != nz) {
            fail("means[" + std::to_string(k) + "] must have one row per visible context");
            return report;
        }
        for (const auto& row : latent.means[k]) {
            if (row.size() != nu) {
                fail("means rows must have one entry per hidden context");
                return report;
            }
        }
    }
    if (!latent.z_weights.empty()) {
        if (latent.z_weights.size() != nz) fail("z_weights must have one entry per visible context");
        for (double w : latent.z_weights) {
            if (!(w >= 0.0)) fail("z_weights must be non-negative");
        }
    }
    for (std::size_t z = 0; z < nz; ++z) {
        const auto& row = latent.p_u_given_z[z];
        if (row.size() != nu) {
            fail("p_u_given_z row " + std::to_string(z) + " has wrong length");
            continue;
        }
        double total = 0.0;
        for (double p : row) {
            if (!(p >= 0.0)) fail("P(u|z) must be non-negative at z=" + std::to_string(z));
            total += p;
        }
        if (std::abs(total - 1.0) > kStochasticTol) {
            fail("P(u|z) must sum to 1 at z=" + std::to_string(z));
        }
        for (std::size_t u = 0; u < nu; ++u) {
            for (std::size_t k = 0; k < latent.num_arms; ++k) {
                const double m = latent.means[k][z][u];
                if (!(m >= 0.0 && m <= 1.0)) {
                    report.violations.push_back({k, "mean in [0, 1] at " + where(z, u)});
                }
            }
            const std::size_t best = latent.best_arm(z, u);
            for (std::size_t k = 0; k < latent.num_arms; ++k) {
                if (k != best && latent.means[k][z][u] == latent.means[best][z][u]) {
                    report.violations.push_back({k, "ties the best arm at " + where(z, u)});
                }
            }
        }
    }
    return report;
}

void require_valid(const LatentInstance& latent) {
    const ValidationReport report = validate_latent(latent);
    if (!report.ok()) throw ValidationError("invalid latent instance: " + report.describe());
}

std::vector<std::pair<double, double>> gaps(const LatentInstance& latent) {
    require_valid(latent);
    if (latent.num_arms < 2) throw ValidationError("separation gaps need at least two arms");
    std::vector<std::pair<double, double>> out;
    for (std::size_t z = 0; z < latent.num_visible(); ++z) {
        double lo = 1.0;
        double hi = 0.0;
        for (std::size_t u = 0; u < latent.num_hidden(); ++u) {
            const std::size_t best = latent.best_arm(z, u);
            const double top = latent.means[best][z][u];
            double second = 0.0;
            double worst = 1.0;
            for (std::size_t k = 0; k < latent.num_arms; ++k) {
                if (k == best) continue;
                second = std::max(second, latent.means[k][z][u]);
                worst = std::min(worst, latent.means[k][z][u]);
            }
            lo = std::min(lo, top - second);
            hi = std::max(hi, top - worst);
        }
        if (!(lo > 0.0)) {
            throw ValidationError("separation assumption violated: lower gap <= 0 in visible context " +
                                  latent.visible[z]);
        }
        out.emplace_back(lo, hi);
    }
    return out;
}

LogStatistics oracle_statistics(const LatentInstance& latent) {
    const auto gap = gaps(latent);
    LogStatistics stats;
    for (std::size_t z = 0; z < latent.num_visible(); ++z) {
        ContextStats ctx;
        ctx.p.assign(latent.num_arms, 0.0);
        ctx.mu_k.assign(latent.num_arms, 0.0);
        for (std::size_t u = 0; u < latent.num_hidden(); ++u) {
            const std::size_t best = latent.best_arm(z, u);
            const double w = latent.p_u_given_z[z][u];
            const double top = latent.means[best][z][u];
            ctx.p[best] += w;
            ctx.mu_k[best] += top * w;
            ctx.mu += top * w;
        }
        ctx.gap_lo = gap[z].first;
        ctx.gap_hi = gap[z].second;
        stats.contexts.push_back(std::move(ctx));
    }
    return stats;
}

void apply_gaps(LogStatistics& stats, const std::vector<std::pair<double, double>>& supplied,
                const LatentInstance* truth) {
    if (supplied.size() != stats.num_contexts()) {
        throw ValidationError("one (lower, upper) gap pair is required per visible context");
    }
    std::vector<std::pair<double, double>> tightest;
    if (truth) tightest = gaps(*truth);
    for (std::size_t z = 0; z < supplied.size(); ++z) {
        const auto [lo, hi] = supplied[z];
        if (!(lo > 0.0) || !(lo <= hi) || !(hi <= 1.0)) {
            throw ValidationError("gaps must satisfy 0 < lower <= upper <= 1 in context " +
                                  std::to_string(z));
        }
        if (truth && (lo > tightest[z].first || hi < tightest[z].second)) {
            throw ValidationError("supplied gaps are tighter than the instance allows in context " +
                                  std::to_string(z));
        }
        stats.contexts[z].gap_lo = lo;
        stats.contexts[z].gap_hi = hi;
    }
}

namespace {

void check_stats(const LogStatistics& stats) {
    if (stats.contexts.empty()) throw ValidationError("log statistics have no contexts");
    const std::size_t k = stats.num_arms();
    for (std::size_t z = 0; z < stats.num_contexts(); ++z) {
        const ContextStats& c = stats.contexts[z];
        if (c.p.size() != k || c.mu_k.size() != k) {
            throw ValidationError("log statistics: inconsistent arm count in context " + std::to_string(z));
        }
        if (!(c.gap_lo > 0.0) || !(c.gap_lo <= c.gap_hi)) {
            throw ValidationError("separation assumption violated: gaps must satisfy 0 < lower <= upper "
                                  "in context " + std::to_string(z));
        }
    }
}

ArmInterval finish_interval(double raw_lower, double raw_upper, std::vector<std::size_t> large,
                            std::size_t k, std::size_t z) {
    ArmInterval iv;
    iv.raw_lower = raw_lower;
    iv.raw_upper = raw_upper;
    iv.lower = std::clamp(raw_lower, 0.0, 1.0);
    iv.upper = std::clamp(raw_upper, 0.0, 1.0);
    iv.large_reward_arms = std::move(large);
    if (iv.lower > iv.upper + 1e-12) {
        std::ostringstream msg;
        msg << "inconsistent log statistics: lower bound " << iv.lower << " exceeds upper bound "
            << iv.upper << " for arm " << k + 1 << " in context " << z;
        throw ValidationError(msg.str());
    }
    iv.lower = std::min(iv.lower, iv.upper);
    return iv;
}

}  // namespace

TransferredBounds transfer_bounds(const LogStatistics& stats) {
    check_stats(stats);
    TransferredBounds out;
    const std::size_t nk = stats.num_arms();
    for (std::size_t z = 0; z < stats.num_contexts(); ++z) {
        const ContextStats& c = stats.contexts[z];
        std::vector<ArmInterval> row;
        for (std::size_t k = 0; k < nk; ++k) {
            const double upper = c.mu - c.gap_lo * (1.0 - c.p[k]);
            double lower = c.mu_k[k];
            std::vector<std::size_t> large;
            for (std::size_t other = 0; other < nk; ++other) {
                if (other == k) continue;
                if (c.mu_k[other] > c.gap_hi * c.p[other]) {
                    large.push_back(other);
                    lower += c.mu_k[other] - c.gap_hi * c.p[other];
                }
            }
            row.push_back(finish_interval(lower, upper, std::move(large), k, z));
        }
        out.intervals.push_back(std::move(row));
    }
    return out;
}

ContextStats empirical_statistics(const std::vector<LogRecord>& records, std::size_t z,
                                  std::size_t num_arms, double gap_lo, double gap_hi) {
    ContextStats ctx;
    ctx.p.assign(num_arms, 0.0);
    ctx.mu_k.assign(num_arms, 0.0);
    ctx.gap_lo = gap_lo;
    ctx.gap_hi = gap_hi;
    for (const LogRecord& r : records) {
        if (r.z != z) continue;
        if (r.k >= num_arms) throw ValidationError("log record arm out of range");
        if (!(r.y >= 0.0 && r.y <= 1.0)) throw ValidationError("log record reward outside [0, 1]");
        ++ctx.count;
        ctx.p[r.k] += 1.0;
        ctx.mu_k[r.k] += r.y;
        ctx.mu += r.y;
    }
    if (ctx.count == 0) {
        throw ValidationError("no log records for visible context " + std::to_string(z));
    }
    const double n = static_cast<double>(ctx.count);
    for (std::size_t k = 0; k < num_arms; ++k) {
        ctx.p[k] /= n;
        ctx.mu_k[k] /= n;
    }
    ctx.mu /= n;
    return ctx;
}

LogStatistics empirical_statistics(const std::vector<LogRecord>& records, std::size_t num_arms,
                                   const std::vector<std::pair<double, double>>& gaps) {
    LogStatistics stats;
    for (std::size_t z = 0; z < gaps.size(); ++z) {
        stats.contexts.push_back(
            empirical_statistics(records, z, num_arms, gaps[z].first, gaps[z].second));
    }
    return stats;
}

TransferredBounds finite_log_bounds(const LogStatistics& estimate, double confidence) {
    if (!(confidence > 0.0 && confidence < 1.0)) {
        throw ValidationError("confidence must lie in (0, 1)");
    }
    check_stats(estimate);
    const std::size_t nz = estimate.num_contexts();
    const std::size_t nk = estimate.num_arms();
    const double alpha = 1.0 - confidence;

    TransferredBounds out;
    out.confidence = confidence;
    // mu_z plus p_z(k) and mu_z(k) for every arm
    out.quantities_per_context = 1 + 2 * nk;
    out.per_quantity_failure = alpha / static_cast<double>(nz * out.quantities_per_context);
    const double arm_failure = alpha / static_cast<double>(nz * nk);
    const Support unit(0.0, 1.0);

    for (std::size_t z = 0; z < nz; ++z) {
        const ContextStats& c = estimate.contexts[z];
        if (c.count == 0) {
            throw ValidationError("finite-log bounds need record counts for context " + std::to_string(z));
        }
        const double h = hoeffding_ci_halfwidth(out.per_quantity_failure, c.count, unit);
        const double mu_hi = std::min(1.0, c.mu + h);
        std::vector<double> p_hi(nk), p_lo(nk), mu_k_lo(nk);
        for (std::size_t k = 0; k < nk; ++k) {
            p_hi[k] = std::min(1.0, c.p[k] + h);
            p_lo[k] = std::max(0.0, c.p[k] - h);
            mu_k_lo[k] = std::max(0.0, c.mu_k[k] - h);
        }
        std::vector<ArmInterval> row;
        for (std::size_t k = 0; k < nk; ++k) {
            // upper bound grows with mu_z and p_z(k); lower bound grows with
            // mu_z(k') and shrinks with p_z(k')
            const double upper = mu_hi - c.gap_lo * (1.0 - p_hi[k]);
            double lower = mu_k_lo[k];
            std::vector<std::size_t> large;
            for (std::size_t other = 0; other < nk; ++other) {
                if (other == k) continue;
                const double term = mu_k_lo[other] - c.gap_hi * p_hi[other];
                if (term > 0.0) {
                    large.push_back(other);
                    lower += term;
                }
            }
            ArmInterval iv = finish_interval(lower, upper, std::move(large), k, z);
            iv.failure_prob = arm_failure;
            row.push_back(std::move(iv));
        }
        out.intervals.push_back(std::move(row));
    }
    return out;
}

std::vector<LogRecord> sample_log(const LatentInstance& latent, std::size_t n, std::uint64_t seed) {
    require_valid(latent);
    if (n == 0) throw ValidationError("sample_log requires n >= 1");
    std::vector<double> z_weights = latent.z_weights;
    if (z_weights.empty()) z_weights.assign(latent.num_visible(), 1.0);

    Rng rng(derive_seed(seed, {static_cast<std::uint64_t>(StreamDomain::Log)}));
    std::vector<LogRecord> records;
    records.reserve(n);
    for (std::size_t i = 0; i < n; ++i) {
        const std::size_t z = sample_index(z_weights, rng.uniform());
        const std::size_t u = sample_index(latent.p_u_given_z[z], rng.uniform());
        const std::size_t k = latent.best_arm(z, u);
        const double y = rng.uniform() < latent.means[k][z][u] ? 1.0 : 0.0;
        records.push_back({z, k, y});
    }
    return records;
}

AdmissibilityReport admissible_check(const LatentInstance& candidate, const LogStatistics& reference,
                                     double tol) {
    AdmissibilityReport report;
    auto fail = [&](std::string what) { report.violations.push_back(std::move(what)); };
    if (candidate.num_visible() != reference.num_contexts() ||
        candidate.num_arms != reference.num_arms()) {
        throw ValidationError("admissible_check: candidate and reference differ in shape");
    }
    const ValidationReport shape = validate_latent(candidate);
    if (!shape.ok()) {
        fail(shape.describe());
        return report;
    }
    LogStatistics got;
    try {
        got = oracle_statistics(candidate);
    } catch (const ValidationError& e) {
        fail(e.what());
        return report;
    }
    auto close = [tol](double x, double y) { return std::abs(x - y) <= tol; };
    for (std::size_t z = 0; z < reference.num_contexts(); ++z) {
        const ContextStats& want = reference.contexts[z];
        const ContextStats& have = got.contexts[z];
        const std::string ctx = " in context " + std::to_string(z);
        if (!close(want.mu, have.mu)) fail("average logged reward differs" + ctx);
        for (std::size_t k = 0; k < candidate.num_arms; ++k) {
            if (!close(want.p[k], have.p[k])) fail("play frequency of arm " + std::to_string(k + 1) + " differs" + ctx);
            if (!close(want.mu_k[k], have.mu_k[k])) {
                fail("reward contribution of arm " + std::to_string(k + 1) + " differs" + ctx);
            }
        }
        for (std::size_t u = 0; u < candidate.num_hidden(); ++u) {
            const std::size_t best = candidate.best_arm(z, u);
            const double top = candidate.means[best][z][u];
            for (std::size_t k = 0; k < candidate.num_arms; ++k) {
                if (k == best) continue;
                const double gap = top - candidate.means[k][z][u];
                if (gap < want.gap_lo - tol || gap > want.gap_hi + tol) {
                    fail("gap of arm " + std::to_string(k + 1) + " outside [lower, upper] at " + where(z, u));
                }
            }
        }
    }
    return report;
}

AdmissibilityReport admissible_check(const LatentInstance& candidate, const LatentInstance& reference,
                                     double tol) {
    AdmissibilityReport report = admissible_check(candidate, oracle_statistics(reference), tol);
    if (candidate.num_hidden() != reference.num_hidden()) {
        throw ValidationError("admissible_check: hidden context sets differ");
    }
    if (!validate_latent(candidate).ok()) return report;
    for (std::size_t z = 0; z < reference.num_visible(); ++z) {
        for (std::size_t u = 0; u < reference.num_hidden(); ++u) {
            if (candidate.best_arm(z, u) != reference.best_arm(z, u)) {
                report.violations.push_back("best arm changed at " + where(z, u));
            }
        }
    }
    return report;
}

LatentInstance tight_upper_instance(const LatentInstance& latent) {
    const LogStatistics stats = oracle_statistics(latent);
    LatentInstance out = latent;
    for (std::size_t z = 0; z < latent.num_visible(); ++z) {
        const double lo = stats.contexts[z].gap_lo;
        for (std::size_t u = 0; u < latent.num_hidden(); ++u) {
            const std::size_t best = latent.best_arm(z, u);
            const double top = latent.means[best][z][u];
            for (std::size_t k = 0; k < latent.num_arms; ++k) {
                if (k != best) out.means[k][z][u] = top - lo;
            }
        }
    }
    return out;
}

LatentInstance tight_lower_instance(const LatentInstance& latent, std::size_t k) {
    if (k >= latent.num_arms) throw ValidationError("tight_lower_instance: arm out of range");
    const LogStatistics stats = oracle_statistics(latent);
    const TransferredBounds bounds = transfer_bounds(stats);
    LatentInstance out = latent;

    for (std::size_t z = 0; z < latent.num_visible(); ++z) {
        const ContextStats& c = stats.contexts[z];
        const double hi = c.gap_hi;
        const auto& large = bounds.at(k, z).large_reward_arms;
        auto is_large = [&](std::size_t arm) {
            return std::find(large.begin(), large.end(), arm) != large.end();
        };

        // The construction needs every hidden context led by a "large" arm to
        // have best mean >= upper gap, and every other one <= upper gap. When
        // some context breaks this, the best-arm means of its group are
        // replaced by their weighted average, which leaves all log statistics
        // unchanged and satisfies the condition by definition of K_>.
        std::vector<bool> equalize(latent.num_arms, false);
        for (std::size_t u = 0; u < latent.num_hidden(); ++u) {
            if (latent.p_u_given_z[z][u] <= 0.0) continue;
            const std::size_t best = latent.best_arm(z, u);
            if (best == k) continue;
            const double top = latent.means[best][z][u];
            if ((is_large(best) && top < hi) || (!is_large(best) && top > hi)) equalize[best] = true;
        }

        for (std::size_t u = 0; u < latent.num_hidden(); ++u) {
            if (latent.p_u_given_z[z][u] <= 0.0) continue;  // weightless: keep as is
            const std::size_t best = latent.best_arm(z, u);
            if (best == k) continue;
            double top = latent.means[best][z][u];
            if (equalize[best]) {
                top = c.mu_k[best] / c.p[best];
                out.means[best][z][u] = top;
                for (std::size_t other = 0; other < latent.num_arms; ++other) {
                    if (other == best || other == k) continue;
                    out.means[other][z][u] = std::clamp(out.means[other][z][u],
                                                        std::max(0.0, top - hi), top - c.gap_lo);
                }
            }
            out.means[k][z][u] = is_large(best) ? top - hi : 0.0;
        }
    }
    return out;
}

}  // namespace banditlab
