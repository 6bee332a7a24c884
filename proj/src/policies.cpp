#include "banditlab/policies.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace banditlab {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

double xlogx_ratio(double x, double y) {
    // x ln(x / y) with 0 ln 0 = 0
    if (x == 0.0) return 0.0;
    if (y == 0.0) return kInf;
    return x * std::log(x / y);
}

}  // namespace

PolicyKind::PolicyKind(PolicyFamily f, double eps, double gamma)
    : family(f), ossb_eps(eps), ossb_gamma(gamma) {
    if (!(eps >= 0.0) || !(gamma >= 0.0)) {
        throw ValidationError("OSSB parameters must be non-negative");
    }
}

PolicyKind PolicyKind::parse(const std::string& name, double ossb_eps, double ossb_gamma) {
    if (name == "glue") return PolicyKind(PolicyFamily::Glue);
    if (name == "ucb") return PolicyKind(PolicyFamily::Ucb);
    if (name == "b-ucb") return PolicyKind(PolicyFamily::BUcb);
    if (name == "kl-ucb") return PolicyKind(PolicyFamily::KlUcb);
    if (name == "b-kl-ucb") return PolicyKind(PolicyFamily::BKlUcb);
    if (name == "ossb") return PolicyKind(PolicyFamily::Ossb, ossb_eps, ossb_gamma);
    throw ValidationError("unknown policy '" + name + "'");
}

std::string PolicyKind::name() const {
    switch (family) {
        case PolicyFamily::Glue: return "glue";
        case PolicyFamily::Ucb: return "ucb";
        case PolicyFamily::BUcb: return "b-ucb";
        case PolicyFamily::KlUcb: return "kl-ucb";
        case PolicyFamily::BKlUcb: return "b-kl-ucb";
        case PolicyFamily::Ossb: return "ossb";
    }
    return "unknown";
}

bool PolicyKind::clips() const {
    return family == PolicyFamily::Glue || family == PolicyFamily::BUcb ||
           family == PolicyFamily::BKlUcb;
}

double exploration_function(double t) {
    if (t <= 1.0) return 1.0;
    const double lg = std::log(t);
    return 1.0 + t * lg * lg;
}

double glue_index(double mean, std::size_t pulls, double c, double u, std::size_t t) {
    if (pulls == 0) throw ValidationError("glue_index requires at least one pull");
    const double bonus =
        std::sqrt(2.0 * c * std::log(exploration_function(static_cast<double>(t) + 1.0)) /
                  static_cast<double>(pulls));
    return std::min(u, mean + bonus);
}

double kl_bernoulli(double p, double q) {
    p = std::clamp(p, 0.0, 1.0);
    q = std::clamp(q, 0.0, 1.0);
    if (p == q) return 0.0;
    const double d = xlogx_ratio(p, q) + xlogx_ratio(1.0 - p, 1.0 - q);
    return std::max(d, 0.0);
}

double klucb_index(double mean, std::size_t pulls, std::size_t t, std::optional<double> u_clip) {
    if (pulls == 0) throw ValidationError("klucb_index requires at least one pull");
    mean = std::clamp(mean, 0.0, 1.0);
    const double budget =
        std::log(exploration_function(static_cast<double>(t) + 1.0)) / static_cast<double>(pulls);
    double result = 1.0;
    if (mean < 1.0 && kl_bernoulli(mean, 1.0) > budget) {
        // d(mean, .) is increasing on [mean, 1]; keep lo feasible, hi infeasible
        double lo = mean;
        double hi = 1.0;
        while (hi - lo > kKlUcbTolerance) {
            const double mid = 0.5 * (lo + hi);
            if (kl_bernoulli(mean, mid) <= budget) {
                lo = mid;
            } else {
                hi = mid;
            }
        }
        result = lo;
    }
    if (u_clip) result = std::min(result, *u_clip);
    return result;
}

std::vector<double> ossb_allocation(const std::vector<double>& theta_hat, const MeanBounds& bounds) {
    if (theta_hat.size() != bounds.size()) {
        throw ValidationError("ossb_allocation: theta and bounds differ in length");
    }
    std::vector<double> eta(theta_hat.size(), 0.0);
    if (theta_hat.empty()) return eta;
    std::size_t best = 0;
    for (std::size_t k = 1; k < theta_hat.size(); ++k) {
        if (theta_hat[k] > theta_hat[best]) best = k;
    }
    const double top = theta_hat[best];
    for (std::size_t k = 0; k < theta_hat.size(); ++k) {
        if (k == best || top > bounds.upper[k]) continue;
        const double d = kl_bernoulli(theta_hat[k], top);
        // d == 0: tied with the empirical best, no finite rate identifies it
        if (d > 0.0 && std::isfinite(d)) eta[k] = 1.0 / d;
    }
    return eta;
}

PolicyState::PolicyState(PolicyKind kind, const Support& support, MeanBounds bounds)
    : kind_(kind), support_(support), bounds_(std::move(bounds)) {
    const ValidationReport report = validate_bounds(support_, bounds_);
    if (!report.ok()) throw ValidationError("policy bounds: " + report.describe());
    variance_ = variance_profile(support_, bounds_);

    const std::size_t k = bounds_.size();
    const double hoeffding = support_.width() * support_.width() / 4.0;
    scale_.assign(k, hoeffding);
    if (kind_.family == PolicyFamily::Glue) scale_ = variance_.pseudo_var;

    pulls_.assign(k, 0);
    reward_sum_.assign(k, 0.0);
    raw_index_.assign(k, kInf);
    index_.assign(k, kInf);
    if (kind_.clips()) index_ = bounds_.upper;
}

double PolicyState::empirical_mean(std::size_t arm) const {
    if (pulls_.at(arm) == 0) throw ValidationError("empirical mean of an unplayed arm");
    return reward_sum_[arm] / static_cast<double>(pulls_[arm]);
}

std::size_t PolicyState::select_arm() {
    if (pulls_.empty()) throw ValidationError("select_arm on an empty arm set");
    if (kind_.family == PolicyFamily::Ossb) return select_ossb();
    return select_by_index();
}

std::size_t PolicyState::select_by_index() const {
    // Highest clipped index; equal clipped indices fall back to the raw index,
    // then to the lowest arm id.
    std::size_t best = 0;
    for (std::size_t k = 1; k < index_.size(); ++k) {
        if (index_[k] > index_[best] ||
            (index_[k] == index_[best] && raw_index_[k] > raw_index_[best])) {
            best = k;
        }
    }
    return best;
}

std::vector<double> PolicyState::truncated_means() const {
    std::vector<double> theta(num_arms());
    for (std::size_t k = 0; k < num_arms(); ++k) {
        const double lo = support_.normalize(bounds_.lower[k]);
        const double hi = support_.normalize(bounds_.upper[k]);
        const double raw = pulls_[k] ? support_.normalize(empirical_mean(k)) : hi;
        theta[k] = std::min(hi, std::max(lo, raw));
    }
    return theta;
}

// Certainty-equivalence loop of OSSB (Combes, Magureanu and Proutiere, 2017):
// exploit when every arm meets its (1 + gamma) eta_k ln t quota, otherwise
// count an exploration round and either force the least-pulled arm (when it
// lags eps * rounds) or play the arm furthest below its quota.
std::size_t PolicyState::select_ossb() {
    const std::vector<double> theta = truncated_means();
    MeanBounds unit;
    for (std::size_t k = 0; k < num_arms(); ++k) {
        unit.lower.push_back(support_.normalize(bounds_.lower[k]));
        unit.upper.push_back(support_.normalize(bounds_.upper[k]));
    }
    ossb_eta_ = ossb_allocation(theta, unit);

    std::size_t best = 0;
    for (std::size_t k = 1; k < theta.size(); ++k) {
        if (theta[k] > theta[best]) best = k;
    }

    const double log_t = std::log(static_cast<double>(step_ + 1));
    bool satisfied = true;
    for (std::size_t k = 0; k < num_arms(); ++k) {
        if (static_cast<double>(pulls_[k]) < (1.0 + kind_.ossb_gamma) * ossb_eta_[k] * log_t) {
            satisfied = false;
            break;
        }
    }
    if (satisfied) return best;

    ++ossb_rounds_;
    const auto least = static_cast<std::size_t>(
        std::min_element(pulls_.begin(), pulls_.end()) - pulls_.begin());
    if (static_cast<double>(pulls_[least]) < kind_.ossb_eps * static_cast<double>(ossb_rounds_)) {
        return least;
    }
    std::size_t pick = best;
    double pick_ratio = kInf;
    for (std::size_t k = 0; k < num_arms(); ++k) {
        if (ossb_eta_[k] <= 0.0) continue;
        const double ratio = static_cast<double>(pulls_[k]) / ossb_eta_[k];
        if (ratio < pick_ratio) {
            pick_ratio = ratio;
            pick = k;
        }
    }
    return pick;
}

void PolicyState::update(std::size_t arm, double reward) {
    if (arm >= num_arms()) throw ValidationError("update: arm out of range");
    if (!support_.contains(reward)) throw ValidationError("update: reward outside support");
    ++step_;
    ++pulls_[arm];
    reward_sum_[arm] += reward;
    if (kind_.family != PolicyFamily::Ossb) refresh_indices();
}

void PolicyState::refresh_indices() {
    const bool clip = kind_.clips();
    for (std::size_t k = 0; k < num_arms(); ++k) {
        if (pulls_[k] == 0) continue;  // keeps its initial value
        const double mean = empirical_mean(k);
        double raw = 0.0;
        if (kind_.kl_based()) {
            raw = support_.denormalize(klucb_index(support_.normalize(mean), pulls_[k], step_));
        } else {
            raw = glue_index(mean, pulls_[k], scale_[k], kInf, step_);
        }
        raw_index_[k] = raw;
        index_[k] = clip ? std::min(raw, bounds_.upper[k]) : raw;
    }
}

}  // namespace banditlab
