#include "banditlab/core.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

namespace banditlab {

Support::Support(double lo, double hi) : a(lo), b(hi) {
    if (!std::isfinite(lo) || !std::isfinite(hi) || !(lo < hi)) {
        std::ostringstream msg;
        msg << "support requires finite a < b, got [" << lo << ", " << hi << "]";
        throw ValidationError(msg.str());
    }
}

MeanBounds::MeanBounds(std::vector<double> lo, std::vector<double> hi)
    : lower(std::move(lo)), upper(std::move(hi)) {
    if (lower.size() != upper.size()) {
        throw ValidationError("mean bounds: lower and upper have different lengths");
    }
}

MeanBounds MeanBounds::uninformative(const Support& support, std::size_t arms) {
    return MeanBounds(std::vector<double>(arms, support.a), std::vector<double>(arms, support.b));
}

double MeanBounds::l_max() const {
    if (lower.empty()) {
        throw ValidationError("l_max of an empty arm set");
    }
    return *std::max_element(lower.begin(), lower.end());
}

std::string to_string(DistKind kind) {
    switch (kind) {
        case DistKind::Bernoulli: return "bernoulli";
        case DistKind::ClippedGaussian: return "clipped_gaussian";
        case DistKind::TwoPoint: return "two_point";
    }
    return "unknown";
}

DistKind dist_kind_from_string(const std::string& name) {
    if (name == "bernoulli") return DistKind::Bernoulli;
    if (name == "clipped_gaussian" || name == "clipped-gaussian") return DistKind::ClippedGaussian;
    if (name == "two_point" || name == "two-point") return DistKind::TwoPoint;
    throw ValidationError("unknown distribution kind '" + name + "'");
}

std::vector<double> BanditInstance::means() const {
    std::vector<double> out;
    out.reserve(arms.size());
    for (const auto& arm : arms) out.push_back(arm.mean);
    return out;
}

MeanBounds BanditInstance::bounds() const {
    MeanBounds out;
    for (const auto& arm : arms) {
        out.lower.push_back(arm.lower);
        out.upper.push_back(arm.upper);
    }
    return out;
}

double BanditInstance::best_mean() const {
    if (arms.empty()) throw ValidationError("instance has no arms");
    double best = arms.front().mean;
    for (const auto& arm : arms) best = std::max(best, arm.mean);
    return best;
}

std::size_t BanditInstance::best_arm() const {
    const double best = best_mean();
    for (std::size_t k = 0; k < arms.size(); ++k) {
        if (arms[k].mean == best) return k;
    }
    return 0;
}

std::string Violation::describe() const {
    if (arm) return "arm " + std::to_string(*arm + 1) + ": " + constraint;
    return constraint;
}

std::string ValidationReport::describe() const {
    std::ostringstream out;
    for (std::size_t i = 0; i < violations.size(); ++i) {
        if (i) out << "; ";
        out << violations[i].describe();
    }
    return out.str();
}

ValidationReport validate_bounds(const Support& support, const MeanBounds& bounds) {
    ValidationReport report;
    if (bounds.lower.size() != bounds.upper.size()) {
        report.violations.push_back({std::nullopt, "lower/upper length mismatch"});
        return report;
    }
    if (bounds.empty()) {
        report.violations.push_back({std::nullopt, "no arms"});
    }
    for (std::size_t k = 0; k < bounds.size(); ++k) {
        const double l = bounds.lower[k];
        const double u = bounds.upper[k];
        if (!std::isfinite(l) || !std::isfinite(u)) {
            report.violations.push_back({k, "bounds must be finite"});
            continue;
        }
        if (l > u) report.violations.push_back({k, "l <= u"});
        if (l < support.a) report.violations.push_back({k, "a <= l"});
        if (u > support.b) report.violations.push_back({k, "u <= b"});
    }
    return report;
}

ValidationReport validate_instance(const BanditInstance& instance) {
    const Support& s = instance.support;
    ValidationReport report;
    if (!(s.a < s.b)) {
        report.violations.push_back({std::nullopt, "a < b"});
        return report;
    }
    report = validate_bounds(s, instance.bounds());
    for (std::size_t k = 0; k < instance.arms.size(); ++k) {
        const ArmSpec& arm = instance.arms[k];
        if (!std::isfinite(arm.mean) || !s.contains(arm.mean)) {
            report.violations.push_back({k, "mean in [a, b]"});
            continue;
        }
        if (arm.mean < arm.lower || arm.mean > arm.upper) {
            report.violations.push_back({k, "l <= mean <= u"});
        }
        if (arm.kind == DistKind::ClippedGaussian) {
            if (!(arm.scale > 0.0) || !std::isfinite(arm.scale)) {
                report.violations.push_back({k, "clipped gaussian scale > 0"});
            }
            if (!(arm.mean > s.a && arm.mean < s.b)) {
                report.violations.push_back({k, "clipped gaussian mean strictly inside (a, b)"});
            }
        }
    }
    return report;
}

void require_valid(const BanditInstance& instance) {
    const ValidationReport report = validate_instance(instance);
    if (!report.ok()) throw ValidationError("invalid instance: " + report.describe());
}

PruneResult prune(const MeanBounds& bounds) {
    if (bounds.empty()) throw ValidationError("cannot prune an empty arm set");
    PruneResult result;
    result.l_max = bounds.l_max();
    result.original_to_new.assign(bounds.size(), std::nullopt);
    for (std::size_t k = 0; k < bounds.size(); ++k) {
        // u == l_max is kept: only u < l_max proves the arm suboptimal.
        if (bounds.upper[k] < result.l_max) continue;
        result.original_to_new[k] = result.retained.size();
        result.retained.push_back(k);
        result.bounds.lower.push_back(bounds.lower[k]);
        result.bounds.upper.push_back(bounds.upper[k]);
    }
    return result;
}

}  // namespace banditlab
