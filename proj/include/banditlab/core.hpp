// Domain types shared by every banditlab module: reward support, per-arm mean
// bounds, bandit instances and the pruning step that runs before learning.
#pragma once

#include <cstddef>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

namespace banditlab {

/// Thrown when an input violates a documented precondition. The CLI maps it
/// to exit code 2.
class ValidationError : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

/// Closed reward interval [a, b] with a < b.
struct Support {
    double a = 0.0;
    double b = 1.0;

    Support() = default;
    Support(double lo, double hi);

    double width() const { return b - a; }
    bool contains(double x) const { return x >= a && x <= b; }
    /// Maps x from [a, b] onto [0, 1].
    double normalize(double x) const { return (x - a) / (b - a); }
    double denormalize(double theta) const { return a + theta * (b - a); }
    bool is_unit() const { return a == 0.0 && b == 1.0; }
};

/// Per-arm side information l_k <= mu_k <= u_k.
struct MeanBounds {
    std::vector<double> lower;
    std::vector<double> upper;

    MeanBounds() = default;
    MeanBounds(std::vector<double> lo, std::vector<double> hi);

    /// Every arm gets [a, b]; carries no information.
    static MeanBounds uninformative(const Support& support, std::size_t arms);

    std::size_t size() const { return lower.size(); }
    bool empty() const { return lower.empty(); }
    /// Largest lower bound. Throws on an empty set.
    double l_max() const;
};

/// Mean bounds that each hold only with probability 1 - p_k.
struct BoundedWithFailure {
    MeanBounds bounds;
    std::vector<double> failure_prob;
};

enum class DistKind { Bernoulli, ClippedGaussian, TwoPoint };

std::string to_string(DistKind kind);
DistKind dist_kind_from_string(const std::string& name);

struct ArmSpec {
    double mean = 0.0;
    DistKind kind = DistKind::Bernoulli;
    /// Standard deviation of the Gaussian before clipping. Ignored otherwise.
    double scale = 0.1;
    double lower = 0.0;
    double upper = 1.0;
};

struct BanditInstance {
    Support support;
    std::vector<ArmSpec> arms;

    std::size_t num_arms() const { return arms.size(); }
    std::vector<double> means() const;
    MeanBounds bounds() const;
    double best_mean() const;
    /// Lowest index attaining the best mean.
    std::size_t best_arm() const;
    double gap(std::size_t arm) const { return best_mean() - arms.at(arm).mean; }
};

struct Violation {
    std::optional<std::size_t> arm;  // 0-based; empty for instance-level issues
    std::string constraint;

    std::string describe() const;
};

struct ValidationReport {
    std::vector<Violation> violations;

    bool ok() const { return violations.empty(); }
    std::string describe() const;
};

ValidationReport validate_bounds(const Support& support, const MeanBounds& bounds);
ValidationReport validate_instance(const BanditInstance& instance);

/// Throws ValidationError carrying the report text if validation fails.
void require_valid(const BanditInstance& instance);

/// Outcome of discarding every arm whose upper bound lies strictly below the
/// largest lower bound. Retained arms keep their relative order.
struct PruneResult {
    double l_max = 0.0;
    std::vector<std::size_t> retained;                     // new index -> original index
    std::vector<std::optional<std::size_t>> original_to_new;
    MeanBounds bounds;                                      // bounds of retained arms, new indexing

    std::size_t num_retained() const { return retained.size(); }
    bool was_pruned(std::size_t original) const { return !original_to_new.at(original).has_value(); }
};

PruneResult prune(const MeanBounds& bounds);

}  // namespace banditlab
