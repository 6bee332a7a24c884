// Chernoff-Hoeffding tail bounds that exploit known bounds on the mean, and the
// variance / pseudo-variance scales that GLUE derives from them.
//
// All variance quantities are evaluated in normalized coordinates
// theta = (x - a) / (b - a) as B01(theta) * theta * (1 - theta) * (b - a)^2.
// On [0, 1] this is exactly B_{a,b}(x) (x - a)(b - x); on wider supports it
// scales quadratically with the width, like the Hoeffding constant (b - a)^2/4.
#pragma once

#include <cstddef>
#include <string>
#include <vector>

#include "banditlab/core.hpp"

namespace banditlab {

/// Regime boundaries. A lower bound above a + kHighThreshold (b - a) or an upper
/// bound below a + kLowThreshold (b - a) sharpens the variance proxy. The low
/// value is the fixed point of t = 1 / (1 + exp(1 / (1 - t))), rounded.
inline constexpr double kLowThreshold = 0.2178;
inline constexpr double kHighThreshold = 0.7822;

enum class TailRegime { LowerBoundInformative, UpperBoundInformative, Uninformative };

std::string to_string(TailRegime regime);

/// B_{0,1}(theta) = e^{1/(1-theta)} / (1 - theta + theta e^{1/(1-theta)})^2 for theta in [0, 1).
double b_factor_unit(double theta);

/// B_{a,b}(x) = B_{0,1}((x - a)/(b - a)) / (b - a). Rejects x outside [a, b)
/// and x within 1e-12 of the pole at b.
double b_factor(const Support& support, double x);

/// Which branch of the variance bound applies to bounds (l, u).
TailRegime variance_regime(const Support& support, double l, double u);

/// sigma^2 for an arm with mean in [l, u].
double variance_bound(const Support& support, double l, double u);

/// True iff l_max >= 0.2178 a + 0.7822 b, in which case every arm shares the
/// l_max-derived pseudo-variance.
bool global_underexplore(const Support& support, double l_max);

/// c_k: the l_max-derived variance in the global regime, sigma_k^2 otherwise.
double pseudo_variance(const Support& support, double l_k, double u_k, double l_max);

struct VarianceProfile {
    std::vector<double> sigma_sq;
    std::vector<double> pseudo_var;
    std::vector<TailRegime> regime;
    double l_max = 0.0;
    bool global_underexplore = false;
};

/// sigma^2 and c for every arm of an (already pruned) bound set.
VarianceProfile variance_profile(const Support& support, const MeanBounds& bounds);

/// Branch used by upper_tail_bound for deviation eps.
TailRegime upper_tail_regime(const Support& support, double l, double u, double eps);
/// Branch used by lower_tail_bound for deviation eps.
TailRegime lower_tail_regime(const Support& support, double l, double u, double eps);

/// Variance proxy V of the upper-tail bound exp(-n eps^2 / (2V)).
double upper_tail_variance(const Support& support, double l, double u, double eps);
double lower_tail_variance(const Support& support, double l, double u, double eps);

/// P(mean_hat_n - mu >= eps) bound. Informative branches are only valid for
/// eps <= u - l; beyond that the Hoeffding branch is used.
double upper_tail_bound(const Support& support, double l, double u, std::size_t n, double eps);
/// P(mean_hat_n - mu <= -eps) bound, mirror of upper_tail_bound.
double lower_tail_bound(const Support& support, double l, double u, std::size_t n, double eps);

/// Two-sided Hoeffding half-width (b - a) sqrt(ln(2/p) / (2n)).
double hoeffding_ci_halfwidth(double failure_prob, std::size_t n, const Support& support);

}  // namespace banditlab
