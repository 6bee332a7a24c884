#include "banditlab/concentration.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

namespace banditlab {

namespace {

constexpr double kPoleGuard = 1e-12;

void check_bounds(const Support& s, double l, double u) {
    if (!(l >= s.a && l <= u && u <= s.b)) {
        std::ostringstream msg;
        msg << "bounds require a <= l <= u <= b, got l=" << l << " u=" << u << " on [" << s.a << ", "
            << s.b << "]";
        throw ValidationError(msg.str());
    }
}

// B01(theta) theta (1 - theta) (b - a)^2
double scaled_b_variance(const Support& s, double theta) {
    return b_factor_unit(theta) * theta * (1.0 - theta) * s.width() * s.width();
}

double hoeffding_variance(const Support& s) { return s.width() * s.width() / 4.0; }

double tail_from_variance(std::size_t n, double eps, double variance) {
    if (eps <= 0.0) return 1.0;
    if (variance <= 0.0) return 0.0;
    const double value = std::exp(-static_cast<double>(n) * eps * eps / (2.0 * variance));
    return std::clamp(value, 0.0, 1.0);
}

void check_tail_args(std::size_t n, double eps) {
    if (n == 0) throw ValidationError("tail bound requires n >= 1");
    if (!(eps >= 0.0)) throw ValidationError("tail bound requires eps >= 0");
}

}  // namespace

std::string to_string(TailRegime regime) {
    switch (regime) {
        case TailRegime::LowerBoundInformative: return "lower-informative";
        case TailRegime::UpperBoundInformative: return "upper-informative";
        case TailRegime::Uninformative: return "uninformative";
    }
    return "unknown";
}

double b_factor_unit(double theta) {
    if (!(theta >= 0.0) || !(theta < 1.0 - kPoleGuard)) {
        std::ostringstream msg;
        msg << "b_factor requires theta in [0, 1), got " << theta;
        throw ValidationError(msg.str());
    }
    const double e = std::exp(1.0 / (1.0 - theta));
    const double denom = 1.0 - theta + theta * e;
    return e / (denom * denom);
}

double b_factor(const Support& support, double x) {
    if (!(x >= support.a) || !(x < support.b)) {
        std::ostringstream msg;
        msg << "b_factor requires x in [a, b), got " << x;
        throw ValidationError(msg.str());
    }
    return b_factor_unit(support.normalize(x)) / support.width();
}

TailRegime variance_regime(const Support& s, double l, double u) {
    check_bounds(s, l, u);
    if (l >= kLowThreshold * s.a + kHighThreshold * s.b) return TailRegime::LowerBoundInformative;
    if (u <= kHighThreshold * s.a + kLowThreshold * s.b) return TailRegime::UpperBoundInformative;
    return TailRegime::Uninformative;
}

double variance_bound(const Support& s, double l, double u) {
    switch (variance_regime(s, l, u)) {
        case TailRegime::LowerBoundInformative:
            // B evaluated at a + b - l, i.e. theta = (b - l) / (b - a)
            return scaled_b_variance(s, (s.b - l) / s.width());
        case TailRegime::UpperBoundInformative:
            return scaled_b_variance(s, s.normalize(u));
        case TailRegime::Uninformative:
            break;
    }
    return hoeffding_variance(s);
}

bool global_underexplore(const Support& s, double l_max) {
    return l_max >= kLowThreshold * s.a + kHighThreshold * s.b;
}

double pseudo_variance(const Support& s, double l_k, double u_k, double l_max) {
    check_bounds(s, l_k, u_k);
    if (!(l_max >= l_k && l_max <= s.b)) {
        throw ValidationError("pseudo_variance requires l_k <= l_max <= b");
    }
    if (global_underexplore(s, l_max)) return variance_bound(s, l_max, s.b);
    return variance_bound(s, l_k, u_k);
}

VarianceProfile variance_profile(const Support& s, const MeanBounds& bounds) {
    VarianceProfile out;
    out.l_max = bounds.l_max();
    out.global_underexplore = global_underexplore(s, out.l_max);
    for (std::size_t k = 0; k < bounds.size(); ++k) {
        out.regime.push_back(variance_regime(s, bounds.lower[k], bounds.upper[k]));
        out.sigma_sq.push_back(variance_bound(s, bounds.lower[k], bounds.upper[k]));
        out.pseudo_var.push_back(pseudo_variance(s, bounds.lower[k], bounds.upper[k], out.l_max));
    }
    return out;
}

TailRegime upper_tail_regime(const Support& s, double l, double u, double eps) {
    check_bounds(s, l, u);
    if (eps > u - l) return TailRegime::Uninformative;
    if (l >= 0.5 * (s.a + s.b)) return TailRegime::LowerBoundInformative;
    if (u <= kHighThreshold * s.a + kLowThreshold * s.b) return TailRegime::UpperBoundInformative;
    return TailRegime::Uninformative;
}

TailRegime lower_tail_regime(const Support& s, double l, double u, double eps) {
    check_bounds(s, l, u);
    if (eps > u - l) return TailRegime::Uninformative;
    if (u <= 0.5 * (s.a + s.b)) return TailRegime::UpperBoundInformative;
    if (l >= kLowThreshold * s.a + kHighThreshold * s.b) return TailRegime::LowerBoundInformative;
    return TailRegime::Uninformative;
}

double upper_tail_variance(const Support& s, double l, double u, double eps) {
    switch (upper_tail_regime(s, l, u, eps)) {
        case TailRegime::LowerBoundInformative: return (l - s.a) * (s.b - l);
        case TailRegime::UpperBoundInformative: return scaled_b_variance(s, s.normalize(u));
        case TailRegime::Uninformative: break;
    }
    return hoeffding_variance(s);
}

double lower_tail_variance(const Support& s, double l, double u, double eps) {
    switch (lower_tail_regime(s, l, u, eps)) {
        case TailRegime::UpperBoundInformative: return (u - s.a) * (s.b - u);
        case TailRegime::LowerBoundInformative: return scaled_b_variance(s, (s.b - l) / s.width());
        case TailRegime::Uninformative: break;
    }
    return hoeffding_variance(s);
}

double upper_tail_bound(const Support& s, double l, double u, std::size_t n, double eps) {
    check_tail_args(n, eps);
    return tail_from_variance(n, eps, upper_tail_variance(s, l, u, eps));
}

double lower_tail_bound(const Support& s, double l, double u, std::size_t n, double eps) {
    check_tail_args(n, eps);
    return tail_from_variance(n, eps, lower_tail_variance(s, l, u, eps));
}

double hoeffding_ci_halfwidth(double failure_prob, std::size_t n, const Support& support) {
    if (!(failure_prob > 0.0 && failure_prob < 1.0)) {
        throw ValidationError("hoeffding half-width requires failure probability in (0, 1)");
    }
    if (n == 0) throw ValidationError("hoeffding half-width requires n >= 1");
    return support.width() * std::sqrt(std::log(2.0 / failure_prob) / (2.0 * static_cast<double>(n)));
}

}  // namespace banditlab
