#pragma once

#include "exactrc/channel.hpp"

#include <cstddef>
#include <string_view>
#include <vector>

namespace exactrc {

/// Values of Z(lambda), Z'(lambda), Z''(lambda) for one (x, y) atom.
struct ZAtom {
    std::size_t x = 0;
    std::size_t y = 0;
    double z0 = 0.0;
    double z1 = 0.0;
    double z2 = 0.0;
    double prob = 0.0;
};

/// Finite support of (Z, Z', Z'') at a fixed lambda.
struct ZSupport {
    double lambda = 0.5;
    std::vector<ZAtom> atoms;
};

/// z_support at lambda in (0, 1).
ZSupport z_support(const DiscreteChannel& ch, double lambda);
ZSupport z_support(const NuTable& nu, const InputDistribution& px, double lambda);

/// L(alpha) = log E[exp(alpha Z(1/(1+alpha)))], alpha in (0, 1].
double log_mgf(const DiscreteChannel& ch, double alpha);
/// L'(alpha): mean of Z(1/(1+alpha)) under the alpha-tilted atom law.
double log_mgf_derivative(const DiscreteChannel& ch, double alpha);

enum class Regime { BelowCritical, AtCritical, AboveCritical };

std::string_view to_string(Regime r);

struct RateAnalysis {
    double rate = 0.0;
    double rho = 1.0;
    double eta = 0.5;
    double lambda_rho = 0.0; ///< Lambda(rho) = L(rho)
    double er = 0.0;
    double rcrit = 0.0;
    double mi = 0.0;
    double delta = 0.0;
    Regime regime = Regime::BelowCritical;
};

struct SolveOptions {
    double crit_tol = 1e-9; ///< |R - R_crit| at or below this is AtCritical
};

/// Raised when the requested rate lies outside the supported range.
class RateError : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

double critical_rate(const DiscreteChannel& ch);

RateAnalysis solve_exponent(const DiscreteChannel& ch, double rate, const SolveOptions& opts = {});

/// Re-labels the regime of an analysis; below/at critical pins rho = 1.
/// Forcing AboveCritical requires R > R_crit.
RateAnalysis force_regime(const DiscreteChannel& ch, const RateAnalysis& ra, Regime regime);

} // namespace exactrc
