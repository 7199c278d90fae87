#pragma once

#include "exactrc/exponent.hpp"

#include <cstddef>
#include <vector>

namespace exactrc {

/// Moments of (Z, Z', Z'') under the rho-tilted atom law.
struct TiltedStats {
    double mu0 = 0.0;
    double mu1 = 0.0;
    double mu2 = 0.0;
    double sigma00 = 0.0;
    double sigma01 = 0.0;
    double sigma11 = 0.0;
    double det_sigma = 0.0;
    double delta = 0.0; ///< -(mu0 + R), signed
    double lambda_rho = 0.0;
};

/// Tilted moments; zs must be evaluated at lambda = 1/(1+rho).
TiltedStats tilted_stats(const ZSupport& zs, double rho, double rate);

/// Normalized tilted pmf over atoms with importance log-weights
/// log(p_a / w_a) = Lambda(rho) - rho z0_a.
class TiltedSampler {
public:
    TiltedSampler(const ZSupport& zs, double rho);

    [[nodiscard]] std::size_t size() const noexcept { return pmf_.size(); }
    [[nodiscard]] const std::vector<double>& pmf() const noexcept { return pmf_; }
    [[nodiscard]] const std::vector<double>& log_weights() const noexcept { return log_weights_; }
    [[nodiscard]] double lambda_rho() const noexcept { return lambda_; }
    [[nodiscard]] double rho() const noexcept { return rho_; }

    /// Inverse-CDF draw for u in [0, 1).
    [[nodiscard]] std::size_t draw(double u) const;

private:
    double rho_ = 0.0;
    double lambda_ = 0.0;
    std::vector<double> pmf_;
    std::vector<double> cdf_;
    std::vector<double> log_weights_;
};

} // namespace exactrc
