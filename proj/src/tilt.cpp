#include "exactrc/tilt.hpp"

#include "exactrc/numeric.hpp"

#include <algorithm>
#include <cmath>

namespace exactrc {

namespace {

// Normalized weights p_a e^{rho z0_a} with the max exponent as pivot.
std::vector<double> tilt_weights(const ZSupport& zs, double rho, double& log_norm)
{
    std::vector<double> logs;
    logs.reserve(zs.atoms.size());
    for (const auto& a : zs.atoms)
        logs.push_back(std::log(a.prob) + rho * a.z0);
    log_norm = log_sum_exp(logs);
    std::vector<double> w;
    w.reserve(logs.size());
    for (double l : logs)
        w.push_back(std::exp(l - log_norm));
    return w;
}

} // namespace

TiltedStats tilted_stats(const ZSupport& zs, double rho, double rate)
{
    TiltedStats ts;
    const auto w = tilt_weights(zs, rho, ts.lambda_rho);

    CompensatedSum m0, m1, m2;
    for (std::size_t i = 0; i < w.size(); ++i) {
        m0 += w[i] * zs.atoms[i].z0;
        m1 += w[i] * zs.atoms[i].z1;
        m2 += w[i] * zs.atoms[i].z2;
    }
    ts.mu0 = m0.value();
    ts.mu1 = m1.value();
    ts.mu2 = std::max(0.0, m2.value());

    CompensatedSum s00, s01, s11;
    for (std::size_t i = 0; i < w.size(); ++i) {
        const double d0 = zs.atoms[i].z0 - ts.mu0;
        const double d1 = zs.atoms[i].z1 - ts.mu1;
        s00 += w[i] * d0 * d0;
        s01 += w[i] * d0 * d1;
        s11 += w[i] * d1 * d1;
    }
    ts.sigma00 = s00.value();
    ts.sigma01 = s01.value();
    ts.sigma11 = s11.value();
    ts.det_sigma = ts.sigma00 * ts.sigma11 - ts.sigma01 * ts.sigma01;
    ts.delta = -(ts.mu0 + rate);
    return ts;
}

TiltedSampler::TiltedSampler(const ZSupport& zs, double rho) : rho_(rho)
{
    pmf_ = tilt_weights(zs, rho, lambda_);
    cdf_.resize(pmf_.size());
    CompensatedSum acc;
    for (std::size_t i = 0; i < pmf_.size(); ++i) {
        acc += pmf_[i];
        cdf_[i] = acc.value();
    }
    cdf_.back() = 1.0;
    log_weights_.reserve(pmf_.size());
    for (const auto& a : zs.atoms)
        log_weights_.push_back(lambda_ - rho * a.z0);
}

std::size_t TiltedSampler::draw(double u) const
{
    const auto it = std::upper_bound(cdf_.begin(), cdf_.end(), u);
    const auto idx = static_cast<std::size_t>(it - cdf_.begin());
    return std::min(idx, cdf_.size() - 1);
}

} // namespace exactrc
