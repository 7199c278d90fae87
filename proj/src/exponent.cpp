#include "exactrc/exponent.hpp"

#include "exactrc/numeric.hpp"
#include "exactrc/tilt.hpp"

#include <algorithm>
#include <cmath>
#include <string>

namespace exactrc {

std::string_view to_string(Regime r)
{
    switch (r) {
    case Regime::BelowCritical:
        return "BelowCritical";
    case Regime::AtCritical:
        return "AtCritical";
    case Regime::AboveCritical:
        return "AboveCritical";
    }
    return "?";
}

ZSupport z_support(const NuTable& nu, const InputDistribution& px, double lambda)
{
    if (!(lambda > 0.0 && lambda < 1.0))
        throw std::invalid_argument("z_support needs 0 < lambda < 1");
    ZSupport zs;
    zs.lambda = lambda;
    zs.atoms.reserve(nu.num_atoms());

    std::vector<double> logs(nu.num_inputs());
    std::vector<double> vals(nu.num_inputs());
    for (std::size_t a = 0; a < nu.num_atoms(); ++a) {
        for (std::size_t xp = 0; xp < nu.num_inputs(); ++xp) {
            const auto& v = nu.at(a, xp);
            vals[xp] = v.is_finite() ? v.as_double() : 0.0;
            logs[xp] = v.is_finite() ? std::log(px[xp]) + lambda * vals[xp] : kNegInf;
        }
        const double z0 = log_sum_exp(logs);
        CompensatedSum m1;
        for (std::size_t xp = 0; xp < logs.size(); ++xp)
            if (logs[xp] != kNegInf)
                m1 += std::exp(logs[xp] - z0) * vals[xp];
        const double z1 = m1.value();
        CompensatedSum m2;
        for (std::size_t xp = 0; xp < logs.size(); ++xp)
            if (logs[xp] != kNegInf) {
                const double d = vals[xp] - z1;
                m2 += std::exp(logs[xp] - z0) * d * d;
            }
        const auto& at = nu.atom(a);
        zs.atoms.push_back({at.x, at.y, z0, z1, m2.value(), at.prob});
    }
    return zs;
}

ZSupport z_support(const DiscreteChannel& ch, double lambda)
{
    return z_support(NuTable(ch), ch.input(), lambda);
}

namespace {

// Evaluates L and L' at alpha from one Z-support pass.
struct MgfPoint {
    double value;
    double slope;
};

MgfPoint mgf_point(const NuTable& nu, const InputDistribution& px, double alpha)
{
    const auto zs = z_support(nu, px, 1.0 / (1.0 + alpha));
    const auto ts = tilted_stats(zs, alpha, 0.0);
    return {ts.lambda_rho, ts.mu0};
}

RateAnalysis finish(const NuTable& nu, const InputDistribution& px, double rate, double rho, double rcrit,
                    double mi, Regime regime)
{
    RateAnalysis ra;
    ra.rate = rate;
    ra.rho = rho;
    ra.eta = 1.0 / (1.0 + rho);
    const auto zs = z_support(nu, px, ra.eta);
    const auto ts = tilted_stats(zs, rho, rate);
    ra.lambda_rho = ts.lambda_rho;
    ra.er = std::max(0.0, -(rho * rate + ts.lambda_rho));
    ra.rcrit = rcrit;
    ra.mi = mi;
    ra.delta = ts.delta;
    ra.regime = regime;
    return ra;
}

// Minimizes alpha R + L(alpha) over (0, 1] assuming the minimizer is interior
// (R + L'(1) > 0). Golden section narrows the bracket, then bisection on the
// derivative polishes the root of R + L'(alpha).
double solve_rho(const NuTable& nu, const InputDistribution& px, double rate)
{
    const auto objective = [&](double a) { return a * rate + mgf_point(nu, px, a).value; };
    const auto slope = [&](double a) { return rate + mgf_point(nu, px, a).slope; };

    constexpr double kInvPhi = 0.6180339887498949;
    double a = 1e-6;
    double b = 1.0;
    double c = b - kInvPhi * (b - a);
    double d = a + kInvPhi * (b - a);
    double fc = objective(c);
    double fd = objective(d);
    for (int it = 0; it < 60 && b - a > 1e-5; ++it) {
        if (fc < fd) {
            b = d;
            d = c;
            fd = fc;
            c = b - kInvPhi * (b - a);
            fc = objective(c);
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + kInvPhi * (b - a);
            fd = objective(d);
        }
    }

    // alpha below 1e-12 would round lambda to 1; such rates sit within
    // rounding of I and are clamped.
    constexpr double kAlphaFloor = 1e-12;
    double lo = std::max(kAlphaFloor, a - 1e-5);
    double hi = std::min(1.0, b + 1e-5);
    if (slope(lo) > 0.0) {
        lo = kAlphaFloor;
        if (slope(lo) > 0.0)
            return lo;
    }
    if (slope(hi) < 0.0)
        hi = 1.0;

    for (int it = 0; it < 200; ++it) {
        const double mid = 0.5 * (lo + hi);
        if (mid <= lo || mid >= hi)
            break;
        const double s = slope(mid);
        if (std::abs(s) <= 1e-12)
            return mid;
        (s < 0.0 ? lo : hi) = mid;
    }
    return std::abs(slope(lo)) <= std::abs(slope(hi)) ? lo : hi;
}

} // namespace

double log_mgf(const DiscreteChannel& ch, double alpha)
{
    if (!(alpha > 0.0 && alpha <= 1.0))
        throw std::invalid_argument("log_mgf needs 0 < alpha <= 1");
    return mgf_point(NuTable(ch), ch.input(), alpha).value;
}

double log_mgf_derivative(const DiscreteChannel& ch, double alpha)
{
    if (!(alpha > 0.0 && alpha <= 1.0))
        throw std::invalid_argument("log_mgf_derivative needs 0 < alpha <= 1");
    return mgf_point(NuTable(ch), ch.input(), alpha).slope;
}

double critical_rate(const DiscreteChannel& ch)
{
    return -log_mgf_derivative(ch, 1.0);
}

RateAnalysis solve_exponent(const DiscreteChannel& ch, double rate, const SolveOptions& opts)
{
    const double mi = mutual_information(ch);
    if (!(rate > 0.0 && rate < mi))
        throw RateError("rate " + std::to_string(rate) + " outside (0, I) with I = " + std::to_string(mi));
    const NuTable nu(ch);
    const double rcrit = -mgf_point(nu, ch.input(), 1.0).slope;

    if (std::abs(rate - rcrit) <= opts.crit_tol)
        return finish(nu, ch.input(), rate, 1.0, rcrit, mi, Regime::AtCritical);
    if (rate < rcrit)
        return finish(nu, ch.input(), rate, 1.0, rcrit, mi, Regime::BelowCritical);
    if (rcrit >= mi - 1e-12)
        throw RateError("no above-critical regime exists (R_crit = I, Z(eta) singular)");
    return finish(nu, ch.input(), rate, solve_rho(nu, ch.input(), rate), rcrit, mi, Regime::AboveCritical);
}

RateAnalysis force_regime(const DiscreteChannel& ch, const RateAnalysis& ra, Regime regime)
{
    const NuTable nu(ch);
    if (regime == Regime::AboveCritical) {
        if (!(ra.rate > ra.rcrit) || ra.rcrit >= ra.mi - 1e-12)
            throw RateError("cannot force AboveCritical: R <= R_crit");
        return finish(nu, ch.input(), ra.rate, solve_rho(nu, ch.input(), ra.rate), ra.rcrit, ra.mi, regime);
    }
    return finish(nu, ch.input(), ra.rate, 1.0, ra.rcrit, ra.mi, regime);
}

} // namespace exactrc
