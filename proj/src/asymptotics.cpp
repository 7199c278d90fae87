#include "exactrc/asymptotics.hpp"

#include "exactrc/special.hpp"

#include <cmath>
#include <numbers>

namespace exactrc {

namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;

double tie_factor_t1(double h)
{
    const double e = std::exp(0.5 * h);
    return 2.0 * e / (e + 1.0);
}

} // namespace

std::string_view to_string(TieRule t)
{
    return t == TieRule::UniformRandom ? "uniform" : "error";
}

std::string_view to_string(Branch b)
{
    switch (b) {
    case Branch::T1_Below:
        return "T1_Below";
    case Branch::T1_AtCrit:
        return "T1_AtCrit";
    case Branch::T2_Nonlattice:
        return "T2_Nonlattice";
    case Branch::T2_Lattice:
        return "T2_Lattice";
    case Branch::T2_PseudoSym_Nonlattice:
        return "T2_PseudoSym_Nonlattice";
    case Branch::T2_PseudoSym_Lattice:
        return "T2_PseudoSym_Lattice";
    case Branch::T3_Below:
        return "T3_Below";
    case Branch::T3_AtCrit:
        return "T3_AtCrit";
    case Branch::T4_Lattice:
        return "T4_Lattice";
    case Branch::T4_Nonlattice:
        return "T4_Nonlattice";
    }
    return "?";
}

double na_prime_mod(long n, double a_prime, double h_prime)
{
    if (!(h_prime > 0.0))
        throw std::domain_error("na_prime_mod needs h' > 0");
    const auto reduce = [h_prime](double v) {
        v = std::fmod(v, h_prime);
        if (v < 0.0)
            v += h_prime;
        return v >= h_prime ? 0.0 : v;
    };
    const bool negative = n < 0;
    unsigned long k = negative ? static_cast<unsigned long>(-n) : static_cast<unsigned long>(n);
    double base = reduce(a_prime);
    double acc = 0.0;
    while (k != 0) {
        if (k & 1UL)
            acc = reduce(acc + base);
        base = reduce(base + base);
        k >>= 1;
    }
    return negative ? reduce(-acc) : acc;
}

double t1_constant(double h)
{
    if (h == 0.0)
        return 2.0;
    const double x = 0.5 * h;
    const double em1 = std::expm1(x);
    return x * (em1 + 2.0) / em1;
}

double lattice_phase(long n, double a_prime, double h_prime, double rate)
{
    double v = na_prime_mod(n, a_prime, h_prime) + std::fmod(static_cast<double>(n) * rate, h_prime);
    v = std::fmod(v, h_prime);
    return v < 0.0 ? v + h_prime : v;
}

double t2_intensity(const RateAnalysis& ra, const TiltedStats& ts, double h, const PairClass& pc, double x,
                    TieRule tie, const PredictOptions& opts)
{
    const double rho = ra.rho;
    const double det = pc.pseudo_symmetric ? 0.0 : ts.det_sigma;
    const double s = ts.sigma00 + rho * det / ts.mu2;
    const double root_s = std::sqrt(s);
    const GFamily fam = tie == TieRule::UniformRandom ? GFamily::G : GFamily::GTilde;

    if (!pc.z_lattice)
        return (tie == TieRule::UniformRandom ? psi_rho_h(rho, h) : psi_tilde_rho_h(rho, h)) / root_s;

    const double hp = pc.z_lattice->h_prime;
    const auto series = [&](double arg) { return lattice_series(fam, rho, h, hp, arg).value; };
    if (pc.pseudo_symmetric && !opts.force_general)
        return series(x) / root_s;
    const double k = det / (2.0 * s);
    return gauss_expect([&](double v) { return series(x - k * v * v); }) / root_s;
}

Prediction predict(const RateAnalysis& ra, const TiltedStats& ts, const ChannelClass& cc, const PairClass& pc,
                   long n, TieRule tie, const PredictOptions& opts)
{
    if (n < 1)
        throw PredictError("block length must be positive");
    Prediction p;
    p.n = n;
    const double nd = static_cast<double>(n);
    const double h = cc.nu_span;
    const bool error_ties = tie == TieRule::TieAsError;

    if (cc.singular) {
        switch (ra.regime) {
        case Regime::BelowCritical:
            p.branch = Branch::T3_Below;
            p.prefactor = error_ties ? 1.0 : 0.5;
            break;
        case Regime::AtCritical:
            p.branch = Branch::T3_AtCrit;
            p.prefactor = error_ties ? 0.5 : 0.25;
            break;
        case Regime::AboveCritical: {
            if (!(ts.sigma00 > 1e-15))
                throw PredictError("no above-critical regime: Z(eta) is singular");
            if (ra.rho >= 1.0 - 1e-6)
                throw PredictError("rho within 1e-6 of 1; use the AtCritical branch");
            double psi;
            if (pc.z_lattice) {
                p.branch = Branch::T4_Lattice;
                p.oscillating = true;
                const double x = lattice_phase(n, pc.z_lattice->a_prime, pc.z_lattice->h_prime, ra.rate);
                psi = error_ties ? tpsin_series(ra.rho, pc.z_lattice->h_prime, x)
                                 : psin_series(ra.rho, pc.z_lattice->h_prime, x);
            } else {
                p.branch = Branch::T4_Nonlattice;
                psi = error_ties ? tpsin_rho(ra.rho) : psin_rho(ra.rho);
            }
            p.prefactor = psi / std::sqrt(kTwoPi * nd * ts.sigma00);
            p.alt_prefactor = psi / (std::sqrt(kTwoPi * nd) * ts.sigma00);
            break;
        }
        }
        p.log_value = -nd * ra.er + std::log(p.prefactor);
        return p;
    }

    if (ra.regime != Regime::AboveCritical) {
        p.branch = ra.regime == Regime::BelowCritical ? Branch::T1_Below : Branch::T1_AtCrit;
        double pre = t1_constant(h) / std::sqrt(kTwoPi * nd * (ts.mu2 + ts.sigma11));
        if (ra.regime == Regime::AtCritical)
            pre *= 0.5;
        if (error_ties)
            pre *= tie_factor_t1(h);
        p.prefactor = pre;
        p.log_value = -nd * ra.er + std::log(pre);
        return p;
    }

    if (!(ts.sigma00 > 1e-15))
        throw PredictError("no above-critical regime: Z(eta) is singular");
    if (ra.rho >= 1.0 - 1e-6)
        throw PredictError("rho within 1e-6 of 1; use the AtCritical branch");

    const double rho = ra.rho;
    p.c2 = ra.eta * std::sqrt(kTwoPi * ts.mu2);
    double x = 0.0;
    if (pc.z_lattice) {
        p.oscillating = true;
        p.branch = pc.pseudo_symmetric ? Branch::T2_PseudoSym_Lattice : Branch::T2_Lattice;
        x = lattice_phase(n, pc.z_lattice->a_prime, pc.z_lattice->h_prime, ra.rate)
            - std::log(p.c2 * std::sqrt(nd));
    } else {
        p.branch = pc.pseudo_symmetric ? Branch::T2_PseudoSym_Nonlattice : Branch::T2_Nonlattice;
    }
    p.i_n = t2_intensity(ra, ts, h, pc, x, tie, opts);
    const double log_pre = rho * std::log1p(rho) + std::log(p.i_n)
        - 0.5 * ((1.0 + rho) * std::log(kTwoPi) + rho * std::log(ts.mu2)) - 0.5 * (1.0 + rho) * std::log(nd);
    p.prefactor = std::exp(log_pre);
    p.log_value = -nd * ra.er + log_pre;
    return p;
}

} // namespace exactrc
