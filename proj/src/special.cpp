#include "exactrc/special.hpp"

#include "exactrc/numeric.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>

namespace exactrc {

namespace {

void require_rho(double rho)
{
    if (!(rho > 0.0 && rho < 1.0))
        throw std::domain_error("rho must lie in (0, 1); Gamma(1 - rho) has a pole at rho = 1");
}

// a = h eta, b = a/(e^a - 1), c = a/(1 - e^{-a}); all slopes are 1 at a = 0.
double b_of(double a) { return a == 0.0 ? 1.0 : a / std::expm1(a); }
double c_of(double a) { return a == 0.0 ? 1.0 : a / -std::expm1(-a); }

// Slope of g at u = 0+, used where e^w underflows.
double small_slope(GFamily f, double h, double eta)
{
    const double a = h * eta;
    switch (f) {
    case GFamily::G:
        return b_of(a) + 0.5 * a;
    case GFamily::GTilde:
        return c_of(a);
    case GFamily::GPrime:
        return 0.5;
    case GFamily::GTildePrime:
        return 1.0;
    }
    return 0.0;
}

double eval_g(GFamily f, double h, double eta, double u)
{
    switch (f) {
    case GFamily::G:
        return g_h(h, eta, u);
    case GFamily::GTilde:
        return g_tilde_h(h, eta, u);
    case GFamily::GPrime:
        return g_prime(u);
    case GFamily::GTildePrime:
        return g_tilde_prime(u);
    }
    return 0.0;
}

// h' u^{-rho} g(u) at u = e^w, kept finite for extreme w.
double series_term(GFamily f, double rho, double h, double eta, double hp, double w)
{
    if (w > 700.0)
        return hp * std::exp(-rho * w);
    if (w < -700.0)
        return hp * small_slope(f, h, eta) * std::exp((1.0 - rho) * w);
    return hp * std::exp(-rho * w) * eval_g(f, h, eta, std::exp(w));
}

double simpson(const std::function<double(double)>& f, double a, double b, double fa, double fm, double fb,
               double whole, double tol, int depth)
{
    const double m = 0.5 * (a + b);
    const double lm = 0.5 * (a + m);
    const double rm = 0.5 * (m + b);
    const double flm = f(lm);
    const double frm = f(rm);
    if (!std::isfinite(flm) || !std::isfinite(frm))
        throw std::domain_error("gauss_expect: integrand is not finite");
    const double left = (m - a) / 6.0 * (fa + 4.0 * flm + fm);
    const double right = (b - m) / 6.0 * (fm + 4.0 * frm + fb);
    const double diff = left + right - whole;
    if (depth <= 0 || std::abs(diff) <= 15.0 * tol)
        return left + right + diff / 15.0;
    return simpson(f, a, m, fa, flm, fm, left, 0.5 * tol, depth - 1)
        + simpson(f, m, b, fm, frm, fb, right, 0.5 * tol, depth - 1);
}

} // namespace

double gamma_fn(double x)
{
    if (!(x > 0.0))
        throw std::domain_error("gamma_fn needs x > 0");
    return std::tgamma(x);
}

double g_prime(double u)
{
    if (u < 0.5) {
        // sum_{k>=1} (-1)^{k+1} u^k/(k+1)!
        double term = 1.0;
        double sum = 0.0;
        for (int k = 1; k < 40; ++k) {
            term *= u / static_cast<double>(k + 1);
            const double t = (k % 2 == 1) ? term : -term;
            sum += t;
            if (std::abs(t) < 1e-18 * std::abs(sum))
                break;
        }
        return sum;
    }
    return 1.0 + std::expm1(-u) / u;
}

double g_tilde_prime(double u) { return -std::expm1(-u); }

double g_h(double h, double eta, double u)
{
    const double a = h * eta;
    if (a == 0.0)
        return -std::expm1(-u);
    const double b = b_of(a);
    if (u < 1e-5) {
        const double u2 = u * u;
        return (b + a / 2.0) * u - (b * b / 2.0 + a * b / 2.0 + a * a / 6.0) * u2
            + (b * b * b / 6.0 + a * b * b / 4.0 + a * a * b / 6.0 + a * a * a / 24.0) * u2 * u;
    }
    // 1 - e^{-bu}(1 - g'(au)) rearranged to avoid cancellation.
    return -std::expm1(-b * u) + std::exp(-b * u) * g_prime(a * u);
}

double g_tilde_h(double h, double eta, double u) { return -std::expm1(-c_of(h * eta) * u); }

double g_rho_h(double rho, double h, double u) { return std::pow(u, -rho) * g_h(h, 1.0 / (1.0 + rho), u); }

double g_tilde_rho_h(double rho, double h, double u)
{
    return std::pow(u, -rho) * g_tilde_h(h, 1.0 / (1.0 + rho), u);
}

double psi_rho_h(double rho, double h)
{
    require_rho(rho);
    const double a = h / (1.0 + rho);
    const double lattice = h == 0.0 ? 1.0 : std::expm1(h) / h;
    return gamma_fn(1.0 - rho) / rho * std::pow(b_of(a), rho + 1.0) * lattice;
}

double psi_tilde_rho_h(double rho, double h)
{
    require_rho(rho);
    return gamma_fn(1.0 - rho) / rho * std::pow(c_of(h / (1.0 + rho)), rho);
}

double psin_rho(double rho)
{
    require_rho(rho);
    return gamma_fn(1.0 - rho) / (rho * (1.0 + rho));
}

double tpsin_rho(double rho)
{
    require_rho(rho);
    return gamma_fn(1.0 - rho) / rho;
}

SeriesResult lattice_series(GFamily family, double rho, double h, double h_prime, double x, double tol)
{
    require_rho(rho);
    if (!(h_prime > 0.0))
        throw std::domain_error("lattice_series needs h' > 0");
    const bool singular = family == GFamily::GPrime || family == GFamily::GTildePrime;
    const double eta = 1.0 / (1.0 + rho);
    if (singular)
        h = 0.0;
    // g_{rho}(e^w) <= C (e^{-rho w} ^ e^{(1-rho) w})
    const double bound = singular ? 1.0 : 1.0 + h * eta;
    const double up_den = -std::expm1(-rho * h_prime);
    const double dn_den = -std::expm1(-(1.0 - rho) * h_prime);

    const double i0 = std::round(-x / h_prime);
    CompensatedSum sum;
    SeriesResult res;
    sum += series_term(family, rho, h, eta, h_prime, x + i0 * h_prime);
    res.terms = 1;
    for (long k = 1;; ++k) {
        const double wu = x + (i0 + static_cast<double>(k)) * h_prime;
        const double wd = x + (i0 - static_cast<double>(k)) * h_prime;
        sum += series_term(family, rho, h, eta, h_prime, wu);
        sum += series_term(family, rho, h, eta, h_prime, wd);
        res.terms += 2;
        const double tail = bound * h_prime
            * (std::exp(-rho * (wu + h_prime)) / up_den + std::exp((1.0 - rho) * (wd - h_prime)) / dn_den);
        if (tail < tol)
            break;
        if (k > 100000000L)
            throw std::runtime_error("lattice_series did not converge");
    }
    res.value = sum.value();
    return res;
}

double psi_series(double rho, double h, double h_prime, double x)
{
    return lattice_series(GFamily::G, rho, h, h_prime, x).value;
}

double psi_tilde_series(double rho, double h, double h_prime, double x)
{
    return lattice_series(GFamily::GTilde, rho, h, h_prime, x).value;
}

double psin_series(double rho, double h_prime, double x)
{
    return lattice_series(GFamily::GPrime, rho, 0.0, h_prime, x).value;
}

double tpsin_series(double rho, double h_prime, double x)
{
    return lattice_series(GFamily::GTildePrime, rho, 0.0, h_prime, x).value;
}

double gauss_expect(const std::function<double(double)>& f, double tol)
{
    constexpr double kLimit = 8.5;
    constexpr int kPanels = 16;
    const double inv_sqrt_2pi = 0.5 * std::numbers::inv_sqrtpi * std::numbers::sqrt2;
    const auto g = [&](double v) { return f(v) * inv_sqrt_2pi * std::exp(-0.5 * v * v); };
    const double width = 2.0 * kLimit / kPanels;
    CompensatedSum total;
    for (int p = 0; p < kPanels; ++p) {
        const double a = -kLimit + p * width;
        const double b = a + width;
        const double fa = g(a);
        const double fm = g(0.5 * (a + b));
        const double fb = g(b);
        if (!std::isfinite(fa) || !std::isfinite(fm) || !std::isfinite(fb))
            throw std::domain_error("gauss_expect: integrand is not finite");
        const double whole = width / 6.0 * (fa + 4.0 * fm + fb);
        total += simpson(g, a, b, fa, fm, fb, whole, tol / kPanels, 40);
    }
    return total.value();
}

} // namespace exactrc
