#pragma once

#include <functional>

namespace exactrc {

/// Gamma function on (0, 2] (std::tgamma, relative error near 1 ulp).
double gamma_fn(double x);

// g-families. u > 0; every g maps (0, inf) into [0, 1).
double g_prime(double u);                         ///< 1 - (1 - e^{-u})/u
double g_tilde_prime(double u);                   ///< 1 - e^{-u}
double g_h(double h, double eta, double u);
double g_tilde_h(double h, double eta, double u); ///< 1 - e^{-c u}, c = h eta e^{h eta}/(e^{h eta} - 1)
double g_rho_h(double rho, double h, double u);   ///< u^{-rho} g_h(u), eta = 1/(1+rho)
double g_tilde_rho_h(double rho, double h, double u);

// Closed-form constants. All require 0 < rho < 1.
double psi_rho_h(double rho, double h);
double psi_tilde_rho_h(double rho, double h);
double psin_rho(double rho);  ///< Gamma(1-rho)/(rho(1+rho))
double tpsin_rho(double rho); ///< Gamma(1-rho)/rho

/// Which g enters the period-h' series sum_i h' u^{-rho} g(u), u = e^{x + i h'}.
enum class GFamily { G, GTilde, GPrime, GTildePrime };

struct SeriesResult {
    double value = 0.0;
    long terms = 0;
};

/// Generic period-h' lattice sum, truncated once the geometric tail bound
/// drops below tol. h is ignored for the GPrime families.
SeriesResult lattice_series(GFamily family, double rho, double h, double h_prime, double x, double tol = 1e-12);

double psi_series(double rho, double h, double h_prime, double x);
double psi_tilde_series(double rho, double h, double h_prime, double x);
double psin_series(double rho, double h_prime, double x);
double tpsin_series(double rho, double h_prime, double x);

/// E f(V), V standard normal, by adaptive Simpson on [-8.5, 8.5].
double gauss_expect(const std::function<double(double)>& f, double tol = 1e-12);

} // namespace exactrc
