#include "oracles.hpp"

#include "exactrc/special.hpp"

#include <doctest.h>

#include <cmath>
#include <numbers>

using namespace exactrc;

using oracles::g_h_direct;
using oracles::psi_quadrature;
using oracles::simpson;

TEST_CASE("gamma_fn")
{
    CHECK(gamma_fn(1.0) == doctest::Approx(1.0).epsilon(1e-15));
    CHECK(std::abs(gamma_fn(0.5) - std::sqrt(std::numbers::pi)) < 1e-15 * 2);
    CHECK(std::abs(gamma_fn(0.5) - 1.7724538509) < 1e-10);
    // Gamma(1/4) = 4 int_0^inf e^{-s^4} ds after t = s^4.
    const double quad = 4.0 * simpson([](double s) { return std::exp(-std::pow(s, 4)); }, 0.0, 7.0, 20000);
    CHECK(std::abs(gamma_fn(0.25) - quad) / quad < 1e-12);
    CHECK(std::abs(gamma_fn(0.25) - 3.6256099082) < 1e-10);
    CHECK(std::abs(gamma_fn(2.0) - 1.0) < 1e-15);
    CHECK_THROWS_AS(gamma_fn(0.0), std::domain_error);
    CHECK_THROWS_AS(gamma_fn(-1.0), std::domain_error);
}

TEST_CASE("g_h examples")
{
    CHECK(std::abs(g_h(0.0, 0.5, 1.0) - (1.0 - std::exp(-1.0))) < 1e-15);
    CHECK(std::abs(g_h(0.0, 0.5, 1.0) - 0.6321206) < 1e-7);
    CHECK(g_h(1.3, 0.6, 1e-300) < 1e-299);
    CHECK(g_h(1.3, 0.6, 1e-300) > 0.0);
    const double lim = 2.0 * (std::exp(1.0) + 1) / (4 * (std::exp(1.0) - 1));
    CHECK(std::abs(g_h(2.0, 0.5, 1e-8) / 1e-8 - lim) < 1e-7);
    CHECK(std::abs(g_h(2.0, 0.5, 1e-8) / 1e-8 - 1.0819767) < 1e-7);
    CHECK(std::abs(g_rho_h(0.5, 0.0, 1.0) - 0.6321206) < 1e-7);
}

TEST_CASE("g_h agrees with its definition across the series switch")
{
    for (double h : {0.0, 0.5, 2.0, 7.0})
        for (double eta : {0.55, 0.8})
            for (double u : {1e-7, 3e-6, 9e-6, 1.1e-5, 2e-4, 0.1, 1.0, 10.0, 100.0}) {
                const double ref = g_h_direct(h, eta, u);
                CHECK(std::abs(g_h(h, eta, u) - ref) <= 1e-9 * ref);
            }
}

TEST_CASE("g-functions map into [0, 1) and g_h is increasing")
{
    for (double h : {0.0, 0.5, 2.0}) {
        double prev = 0.0;
        for (int k = -200; k <= 60; ++k) {
            const double u = std::exp(0.25 * k);
            const double g = g_h(h, 0.7, u);
            CHECK(g >= 0.0);
            // Strictly below 1 wherever 1 - g is representable.
            CHECK((u > 15.0 ? g <= 1.0 : g < 1.0));
            CHECK(g >= prev);
            prev = g;
            for (double v : {g_tilde_h(h, 0.7, u), g_prime(u), g_tilde_prime(u)}) {
                CHECK(v >= 0.0);
                CHECK((u > 15.0 ? v <= 1.0 : v < 1.0));
            }
        }
    }
}

TEST_CASE("g_rho_h bound")
{
    for (double rho : {0.3, 0.6, 0.9})
        for (double h : {0.0, 0.5, 2.0}) {
            const double eta = 1.0 / (1.0 + rho);
            for (int w = -5; w <= 5; ++w) {
                // The bound is attained to rounding once g saturates at 1.
                const double bound = (1 + h * eta) * std::min(std::exp(-rho * w), std::exp((1 - rho) * w))
                                     * (1 + 4e-16);
                CHECK(g_rho_h(rho, h, std::exp(w)) <= bound);
                CHECK(g_tilde_rho_h(rho, h, std::exp(w)) <= bound);
            }
        }
}

TEST_CASE("tie variant ratio at small u")
{
    for (double h : {0.5, 1.0, 2.0, 5.0}) {
        const double e = std::exp(h / 2);
        const double r = g_tilde_h(h, 0.5, 1e-8) / g_h(h, 0.5, 1e-8);
        CHECK(std::abs(r - 2 * e / (e + 1)) < 1e-7);
    }
}

TEST_CASE("psi closed form against quadrature")
{
    CHECK(std::abs(psi_rho_h(0.5, 0.0) - 2 * std::sqrt(std::numbers::pi)) < 1e-14);
    CHECK(std::abs(psi_rho_h(0.5, 0.0) - 3.5449077) < 1e-7);
    for (double rho : {0.3, 0.6, 0.9})
        for (double h : {0.0, 0.5, 2.0}) {
            const double q = psi_quadrature(rho, h);
            CHECK(std::abs(psi_rho_h(rho, h) - q) < 1e-9 * std::max(1.0, q));
        }
    CHECK_THROWS_AS(psi_rho_h(1.0, 0.5), std::domain_error);
    CHECK_THROWS_AS(psi_rho_h(0.0, 0.5), std::domain_error);
}

TEST_CASE("singular constants")
{
    const double sp = std::sqrt(std::numbers::pi);
    CHECK(std::abs(psin_rho(0.5) - 4 * sp / 3) < 1e-14);
    CHECK(std::abs(psin_rho(0.5) - 2.3632718012073548) < 1e-14);
    for (double rho : {0.2, 0.5, 0.8})
        CHECK(std::abs(tpsin_rho(rho) / psin_rho(rho) - (1 + rho)) < 1e-12);

    // psi' = int e^{-rho w} g'(e^w) dw.
    for (double rho : {0.3, 0.7}) {
        const auto f = [&](double w) {
            const double u = std::exp(w);
            const double g = u < 1e-4 ? u / 2 - u * u / 6 : 1.0 - (-std::expm1(-u)) / u;
            return std::exp(-rho * w) * g;
        };
        const double q = simpson(f, -40.0 / (1 - rho), 40.0 / rho, 400000);
        CHECK(std::abs(psin_rho(rho) - q) < 1e-9);
    }
}

TEST_CASE("tie-variant closed form ratio")
{
    for (double rho : {0.2, 0.5, 0.8})
        for (double h : {0.3, 1.0, 4.0}) {
            const double expect = (1 + rho) * (std::exp(h) - std::exp(rho * h / (1 + rho))) / std::expm1(h);
            CHECK(std::abs(psi_tilde_rho_h(rho, h) / psi_rho_h(rho, h) - expect) < 1e-10);
            CHECK(expect >= 1.0);
            CHECK(expect < 1.0 + rho);
        }
}

TEST_CASE("lattice series")
{
    SUBCASE("periodicity")
    {
        for (double rho : {0.3, 0.7})
            for (double hp : {0.4, 1.5, 3.0})
                for (double x : {-2.0, 0.1, 5.0}) {
                    CHECK(std::abs(psi_series(rho, 1.0, hp, x + hp) - psi_series(rho, 1.0, hp, x)) < 1e-12);
                    CHECK(std::abs(psin_series(rho, hp, x - hp) - psin_series(rho, hp, x)) < 1e-12);
                }
    }
    SUBCASE("fine span recovers the closed form")
    {
        CHECK(std::abs(psi_series(0.5, 1.0, 1e-3, 0.3) - psi_rho_h(0.5, 1.0)) < 1e-3);
        CHECK(std::abs(psi_tilde_series(0.5, 1.0, 1e-3, 0.3) - psi_tilde_rho_h(0.5, 1.0)) < 1e-3);
        CHECK(std::abs(psin_series(0.4, 1e-3, -0.7) - psin_rho(0.4)) < 1e-3);
        CHECK(std::abs(tpsin_series(0.4, 1e-3, -0.7) - tpsin_rho(0.4)) < 1e-3);
    }
    SUBCASE("positivity and crude bound")
    {
        for (double rho : {0.2, 0.5, 0.9})
            for (double h : {0.0, 0.5, 2.0})
                for (double hp : {0.3, 1.0, 2.5})
                    for (double x : {-3.0, 0.0, 0.7, 4.0}) {
                        const double eta = 1 / (1 + rho);
                        const double v = psi_series(rho, h, hp, x);
                        const double bound = (1 + h * eta) * hp
                                             * (1 / (-std::expm1(-rho * hp)) + 1 / (-std::expm1(-(1 - rho) * hp)));
                        CHECK(v > 0.0);
                        CHECK(v <= bound);
                    }
    }
    SUBCASE("direct summation")
    {
        const double rho = 0.6, h = 0.8, hp = 0.9, x = 0.25;
        double direct = 0.0;
        for (int i = -400; i <= 400; ++i) {
            const double u = std::exp(x + i * hp);
            direct += hp * std::pow(u, -rho) * g_h_direct(h, 1 / (1 + rho), u);
        }
        CHECK(std::abs(psi_series(rho, h, hp, x) - direct) < 1e-11);
        const auto r = lattice_series(GFamily::G, rho, h, hp, x);
        CHECK(r.value == psi_series(rho, h, hp, x));
        CHECK(r.terms > 10);
    }
    CHECK_THROWS_AS(lattice_series(GFamily::G, 0.5, 1.0, 0.0, 0.0), std::domain_error);
}

TEST_CASE("gauss_expect")
{
    CHECK(std::abs(gauss_expect([](double) { return 1.0; }) - 1.0) < 1e-12);
    CHECK(std::abs(gauss_expect([](double v) { return v * v; }) - 1.0) < 1e-10);
    CHECK(std::abs(gauss_expect([](double v) { return std::cos(v); }) - std::exp(-0.5)) < 1e-10);
    CHECK(std::abs(gauss_expect([](double v) { return v > 0.0 ? 1.0 : 0.0; }) - 0.5) < 1e-10);
    CHECK_THROWS_AS(gauss_expect([](double) { return std::nan(""); }), std::domain_error);
}
