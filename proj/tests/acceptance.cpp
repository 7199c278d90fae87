// Acceptance checks AC-1 .. AC-9. One PASS/FAIL line per criterion.
//
//   acceptance            run all
//   acceptance --only AC-7

#include "corpus.hpp"
#include "oracles.hpp"

#include "exactrc/asymptotics.hpp"
#include "exactrc/classify.hpp"
#include "exactrc/exponent.hpp"
#include "exactrc/oracle.hpp"
#include "exactrc/special.hpp"
#include "exactrc/tilt.hpp"

#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstring>
#include <functional>
#include <stdexcept>
#include <string>
#include <vector>

using namespace exactrc;

namespace {

struct Outcome {
    bool pass = true;
    std::string detail;
};

void note(Outcome& o, const char* fmt, double a, double b = 0.0, double c = 0.0, double d = 0.0)
{
    char buf[256];
    std::snprintf(buf, sizeof buf, fmt, a, b, c, d);
    if (!o.detail.empty())
        o.detail += "; ";
    o.detail += buf;
}

struct Solved {
    RateAnalysis ra;
    ZSupport zs;
    TiltedStats ts;
    ChannelClass cc;
    PairClass pc;
};

Solved solve(const DiscreteChannel& ch, double rate)
{
    Solved s;
    s.ra = solve_exponent(ch, rate);
    s.zs = z_support(ch, s.ra.eta);
    s.ts = tilted_stats(s.zs, s.ra.rho, rate);
    s.cc = classify_channel(ch);
    s.pc = classify_pair(s.zs, s.ts);
    return s;
}

Prediction predict_at(const DiscreteChannel& ch, double rate, long n, TieRule tie)
{
    const auto s = solve(ch, rate);
    return predict(s.ra, s.ts, s.cc, s.pc, n, tie);
}

// ---------------------------------------------------------------------------

Outcome ac1()
{
    Outcome o;
    double worst_mu1 = 0.0, worst_env = 0.0, worst_stat = 0.0;
    for (const auto& ch : corpus::random_corpus()) {
        const double mi = mutual_information(ch);
        const double rc = critical_rate(ch);
        for (double f : {0.1, 0.3, 0.5, 0.7, 0.9}) {
            const double rate = rc + f * (mi - rc);
            const auto s = solve(ch, rate);
            const double h = 1e-6;
            const double d_lambda = (log_mgf(ch, s.ra.rho + h) - log_mgf(ch, s.ra.rho - h)) / (2 * h);
            worst_mu1 = std::max(worst_mu1, std::abs(s.ts.mu1));
            worst_env = std::max(worst_env, std::abs(s.ts.mu0 - d_lambda));
            worst_stat = std::max(worst_stat, std::abs(rate + log_mgf_derivative(ch, s.ra.rho)));
        }
    }
    o.pass = worst_mu1 <= 1e-8 && worst_env <= 1e-7 && worst_stat <= 1e-8;
    note(o, "max|mu1|=%.3g max|mu0-dL|=%.3g max|R+L'|=%.3g", worst_mu1, worst_env, worst_stat);
    return o;
}

Outcome ac2()
{
    Outcome o;
    double worst = 0.0;
    for (const auto& ch : corpus::random_corpus())
        for (int k = 1; k <= 10; ++k)
            worst = std::max(worst, std::abs(log_mgf(ch, 0.1 * k) - oracles::gallager_log_mgf(ch, 0.1 * k)));
    o.pass = worst <= 1e-12;
    note(o, "max|L - gallager|=%.3g", worst);
    return o;
}

Outcome ac3()
{
    Outcome o;
    double quad = 0.0, series = 0.0, tie = 0.0, sing = 0.0;
    for (double rho : {0.3, 0.6, 0.9})
        for (double h : {0.0, 0.5, 2.0}) {
            quad = std::max(quad, std::abs(psi_rho_h(rho, h) - oracles::psi_quadrature(rho, h)));
            series = std::max(series, std::abs(psi_series(rho, h, 1e-3, 0.3) - psi_rho_h(rho, h)));
            if (h > 0.0) {
                const double expect = (1 + rho) * (std::exp(h) - std::exp(rho * h / (1 + rho))) / std::expm1(h);
                tie = std::max(tie, std::abs(psi_tilde_rho_h(rho, h) / psi_rho_h(rho, h) - expect));
            }
            sing = std::max(sing, std::abs(tpsin_rho(rho) / psin_rho(rho) - (1 + rho)));
        }
    o.pass = quad <= 1e-9 && series <= 1e-3 && tie <= 1e-10 && sing <= 1e-10;
    note(o, "quadrature=%.3g series(h'=1e-3)=%.3g tie ratio=%.3g singular ratio=%.3g", quad, series, tie, sing);
    return o;
}

Outcome ac4()
{
    Outcome o;
    double worst = 0.0;
    for (const auto& ch : corpus::random_binary())
        for (long n : {2L, 3L})
            for (int m : {2, 3})
                for (auto t : {TieRule::UniformRandom, TieRule::TieAsError})
                    worst = std::max(worst,
                                     std::abs(exact_prc(ch, n, m, t).value - brute_force_prc(ch, n, m, t).value));

    struct Config {
        DiscreteChannel ch;
        double rate;
        long n;
        TieRule tie;
    };
    const auto mid = [](const DiscreteChannel& c) { return 0.5 * (critical_rate(c) + mutual_information(c)); };
    const auto bsc = corpus::bsc(0.11);
    const auto bec = corpus::bec(0.4);
    const auto z = corpus::z_channel(0.3);
    const auto e3 = corpus::erasure(3, 0.4);
    // Two random channels with enough capacity that the rounded codebook
    // rate log ceil(e^{nR}) / n stays inside (0, I) at these short lengths.
    std::vector<DiscreteChannel> wide;
    for (const auto& c : corpus::random_binary())
        if (mutual_information(c) > 0.15)
            wide.push_back(c);
    if (wide.size() < 2)
        throw std::runtime_error("fewer than two random binary channels with I > 0.15");
    const auto r1 = wide[0];
    const auto r2 = wide[1];
    std::vector<Config> cfgs = {
        {bsc, mid(bsc), 30, TieRule::UniformRandom},
        {bsc, 0.5 * critical_rate(bsc), 30, TieRule::TieAsError},
        {corpus::bsc(0.2), 0.1, 20, TieRule::UniformRandom},
        {bec, 0.5 * critical_rate(bec), 30, TieRule::UniformRandom},
        {bec, mid(bec), 25, TieRule::TieAsError},
        {z, mid(z), 25, TieRule::UniformRandom},
        {e3, mid(e3), 20, TieRule::UniformRandom},
        {corpus::qsc(3, 0.3), mid(corpus::qsc(3, 0.3)), 15, TieRule::UniformRandom},
        {r1, mid(r1), 12, TieRule::UniformRandom},
        {r2, 0.5 * mutual_information(r2), 10, TieRule::TieAsError},
    };
    double worst_z = 0.0;
    for (const auto& c : cfgs) {
        const auto cb = codebook_size(c.rate, c.n);
        const auto ra = solve_exponent(c.ch, cb.rate);
        const auto mc = mc_prc(c.ch, ra, c.n, cb.m, c.tie);
        const auto ex = exact_prc(c.ch, c.n, cb.m, c.tie);
        worst_z = std::max(worst_z, std::abs(mc.value - ex.value) / mc.std_error);
    }
    o.pass = worst <= 1e-12 && worst_z <= 4.0;
    note(o, "max|exact-brute|=%.3g max z(mc vs exact)=%.3g over %.0f configs", worst, worst_z,
         static_cast<double>(cfgs.size()));
    return o;
}

Outcome ac5()
{
    Outcome o;
    const auto ch = corpus::bsc(0.11);
    const double rate = 0.6 * critical_rate(ch);
    std::vector<double> ratio;
    for (long n : {50L, 200L}) {
        const auto cb = codebook_size(rate, n);
        const auto p = predict_at(ch, cb.rate, n, TieRule::UniformRandom);
        const auto e = exact_prc(ch, n, cb.m, TieRule::UniformRandom);
        ratio.push_back(std::exp(e.log_value - p.log_value));
    }
    o.pass = ratio[1] >= 0.85 && ratio[1] <= 1.15 && std::abs(ratio[1] - 1) < std::abs(ratio[0] - 1);
    note(o, "ratio n=50: %.6f, n=200: %.6f (band [0.85, 1.15], closer at 200)", ratio[0], ratio[1]);
    return o;
}

Outcome ac6()
{
    Outcome o;
    const auto ch = corpus::bec(0.4);
    const double rate = 0.5 * critical_rate(ch);
    const long n = 300;
    const auto cb = codebook_size(rate, n);
    const auto ra = solve_exponent(ch, cb.rate);
    const double u = std::exp(exact_prc(ch, n, cb.m, TieRule::UniformRandom).log_value + n * ra.er);
    const double e = std::exp(exact_prc(ch, n, cb.m, TieRule::TieAsError).log_value + n * ra.er);
    o.pass = u >= 0.45 && u <= 0.55 && e >= 0.9 && e <= 1.1;
    note(o, "P e^{nE_r(R_n)} at n=300: uniform %.6f [0.45, 0.55], ties-as-errors %.6f [0.9, 1.1]", u, e);
    return o;
}

Outcome ac7()
{
    Outcome o;
    const std::vector<long> ns = {64, 128, 256};
    const auto in_band = [](double r) { return r >= 0.7 && r <= 1.4; };

    const auto run = [&](const DiscreteChannel& ch, std::vector<double>& ratio, std::vector<double>& alt) {
        const double rate = 0.5 * (critical_rate(ch) + mutual_information(ch));
        for (long n : ns) {
            const auto cb = codebook_size(rate, n);
            const auto s = solve(ch, cb.rate);
            const auto p = predict(s.ra, s.ts, s.cc, s.pc, n, TieRule::UniformRandom);
            McOptions mo;
            mo.samples = 100000;
            const auto e = mc_prc(ch, s.ra, n, cb.m, TieRule::UniformRandom, mo);
            ratio.push_back(std::exp(e.log_value - p.log_value));
            if (p.alt_prefactor)
                alt.push_back(ratio.back() * p.prefactor / *p.alt_prefactor);
        }
    };

    std::vector<double> bsc, unused;
    run(corpus::bsc(0.11), bsc, unused);
    bool bsc_ok = true;
    for (std::size_t i = 0; i < bsc.size(); ++i) {
        bsc_ok = bsc_ok && in_band(bsc[i]);
        if (i > 0)
            bsc_ok = bsc_ok && std::abs(bsc[i] - 1) <= std::abs(bsc[i - 1] - 1);
    }
    note(o, "BSC(0.11) lattice ratios n=64,128,256: %.4f %.4f %.4f", bsc[0], bsc[1], bsc[2]);

    std::vector<double> sing, alt;
    run(corpus::erasure(3, 0.4), sing, alt);
    bool sing_ok = alt.size() == sing.size();
    for (std::size_t i = 0; i < sing.size() && sing_ok; ++i)
        sing_ok = in_band(sing[i]) && !in_band(alt[i]);
    note(o, "3-ary erasure sqrt(2 pi n s00) ratios: %.4f %.4f %.4f", sing[0], sing[1], sing[2]);
    note(o, "sqrt(2 pi n) s00 ratios: %.4f %.4f %.4f", alt[0], alt[1], alt[2]);

    o.pass = bsc_ok && sing_ok;
    return o;
}

Outcome ac8()
{
    Outcome o;
    double worst_span = 0.0;
    bool pseudo = true;
    for (const auto& ch : corpus::strongly_symmetric()) {
        const double mi = mutual_information(ch);
        const double rc = critical_rate(ch);
        for (double f : {0.1, 0.5, 0.9}) {
            const auto s = solve(ch, rc + f * (mi - rc));
            pseudo = pseudo && s.pc.pseudo_symmetric;
            if (s.cc.nu_span > 0.0) {
                if (!s.pc.z_lattice) {
                    worst_span = INFINITY;
                    continue;
                }
                worst_span = std::max(worst_span, std::abs(s.pc.z_lattice->h_prime - s.ra.eta * s.cc.nu_span));
            }
        }
    }
    int mismatches = 0;
    for (const auto& ch : corpus::full_corpus()) {
        const auto cc = classify_channel(ch);
        const auto ts = tilted_stats(z_support(ch, 0.6), 0.5, 0.0);
        mismatches += cc.singular != (ts.mu2 <= 1e-12);
    }
    o.pass = pseudo && worst_span <= 1e-9 && mismatches == 0;
    note(o, "pseudo-symmetric on all strongly symmetric: %.0f; max|h' - eta h|=%.3g; singular/mu2 mismatches=%.0f",
         pseudo ? 1.0 : 0.0, worst_span, mismatches);
    return o;
}

Outcome ac9()
{
    Outcome o;
    const auto ch = corpus::bsc(0.11);
    const double rate = 0.5 * (critical_rate(ch) + mutual_information(ch));
    const auto cb = codebook_size(rate, 128);
    const auto ra = solve_exponent(ch, cb.rate);
    std::vector<OracleEstimate> runs;
    for (int t : {1, 4, 8}) {
        McOptions mo;
        mo.samples = 100000;
        mo.seed = 2024;
        mo.threads = t;
        runs.push_back(mc_prc(ch, ra, 128, cb.m, TieRule::UniformRandom, mo));
    }
    bool same = true;
    for (const auto& r : runs)
        same = same && std::memcmp(&r.value, &runs[0].value, sizeof(double)) == 0
               && std::memcmp(&r.std_error, &runs[0].std_error, sizeof(double)) == 0;
    o.pass = same;
    note(o, "threads 1/4/8 value %.17g %.17g %.17g", runs[0].value, runs[1].value, runs[2].value);
    return o;
}

struct Criterion {
    const char* id;
    double budget_s;
    std::function<Outcome()> fn;
};

} // namespace

int main(int argc, char** argv)
{
    const std::vector<Criterion> all = {
        {"AC-1", 5, ac1},   {"AC-2", 1, ac2},   {"AC-3", 5, ac3}, {"AC-4", 120, ac4}, {"AC-5", 300, ac5},
        {"AC-6", 300, ac6}, {"AC-7", 600, ac7}, {"AC-8", 1, ac8}, {"AC-9", 60, ac9},
    };
    std::string only;
    for (int i = 1; i < argc; ++i) {
        if (std::strcmp(argv[i], "--only") == 0 && i + 1 < argc) {
            only = argv[++i];
        } else {
            std::fprintf(stderr, "usage: %s [--only AC-k]\n", argv[0]);
            return 2;
        }
    }

    int failures = 0, ran = 0;
    for (const auto& c : all) {
        if (!only.empty() && only != c.id)
            continue;
        ++ran;
        const auto t0 = std::chrono::steady_clock::now();
        Outcome o;
        try {
            o = c.fn();
        } catch (const std::exception& e) {
            o.pass = false;
            o.detail = std::string("exception: ") + e.what();
        }
        const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
        const bool in_time = secs < c.budget_s;
        const bool pass = o.pass && in_time;
        std::printf("%s %s %s (%.2fs, budget %.0fs%s)\n", c.id, pass ? "PASS" : "FAIL", o.detail.c_str(), secs,
                    c.budget_s, in_time ? "" : ", over budget");
        std::fflush(stdout);
        failures += !pass;
    }
    if (ran == 0) {
        std::fprintf(stderr, "unknown criterion '%s'\n", only.c_str());
        return 2;
    }
    return failures == 0 ? 0 : 1;
}
