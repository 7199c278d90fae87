#include "exactrc/oracle.hpp"
#include "exactrc/parallel.hpp"
#include "exactrc/rng.hpp"
#include "exactrc/tilt.hpp"

#include "oracle_detail.hpp"

#include <algorithm>
#include <cmath>
#include <map>

namespace exactrc {

namespace {

constexpr long kChunk = 1024;

struct Moments {
    double log_mean = kNegInf;
    double log_se = kNegInf;
};

// Mean and standard error of e^{lv_i} with a fixed chunked reduction order.
Moments chunked_moments(const std::vector<double>& lv, int threads)
{
    const long count = static_cast<long>(lv.size());
    const double shift = *std::max_element(lv.begin(), lv.end());
    if (shift == kNegInf)
        return {};
    const long chunks = (count + kChunk - 1) / kChunk;
    std::vector<double> part(static_cast<std::size_t>(chunks), 0.0);

    const auto reduce = [&](auto&& f) {
#pragma omp parallel for schedule(static) num_threads(threads)
        for (long c = 0; c < chunks; ++c) {
            CompensatedSum s;
            const long end = std::min(count, (c + 1) * kChunk);
            for (long i = c * kChunk; i < end; ++i)
                s += f(i);
            part[static_cast<std::size_t>(c)] = s.value();
        }
        CompensatedSum total;
        for (double p : part)
            total += p;
        return total.value();
    };

    const double n = static_cast<double>(count);
    const double mean = reduce([&](long i) { return std::exp(lv[static_cast<std::size_t>(i)] - shift); }) / n;
    const double ss = reduce([&](long i) {
        const double d = std::exp(lv[static_cast<std::size_t>(i)] - shift) - mean;
        return d * d;
    });
    Moments mo;
    mo.log_mean = shift + std::log(mean);
    const double var = ss / (n - 1.0);
    mo.log_se = var > 0.0 ? shift + 0.5 * std::log(var / n) : kNegInf;
    return mo;
}

} // namespace

OracleEstimate mc_prc(const DiscreteChannel& ch, const RateAnalysis& ra, long n, double m, TieRule tie,
                      const McOptions& opts)
{
    detail::check_block(n, m);
    if (opts.samples < 100)
        throw OracleError("Monte Carlo needs at least 100 samples");
    const NuTable nt(ch);
    const auto cc = classify_channel(nt, ch);
    const auto gm = detail::build_groups(nt, ch.input());
    const int threads = worker_threads(opts.threads);

    std::vector<detail::Discretization> discs;
    if (const auto d = opts.force_grid && opts.grid ? std::nullopt : detail::native_lattice(cc)) {
        discs.push_back(*d);
    } else if (opts.grid) {
        if (!(*opts.grid > 0.0))
            throw OracleError("grid must be positive");
        discs.push_back({false, *opts.grid, Rounding::Floor});
        discs.push_back({false, *opts.grid, Rounding::Ceil});
    } else {
        discs.push_back({true, 1.0, Rounding::Nearest});
    }

    const double rho = opts.rho.value_or(ra.rho);
    if (!(rho >= 0.0 && rho <= 1.0))
        throw OracleError("tilt must lie in [0, 1]");
    // At rho = 0 the tilt is the identity and z0 is irrelevant.
    const auto zs = z_support(nt, ch.input(), rho > 0.0 ? 1.0 / (1.0 + rho) : 0.5);
    const TiltedSampler sampler(zs, rho);
    const auto& log_w = sampler.log_weights();

    const long count = opts.samples;
    const std::size_t groups = gm.size();
    std::vector<int> keys(static_cast<std::size_t>(count) * groups, 0);
    std::vector<double> lw(static_cast<std::size_t>(count), 0.0);

#pragma omp parallel for schedule(static) num_threads(threads)
    for (long i = 0; i < count; ++i) {
        auto rng = SplitMix64::substream(opts.seed, static_cast<std::uint64_t>(i));
        int* key = keys.data() + static_cast<std::size_t>(i) * groups;
        double acc = 0.0;
        for (long j = 0; j < n; ++j) {
            const std::size_t a = sampler.draw(rng.uniform());
            acc += log_w[a];
            ++key[gm.atom_group[a]];
        }
        lw[static_cast<std::size_t>(i)] = acc;
    }

    // Distinct group compositions are evaluated once.
    std::map<std::vector<long>, std::size_t> index;
    std::vector<std::vector<long>> distinct;
    std::vector<std::size_t> sample_type(static_cast<std::size_t>(count));
    for (long i = 0; i < count; ++i) {
        const int* key = keys.data() + static_cast<std::size_t>(i) * groups;
        std::vector<long> k(key, key + groups);
        const auto [it, fresh] = index.try_emplace(k, distinct.size());
        if (fresh)
            distinct.push_back(std::move(k));
        sample_type[static_cast<std::size_t>(i)] = it->second;
    }

    std::vector<Moments> results;
    for (const auto& d : discs) {
        const detail::TypeEvaluator ev(gm, d, opts.max_cells);
        std::vector<double> lq(distinct.size(), kNegInf);
        const long nd = static_cast<long>(distinct.size());
#pragma omp parallel for schedule(dynamic) num_threads(threads)
        for (long t = 0; t < nd; ++t) {
            const auto pr = ev.evaluate(distinct[static_cast<std::size_t>(t)]);
            lq[static_cast<std::size_t>(t)] = log_q_m(pr.lpp, pr.lp0, m, tie);
        }
        std::vector<double> lv(static_cast<std::size_t>(count));
        for (long i = 0; i < count; ++i)
            lv[static_cast<std::size_t>(i)] = lw[static_cast<std::size_t>(i)] + lq[sample_type[static_cast<std::size_t>(i)]];
        results.push_back(chunked_moments(lv, threads));
    }

    OracleEstimate e;
    e.method = OracleMethod::MonteCarloIS;
    e.n = n;
    e.m = m;
    e.tie = tie;
    e.samples = count;
    if (results.size() == 1) {
        e.log_value = results[0].log_mean;
        e.value = std::exp(e.log_value);
        e.std_error = std::exp(results[0].log_se);
        return e;
    }
    const double lo = std::exp(results[0].log_mean);
    const double hi = std::exp(results[1].log_mean);
    e.lower = lo;
    e.upper = hi;
    e.log_value = log_add_exp(results[0].log_mean, results[1].log_mean) - std::log(2.0);
    e.value = std::exp(e.log_value);
    e.std_error = std::max(std::exp(results[0].log_se), std::exp(results[1].log_se)) + 0.5 * (hi - lo);
    return e;
}

} // namespace exactrc
