#include "exactrc/oracle.hpp"
#include "exactrc/parallel.hpp"

#include "oracle_detail.hpp"

#include <cmath>
#include <functional>

namespace exactrc {

namespace {

using detail::Discretization;
using detail::GroupModel;
using detail::LogPair;
using detail::LogSum;
using detail::ScaledArray;
using detail::SparseDist;
using detail::log_factorial;

// Power tables D_g^{*k}, k = 0..n, with suffix sums for the last group.
class LatticeBackend {
public:
    using Dist = ScaledArray;

    LatticeBackend(const GroupModel& gm, const Discretization& d, long n, double max_cells)
    {
        const std::size_t groups = gm.size();
        std::vector<ScaledArray> base;
        double cells = 0.0;
        for (const auto& law : gm.laws) {
            base.push_back(detail::lattice_law(law, d.span, d.rounding));
            const double w = base.back().empty() ? 0.0 : static_cast<double>(base.back().v.size() - 1);
            cells += static_cast<double>(n + 1) * (1.0 + 0.5 * w * static_cast<double>(n));
        }
        cells += cells / static_cast<double>(groups);
        if (cells > max_cells)
            throw OracleError("power tables exceed the cell cap");

        tables_.resize(groups);
        for (std::size_t g = 0; g < groups; ++g) {
            tables_[g].reserve(static_cast<std::size_t>(n + 1));
            tables_[g].push_back(detail::unit_array());
            for (long k = 1; k <= n; ++k)
                tables_[g].push_back(detail::convolve(tables_[g].back(), base[g]));
        }
        for (const auto& t : tables_.back()) {
            std::vector<double> s(t.v.size() + 1, 0.0);
            for (std::size_t i = t.v.size(); i-- > 0;)
                s[i] = s[i + 1] + t.v[i];
            suffix_.push_back(std::move(s));
        }
    }

    [[nodiscard]] const Dist& table(std::size_t g, long k) const { return tables_[g][static_cast<std::size_t>(k)]; }
    [[nodiscard]] static Dist conv(const Dist& a, const Dist& b) { return detail::convolve(a, b); }

    [[nodiscard]] LogPair finish(const Dist& p, long k) const
    {
        const auto& c = tables_.back()[static_cast<std::size_t>(k)];
        LogPair r;
        if (p.empty() || c.empty())
            return r;
        const auto& suf = suffix_[static_cast<std::size_t>(k)];
        const auto tail = [&](long t) { // P[S_c >= t] / scale
            if (t <= c.lo)
                return suf[0];
            if (t > c.hi())
                return 0.0;
            return suf[static_cast<std::size_t>(t - c.lo)];
        };
        CompensatedSum plus;
        CompensatedSum zero;
        for (std::size_t i = 0; i < p.v.size(); ++i) {
            const long s = p.lo + static_cast<long>(i);
            plus += p.v[i] * tail(1 - s);
            const long j = -s;
            if (j >= c.lo && j <= c.hi())
                zero += p.v[i] * c.v[static_cast<std::size_t>(j - c.lo)];
        }
        const double ls = p.log_scale + c.log_scale;
        if (plus.value() > 0.0)
            r.lpp = std::log(plus.value()) + ls;
        if (zero.value() > 0.0)
            r.lp0 = std::log(zero.value()) + ls;
        return r;
    }

private:
    std::vector<std::vector<ScaledArray>> tables_;
    std::vector<std::vector<double>> suffix_;
};

class SparseBackend {
public:
    using Dist = SparseDist;

    SparseBackend(const GroupModel& gm, long n, double max_cells) : max_cells_(max_cells)
    {
        tables_.resize(gm.size());
        for (std::size_t g = 0; g < gm.size(); ++g) {
            const auto base = detail::sparse_law(gm.laws[g]);
            tables_[g].push_back(detail::sparse_unit());
            for (long k = 1; k <= n; ++k)
                tables_[g].push_back(detail::convolve(tables_[g].back(), base, max_cells));
        }
    }

    [[nodiscard]] const Dist& table(std::size_t g, long k) const { return tables_[g][static_cast<std::size_t>(k)]; }
    [[nodiscard]] Dist conv(const Dist& a, const Dist& b) const { return detail::convolve(a, b, max_cells_); }
    [[nodiscard]] LogPair finish(const Dist& p, long k) const
    {
        return detail::read_sparse(conv(p, tables_.back()[static_cast<std::size_t>(k)]));
    }

private:
    double max_cells_;
    std::vector<std::vector<SparseDist>> tables_;
};

template <class Backend>
void descend(const Backend& b, const GroupModel& gm, std::size_t g, long rem, const typename Backend::Dist& partial,
             double lw, double m, TieRule tie, LogSum& acc)
{
    const double lp = gm.log_group_prob[g];
    if (g + 1 == gm.size()) {
        const LogPair pr = b.finish(partial, rem);
        acc.add(lw + static_cast<double>(rem) * lp - log_factorial(rem) + log_q_m(pr.lpp, pr.lp0, m, tie));
        return;
    }
    for (long k = 0; k <= rem; ++k)
        descend(b, gm, g + 1, rem - k, b.conv(partial, b.table(g, k)), lw + static_cast<double>(k) * lp - log_factorial(k),
                m, tie, acc);
}

template <class Backend>
double enumerate(const Backend& b, const GroupModel& gm, long n, double m, TieRule tie, int threads)
{
    const double lfn = log_factorial(n);
    if (gm.size() == 1) {
        LogSum acc;
        descend(b, gm, 0, n, b.table(0, 0), lfn, m, tie, acc);
        return acc.log_value();
    }
    std::vector<LogSum> slots(static_cast<std::size_t>(n + 1));
    const double lp0 = gm.log_group_prob[0];
#pragma omp parallel for schedule(dynamic) num_threads(threads)
    for (long k0 = 0; k0 <= n; ++k0) {
        LogSum acc;
        descend(b, gm, 1, n - k0, b.table(0, k0), lfn + static_cast<double>(k0) * lp0 - log_factorial(k0), m, tie,
                acc);
        slots[static_cast<std::size_t>(k0)] = acc;
    }
    LogSum total;
    for (const auto& s : slots)
        total.merge(s);
    return total.log_value();
}

double composition_count(long n, std::size_t parts)
{
    const double k = static_cast<double>(parts);
    return std::exp(std::lgamma(static_cast<double>(n) + k) - std::lgamma(k) - std::lgamma(static_cast<double>(n) + 1.0));
}

OracleEstimate bracket(double log_lo, double log_hi, long n, double m, TieRule tie)
{
    const double lo = std::exp(log_lo);
    const double hi = std::exp(log_hi);
    auto e = detail::make_estimate(log_add_exp(log_lo, log_hi) - std::log(2.0), OracleMethod::ExactTypes, n, m, tie);
    e.std_error = 0.5 * (hi - lo);
    e.lower = lo;
    e.upper = hi;
    return e;
}

// Serial evaluation over all atom-level joint types.
double reference_log_prc(const GroupModel& gm, const Discretization& d, long n, double m, TieRule tie,
                         double max_cells)
{
    const detail::TypeEvaluator ev(gm, d, max_cells);
    const std::size_t atoms = gm.atom_prob.size();
    std::vector<long> counts(atoms, 0);
    LogSum acc;
    const double lfn = log_factorial(n);
    const std::function<void(std::size_t, long, double)> walk = [&](std::size_t a, long rem, double lw) {
        if (a + 1 == atoms) {
            counts[a] = rem;
            lw += static_cast<double>(rem) * std::log(gm.atom_prob[a]) - log_factorial(rem);
            std::vector<long> groups(gm.size(), 0);
            for (std::size_t i = 0; i < atoms; ++i)
                groups[gm.atom_group[i]] += counts[i];
            const LogPair pr = ev.evaluate(groups);
            acc.add(lw + log_q_m(pr.lpp, pr.lp0, m, tie));
            return;
        }
        for (long k = 0; k <= rem; ++k) {
            counts[a] = k;
            walk(a + 1, rem - k, lw + static_cast<double>(k) * std::log(gm.atom_prob[a]) - log_factorial(k));
        }
    };
    walk(0, n, lfn);
    return acc.log_value();
}

} // namespace

OracleEstimate exact_prc(const DiscreteChannel& ch, long n, double m, TieRule tie, const ExactOptions& opts)
{
    detail::check_block(n, m);
    const NuTable nt(ch);
    const auto cc = classify_channel(nt, ch);
    const auto gm = detail::build_groups(nt, ch.input());
    if (composition_count(n, gm.size()) > opts.max_types)
        throw OracleError("number of types exceeds the cap");
    const int threads = worker_threads(opts.threads);

    const auto native = opts.force_grid && opts.grid ? std::nullopt : detail::native_lattice(cc);
    if (const auto& d = native) {
        const LatticeBackend b(gm, *d, n, opts.max_cells);
        return detail::make_estimate(enumerate(b, gm, n, m, tie, threads), OracleMethod::ExactTypes, n, m, tie);
    }
    if (opts.grid) {
        if (!(*opts.grid > 0.0))
            throw OracleError("grid must be positive");
        const LatticeBackend lo(gm, {false, *opts.grid, Rounding::Floor}, n, opts.max_cells);
        const LatticeBackend hi(gm, {false, *opts.grid, Rounding::Ceil}, n, opts.max_cells);
        return bracket(enumerate(lo, gm, n, m, tie, threads), enumerate(hi, gm, n, m, tie, threads), n, m, tie);
    }
    const SparseBackend b(gm, n, opts.max_cells);
    return detail::make_estimate(enumerate(b, gm, n, m, tie, threads), OracleMethod::ExactTypes, n, m, tie);
}

OracleEstimate exact_prc_reference(const DiscreteChannel& ch, long n, double m, TieRule tie, const ExactOptions& opts)
{
    detail::check_block(n, m);
    const NuTable nt(ch);
    const auto cc = classify_channel(nt, ch);
    const auto gm = detail::build_groups(nt, ch.input());
    if (composition_count(n, gm.atom_prob.size()) > opts.max_types)
        throw OracleError("number of types exceeds the cap");

    const auto native = opts.force_grid && opts.grid ? std::nullopt : detail::native_lattice(cc);
    if (const auto& d = native)
        return detail::make_estimate(reference_log_prc(gm, *d, n, m, tie, opts.max_cells), OracleMethod::ExactTypes, n,
                                     m, tie);
    if (opts.grid) {
        const double lo = reference_log_prc(gm, {false, *opts.grid, Rounding::Floor}, n, m, tie, opts.max_cells);
        const double hi = reference_log_prc(gm, {false, *opts.grid, Rounding::Ceil}, n, m, tie, opts.max_cells);
        return bracket(lo, hi, n, m, tie);
    }
    return detail::make_estimate(reference_log_prc(gm, {true, 1.0, Rounding::Nearest}, n, m, tie, opts.max_cells),
                                 OracleMethod::ExactTypes, n, m, tie);
}

} // namespace exactrc
