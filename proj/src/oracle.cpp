#include "exactrc/oracle.hpp"

#include "oracle_detail.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <string>

namespace exactrc {

namespace {

constexpr double kSeriesCut = 1e-8;

// c(r) = -(r + log(1 - r)) = sum_{k>=2} r^k / k
double log1m_excess(double r)
{
    if (r >= 0.1)
        return -(r + std::log1p(-r));
    double term = r;
    double sum = 0.0;
    for (int k = 2; k < 60; ++k) {
        term *= r;
        const double t = term / k;
        sum += t;
        if (t < 1e-18 * sum)
            break;
    }
    return sum;
}

// e(s) = s - 1 + e^{-s} = sum_{k>=2} (-1)^k s^k / k!
double exp_excess(double s)
{
    if (s >= 0.1)
        return s + std::expm1(-s);
    double term = 1.0;
    double sum = 0.0;
    for (int k = 1; k < 40; ++k) {
        term *= s / k;
        if (k >= 2) {
            const double t = (k % 2 == 0) ? term : -term;
            sum += t;
            if (std::abs(t) < 1e-18 * sum)
                break;
        }
    }
    return sum;
}

// 1 - (1 - (1 - r)^m) / (m r): share of the tied case that is lost.
double tie_loss(double r, double m)
{
    if (r >= 1.0)
        return 1.0 - 1.0 / m;
    const double c = log1m_excess(r);
    const double s = m * (r + c);
    const double v = (exp_excess(s) - m * c) / (m * r);
    return std::clamp(v, 0.0, 1.0);
}

void check_simplex(double pp, double p0)
{
    if (!(pp >= 0.0 && p0 >= 0.0 && pp + p0 <= 1.0 + 1e-12))
        throw std::domain_error("q_m: (p_plus, p_zero) outside the probability simplex");
}

} // namespace

double q_m(double p_plus, double p_zero, double m, TieRule tie)
{
    check_simplex(p_plus, p_zero);
    if (!(m >= 2.0))
        throw std::domain_error("q_m: codebook size must be at least 2");
    const double k = m - 1.0;
    if (tie == TieRule::TieAsError) {
        const double p = std::min(1.0, p_plus + p_zero);
        if (m * p < kSeriesCut)
            return k * p - 0.5 * k * (k - 1.0) * p * p;
        return -std::expm1(k * std::log1p(-p));
    }
    if (m * (p_plus + p_zero) < kSeriesCut) {
        return k * (p_plus + 0.5 * p_zero)
            - 0.5 * k * (k - 1.0) * (p_plus * p_plus + p_plus * p_zero + p_zero * p_zero / 3.0);
    }
    if (p_zero == 0.0)
        return -std::expm1(k * std::log1p(-std::min(1.0, p_plus)));
    if (p_plus >= 1.0)
        return 1.0;
    const double log_a = std::log1p(-p_plus);
    const double none_beat = std::exp(k * log_a);
    const double r = std::min(1.0, p_zero / (1.0 - p_plus));
    return -std::expm1(k * log_a) + none_beat * tie_loss(r, m);
}

double log_q_m(double log_p_plus, double log_p_zero, double m, TieRule tie)
{
    if (!(m >= 2.0))
        throw std::domain_error("q_m: codebook size must be at least 2");
    const double lsum = log_add_exp(log_p_plus, log_p_zero);
    if (lsum == kNegInf)
        return kNegInf;
    if (std::log(m) + lsum < std::log(kSeriesCut)) {
        const double k = m - 1.0;
        const double s = std::exp(lsum);
        if (tie == TieRule::TieAsError)
            return std::log(k) + lsum + std::log1p(-0.5 * (k - 1.0) * s);
        // Fractions of the combined mass keep the correction free of underflow.
        const double x = std::exp(log_p_plus - lsum);
        const double y = std::exp(log_p_zero - lsum);
        const double lead = x + 0.5 * y;
        const double corr = 0.5 * (k - 1.0) * s * (x * x + x * y + y * y / 3.0) / lead;
        return std::log(k) + lsum + std::log(lead) + std::log1p(-corr);
    }
    const double pp = std::exp(log_p_plus);
    const double p0 = std::exp(log_p_zero);
    const double total = pp + p0;
    // Rounding may push the pair slightly off the simplex.
    const double scale = total > 1.0 ? 1.0 / total : 1.0;
    return std::log(q_m(pp * scale, p0 * scale, m, tie));
}

CodebookSize codebook_size(double rate, long n)
{
    if (!(rate > 0.0) || n < 1)
        throw OracleError("codebook_size needs rate > 0 and n >= 1");
    const double lm = static_cast<double>(n) * rate;
    if (lm > kMaxLogM)
        throw OracleError("n R = " + std::to_string(lm) + " exceeds the supported log M of "
                          + std::to_string(kMaxLogM));
    CodebookSize c;
    c.m = std::max(2.0, std::ceil(std::exp(lm)));
    c.rate = std::log(c.m) / static_cast<double>(n);
    return c;
}

PairType make_pair_type(std::vector<long> counts)
{
    PairType t;
    for (long c : counts) {
        if (c < 0)
            throw OracleError("pair type counts must be nonnegative");
        t.n += c;
    }
    t.counts = std::move(counts);
    return t;
}

double LatticeDist::prob(long index) const
{
    const long i = index - min_index;
    if (i < 0 || i >= static_cast<long>(probs.size()))
        return 0.0;
    return probs[static_cast<std::size_t>(i)] * std::exp(log_scale);
}

double LatticeDist::log_p_plus() const
{
    CompensatedSum s;
    for (std::size_t i = 0; i < probs.size(); ++i)
        if (min_index + static_cast<long>(i) > 0)
            s += probs[i];
    return s.value() > 0.0 ? std::log(s.value()) + log_scale : kNegInf;
}

double LatticeDist::log_p_zero() const
{
    const long i = -min_index;
    if (i < 0 || i >= static_cast<long>(probs.size()) || probs[static_cast<std::size_t>(i)] <= 0.0)
        return kNegInf;
    return std::log(probs[static_cast<std::size_t>(i)]) + log_scale;
}

double LatticeDist::p_plus() const { return std::exp(log_p_plus()); }
double LatticeDist::p_zero() const { return std::exp(log_p_zero()); }

std::string_view to_string(OracleMethod m)
{
    switch (m) {
    case OracleMethod::ExactTypes:
        return "ExactTypes";
    case OracleMethod::MonteCarloIS:
        return "MonteCarloIS";
    case OracleMethod::BruteForce:
        return "BruteForce";
    }
    return "?";
}

namespace detail {

namespace {

bool close(double a, double b, double tol) { return std::abs(a - b) <= tol * std::max(1.0, std::abs(a)); }

bool same_law(const GroupLaw& a, const GroupLaw& b)
{
    if (a.finite.size() != b.finite.size() || std::abs(a.neg_inf - b.neg_inf) > 1e-15)
        return false;
    for (std::size_t i = 0; i < a.finite.size(); ++i)
        if (!close(a.finite[i].nu, b.finite[i].nu, 1e-12) || std::abs(a.finite[i].prob - b.finite[i].prob) > 1e-15)
            return false;
    return true;
}

std::vector<LawPoint> merge_sorted(std::vector<LawPoint> pts, double tol)
{
    std::sort(pts.begin(), pts.end(), [](const LawPoint& a, const LawPoint& b) { return a.nu < b.nu; });
    std::vector<LawPoint> out;
    out.reserve(pts.size());
    for (const auto& p : pts) {
        if (!out.empty() && close(out.back().nu, p.nu, tol))
            out.back().prob += p.prob;
        else
            out.push_back(p);
    }
    return out;
}

void normalize(ScaledArray& a)
{
    std::size_t first = 0;
    while (first < a.v.size() && a.v[first] == 0.0)
        ++first;
    std::size_t last = a.v.size();
    while (last > first && a.v[last - 1] == 0.0)
        --last;
    if (first == last) {
        a.v.clear();
        a.lo = 0;
        a.log_scale = kNegInf;
        return;
    }
    if (first > 0 || last < a.v.size()) {
        a.v = std::vector<double>(a.v.begin() + static_cast<std::ptrdiff_t>(first),
                                  a.v.begin() + static_cast<std::ptrdiff_t>(last));
        a.lo += static_cast<long>(first);
    }
    const double mx = *std::max_element(a.v.begin(), a.v.end());
    for (double& x : a.v)
        x /= mx;
    a.log_scale += std::log(mx);
}

constexpr double kSparseMergeTol = 1e-10;
constexpr double kSparseTieTol = 1e-9;

} // namespace

GroupModel build_groups(const NuTable& nt, const InputDistribution& px)
{
    GroupModel gm;
    std::vector<double> group_prob;
    for (std::size_t a = 0; a < nt.num_atoms(); ++a) {
        GroupLaw law;
        std::vector<LawPoint> pts;
        for (std::size_t xp = 0; xp < nt.num_inputs(); ++xp) {
            const auto& v = nt.at(a, xp);
            if (v.is_finite())
                pts.push_back({v.as_double(), px[xp]});
            else
                law.neg_inf += px[xp];
        }
        law.finite = merge_sorted(std::move(pts), 1e-14);
        std::size_t g = 0;
        while (g < gm.laws.size() && !same_law(gm.laws[g], law))
            ++g;
        if (g == gm.laws.size()) {
            gm.laws.push_back(std::move(law));
            group_prob.push_back(0.0);
        }
        group_prob[g] += nt.atom(a).prob;
        gm.atom_group.push_back(g);
        gm.atom_prob.push_back(nt.atom(a).prob);
    }
    for (double p : group_prob)
        gm.log_group_prob.push_back(std::log(p));
    return gm;
}

ScaledArray unit_array() { return ScaledArray{0, {1.0}, 0.0}; }

ScaledArray convolve(const ScaledArray& a, const ScaledArray& b)
{
    if (a.empty() || b.empty())
        return ScaledArray{0, {}, kNegInf};
    ScaledArray c;
    c.lo = a.lo + b.lo;
    c.v.assign(a.v.size() + b.v.size() - 1, 0.0);
    c.log_scale = a.log_scale + b.log_scale;
    for (std::size_t i = 0; i < a.v.size(); ++i) {
        const double ai = a.v[i];
        if (ai == 0.0)
            continue;
        double* out = c.v.data() + i;
        for (std::size_t j = 0; j < b.v.size(); ++j)
            out[j] += ai * b.v[j];
    }
    normalize(c);
    return c;
}

ScaledArray power(const ScaledArray& base, long k)
{
    ScaledArray result = unit_array();
    ScaledArray b = base;
    while (k > 0) {
        if (k & 1L)
            result = convolve(result, b);
        k >>= 1;
        if (k > 0)
            b = convolve(b, b);
    }
    return result;
}

ScaledArray lattice_law(const GroupLaw& law, double span, Rounding rounding)
{
    if (law.finite.empty())
        return ScaledArray{0, {}, kNegInf};
    std::vector<long> idx;
    for (const auto& p : law.finite) {
        const double q = p.nu / span;
        // Values on the grid up to rounding stay put, so a lattice rounded onto
        // its own span is reproduced exactly.
        if (std::abs(q - std::round(q)) <= 1e-9) {
            idx.push_back(std::lround(q));
            continue;
        }
        switch (rounding) {
        case Rounding::Nearest:
            idx.push_back(std::lround(q));
            break;
        case Rounding::Floor:
            idx.push_back(static_cast<long>(std::floor(q)));
            break;
        case Rounding::Ceil:
            idx.push_back(static_cast<long>(std::ceil(q)));
            break;
        }
    }
    const auto [mn, mx] = std::minmax_element(idx.begin(), idx.end());
    ScaledArray a;
    a.lo = *mn;
    a.v.assign(static_cast<std::size_t>(*mx - *mn + 1), 0.0);
    for (std::size_t i = 0; i < idx.size(); ++i)
        a.v[static_cast<std::size_t>(idx[i] - a.lo)] += law.finite[i].prob;
    normalize(a);
    return a;
}

LogPair read_lattice(const ScaledArray& a)
{
    LogPair r;
    if (a.empty())
        return r;
    CompensatedSum plus;
    for (std::size_t i = 0; i < a.v.size(); ++i)
        if (a.lo + static_cast<long>(i) > 0)
            plus += a.v[i];
    if (plus.value() > 0.0)
        r.lpp = std::log(plus.value()) + a.log_scale;
    if (a.lo <= 0 && a.hi() >= 0 && a.v[static_cast<std::size_t>(-a.lo)] > 0.0)
        r.lp0 = std::log(a.v[static_cast<std::size_t>(-a.lo)]) + a.log_scale;
    return r;
}

SparseDist sparse_unit() { return SparseDist{{{0.0, 1.0}}}; }

SparseDist sparse_law(const GroupLaw& law) { return SparseDist{law.finite}; }

SparseDist convolve(const SparseDist& a, const SparseDist& b, double max_points)
{
    if (static_cast<double>(a.pts.size()) * static_cast<double>(b.pts.size()) > max_points)
        throw OracleError("exact nonlattice support exceeds the cell cap; supply a grid");
    std::vector<LawPoint> pts;
    pts.reserve(a.pts.size() * b.pts.size());
    for (const auto& p : a.pts)
        for (const auto& q : b.pts)
            pts.push_back({p.nu + q.nu, p.prob * q.prob});
    return SparseDist{merge_sorted(std::move(pts), kSparseMergeTol)};
}

SparseDist power(const SparseDist& base, long k, double max_points)
{
    SparseDist result = sparse_unit();
    SparseDist b = base;
    while (k > 0) {
        if (k & 1L)
            result = convolve(result, b, max_points);
        k >>= 1;
        if (k > 0)
            b = convolve(b, b, max_points);
    }
    return result;
}

LogPair read_sparse(const SparseDist& d)
{
    CompensatedSum plus;
    CompensatedSum zero;
    for (const auto& p : d.pts) {
        if (std::abs(p.nu) <= kSparseTieTol)
            zero += p.prob;
        else if (p.nu > 0.0)
            plus += p.prob;
    }
    LogPair r;
    if (plus.value() > 0.0)
        r.lpp = std::log(plus.value());
    if (zero.value() > 0.0)
        r.lp0 = std::log(zero.value());
    return r;
}

std::optional<Discretization> native_lattice(const ChannelClass& cc)
{
    if (cc.singular)
        return Discretization{false, 1.0, Rounding::Nearest};
    if (cc.nu_span > 0.0)
        return Discretization{false, cc.nu_span, Rounding::Nearest};
    return std::nullopt;
}

TypeEvaluator::TypeEvaluator(const GroupModel& gm, Discretization d, double max_cells)
    : gm_(gm), d_(d), max_cells_(max_cells)
{
    for (const auto& law : gm.laws) {
        if (d.sparse)
            sparse_.push_back(sparse_law(law));
        else
            lattice_.push_back(lattice_law(law, d.span, d.rounding));
    }
}

ScaledArray TypeEvaluator::lattice_sum(const std::vector<long>& counts) const
{
    double cells = 1.0;
    for (std::size_t g = 0; g < counts.size(); ++g)
        if (!lattice_[g].empty())
            cells += static_cast<double>(counts[g]) * static_cast<double>(lattice_[g].v.size() - 1);
    if (cells > max_cells_)
        throw OracleError("lattice range exceeds the cell cap");
    ScaledArray acc = unit_array();
    for (std::size_t g = 0; g < counts.size() && !acc.empty(); ++g)
        if (counts[g] > 0)
            acc = convolve(acc, power(lattice_[g], counts[g]));
    return acc;
}

LogPair TypeEvaluator::evaluate(const std::vector<long>& counts) const
{
    if (!d_.sparse)
        return read_lattice(lattice_sum(counts));
    SparseDist acc = sparse_unit();
    for (std::size_t g = 0; g < counts.size() && !acc.pts.empty(); ++g)
        if (counts[g] > 0)
            acc = convolve(acc, power(sparse_[g], counts[g], max_cells_), max_cells_);
    return read_sparse(acc);
}

double check_block(long n, double m)
{
    if (n < 1)
        throw OracleError("block length must be positive");
    if (!(m >= 2.0))
        throw OracleError("codebook size must be at least 2");
    const double lm = std::log(m);
    if (lm > kMaxLogM)
        throw OracleError("log M exceeds the supported range");
    return lm;
}

OracleEstimate make_estimate(double log_value, OracleMethod method, long n, double m, TieRule tie)
{
    OracleEstimate e;
    e.log_value = log_value;
    e.value = std::exp(log_value);
    e.method = method;
    e.n = n;
    e.m = m;
    e.tie = tie;
    return e;
}

} // namespace detail

LatticeDist sum_distribution(const NuTable& nt, const DiscreteChannel& ch, const PairType& t,
                             std::optional<double> grid, Rounding rounding, double max_cells)
{
    if (t.counts.size() != nt.num_atoms())
        throw OracleError("pair type has the wrong number of atoms");
    const auto cc = classify_channel(nt, ch);
    auto disc = detail::native_lattice(cc);
    if (!disc) {
        if (!grid || !(*grid > 0.0))
            throw OracleError("nonlattice channel: a grid > 0 is required");
        disc = detail::Discretization{false, *grid, rounding};
    }
    const auto gm = detail::build_groups(nt, ch.input());
    std::vector<long> counts(gm.size(), 0);
    for (std::size_t a = 0; a < t.counts.size(); ++a)
        counts[gm.atom_group[a]] += t.counts[a];

    const detail::TypeEvaluator ev(gm, *disc, max_cells);
    const auto arr = ev.lattice_sum(counts);
    LatticeDist d;
    d.span = disc->span;
    d.min_index = arr.empty() ? 0 : arr.lo;
    d.probs = arr.v;
    d.log_scale = arr.empty() ? 0.0 : arr.log_scale;
    double log_finite = 0.0;
    for (std::size_t g = 0; g < gm.size(); ++g)
        log_finite += static_cast<double>(counts[g]) * std::log1p(-std::min(1.0, gm.laws[g].neg_inf));
    d.minus_inf_mass = -std::expm1(log_finite);
    return d;
}

OracleEstimate brute_force_prc(const DiscreteChannel& ch, long n, int m, TieRule tie)
{
    if (n < 1 || n > 5 || m < 2 || m > 4)
        throw OracleError("brute force supports 1 <= n <= 5 and 2 <= m <= 4");
    const std::size_t nx = ch.num_inputs();
    const std::size_t ny = ch.num_outputs();
    const double size = std::pow(static_cast<double>(nx), static_cast<double>(n * m))
        * std::pow(static_cast<double>(ny), static_cast<double>(n));
    if (size > 1e8)
        throw OracleError("brute force size cap exceeded");

    const auto ipow = [](std::size_t b, long e) {
        std::size_t r = 1;
        for (long i = 0; i < e; ++i)
            r *= b;
        return r;
    };
    const std::size_t nxs = ipow(nx, n);
    const std::size_t nys = ipow(ny, n);

    // Per-sequence probabilities and log-likelihoods.
    std::vector<double> px(nxs, 1.0);
    std::vector<double> loglik(nxs * nys, 0.0);
    for (std::size_t s = 0; s < nxs; ++s) {
        std::size_t xs = s;
        std::vector<std::size_t> x(static_cast<std::size_t>(n));
        for (long i = 0; i < n; ++i) {
            x[static_cast<std::size_t>(i)] = xs % nx;
            xs /= nx;
            px[s] *= ch.input()[x[static_cast<std::size_t>(i)]];
        }
        for (std::size_t t = 0; t < nys; ++t) {
            std::size_t ys = t;
            double l = 0.0;
            for (long i = 0; i < n; ++i) {
                const double w = ch.w(x[static_cast<std::size_t>(i)], ys % ny);
                ys /= ny;
                l = (w > 0.0 && l != kNegInf) ? l + std::log(w) : kNegInf;
            }
            loglik[s * nys + t] = l;
        }
    }

    const std::size_t others = static_cast<std::size_t>(m - 1);
    CompensatedSum total;
    std::vector<std::size_t> cw(others, 0);
    for (std::size_t s0 = 0; s0 < nxs; ++s0) {
        for (std::size_t t = 0; t < nys; ++t) {
            const double l0 = loglik[s0 * nys + t];
            if (l0 == kNegInf)
                continue;
            const double base = px[s0] * std::exp(l0);
            const double tol = 1e-9 * std::max(1.0, std::abs(l0));
            std::fill(cw.begin(), cw.end(), 0);
            while (true) {
                double prob = base;
                bool beaten = false;
                int ties = 0;
                for (std::size_t j = 0; j < others; ++j) {
                    prob *= px[cw[j]];
                    const double lj = loglik[cw[j] * nys + t];
                    if (lj == kNegInf)
                        continue;
                    if (lj - l0 > tol)
                        beaten = true;
                    else if (std::abs(lj - l0) <= tol)
                        ++ties;
                }
                double err = 0.0;
                if (beaten)
                    err = 1.0;
                else if (ties > 0)
                    err = tie == TieRule::TieAsError ? 1.0 : static_cast<double>(ties) / (ties + 1.0);
                total += prob * err;

                std::size_t j = 0;
                while (j < others && ++cw[j] == nxs)
                    cw[j++] = 0;
                if (j == others)
                    break;
            }
        }
    }
    const double v = total.value();
    auto e = detail::make_estimate(v > 0.0 ? std::log(v) : kNegInf, OracleMethod::BruteForce, n,
                                   static_cast<double>(m), tie);
    e.value = v;
    return e;
}

} // namespace exactrc
