#pragma once

// Shared machinery for the exact, Monte Carlo and reference oracles.

#include "exactrc/classify.hpp"
#include "exactrc/numeric.hpp"
#include "exactrc/oracle.hpp"

#include <cmath>
#include <optional>
#include <vector>

namespace exactrc::detail {

struct LawPoint {
    double nu;
    double prob;
};

/// Law of nu(x, y, X') for X' ~ P_X: finite points sorted by nu plus the mass
/// at -infinity.
struct GroupLaw {
    std::vector<LawPoint> finite;
    double neg_inf = 0.0;
};

/// Atoms sharing a competitor law are interchangeable for p+ and p0.
struct GroupModel {
    std::vector<GroupLaw> laws;
    std::vector<double> log_group_prob;
    std::vector<std::size_t> atom_group;
    std::vector<double> atom_prob;

    [[nodiscard]] std::size_t size() const noexcept { return laws.size(); }
};

GroupModel build_groups(const NuTable& nt, const InputDistribution& px);

struct LogPair {
    double lpp = kNegInf;
    double lp0 = kNegInf;
};

/// Finite part of a lattice law: value at index lo + i is v[i] * e^{log_scale}.
struct ScaledArray {
    long lo = 0;
    std::vector<double> v;
    double log_scale = 0.0;

    [[nodiscard]] bool empty() const noexcept { return v.empty(); }
    [[nodiscard]] long hi() const noexcept { return lo + static_cast<long>(v.size()) - 1; }
};

ScaledArray unit_array();
ScaledArray convolve(const ScaledArray& a, const ScaledArray& b);
ScaledArray power(const ScaledArray& base, long k);
ScaledArray lattice_law(const GroupLaw& law, double span, Rounding rounding);
LogPair read_lattice(const ScaledArray& a);

struct SparseDist {
    std::vector<LawPoint> pts; // sorted, merged
};

SparseDist sparse_unit();
SparseDist sparse_law(const GroupLaw& law);
SparseDist convolve(const SparseDist& a, const SparseDist& b, double max_points);
SparseDist power(const SparseDist& base, long k, double max_points);
LogPair read_sparse(const SparseDist& d);

/// How finite nu values are represented.
struct Discretization {
    bool sparse = false;
    double span = 1.0;
    Rounding rounding = Rounding::Nearest;
};

/// Lattice discretization for lattice or singular channels; empty otherwise.
std::optional<Discretization> native_lattice(const ChannelClass& cc);

/// p+ and p0 for a vector of group counts, computed afresh each call.
class TypeEvaluator {
public:
    TypeEvaluator(const GroupModel& gm, Discretization d, double max_cells);
    [[nodiscard]] LogPair evaluate(const std::vector<long>& counts) const;
    [[nodiscard]] ScaledArray lattice_sum(const std::vector<long>& counts) const;

private:
    const GroupModel& gm_;
    Discretization d_;
    double max_cells_;
    std::vector<ScaledArray> lattice_;
    std::vector<SparseDist> sparse_;
};

/// Streaming log-sum-exp with compensated inner sum.
class LogSum {
public:
    void add(double log_v)
    {
        if (log_v == kNegInf)
            return;
        if (log_v > shift_) {
            const double carry = shift_ == kNegInf ? 0.0 : sum_.value() * std::exp(shift_ - log_v);
            sum_ = CompensatedSum{};
            sum_ += carry;
            shift_ = log_v;
        }
        sum_ += std::exp(log_v - shift_);
    }
    void merge(const LogSum& o)
    {
        if (o.shift_ != kNegInf)
            add(o.shift_ + std::log(o.sum_.value()));
    }
    [[nodiscard]] double log_value() const { return shift_ == kNegInf ? kNegInf : shift_ + std::log(sum_.value()); }

private:
    double shift_ = kNegInf;
    CompensatedSum sum_;
};

inline double log_factorial(long k) { return std::lgamma(static_cast<double>(k) + 1.0); }

/// Validates (n, m) and returns log m.
double check_block(long n, double m);

OracleEstimate make_estimate(double log_value, OracleMethod method, long n, double m, TieRule tie);

} // namespace exactrc::detail
