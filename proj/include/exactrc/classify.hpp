#pragma once

#include "exactrc/channel.hpp"
#include "exactrc/exponent.hpp"
#include "exactrc/tilt.hpp"

#include <optional>
#include <span>

namespace exactrc {

inline constexpr double kLatticeTol = 1e-9;
inline constexpr double kLatticeVerifyTol = 1e-7;

/// Outcome of fitting a one-dimensional lattice to a finite value set.
struct LatticeFit {
    std::optional<double> span;  ///< present when the values are lattice
    double candidate = 0.0;      ///< gcd before verification (0 if it collapsed)
    double max_residue = 0.0;    ///< worst |d - k h| / h over differences
};

/// Largest h > 0 such that every pairwise difference is an integer multiple of
/// h up to tol * max(1, max|v|), or empty when the values are nonlattice (or
/// take a single value).
std::optional<double> real_lattice_span(std::span<const double> values, double tol = kLatticeTol);
LatticeFit fit_lattice(std::span<const double> values, double tol = kLatticeTol);

struct ChannelClass {
    bool singular = false;
    double nu_span = 0.0; ///< 0 encodes nonlattice (or singular)
    bool strongly_symmetric = false;
    LatticeFit nu_fit;
};

struct ZLattice {
    double h_prime = 0.0;
    double a_prime = 0.0; ///< in [0, h_prime)
};

struct PairClass {
    std::optional<ZLattice> z_lattice;
    bool pseudo_symmetric = false;
    double affine_residual = 0.0;
    LatticeFit z_fit;
};

ChannelClass classify_channel(const NuTable& nu, const DiscreteChannel& ch);
ChannelClass classify_channel(const DiscreteChannel& ch);

PairClass classify_pair(const ZSupport& zs, const TiltedStats& stats);

/// True when the matrix rows are permutations of one row and the columns are
/// permutations of one column.
bool is_strongly_symmetric(const DiscreteChannel& ch, double tol = 1e-12);

} // namespace exactrc
