#pragma once

#include "exactrc/asymptotics.hpp"
#include "exactrc/channel.hpp"
#include "exactrc/exponent.hpp"

#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string_view>
#include <vector>

namespace exactrc {

class OracleError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// log M above this is refused: M_n must stay an exactly representable double
/// with room for the q_M algebra.
inline constexpr double kMaxLogM = 650.0;

/// Error probability against m - 1 independent competitors, each beating the
/// sent word w.p. p_plus and tying w.p. p_zero.
double q_m(double p_plus, double p_zero, double m, TieRule tie);
/// log q_m from log-probabilities; stays accurate when p_plus, p_zero underflow.
double log_q_m(double log_p_plus, double log_p_zero, double m, TieRule tie);

struct CodebookSize {
    double m = 0.0;    ///< ceil(e^{nR}), integer valued
    double rate = 0.0; ///< log(m)/n
};
CodebookSize codebook_size(double rate, long n);

/// Atom counts of a sequence pair, indexed like NuTable atoms.
struct PairType {
    std::vector<long> counts;
    long n = 0;
};
PairType make_pair_type(std::vector<long> counts);

enum class Rounding { Nearest, Floor, Ceil };

/// Law of the competitor's log-likelihood ratio sum on span * Z. Finite
/// probabilities are probs[i] * e^{log_scale} at index min_index + i.
struct LatticeDist {
    double span = 0.0;
    long min_index = 0;
    std::vector<double> probs;
    double log_scale = 0.0;
    double minus_inf_mass = 0.0;

    [[nodiscard]] double prob(long index) const;
    [[nodiscard]] double log_p_plus() const;
    [[nodiscard]] double log_p_zero() const;
    [[nodiscard]] double p_plus() const;
    [[nodiscard]] double p_zero() const;
};

/// Without a grid the channel must have a lattice nu-span (or be singular).
/// With a grid, every finite nu is rounded onto grid * Z in the given direction.
LatticeDist sum_distribution(const NuTable& nt, const DiscreteChannel& ch, const PairType& t,
                             std::optional<double> grid = std::nullopt, Rounding rounding = Rounding::Floor,
                             double max_cells = 1e8);

enum class OracleMethod { ExactTypes, MonteCarloIS, BruteForce };
std::string_view to_string(OracleMethod m);

struct OracleEstimate {
    double value = 0.0;
    double log_value = 0.0;
    double std_error = 0.0;
    OracleMethod method = OracleMethod::ExactTypes;
    long n = 0;
    double m = 0.0;
    TieRule tie = TieRule::UniformRandom;
    std::optional<double> lower; ///< grid mode bounds
    std::optional<double> upper;
    long samples = 0;
};

struct ExactOptions {
    std::optional<double> grid;
    /// Use the grid even when the channel has a native lattice.
    bool force_grid = false;
    double max_types = 5e7;
    double max_cells = 1e8;
    int threads = 0;
};

/// P_RC(n) by enumerating compositions over groups of atoms that share a
/// competitor law. Exact for lattice and singular channels; small nonlattice
/// cases use exact real-valued sums; with a grid, returns the midpoint of
/// certified bounds with std_error equal to the half-width.
OracleEstimate exact_prc(const DiscreteChannel& ch, long n, double m, TieRule tie, const ExactOptions& opts = {});

/// Serial per-joint-type evaluation without grouping or power tables.
OracleEstimate exact_prc_reference(const DiscreteChannel& ch, long n, double m, TieRule tie,
                                   const ExactOptions& opts = {});

struct McOptions {
    long samples = 100000;
    std::uint64_t seed = 1;
    std::optional<double> grid;
    bool force_grid = false;
    std::optional<double> rho; ///< tilt override; 0 gives plain Monte Carlo
    int threads = 0;
    double max_cells = 1e8;
};

/// Importance-sampled estimate under the rho-tilted atom law.
OracleEstimate mc_prc(const DiscreteChannel& ch, const RateAnalysis& ra, long n, double m, TieRule tie,
                      const McOptions& opts = {});

/// Direct expectation over all codebooks and outputs; n <= 5, m <= 4.
OracleEstimate brute_force_prc(const DiscreteChannel& ch, long n, int m, TieRule tie);

} // namespace exactrc
