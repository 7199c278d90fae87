#pragma once

#include "exactrc/classify.hpp"
#include "exactrc/exponent.hpp"
#include "exactrc/tilt.hpp"

#include <optional>
#include <stdexcept>
#include <string_view>

namespace exactrc {

enum class TieRule { UniformRandom, TieAsError };

enum class Branch {
    T1_Below,
    T1_AtCrit,
    T2_Nonlattice,
    T2_Lattice,
    T2_PseudoSym_Nonlattice,
    T2_PseudoSym_Lattice,
    T3_Below,
    T3_AtCrit,
    T4_Lattice,
    T4_Nonlattice,
};

std::string_view to_string(TieRule t);
std::string_view to_string(Branch b);

struct Prediction {
    long n = 0;
    Branch branch = Branch::T1_Below;
    double log_value = 0.0; ///< -n E_r + log(prefactor)
    double prefactor = 0.0;
    double i_n = 0.0;       ///< T2 only
    double c2 = 0.0;        ///< T2 only
    bool oscillating = false;
    /// T4 only: prefactor with the sqrt(2 pi n) sigma00 denominator.
    std::optional<double> alt_prefactor;
};

class PredictError : public std::domain_error {
public:
    using std::domain_error::domain_error;
};

struct PredictOptions {
    /// Evaluate pseudo-symmetric lattice pairs through the Gaussian-average
    /// form (with |Sigma| = 0) instead of the direct series value.
    bool force_general = false;
};

/// (n a) mod h in [0, h) by binary doubling with a reduction after every step.
double na_prime_mod(long n, double a_prime, double h_prime);

/// h (e^{h/2} + 1) / (2 (e^{h/2} - 1)), equal to 2 at h = 0.
double t1_constant(double h);

/// Series argument n a' + n R reduced modulo h'. Codeword likelihoods are
/// compared after the log M shift, which moves the lattice phase by n R.
double lattice_phase(long n, double a_prime, double h_prime, double rate);

/// I_n of the above-critical prefactor for series argument x (lattice) or
/// the closed form (nonlattice, x ignored).
double t2_intensity(const RateAnalysis& ra, const TiltedStats& ts, double h, const PairClass& pc, double x,
                    TieRule tie, const PredictOptions& opts = {});

Prediction predict(const RateAnalysis& ra, const TiltedStats& ts, const ChannelClass& cc, const PairClass& pc,
                   long n, TieRule tie, const PredictOptions& opts = {});

} // namespace exactrc
