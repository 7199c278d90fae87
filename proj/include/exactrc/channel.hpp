#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace exactrc {

/// Raised for channel documents that fail parsing or validation.
class ChannelError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// A log-likelihood ratio value: a finite real or negative infinity.
class ExtendedReal {
public:
    constexpr ExtendedReal() = default;
    static ExtendedReal finite(double v);
    static constexpr ExtendedReal neg_infinity()
    {
        ExtendedReal r;
        r.finite_ = false;
        return r;
    }

    [[nodiscard]] constexpr bool is_finite() const noexcept { return finite_; }
    [[nodiscard]] constexpr bool is_neg_infinity() const noexcept { return !finite_; }
    /// Finite value, or -inf as an IEEE double.
    [[nodiscard]] double as_double() const noexcept;
    /// e^value with e^{-inf} = 0.
    [[nodiscard]] double exp() const noexcept;

    friend bool operator==(const ExtendedReal&, const ExtendedReal&) = default;

private:
    double value_ = 0.0;
    bool finite_ = true;
};

/// Input distribution P_X over the retained input alphabet (all entries > 0).
class InputDistribution {
public:
    explicit InputDistribution(std::vector<double> probs);

    [[nodiscard]] std::size_t size() const noexcept { return probs_.size(); }
    [[nodiscard]] double operator[](std::size_t x) const { return probs_[x]; }
    [[nodiscard]] const std::vector<double>& probs() const noexcept { return probs_; }

private:
    std::vector<double> probs_;
};

/// Positive-probability (x, y) pair with joint probability P_X(x) W(y|x).
struct Atom {
    std::size_t x = 0;
    std::size_t y = 0;
    double prob = 0.0;
};

/// Finite discrete memoryless channel W(y|x) together with its input law.
/// Immutable after construction.
class DiscreteChannel {
public:
    /// Validates, prunes zero-probability inputs and unreachable outputs, and
    /// renormalizes rows. Throws ChannelError on invalid data.
    DiscreteChannel(std::vector<std::vector<double>> matrix, std::vector<double> input);

    [[nodiscard]] std::size_t num_inputs() const noexcept { return input_.size(); }
    [[nodiscard]] std::size_t num_outputs() const noexcept { return num_outputs_; }
    [[nodiscard]] double w(std::size_t x, std::size_t y) const { return matrix_[x][y]; }
    [[nodiscard]] const std::vector<std::vector<double>>& matrix() const noexcept { return matrix_; }
    [[nodiscard]] const InputDistribution& input() const noexcept { return input_; }

    /// Atoms in row-major (x, y) order.
    [[nodiscard]] const std::vector<Atom>& atoms() const noexcept { return atoms_; }

    /// Original indices kept after pruning.
    [[nodiscard]] const std::vector<std::size_t>& kept_inputs() const noexcept { return kept_inputs_; }
    [[nodiscard]] const std::vector<std::size_t>& kept_outputs() const noexcept { return kept_outputs_; }
    [[nodiscard]] std::size_t pruned_inputs() const noexcept { return pruned_inputs_; }
    [[nodiscard]] std::size_t pruned_outputs() const noexcept { return pruned_outputs_; }

private:
    std::vector<std::vector<double>> matrix_;
    InputDistribution input_;
    std::size_t num_outputs_ = 0;
    std::vector<Atom> atoms_;
    std::vector<std::size_t> kept_inputs_;
    std::vector<std::size_t> kept_outputs_;
    std::size_t pruned_inputs_ = 0;
    std::size_t pruned_outputs_ = 0;
};

/// Parses {"input": [...], "matrix": [[...], ...]}.
DiscreteChannel load_channel(std::string_view json_text);
DiscreteChannel load_channel_file(const std::string& path);
std::string to_json(const DiscreteChannel& ch);

/// nu[x][y][x'] = log W(y|x') / W(y|x), stored for every atom (x, y).
class NuTable {
public:
    explicit NuTable(const DiscreteChannel& ch);

    [[nodiscard]] std::size_t num_atoms() const noexcept { return atoms_.size(); }
    [[nodiscard]] std::size_t num_inputs() const noexcept { return num_inputs_; }
    [[nodiscard]] const Atom& atom(std::size_t a) const { return atoms_[a]; }
    /// Value for atom index a and competitor symbol x'.
    [[nodiscard]] const ExtendedReal& at(std::size_t a, std::size_t xp) const
    {
        return values_[a * num_inputs_ + xp];
    }
    /// Value for (x, y, x'); (x, y) must be an atom.
    [[nodiscard]] const ExtendedReal& operator()(std::size_t x, std::size_t y, std::size_t xp) const;

private:
    std::vector<Atom> atoms_;
    std::size_t num_inputs_ = 0;
    std::size_t num_outputs_ = 0;
    std::vector<std::ptrdiff_t> atom_index_;
    std::vector<ExtendedReal> values_;
};

NuTable nu_table(const DiscreteChannel& ch);

/// I(X;Y) in nats.
double mutual_information(const DiscreteChannel& ch);

} // namespace exactrc
