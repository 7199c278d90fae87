#include "exactrc/channel.hpp"

#include "exactrc/numeric.hpp"

#include <cmath>
#include <fstream>
#include <sstream>

#include <json.hpp>

namespace exactrc {

namespace {

constexpr double kLoadTol = 1e-9;

std::string fmt_index(const char* what, std::size_t i)
{
    return std::string(what) + " " + std::to_string(i);
}

} // namespace

ExtendedReal ExtendedReal::finite(double v)
{
    if (!std::isfinite(v))
        throw std::invalid_argument("ExtendedReal::finite requires a finite value");
    ExtendedReal r;
    r.value_ = v;
    return r;
}

double ExtendedReal::as_double() const noexcept
{
    return finite_ ? value_ : kNegInf;
}

double ExtendedReal::exp() const noexcept
{
    return finite_ ? std::exp(value_) : 0.0;
}

InputDistribution::InputDistribution(std::vector<double> probs) : probs_(std::move(probs))
{
    if (probs_.empty())
        throw ChannelError("input distribution is empty");
    CompensatedSum s;
    for (std::size_t i = 0; i < probs_.size(); ++i) {
        if (!(probs_[i] > 0.0) || probs_[i] > 1.0 + kLoadTol)
            throw ChannelError(fmt_index("input probability out of (0,1] at", i));
        s += probs_[i];
    }
    const double total = s.value();
    if (std::abs(total - 1.0) > kLoadTol)
        throw ChannelError("input probabilities sum to " + std::to_string(total));
    for (double& p : probs_)
        p /= total;
}

namespace {

std::vector<double> prune_input(const std::vector<double>& input, std::vector<std::size_t>& kept)
{
    std::vector<double> out;
    for (std::size_t x = 0; x < input.size(); ++x) {
        if (input[x] < 0.0 || !std::isfinite(input[x]))
            throw ChannelError(fmt_index("negative or non-finite input probability at", x));
        if (input[x] > 0.0) {
            kept.push_back(x);
            out.push_back(input[x]);
        }
    }
    return out;
}

} // namespace

DiscreteChannel::DiscreteChannel(std::vector<std::vector<double>> matrix, std::vector<double> input)
    : input_([&] {
          if (input.empty())
              throw ChannelError("empty input alphabet");
          if (matrix.size() != input.size())
              throw ChannelError("matrix has " + std::to_string(matrix.size()) + " rows but input has "
                                 + std::to_string(input.size()) + " entries");
          std::vector<std::size_t> kept;
          return InputDistribution(prune_input(input, kept));
      }())
{
    const std::size_t ny = matrix.front().size();
    if (ny == 0)
        throw ChannelError("empty output alphabet");
    for (std::size_t x = 0; x < matrix.size(); ++x) {
        if (matrix[x].size() != ny)
            throw ChannelError(fmt_index("ragged matrix at row", x));
        CompensatedSum s;
        for (std::size_t y = 0; y < ny; ++y) {
            const double v = matrix[x][y];
            if (!std::isfinite(v) || v < 0.0)
                throw ChannelError("negative or non-finite entry at row " + std::to_string(x) + ", column "
                                   + std::to_string(y));
            if (v > 1.0 + kLoadTol)
                throw ChannelError("entry above 1 at row " + std::to_string(x) + ", column " + std::to_string(y));
            s += v;
        }
        if (std::abs(s.value() - 1.0) > kLoadTol) {
            std::ostringstream os;
            os << "row " << x << " sums to " << s.value();
            throw ChannelError(os.str());
        }
    }

    for (std::size_t x = 0; x < input.size(); ++x)
        if (input[x] > 0.0)
            kept_inputs_.push_back(x);
    pruned_inputs_ = input.size() - kept_inputs_.size();

    for (std::size_t y = 0; y < ny; ++y) {
        bool reachable = false;
        for (std::size_t x : kept_inputs_)
            reachable = reachable || matrix[x][y] > 0.0;
        if (reachable)
            kept_outputs_.push_back(y);
    }
    pruned_outputs_ = ny - kept_outputs_.size();
    num_outputs_ = kept_outputs_.size();

    matrix_.reserve(kept_inputs_.size());
    for (std::size_t x : kept_inputs_) {
        std::vector<double> row;
        row.reserve(num_outputs_);
        CompensatedSum s;
        for (std::size_t y : kept_outputs_) {
            row.push_back(matrix[x][y]);
            s += matrix[x][y];
        }
        const double total = s.value();
        for (double& v : row)
            v /= total;
        matrix_.push_back(std::move(row));
    }

    for (std::size_t x = 0; x < matrix_.size(); ++x)
        for (std::size_t y = 0; y < num_outputs_; ++y)
            if (matrix_[x][y] > 0.0)
                atoms_.push_back({x, y, input_[x] * matrix_[x][y]});
}

DiscreteChannel load_channel(std::string_view json_text)
{
    nlohmann::json doc;
    try {
        doc = nlohmann::json::parse(json_text);
    } catch (const nlohmann::json::parse_error& e) {
        throw ChannelError(std::string("malformed JSON: ") + e.what());
    }
    if (!doc.is_object() || !doc.contains("input") || !doc.contains("matrix"))
        throw ChannelError("channel document needs \"input\" and \"matrix\" keys");
    try {
        auto input = doc.at("input").get<std::vector<double>>();
        auto matrix = doc.at("matrix").get<std::vector<std::vector<double>>>();
        if (matrix.empty())
            throw ChannelError("empty input alphabet");
        return DiscreteChannel(std::move(matrix), std::move(input));
    } catch (const nlohmann::json::exception& e) {
        throw ChannelError(std::string("schema error: ") + e.what());
    }
}

DiscreteChannel load_channel_file(const std::string& path)
{
    std::ifstream in(path);
    if (!in)
        throw ChannelError("cannot open channel file " + path);
    std::stringstream buf;
    buf << in.rdbuf();
    return load_channel(buf.str());
}

std::string to_json(const DiscreteChannel& ch)
{
    nlohmann::json doc;
    doc["input"] = ch.input().probs();
    doc["matrix"] = ch.matrix();
    return doc.dump();
}

NuTable::NuTable(const DiscreteChannel& ch)
    : atoms_(ch.atoms()), num_inputs_(ch.num_inputs()), num_outputs_(ch.num_outputs()),
      atom_index_(ch.num_inputs() * ch.num_outputs(), -1)
{
    values_.reserve(atoms_.size() * num_inputs_);
    for (std::size_t a = 0; a < atoms_.size(); ++a) {
        const auto [x, y, p] = atoms_[a];
        atom_index_[x * num_outputs_ + y] = static_cast<std::ptrdiff_t>(a);
        const double wx = ch.w(x, y);
        for (std::size_t xp = 0; xp < num_inputs_; ++xp) {
            const double wxp = ch.w(xp, y);
            if (xp == x)
                values_.push_back(ExtendedReal::finite(0.0));
            else if (wxp == 0.0)
                values_.push_back(ExtendedReal::neg_infinity());
            else
                values_.push_back(ExtendedReal::finite(std::log(wxp / wx)));
        }
    }
}

const ExtendedReal& NuTable::operator()(std::size_t x, std::size_t y, std::size_t xp) const
{
    const auto a = atom_index_.at(x * num_outputs_ + y);
    if (a < 0)
        throw std::out_of_range("(x, y) is not a positive-probability atom");
    return at(static_cast<std::size_t>(a), xp);
}

NuTable nu_table(const DiscreteChannel& ch)
{
    return NuTable(ch);
}

double mutual_information(const DiscreteChannel& ch)
{
    const NuTable nu(ch);
    const auto& px = ch.input();
    CompensatedSum total;
    for (std::size_t a = 0; a < nu.num_atoms(); ++a) {
        CompensatedSum inner;
        for (std::size_t xp = 0; xp < nu.num_inputs(); ++xp)
            inner += px[xp] * nu.at(a, xp).exp();
        total += -nu.atom(a).prob * std::log(inner.value());
    }
    return std::max(0.0, total.value());
}

} // namespace exactrc
