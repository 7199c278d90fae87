#include "corpus.hpp"

#include "exactrc/channel.hpp"

#include <doctest.h>

#include <algorithm>
#include <cmath>

using namespace exactrc;

TEST_CASE("load_channel accepts a BSC document and round-trips it")
{
    const auto ch = load_channel(R"({"input":[0.5,0.5],"matrix":[[0.9,0.1],[0.1,0.9]]})");
    CHECK(ch.num_inputs() == 2);
    CHECK(ch.num_outputs() == 2);
    CHECK(ch.w(0, 1) == doctest::Approx(0.1).epsilon(1e-15));
    const auto again = load_channel(to_json(ch));
    CHECK(again.matrix() == ch.matrix());
    CHECK(again.input().probs() == ch.input().probs());
}

TEST_CASE("single-input channel is accepted")
{
    const auto ch = load_channel(R"({"input":[1.0],"matrix":[[0.3,0.7]]})");
    CHECK(ch.num_inputs() == 1);
    CHECK(ch.atoms().size() == 2);
    CHECK(mutual_information(ch) == 0.0);
}

TEST_CASE("validation errors")
{
    CHECK_THROWS_WITH_AS(load_channel(R"({"input":[0.5,0.5],"matrix":[[0.9,0.2],[0.1,0.9]]})"),
                         doctest::Contains("row 0 sums to 1.1"), ChannelError);
    CHECK_THROWS_AS(load_channel(R"({"input":[0.5,0.5],"matrix":[[1.1,-0.1],[0.1,0.9]]})"), ChannelError);
    CHECK_THROWS_AS(load_channel(R"({"input":[0.5,0.5],"matrix":[[0.9,0.1],[0.1]]})"), ChannelError);
    CHECK_THROWS_AS(load_channel(R"({"input":[],"matrix":[]})"), ChannelError);
    CHECK_THROWS_AS(load_channel(R"({"input":[0.5,0.5],"matrix":[[],[]]})"), ChannelError);
    CHECK_THROWS_AS(load_channel(R"({"input":[0.5,0.5],"matrix":)"), ChannelError);
    CHECK_THROWS_AS(load_channel(R"({"input":[0.5,0.4],"matrix":[[1,0],[0,1]]})"), ChannelError);
    CHECK_THROWS_AS(load_channel(R"({"matrix":[[1,0],[0,1]]})"), ChannelError);
    CHECK_THROWS_AS(load_channel(R"({"input":"x","matrix":[[1,0],[0,1]]})"), ChannelError);
}

TEST_CASE("zero-probability inputs and unreachable outputs are pruned")
{
    const DiscreteChannel ch({{0.5, 0.5, 0.0}, {0.0, 0.0, 1.0}, {0.2, 0.8, 0.0}}, {0.6, 0.0, 0.4});
    CHECK(ch.num_inputs() == 2);
    CHECK(ch.num_outputs() == 2);
    CHECK(ch.pruned_inputs() == 1);
    CHECK(ch.pruned_outputs() == 1);
    CHECK(ch.kept_inputs() == std::vector<std::size_t>{0, 2});
    CHECK(ch.input()[0] == doctest::Approx(0.6));
}

TEST_CASE("input probabilities within load tolerance are renormalized")
{
    const DiscreteChannel ch({{1.0, 0.0}, {0.0, 1.0}}, {0.5 + 4e-10, 0.5});
    CHECK(std::abs(ch.input()[0] + ch.input()[1] - 1.0) < 1e-15);
}

TEST_CASE("nu table values")
{
    const auto nt = NuTable(corpus::bsc(0.1));
    CHECK(nt(0, 0, 1).as_double() == doctest::Approx(std::log(1.0 / 9.0)).epsilon(1e-14));
    CHECK(nt(0, 0, 1).as_double() == doctest::Approx(-2.1972246).epsilon(1e-7));
    for (std::size_t a = 0; a < nt.num_atoms(); ++a)
        CHECK(nt.at(a, nt.atom(a).x).as_double() == 0.0);

    const auto bec = NuTable(corpus::bec(0.4));
    CHECK(bec(0, 0, 1).is_neg_infinity());
    CHECK(bec(0, 2, 1).as_double() == 0.0);
    CHECK_THROWS_AS((void)bec(0, 1, 0), std::out_of_range);
}

TEST_CASE("exp(nu) W(y|x) reproduces W(y|x') on the corpus")
{
    for (const auto& ch : corpus::full_corpus()) {
        const NuTable nt(ch);
        for (std::size_t a = 0; a < nt.num_atoms(); ++a) {
            const auto& at = nt.atom(a);
            for (std::size_t xp = 0; xp < ch.num_inputs(); ++xp) {
                const double lhs = nt.at(a, xp).exp() * ch.w(at.x, at.y);
                CHECK(std::abs(lhs - ch.w(xp, at.y)) <= 1e-12);
                CHECK(nt.at(a, xp).is_neg_infinity() == (ch.w(xp, at.y) == 0.0));
            }
        }
    }
}

TEST_CASE("mutual information: closed forms")
{
    CHECK(mutual_information(corpus::bsc(0.0)) == doctest::Approx(std::log(2.0)).epsilon(1e-15));
    CHECK(mutual_information(corpus::bsc(0.5)) == doctest::Approx(0.0));
    const double p = 0.11;
    const double hb = -(p * std::log(p) + (1 - p) * std::log(1 - p));
    CHECK(std::abs(mutual_information(corpus::bsc(p)) - (std::log(2.0) - hb)) < 1e-14);
    CHECK(std::abs(mutual_information(corpus::bec(0.4)) - 0.6 * std::log(2.0)) < 1e-14);
}

TEST_CASE("mutual information is label invariant and bounded")
{
    for (const auto& ch : corpus::full_corpus()) {
        const double mi = mutual_information(ch);
        CHECK(mi >= 0.0);
        CHECK(mi <= std::log(static_cast<double>(std::min(ch.num_inputs(), ch.num_outputs()))) + 1e-12);

        auto m = ch.matrix();
        auto px = ch.input().probs();
        std::reverse(m.begin(), m.end());
        std::reverse(px.begin(), px.end());
        for (auto& row : m)
            std::rotate(row.begin(), row.begin() + 1, row.end());
        CHECK(std::abs(mutual_information(DiscreteChannel(m, px)) - mi) < 1e-13);
    }
}
