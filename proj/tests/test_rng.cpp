#include "skdv/rng.hpp"
#include "skdv/stats.hpp"

#include <doctest.h>

#include <set>
#include <vector>

using namespace skdv;

TEST_CASE("Philox4x32-10 known answers") {
    using C = Philox4x32::Counter;
    CHECK(Philox4x32::block({0, 0, 0, 0}, {0, 0}) == C{0x6627e8d5, 0xe169c58d, 0xbc57ac4c, 0x9b00dbd8});
    CHECK(Philox4x32::block({0xffffffff, 0xffffffff, 0xffffffff, 0xffffffff}, {0xffffffff, 0xffffffff}) ==
          C{0x408f276d, 0x41c83b0e, 0xa20bc7c6, 0x6d5451fd});
    CHECK(Philox4x32::block({0x243f6a88, 0x85a308d3, 0x13198a2e, 0x03707344}, {0xa4093822, 0x299f31d0}) ==
          C{0xd16cfe09, 0x94fdcceb, 0x5001e420, 0x24126ea1});
}

TEST_CASE("substreams are deterministic and distinct") {
    CHECK(gaussian_pair(7, Stream::WhiteNoise, 3, 11) == gaussian_pair(7, Stream::WhiteNoise, 3, 11));
    CHECK(gaussian_pair(7, Stream::WhiteNoise, 3, 11) != gaussian_pair(7, Stream::WhiteNoise, 4, 11));
    CHECK(gaussian_pair(7, Stream::WhiteNoise, 3, 11) != gaussian_pair(7, Stream::BrownianIncrement, 3, 11));
    CHECK(gaussian_pair(7, Stream::WhiteNoise, 3, 11) != gaussian_pair(8, Stream::WhiteNoise, 3, 11));
    std::set<std::uint64_t> seeds;
    for (int j = 0; j < 1000; ++j) seeds.insert(derive_seed(42, j));
    CHECK(seeds.size() == 1000);
}

TEST_CASE("normal moments") {
    CounterRng rng(123, Stream::Auxiliary);
    std::vector<double> xs(200000);
    for (auto& x : xs) x = rng.normal();
    const auto m = mean_estimate(xs);
    CHECK(std::abs(m.mean) < 3 * m.standard_error);
    double var = 0;
    for (double x : xs) var += x * x;
    var /= xs.size();
    CHECK(std::abs(var - 1) < 0.01);
    CHECK(std::abs(sample_skewness(xs)) < 0.02);
    CHECK(std::abs(sample_excess_kurtosis(xs)) < 0.05);

    std::vector<double> us(100000);
    for (auto& u : us) {
        u = rng.uniform();
        REQUIRE(u >= 0);
        REQUIRE(u < 1);
    }
    CHECK(std::abs(mean_estimate(us).mean - 0.5) < 0.005);
}
