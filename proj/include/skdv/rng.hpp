#pragma once

#include <array>
#include <cstdint>

namespace skdv {

// Philox4x32-10 counter-based generator (Salmon et al. 2011).
struct Philox4x32 {
    using Counter = std::array<std::uint32_t, 4>;
    using Key = std::array<std::uint32_t, 2>;
    static Counter block(Counter counter, Key key);
};

inline constexpr const char* kRngName = "philox4x32-10";

// Independent stream tags; the counter is (index lo, index hi, mode, stream) and the key is the seed.
enum class Stream : std::uint32_t {
    BrownianIncrement = 1,
    WhiteNoise = 2,
    RandomField = 3,
    SeedDerivation = 4,
    Auxiliary = 5,
};

std::array<std::uint32_t, 4> random_block(std::uint64_t seed, Stream stream, std::uint32_t mode, std::uint64_t index);

// Two independent standard normals (Box-Muller) from one counter block.
std::array<double, 2> gaussian_pair(std::uint64_t seed, Stream stream, std::uint32_t mode, std::uint64_t index);

// Uniform in [0, 1) from one counter block.
double uniform(std::uint64_t seed, Stream stream, std::uint32_t mode, std::uint64_t index);

// Child seed for a numbered job (ensemble member, experiment cell).
std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t job);

// Sequential view of one (seed, stream, mode) substream.
class CounterRng {
public:
    CounterRng(std::uint64_t seed, Stream stream, std::uint32_t mode = 0) : seed_(seed), stream_(stream), mode_(mode) {}

    double normal();
    double uniform();
    std::uint64_t position() const noexcept { return index_; }

private:
    std::uint64_t seed_;
    Stream stream_;
    std::uint32_t mode_;
    std::uint64_t index_ = 0;
    double spare_ = 0;
    bool has_spare_ = false;
};

}  // namespace skdv
