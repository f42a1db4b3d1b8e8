#include "skdv/rng.hpp"

#include <cmath>

namespace skdv {

namespace {

constexpr std::uint32_t kMul0 = 0xD2511F53;
constexpr std::uint32_t kMul1 = 0xCD9E8D57;
constexpr std::uint32_t kWeyl0 = 0x9E3779B9;
constexpr std::uint32_t kWeyl1 = 0xBB67AE85;

void mulhilo(std::uint32_t a, std::uint32_t b, std::uint32_t& hi, std::uint32_t& lo) {
    const std::uint64_t p = static_cast<std::uint64_t>(a) * b;
    hi = static_cast<std::uint32_t>(p >> 32);
    lo = static_cast<std::uint32_t>(p);
}

double unit53(std::uint32_t hi, std::uint32_t lo) {
    const std::uint64_t x = (static_cast<std::uint64_t>(hi) << 32) | lo;
    return static_cast<double>(x >> 11) * 0x1.0p-53;
}

}  // namespace

Philox4x32::Counter Philox4x32::block(Counter c, Key k) {
    for (int round = 0; round < 10; ++round) {
        std::uint32_t hi0, lo0, hi1, lo1;
        mulhilo(kMul0, c[0], hi0, lo0);
        mulhilo(kMul1, c[2], hi1, lo1);
        c = {hi1 ^ c[1] ^ k[0], lo1, hi0 ^ c[3] ^ k[1], lo0};
        k[0] += kWeyl0;
        k[1] += kWeyl1;
    }
    return c;
}

std::array<std::uint32_t, 4> random_block(std::uint64_t seed, Stream stream, std::uint32_t mode, std::uint64_t index) {
    const Philox4x32::Counter counter = {static_cast<std::uint32_t>(index), static_cast<std::uint32_t>(index >> 32), mode,
                                         static_cast<std::uint32_t>(stream)};
    const Philox4x32::Key key = {static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32)};
    return Philox4x32::block(counter, key);
}

std::array<double, 2> gaussian_pair(std::uint64_t seed, Stream stream, std::uint32_t mode, std::uint64_t index) {
    const auto w = random_block(seed, stream, mode, index);
    const double u1 = 1.0 - unit53(w[0], w[1]);  // (0, 1]
    const double u2 = unit53(w[2], w[3]);
    const double r = std::sqrt(-2.0 * std::log(u1));
    const double angle = 6.283185307179586476925 * u2;
    return {r * std::cos(angle), r * std::sin(angle)};
}

double uniform(std::uint64_t seed, Stream stream, std::uint32_t mode, std::uint64_t index) {
    const auto w = random_block(seed, stream, mode, index);
    return unit53(w[0], w[1]);
}

std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t job) {
    const auto w = random_block(seed, Stream::SeedDerivation, 0, job);
    return (static_cast<std::uint64_t>(w[0]) << 32) | w[1];
}

double CounterRng::normal() {
    if (has_spare_) {
        has_spare_ = false;
        return spare_;
    }
    const auto pair = gaussian_pair(seed_, stream_, mode_, index_++);
    spare_ = pair[1];
    has_spare_ = true;
    return pair[0];
}

double CounterRng::uniform() { return skdv::uniform(seed_, stream_, mode_, index_++); }

}  // namespace skdv
