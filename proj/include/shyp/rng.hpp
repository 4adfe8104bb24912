#pragma once

// Counter-based Philox4x32-10 with Box-Muller normals.  A stream is fully
// determined by its key, so any (seed, replicate, mode, channel) can be
// regenerated independently of scheduling.

#include <array>
#include <cmath>
#include <cstdint>
#include <numbers>

namespace shyp::rng {

using Counter = std::array<std::uint32_t, 4>;
using Key = std::array<std::uint32_t, 2>;

inline Counter philox4x32_10(Counter c, Key k) {
    constexpr std::uint32_t M0 = 0xD2511F53u, M1 = 0xCD9E8D57u;
    constexpr std::uint32_t W0 = 0x9E3779B9u, W1 = 0xBB67AE85u;
    for (int round = 0; round < 10; ++round) {
        const std::uint64_t p0 = std::uint64_t(M0) * c[0];
        const std::uint64_t p1 = std::uint64_t(M1) * c[2];
        c = {std::uint32_t(p1 >> 32) ^ c[1] ^ k[0], std::uint32_t(p1), std::uint32_t(p0 >> 32) ^ c[3] ^ k[1],
             std::uint32_t(p0)};
        k[0] += W0;
        k[1] += W1;
    }
    return c;
}

inline std::uint64_t splitmix64(std::uint64_t x) {
    x += 0x9E3779B97F4A7C15ull;
    x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ull;
    x = (x ^ (x >> 27)) * 0x94D049BB133111EBull;
    return x ^ (x >> 31);
}

enum class Channel : std::uint32_t { noise = 0, meta = 1, bootstrap = 2 };

inline std::uint64_t stream_key(std::uint64_t seed, std::uint64_t replicate, std::uint64_t k, Channel ch) {
    std::uint64_t h = splitmix64(seed);
    h = splitmix64(h ^ replicate);
    h = splitmix64(h ^ k);
    return splitmix64(h ^ static_cast<std::uint64_t>(ch));
}

// Sequential standard normals from one Philox stream.
class NormalStream {
public:
    explicit NormalStream(std::uint64_t key) : key_{std::uint32_t(key), std::uint32_t(key >> 32)} {}
    NormalStream(std::uint64_t seed, std::uint64_t replicate, std::uint64_t k, Channel ch)
        : NormalStream(stream_key(seed, replicate, k, ch)) {}

    double next() {
        if (have_ == 0) refill();
        return buf_[--have_];
    }

    // Uniform on (0, 1], 53 bits.
    double uniform() {
        const Counter r = block();
        return to_unit((std::uint64_t(r[0]) << 32) | r[1]);
    }

private:
    Counter block() {
        const Counter r = philox4x32_10({std::uint32_t(ctr_), std::uint32_t(ctr_ >> 32), 0u, 0u}, key_);
        ++ctr_;
        return r;
    }

    static double to_unit(std::uint64_t x) { return double((x >> 11) + 1) * 0x1.0p-53; }

    void refill() {
        const Counter r = block();
        const double u1 = to_unit((std::uint64_t(r[0]) << 32) | r[1]);
        const double u2 = to_unit((std::uint64_t(r[2]) << 32) | r[3]);
        const double rad = std::sqrt(-2.0 * std::log(u1));
        const double ang = 2.0 * std::numbers::pi * u2;
        buf_[1] = rad * std::cos(ang);
        buf_[0] = rad * std::sin(ang);
        have_ = 2;
    }

    Key key_;
    std::uint64_t ctr_ = 0;
    std::array<double, 2> buf_{};
    int have_ = 0;
};

}  // namespace shyp::rng
