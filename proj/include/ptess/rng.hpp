#pragma once
// Counter-based random numbers (Philox4x32-10) with explicit seed and substream.

#include <array>
#include <cstdint>
#include <limits>

namespace ptess {

class Philox4x32 {
public:
    using ctr_type = std::array<std::uint32_t, 4>;
    using key_type = std::array<std::uint32_t, 2>;

    static ctr_type block(ctr_type ctr, key_type key) {
        constexpr std::uint32_t M0 = 0xD2511F53u, M1 = 0xCD9E8D57u;
        constexpr std::uint32_t W0 = 0x9E3779B9u, W1 = 0xBB67AE85u;
        for (int round = 0; round < 10; ++round) {
            const std::uint64_t p0 = std::uint64_t(M0) * ctr[0];
            const std::uint64_t p1 = std::uint64_t(M1) * ctr[2];
            ctr = {std::uint32_t(p1 >> 32) ^ ctr[1] ^ key[0], std::uint32_t(p1),
                   std::uint32_t(p0 >> 32) ^ ctr[3] ^ key[1], std::uint32_t(p0)};
            key[0] += W0;
            key[1] += W1;
        }
        return ctr;
    }
};

// 64-bit mixer used to derive substream ids from structured keys.
inline std::uint64_t mix64(std::uint64_t x) {
    x += 0x9E3779B97F4A7C15ull;
    x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ull;
    x = (x ^ (x >> 27)) * 0x94D049BB133111EBull;
    return x ^ (x >> 31);
}

inline std::uint64_t combine_stream(std::uint64_t a, std::uint64_t b) {
    return mix64(a ^ mix64(b + 0x632BE59BD9B4E019ull));
}

// UniformRandomBitGenerator over the stream (seed, substream); draws are a pure
// function of (seed, substream, draw index).
class Rng {
public:
    using result_type = std::uint64_t;

    Rng(std::uint64_t seed, std::uint64_t substream = 0)
        : key_{std::uint32_t(seed), std::uint32_t(seed >> 32)},
          stream_(substream) {}

    static constexpr result_type min() { return 0; }
    static constexpr result_type max() { return std::numeric_limits<result_type>::max(); }

    result_type operator()() {
        if (pos_ == 2) refill();
        const result_type r = (std::uint64_t(buf_[2 * pos_]) << 32) | buf_[2 * pos_ + 1];
        ++pos_;
        return r;
    }

    // Uniform on the open interval (0,1).
    double uniform() { return (double((*this)() >> 11) + 0.5) * 0x1.0p-53; }

    std::uint64_t substream() const { return stream_; }

private:
    void refill() {
        Philox4x32::ctr_type c{std::uint32_t(counter_), std::uint32_t(counter_ >> 32),
                               std::uint32_t(stream_), std::uint32_t(stream_ >> 32)};
        buf_ = Philox4x32::block(c, key_);
        ++counter_;
        pos_ = 0;
    }

    Philox4x32::key_type key_;
    std::uint64_t stream_;
    std::uint64_t counter_ = 0;
    Philox4x32::ctr_type buf_{};
    int pos_ = 2;
};

}  // namespace ptess
