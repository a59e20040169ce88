#pragma once

// Counter-based random numbers and deterministic parallel loops.

#include <array>
#include <cstddef>
#include <cstdint>
#include <functional>

namespace evp {

/// Philox4x32-10. The key is the seed; the counter is (stream, block), so any
/// stream can be entered at any position without generating the prefix.
class Philox {
public:
    Philox(std::uint64_t seed, std::uint64_t stream, std::uint64_t position = 0);

    std::uint32_t next_u32();
    /// Uniform in [0, 1) with 53 random bits.
    double uniform();
    /// Uniform in (0, 1).
    double uniform_open();
    double normal();
    /// Skips `blocks` blocks of four 32-bit outputs.
    void jump(std::uint64_t blocks);

    std::uint64_t seed() const { return seed_; }
    std::uint64_t stream() const { return stream_; }

    static std::array<std::uint32_t, 4> block(std::array<std::uint32_t, 4> counter, std::array<std::uint32_t, 2> key);

private:
    void refill();

    std::uint64_t seed_;
    std::uint64_t stream_;
    std::uint64_t block_index_;
    std::array<std::uint32_t, 4> buffer_{};
    int used_ = 4;
};

/// Worker count: EVP_LAB_THREADS when set, else hardware concurrency.
unsigned default_threads();

/// Runs fn(i) for i in [0, count) on up to `threads` workers. Results must be
/// written to per-index storage so the outcome does not depend on scheduling.
/// The first exception is rethrown.
void parallel_for(std::size_t count, const std::function<void(std::size_t)>& fn, unsigned threads = 0);

}  // namespace evp
