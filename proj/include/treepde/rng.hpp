#pragma once

#include <array>
#include <cstdint>

namespace treepde {

/// Philox4x32-10 block function (Salmon et al., SC'11).
std::array<std::uint32_t, 4> philox4x32(std::array<std::uint32_t, 4> ctr,
                                        std::array<std::uint32_t, 2> key);

/// Stateless 64-bit finalizer used to derive stream ids.
std::uint64_t mix64(std::uint64_t x);
std::uint64_t mix64(std::uint64_t a, std::uint64_t b);

/// Inverse standard normal CDF (Wichura AS241, ~1e-16 relative).
double normal_quantile(double p);

/// Counter-based stream: draw i of stream (seed, task) is a pure function
/// of (seed, task, i), so any cursor can be replayed exactly.
class RngStream {
public:
    struct Cursor {
        std::uint64_t block = 0;
        unsigned lane = 2;
    };

    RngStream() = default;
    RngStream(std::uint64_t master_seed, std::uint64_t task_id)
        : seed_(master_seed), task_(task_id) {}

    std::uint64_t master_seed() const { return seed_; }
    std::uint64_t task_id() const { return task_; }
    Cursor cursor() const { return {block_, lane_}; }
    void seek(Cursor c);

    std::uint64_t next_u64();
    /// Uniform on the open interval (0, 1).
    double uniform() { return (static_cast<double>(next_u64() >> 11) + 0.5) * 0x1.0p-53; }
    double normal() { return normal_quantile(uniform()); }
    double exponential();
    /// Child stream for sub-task i; independent of this stream's cursor.
    RngStream substream(std::uint64_t i) const { return {seed_, mix64(task_, i)}; }

private:
    void refill();

    std::uint64_t seed_ = 0, task_ = 0;
    std::uint64_t block_ = 0;  // blocks consumed so far
    unsigned lane_ = 2;        // next lane in buf_; 2 means empty
    std::array<std::uint64_t, 2> buf_{};
};

}  // namespace treepde
