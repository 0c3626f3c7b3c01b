#pragma once

#include <array>
#include <cstdint>
#include <string_view>

namespace corrsurf {

// Philox4x32-10 counter-based generator. A stream is a pure function of
// (seed, stream id), so path i draws the same numbers no matter how paths
// are split across threads.
class PathRng {
public:
    PathRng(std::uint64_t seed, std::uint64_t stream) noexcept;

    std::uint32_t next_u32() noexcept;
    std::uint64_t next_u64() noexcept;
    // Uniform on the open interval (0, 1).
    double uniform() noexcept;
    double normal() noexcept;
    // Marsaglia-Tsang; shape > 0, unit scale.
    double gamma(double shape) noexcept;
    double chi_square(double nu) noexcept;

private:
    void refill() noexcept;

    std::array<std::uint32_t, 2> key_;
    std::array<std::uint32_t, 4> ctr_;
    std::array<std::uint32_t, 4> buf_{};
    int pos_ = 4;
    double spare_ = 0.0;
    bool has_spare_ = false;
};

std::uint64_t splitmix64(std::uint64_t x) noexcept;

// Stable child seed for a named sub-task.
std::uint64_t derive_seed(std::uint64_t seed, std::string_view label) noexcept;
std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t index) noexcept;

} // namespace corrsurf
