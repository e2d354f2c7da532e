#pragma once

#include <array>
#include <cstdint>
#include <limits>

namespace fellerdep
{
/// Philox4x32-10 block function (Salmon et al., SC'11).
std::array<std::uint32_t, 4> philox4x32(std::array<std::uint32_t, 4> counter,
                                        std::array<std::uint32_t, 2> key);

/// splitmix64 finalizer; used to turn tags into well-mixed 64-bit words.
std::uint64_t mix64(std::uint64_t x);

/// Independent purposes draw from disjoint counter spaces.
enum class StreamDomain : std::uint32_t
{
    paths = 0,
    bank = 1,
    permutation = 2,
    measure = 3,
    test = 4,
};

/**
 * Counter-based random stream.
 *
 * The key is the master seed; the 128-bit counter is
 * (stream_id, block index, domain). Stream k therefore depends only on
 * (seed, k, domain), never on how many other streams exist or which worker
 * evaluates it.
 */
class Stream
{
  public:
    using result_type = std::uint64_t;

    Stream(std::uint64_t seed, std::uint64_t stream_id,
           StreamDomain domain = StreamDomain::paths);

    static constexpr result_type min() { return 0; }
    static constexpr result_type max() { return std::numeric_limits<result_type>::max(); }

    result_type operator()();

    // [0,1) with 53 random bits
    double uniform();
    // (0,1), safe for logarithms
    double uniform_open();
    double exponential();
    // Unbiased integer in [0, n)
    std::uint64_t index(std::uint64_t n);
    std::uint64_t poisson(double mean);
    /// Positive alpha-stable variate S with E exp(-u S) = exp(-u^alpha).
    double positive_stable(double alpha);

  private:
    void refill();

    std::array<std::uint32_t, 2> key_;
    std::array<std::uint32_t, 4> counter_;
    std::array<std::uint32_t, 4> block_{};
    int used_ = 4;
};

}  // namespace fellerdep
