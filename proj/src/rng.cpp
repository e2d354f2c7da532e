#include "fellerdep/rng.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

namespace fellerdep
{
namespace
{
constexpr std::uint32_t philox_m0 = 0xD2511F53u;
constexpr std::uint32_t philox_m1 = 0xCD9E8D57u;
constexpr std::uint32_t philox_w0 = 0x9E3779B9u;
constexpr std::uint32_t philox_w1 = 0xBB67AE85u;

__extension__ using u128 = unsigned __int128;

inline void mulhilo(std::uint32_t a, std::uint32_t b, std::uint32_t& hi, std::uint32_t& lo)
{
    const std::uint64_t p = static_cast<std::uint64_t>(a) * b;
    hi = static_cast<std::uint32_t>(p >> 32);
    lo = static_cast<std::uint32_t>(p);
}
}  // namespace

std::array<std::uint32_t, 4> philox4x32(std::array<std::uint32_t, 4> c,
                                        std::array<std::uint32_t, 2> k)
{
    for (int round = 0; round < 10; ++round)
    {
        if (round > 0)
        {
            k[0] += philox_w0;
            k[1] += philox_w1;
        }
        std::uint32_t hi0, lo0, hi1, lo1;
        mulhilo(philox_m0, c[0], hi0, lo0);
        mulhilo(philox_m1, c[2], hi1, lo1);
        c = {hi1 ^ c[1] ^ k[0], lo1, hi0 ^ c[3] ^ k[1], lo0};
    }
    return c;
}

std::uint64_t mix64(std::uint64_t x)
{
    x += 0x9E3779B97F4A7C15ull;
    x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ull;
    x = (x ^ (x >> 27)) * 0x94D049BB133111EBull;
    return x ^ (x >> 31);
}

Stream::Stream(std::uint64_t seed, std::uint64_t stream_id, StreamDomain domain)
    : key_{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32)},
      counter_{static_cast<std::uint32_t>(stream_id), static_cast<std::uint32_t>(stream_id >> 32), 0u,
               static_cast<std::uint32_t>(domain)}
{
}

void Stream::refill()
{
    block_ = philox4x32(counter_, key_);
    ++counter_[2];
    used_ = 0;
}

Stream::result_type Stream::operator()()
{
    if (used_ > 2)
        refill();
    const std::uint64_t lo = block_[used_];
    const std::uint64_t hi = block_[used_ + 1];
    used_ += 2;
    return (hi << 32) | lo;
}

double Stream::uniform()
{
    return static_cast<double>((*this)() >> 11) * 0x1.0p-53;
}

double Stream::uniform_open()
{
    return (static_cast<double>((*this)() >> 11) + 0.5) * 0x1.0p-53;
}

double Stream::exponential()
{
    return -std::log(uniform_open());
}

std::uint64_t Stream::index(std::uint64_t n)
{
    // Lemire's nearly-divisionless bounded integer
    u128 m = static_cast<u128>((*this)()) * n;
    auto low = static_cast<std::uint64_t>(m);
    if (low < n)
    {
        const std::uint64_t threshold = (0 - n) % n;
        while (low < threshold)
        {
            m = static_cast<u128>((*this)()) * n;
            low = static_cast<std::uint64_t>(m);
        }
    }
    return static_cast<std::uint64_t>(m >> 64);
}

std::uint64_t Stream::poisson(double mean)
{
    if (!(mean > 0.0))
        return 0;
    if (mean < 10.0)
    {
        // inversion by sequential search
        const double u = uniform();
        double p = std::exp(-mean);
        double cdf = p;
        std::uint64_t k = 0;
        while (u >= cdf && k < 1000)
        {
            ++k;
            p *= mean / static_cast<double>(k);
            cdf += p;
        }
        return k;
    }
    if (mean > 1e15)
    {
        // Relative spread below 3e-8; a rounded normal is indistinguishable here.
        const double u1 = uniform_open();
        const double u2 = uniform();
        const double z = std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * std::numbers::pi * u2);
        return static_cast<std::uint64_t>(std::max(0.0, std::floor(mean + std::sqrt(mean) * z + 0.5)));
    }

    // PTRS transformed rejection (Hormann 1993)
    const double smu = std::sqrt(mean);
    const double b = 0.931 + 2.53 * smu;
    const double a = -0.059 + 0.02483 * b;
    const double inv_alpha = 1.1239 + 1.1328 / (b - 3.4);
    const double vr = 0.9277 - 3.6224 / (b - 2.0);
    const double log_mean = std::log(mean);
    for (;;)
    {
        const double u = uniform() - 0.5;
        const double v = uniform_open();
        const double us = 0.5 - std::fabs(u);
        const double k = std::floor((2.0 * a / us + b) * u + mean + 0.43);
        if (us >= 0.07 && v <= vr)
            return static_cast<std::uint64_t>(k);
        if (k < 0.0 || (us < 0.013 && v > us))
            continue;
        int sign = 0;
        const double log_fact = ::lgamma_r(k + 1.0, &sign);
        if (std::log(v) + std::log(inv_alpha) - std::log(a / (us * us) + b)
            <= -mean + k * log_mean - log_fact)
            return static_cast<std::uint64_t>(k);
    }
}

double Stream::positive_stable(double alpha)
{
    // Kanter's representation
    const double u = std::numbers::pi * uniform_open();
    const double e = exponential();
    const double lead = std::sin(alpha * u) / std::pow(std::sin(u), 1.0 / alpha);
    const double tail = std::pow(std::sin((1.0 - alpha) * u) / e, (1.0 - alpha) / alpha);
    return lead * tail;
}

}  // namespace fellerdep
