#pragma once

#include <cmath>
#include <cstddef>
#include <span>
#include <vector>

namespace fellerdep
{
/// Neumaier-compensated running sum.
class CompensatedSum
{
  public:
    void add(double v)
    {
        const double s = sum_ + v;
        comp_ += std::fabs(sum_) >= std::fabs(v) ? (sum_ - s) + v : (v - s) + sum_;
        sum_ = s;
    }
    double value() const { return sum_ + comp_; }

  private:
    double sum_ = 0.0;
    double comp_ = 0.0;
};

inline double compensated_mean(std::span<const double> v)
{
    CompensatedSum s;
    for (double x : v)
        s.add(x);
    return v.empty() ? 0.0 : s.value() / static_cast<double>(v.size());
}

struct MeanSe
{
    double mean = 0.0;
    double std_error = 0.0;
};

/// Sample mean and sd/sqrt(n) (sd with n-1). Constant input gives exactly (c, 0).
inline MeanSe mean_and_se(std::span<const double> v)
{
    MeanSe out;
    if (v.empty())
        return out;
    bool constant = true;
    for (double x : v)
        if (x != v.front())
        {
            constant = false;
            break;
        }
    if (constant)
        return {v.front(), 0.0};
    out.mean = compensated_mean(v);
    if (v.size() < 2)
        return out;
    CompensatedSum ss;
    for (double x : v)
        ss.add((x - out.mean) * (x - out.mean));
    const double n = static_cast<double>(v.size());
    out.std_error = std::sqrt(ss.value() / (n - 1.0) / n);
    return out;
}

/// One-sided rule shared by all statistical checks.
constexpr double sigma_rule = 3.0;

}  // namespace fellerdep
