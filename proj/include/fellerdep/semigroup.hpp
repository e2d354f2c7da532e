#pragma once

#include "fellerdep/process.hpp"
#include "fellerdep/simulate.hpp"
#include "fellerdep/test_function.hpp"

#include <optional>
#include <string>
#include <vector>

namespace fellerdep
{
/// Monte Carlo value of T_t f(x) = E^x f(X_t).
struct SemigroupEstimate
{
    double value = 0.0;
    double std_error = 0.0;
    std::size_t n_paths = 0;
    double t = 0.0;
    Vec x;
    std::string f_id;
};

struct StatEstimate
{
    double value = 0.0;
    double std_error = 0.0;
};

/// Mean of f over the rows of `states` (n x d).
StatEstimate sample_mean(const TestFunction& f, const Mat& states);

/// t = 0 returns f(x) with zero error without simulating.
SemigroupEstimate semigroup_apply(const ProcessSpec& spec, const TestFunction& f, const Vec& x, double t,
                                  std::size_t n_paths, std::uint64_t seed, unsigned jobs = 0);

/// Sample Cov(f(X_t), g(X_t)) = T_t(fg) - T_t f T_t g from one ensemble.
StatEstimate association_gap(const ProcessSpec& spec, const TestFunction& f, const TestFunction& g, const Vec& x,
                             double t, std::size_t n_paths, std::uint64_t seed, unsigned jobs = 0);
/// Same estimator on given terminal states.
StatEstimate covariance_estimate(const TestFunction& f, const TestFunction& g, const Mat& states);

struct GeneratorLimitRow
{
    double t = 0.0;
    StatEstimate difference_quotient;  // (T_t f(x) - f(x)) / t
    double generator = 0.0;            // I(p) f(x)
    double discrepancy = 0.0;          // |difference quotient - generator|
};

struct GeneratorLimitTable
{
    std::vector<GeneratorLimitRow> rows;  // in the order of t_list
    /// Least-squares slope of log discrepancy against log t (NaN with fewer than two positive rows).
    double log_log_slope = 0.0;
};

/// All times share one ensemble (common random numbers). Constant f gives
/// exactly zero discrepancies.
GeneratorLimitTable generator_limit_check(const ProcessSpec& spec, const TestFunction& f, const Vec& x,
                                          const std::vector<double>& t_list, std::size_t n_paths,
                                          std::uint64_t seed, unsigned jobs = 0);

struct DerivativeCommute
{
    /// Richardson combination of central differences with steps h and h/2.
    StatEstimate time_derivative;
    /// Monte Carlo T_t[I(p) f](x).
    StatEstimate generator_side;
    /// sqrt of the summed squared standard errors.
    double pooled_se = 0.0;
};

/// Requires 0 < h < t.
DerivativeCommute derivative_commute_check(const ProcessSpec& spec, const TestFunction& f, const Vec& x, double t,
                                           double h, std::size_t n_paths, std::uint64_t seed, unsigned jobs = 0);

struct MonotonicityStep
{
    Vec lower_start;
    Vec upper_start;
    StatEstimate lower;
    StatEstimate upper;
    double pooled_se = 0.0;
    bool passed = true;  // upper >= lower - 3 pooled s.e.
};

/// Checks x -> T_t f(x) along a componentwise increasing chain of starts,
/// all estimated with the same seed.
std::vector<MonotonicityStep> monotonicity_transfer_check(const ProcessSpec& spec, const TestFunction& f,
                                                          const std::vector<Vec>& chain, double t,
                                                          std::size_t n_paths, std::uint64_t seed,
                                                          unsigned jobs = 0);

/// Row of the per-check CSV `check,spec_id,x,t,estimate,std_error,oracle,verdict`.
struct CheckRow
{
    std::string check;
    std::string spec_id;
    Vec x;
    double t = 0.0;
    double estimate = 0.0;
    double std_error = 0.0;
    std::optional<double> oracle;
    std::string verdict;
};

}  // namespace fellerdep
