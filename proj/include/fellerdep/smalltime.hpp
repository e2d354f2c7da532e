#pragma once

#include "fellerdep/dependence.hpp"
#include "fellerdep/levy_measure.hpp"
#include "fellerdep/process.hpp"

#include <optional>
#include <string>
#include <vector>

namespace fellerdep
{
/// Open rectangle whose closure avoids the origin.
struct RegionSpec
{
    std::string id;
    Rectangle rect;
};

/// Throws PreconditionError if the closure of the region contains the origin
/// or an atom of nu sits on its boundary.
void validate_region(const RegionSpec& region, const std::optional<LevyMeasure>& nu);

/// nu(x, .) of the process when available: the effective triplet for
/// Levy, OU and pseudo-Poisson specs, the closed-form push-forward for
/// subordinated drift motions.
std::optional<LevyMeasure> reference_measure(const ProcessSpec& spec, const Vec& x);

struct SmalltimeRow
{
    double t = 0.0;
    double rate = 0.0;  // (1/t) P(X_t - x in A)
    double se = 0.0;
    std::size_t n_paths = 0;
};

struct SmalltimeTable
{
    std::string region_id;
    std::vector<SmalltimeRow> rows;
    /// nu(x, A), NaN when no closed form is available.
    double nu_value = 0.0;
    double nu_error = 0.0;
    /// Weighted least-squares fit rate = intercept + slope t.
    double intercept = 0.0;
    double intercept_se = 0.0;
    double slope = 0.0;
};

struct SmalltimeOptions
{
    std::vector<double> t_list{0.2, 0.1, 0.05, 0.02, 0.01};
    /// n_paths at time t is ceil(paths_scale / t).
    double paths_scale = 1e4;
    unsigned jobs = 0;
};

/// Seed used for the ensemble at position `index` of a t-list.
std::uint64_t cell_seed(std::uint64_t seed, std::uint64_t index);

SmalltimeTable smalltime_rate(const ProcessSpec& spec, const Vec& x, const RegionSpec& region,
                              const SmalltimeOptions& opt, std::uint64_t seed);

/// Rates for several regions from the same ensembles (one per t).
std::vector<SmalltimeTable> smalltime_rates(const ProcessSpec& spec, const Vec& x,
                                            const std::vector<RegionSpec>& regions, const SmalltimeOptions& opt,
                                            std::uint64_t seed);

struct NecessityRow
{
    double t = 0.0;
    std::size_t n_paths = 0;
    /// (1/t) P(X_t - x in A)
    double joint_rate = 0.0;
    double joint_se = 0.0;
    /// (1/t) P(X_p - x_p > a) P(X_q - x_q <= -a)
    double product_rate = 0.0;
    double product_se = 0.0;
};

struct NecessityReport
{
    Vec atom;  // off-orthant atom used to place the rectangle
    double a = 0.0;
    int p = 0;  // coordinate with a positive jump component
    int q = 0;  // coordinate with a negative jump component
    RegionSpec region;
    double nu_region = 0.0;
    std::vector<NecessityRow> rows;
    double puod_t = 0.0;
    Vec puod_threshold;
    DependenceReport puod;
};

struct NecessityOptions
{
    SmalltimeOptions smalltime;
    std::size_t puod_paths = 1'000'000;
};

/**
 * Places A around the heaviest off-orthant atom y: coordinates with y_i > 0
 * get (a, inf), y_i < 0 get (-inf, -a), y_i = 0 are unrestricted, with a half
 * the smallest nonzero |y_i| (shrunk if an atom would sit on the boundary).
 * Then records both small-time curves and a PUOD test at the smallest t.
 */
NecessityReport puod_necessity_experiment(const ProcessSpec& spec, const Vec& x, const NecessityOptions& opt,
                                          std::uint64_t seed);

}  // namespace fellerdep
