#pragma once

#include "fellerdep/core.hpp"
#include "fellerdep/process.hpp"

#include <cstdint>
#include <vector>

namespace fellerdep
{
/// States of n_paths paths from a common start at the grid times.
struct PathEnsemble
{
    std::uint64_t seed = 0;
    std::size_t n_paths = 0;
    int dim = 0;
    Vec start;
    std::vector<double> grid;
    /// states[(k * grid.size() + j) * dim + i] is coordinate i of path k at grid[j]
    std::vector<double> states;

    std::size_t n_times() const { return grid.size(); }
    Eigen::Map<const Vec> state(std::size_t path, std::size_t time) const
    {
        return {states.data() + (path * grid.size() + time) * static_cast<std::size_t>(dim), dim};
    }
    /// n_paths x dim matrix of states at grid[time].
    Mat snapshot(std::size_t time) const;
    Mat terminal() const { return snapshot(grid.size() - 1); }
    /// n_paths x (n_times * dim), times outermost.
    Mat stacked() const;
};

/// Throws PreconditionError unless the grid is finite, positive and strictly increasing.
void validate_grid(const std::vector<double>& grid);

/**
 * Exact samples of the process started at x. Path k draws from the stream
 * (seed, k) only, so the output is bit-identical for every `jobs` value
 * (0 = all hardware threads).
 */
PathEnsemble simulate(const ProcessSpec& spec, const Vec& x, const std::vector<double>& grid, std::size_t n_paths,
                      std::uint64_t seed, unsigned jobs = 0);

/// Subordinator paths N_t (dimension 1, N_0 = 0), drawn as in `simulate`.
PathEnsemble simulate_subordinator(const SubordinatorSpec& sub, const std::vector<double>& grid,
                                   std::size_t n_paths, std::uint64_t seed, unsigned jobs = 0);

}  // namespace fellerdep
