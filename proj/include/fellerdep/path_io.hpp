#pragma once

#include "fellerdep/simulate.hpp"

#include <iosfwd>
#include <string>

namespace fellerdep
{
/// Header `path_id,t,x1,...,xd`, one row per (path, time); values in shortest
/// round-trip form.
void write_paths_csv(const PathEnsemble& e, std::ostream& out);
void write_paths_csv(const PathEnsemble& e, const std::string& file);

/**
 * Columnar binary: the 16-byte magic `FELLERDEP-PATHS1`, then little-endian
 * u64 seed, n_paths, n_times, dim, followed by f64 grid[n_times],
 * start[dim] and the states array.
 */
void write_paths_binary(const PathEnsemble& e, std::ostream& out);
void write_paths_binary(const PathEnsemble& e, const std::string& file);
PathEnsemble read_paths_binary(std::istream& in);
PathEnsemble read_paths_binary(const std::string& file);

}  // namespace fellerdep
