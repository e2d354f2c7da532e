#include "fellerdep/path_io.hpp"

#include <fmt/format.h>

#include <bit>
#include <cstring>
#include <fstream>
#include <iterator>
#include <ostream>

namespace fellerdep
{
namespace
{
constexpr char magic[16] = {'F', 'E', 'L', 'L', 'E', 'R', 'D', 'E', 'P', '-', 'P', 'A', 'T', 'H', 'S', '1'};

static_assert(std::endian::native == std::endian::little, "binary path format assumes a little-endian host");

void put_u64(std::ostream& out, std::uint64_t v)
{
    out.write(reinterpret_cast<const char*>(&v), sizeof v);
}

void put_doubles(std::ostream& out, const double* p, std::size_t n)
{
    out.write(reinterpret_cast<const char*>(p), static_cast<std::streamsize>(n * sizeof(double)));
}

std::uint64_t get_u64(std::istream& in)
{
    std::uint64_t v = 0;
    if (!in.read(reinterpret_cast<char*>(&v), sizeof v))
        throw Error("path file truncated");
    return v;
}

void get_doubles(std::istream& in, double* p, std::size_t n)
{
    if (!in.read(reinterpret_cast<char*>(p), static_cast<std::streamsize>(n * sizeof(double))))
        throw Error("path file truncated");
}

template<class Fn>
void with_output(const std::string& file, std::ios::openmode mode, Fn&& fn)
{
    std::ofstream out(file, mode);
    if (!out)
        throw Error(fmt::format("cannot open '{}' for writing", file));
    fn(out);
    if (!out)
        throw Error(fmt::format("write to '{}' failed", file));
}
}  // namespace

void write_paths_csv(const PathEnsemble& e, std::ostream& out)
{
    std::string line = "path_id,t";
    for (int i = 1; i <= e.dim; ++i)
        line += fmt::format(",x{}", i);
    line += '\n';
    out << line;
    for (std::size_t k = 0; k < e.n_paths; ++k)
        for (std::size_t j = 0; j < e.n_times(); ++j)
        {
            line.clear();
            fmt::format_to(std::back_inserter(line), "{},{}", k, e.grid[j]);
            const auto s = e.state(k, j);
            for (int i = 0; i < e.dim; ++i)
                fmt::format_to(std::back_inserter(line), ",{}", s[i]);
            line += '\n';
            out << line;
        }
}

void write_paths_csv(const PathEnsemble& e, const std::string& file)
{
    with_output(file, std::ios::out, [&](std::ostream& out) { write_paths_csv(e, out); });
}

void write_paths_binary(const PathEnsemble& e, std::ostream& out)
{
    out.write(magic, sizeof magic);
    put_u64(out, e.seed);
    put_u64(out, e.n_paths);
    put_u64(out, e.n_times());
    put_u64(out, static_cast<std::uint64_t>(e.dim));
    put_doubles(out, e.grid.data(), e.grid.size());
    put_doubles(out, e.start.data(), static_cast<std::size_t>(e.start.size()));
    put_doubles(out, e.states.data(), e.states.size());
}

void write_paths_binary(const PathEnsemble& e, const std::string& file)
{
    with_output(file, std::ios::out | std::ios::binary, [&](std::ostream& out) { write_paths_binary(e, out); });
}

PathEnsemble read_paths_binary(std::istream& in)
{
    char head[16];
    if (!in.read(head, sizeof head) || std::memcmp(head, magic, sizeof magic) != 0)
        throw Error("not a FELLERDEP-PATHS1 file");
    PathEnsemble e;
    e.seed = get_u64(in);
    e.n_paths = get_u64(in);
    const auto m = get_u64(in);
    const auto d = get_u64(in);
    if (d == 0 || d > 1024 || m > (1ull << 32) || e.n_paths > (1ull << 40))
        throw Error("path file header is implausible");
    e.dim = static_cast<int>(d);
    e.grid.resize(m);
    get_doubles(in, e.grid.data(), m);
    e.start.resize(static_cast<Eigen::Index>(d));
    get_doubles(in, e.start.data(), d);
    e.states.resize(e.n_paths * m * d);
    get_doubles(in, e.states.data(), e.states.size());
    return e;
}

PathEnsemble read_paths_binary(const std::string& file)
{
    std::ifstream in(file, std::ios::binary);
    if (!in)
        throw Error(fmt::format("cannot open '{}'", file));
    return read_paths_binary(in);
}

}  // namespace fellerdep
