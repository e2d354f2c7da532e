#include "fellerdep/simulate.hpp"

#include "fellerdep/parallel.hpp"

#include <fmt/format.h>

#include <cmath>

namespace fellerdep
{
Mat PathEnsemble::snapshot(std::size_t time) const
{
    Mat out(static_cast<Eigen::Index>(n_paths), dim);
    for (std::size_t k = 0; k < n_paths; ++k)
        out.row(static_cast<Eigen::Index>(k)) = state(k, time).transpose();
    return out;
}

Mat PathEnsemble::stacked() const
{
    const auto m = static_cast<Eigen::Index>(grid.size());
    Mat out(static_cast<Eigen::Index>(n_paths), m * dim);
    for (std::size_t k = 0; k < n_paths; ++k)
        for (Eigen::Index j = 0; j < m; ++j)
            out.block(static_cast<Eigen::Index>(k), j * dim, 1, dim) =
                state(k, static_cast<std::size_t>(j)).transpose();
    return out;
}

void validate_grid(const std::vector<double>& grid)
{
    if (grid.empty())
        throw PreconditionError("time grid is empty");
    double prev = 0.0;
    for (double t : grid)
    {
        if (!std::isfinite(t) || !(t > prev))
            throw PreconditionError("time grid must be finite, positive and strictly increasing");
        prev = t;
    }
}

namespace
{
// Increment of the subordinator over a cell of length dt.
double subordinator_increment(const SubordinatorSpec& sub, double dt, Stream& rng)
{
    double dn = sub.drift * dt;
    if (sub.alpha)
        dn += std::pow(dt, 1.0 / *sub.alpha) * rng.positive_stable(*sub.alpha);
    else if (sub.jumps && sub.rate > 0.0)
    {
        const std::uint64_t n = rng.poisson(sub.rate * dt);
        for (std::uint64_t i = 0; i < n; ++i)
            dn += sub.jumps->sample(rng)[0];
    }
    return dn;
}

// Adds the compound Poisson part of a Levy process run for time s.
void add_levy_jumps(const JumpLevySpec& levy, double s, Stream& rng, Vec& pos)
{
    if (levy.rate == 0.0 || s == 0.0)
        return;
    if (const auto* atoms = std::get_if<AtomicLaw>(&levy.law))
    {
        // Poisson thinning: atom counts are independent Poisson variables
        for (const auto& a : atoms->atoms())
        {
            const auto n = rng.poisson(levy.rate * a.weight * s);
            if (n > 0)
                pos += static_cast<double>(n) * a.point;
        }
        return;
    }
    const std::uint64_t n = rng.poisson(levy.rate * s);
    if (n > 50'000'000)
        throw Error(fmt::format("inner jump count {} too large to sample one by one", n));
    for (std::uint64_t i = 0; i < n; ++i)
        pos += sample_jump(levy.law, rng);
}

class PathSampler
{
  public:
    PathSampler(const ProcessSpec& spec) : spec_(spec)
    {
        spec.validate();
        if (const auto* j = std::get_if<JumpLevySpec>(&spec.kind))
            velocity_ = j->velocity();
        else if (const auto* ou = std::get_if<OrnsteinUhlenbeckSpec>(&spec.kind))
            velocity_ = ou->driver.velocity();
        else if (const auto* sub = std::get_if<SubordinatedSpec>(&spec.kind))
        {
            if (const auto* d = std::get_if<DriftInner>(&sub->inner))
                velocity_ = d->velocity;
            else
                velocity_ = std::get<JumpLevySpec>(sub->inner).velocity();
        }
    }

    void run(const Vec& x, const std::vector<double>& grid, Stream& rng, double* out) const
    {
        Vec pos = x;
        double prev = 0.0;
        const auto d = static_cast<std::size_t>(x.size());
        for (std::size_t j = 0; j < grid.size(); ++j)
        {
            advance(pos, grid[j] - prev, rng);
            prev = grid[j];
            for (std::size_t i = 0; i < d; ++i)
                out[j * d + i] = pos[static_cast<Eigen::Index>(i)];
        }
    }

  private:
    void advance(Vec& pos, double dt, Stream& rng) const
    {
        if (const auto* j = std::get_if<JumpLevySpec>(&spec_.kind))
        {
            pos += dt * velocity_;
            if (j->rate > 0.0)
            {
                const auto n = rng.poisson(j->rate * dt);
                for (std::uint64_t i = 0; i < n; ++i)
                    pos += sample_jump(j->law, rng);
            }
        }
        else if (const auto* ou = std::get_if<OrnsteinUhlenbeckSpec>(&spec_.kind))
        {
            const double lambda = ou->mean_reversion;
            const Vec level = velocity_ / lambda;
            auto flow = [&](double s) {
                const double e = std::exp(-lambda * s);
                pos = e * pos + (1.0 - e) * level;
            };
            const double rate = ou->driver.rate;
            double left = dt;
            if (rate > 0.0)
            {
                for (;;)
                {
                    const double wait = rng.exponential() / rate;
                    if (wait >= left)
                        break;
                    flow(wait);
                    pos += sample_jump(ou->driver.law, rng);
                    left -= wait;
                }
            }
            flow(left);
        }
        else if (const auto* pp = std::get_if<PseudoPoissonSpec>(&spec_.kind))
        {
            const auto n = rng.poisson(pp->rate * dt);
            for (std::uint64_t i = 0; i < n; ++i)
                pos = pp->kernel.sample(pos, rng);
        }
        else
        {
            const auto& sub = std::get<SubordinatedSpec>(spec_.kind);
            const double dn = subordinator_increment(sub.subordinator, dt, rng);
            pos += dn * velocity_;
            if (const auto* levy = std::get_if<JumpLevySpec>(&sub.inner))
                add_levy_jumps(*levy, dn, rng, pos);
        }
    }

    const ProcessSpec& spec_;
    Vec velocity_;
};

PathEnsemble make_ensemble(int dim, const Vec& x, const std::vector<double>& grid, std::size_t n_paths,
                           std::uint64_t seed)
{
    validate_grid(grid);
    if (n_paths == 0)
        throw PreconditionError("number of paths must be positive");
    PathEnsemble e;
    e.seed = seed;
    e.n_paths = n_paths;
    e.dim = dim;
    e.start = x;
    e.grid = grid;
    e.states.resize(n_paths * grid.size() * static_cast<std::size_t>(dim));
    return e;
}
}  // namespace

PathEnsemble simulate(const ProcessSpec& spec, const Vec& x, const std::vector<double>& grid, std::size_t n_paths,
                      std::uint64_t seed, unsigned jobs)
{
    if (x.size() != spec.dim())
        throw PreconditionError(fmt::format("start has dimension {}, process has {}", x.size(), spec.dim()));
    PathEnsemble e = make_ensemble(spec.dim(), x, grid, n_paths, seed);
    const PathSampler sampler(spec);
    const std::size_t stride = grid.size() * static_cast<std::size_t>(e.dim);
    parallel_for(n_paths, jobs, [&](std::size_t begin, std::size_t end) {
        for (std::size_t k = begin; k < end; ++k)
        {
            Stream rng(seed, k, StreamDomain::paths);
            sampler.run(x, grid, rng, e.states.data() + k * stride);
        }
    });
    return e;
}

PathEnsemble simulate_subordinator(const SubordinatorSpec& sub, const std::vector<double>& grid,
                                   std::size_t n_paths, std::uint64_t seed, unsigned jobs)
{
    PathEnsemble e = make_ensemble(1, Vec::Zero(1), grid, n_paths, seed);
    parallel_for(n_paths, jobs, [&](std::size_t begin, std::size_t end) {
        for (std::size_t k = begin; k < end; ++k)
        {
            Stream rng(seed, k, StreamDomain::paths);
            double n = 0.0;
            double prev = 0.0;
            for (std::size_t j = 0; j < grid.size(); ++j)
            {
                n += subordinator_increment(sub, grid[j] - prev, rng);
                prev = grid[j];
                e.states[k * grid.size() + j] = n;
            }
        }
    });
    return e;
}

}  // namespace fellerdep
