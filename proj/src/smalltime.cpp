#include "fellerdep/smalltime.hpp"

#include "fellerdep/rng.hpp"
#include "fellerdep/simulate.hpp"

#include <fmt/format.h>

#include <algorithm>
#include <cmath>
#include <limits>

namespace fellerdep
{
namespace
{
constexpr double inf = std::numeric_limits<double>::infinity();
constexpr double nan = std::numeric_limits<double>::quiet_NaN();

std::size_t paths_for(double t, double scale)
{
    return static_cast<std::size_t>(std::ceil(scale / t));
}

// Binomial proportion s.e.; with no hits a single-hit proportion keeps weights finite.
double proportion_se(double hits, double n)
{
    const double p = std::max(hits, 1.0) / n;
    return std::sqrt(p * (1.0 - p) / n);
}

void fit_line(SmalltimeTable& table)
{
    double s0 = 0, s1 = 0, s2 = 0, r0 = 0, r1 = 0;
    for (const auto& row : table.rows)
    {
        const double w = 1.0 / (row.se * row.se);
        s0 += w;
        s1 += w * row.t;
        s2 += w * row.t * row.t;
        r0 += w * row.rate;
        r1 += w * row.rate * row.t;
    }
    if (table.rows.size() < 2)
    {
        table.intercept = table.rows.empty() ? nan : table.rows.front().rate;
        table.intercept_se = table.rows.empty() ? nan : table.rows.front().se;
        table.slope = nan;
        return;
    }
    const double det = s0 * s2 - s1 * s1;
    table.intercept = (s2 * r0 - s1 * r1) / det;
    table.slope = (s0 * r1 - s1 * r0) / det;
    table.intercept_se = std::sqrt(s2 / det);
}
}  // namespace

void validate_region(const RegionSpec& region, const std::optional<LevyMeasure>& nu)
{
    const auto& r = region.rect;
    if (r.lower.size() != r.upper.size() || r.lower.size() == 0)
        throw PreconditionError(fmt::format("region '{}' has inconsistent bounds", region.id));
    if ((r.lower.array() >= r.upper.array()).any())
        throw PreconditionError(fmt::format("region '{}' is empty", region.id));
    if (!(r.distance_from_origin() > 0.0))
        throw PreconditionError(fmt::format("region '{}' touches the origin", region.id));
    if (nu && nu->dim() != r.lower.size())
        throw PreconditionError(fmt::format("region '{}' has the wrong dimension", region.id));
    if (nu && nu->is_atomic())
        for (const auto& a : std::get<AtomicLaw>(nu->finite().law).atoms())
            if (a.weight > 0.0 && r.on_boundary(a.point))
                throw PreconditionError(fmt::format("region '{}' has an atom on its boundary", region.id));
}

std::optional<LevyMeasure> reference_measure(const ProcessSpec& spec, const Vec& x)
{
    if (const auto* sub = std::get_if<SubordinatedSpec>(&spec.kind))
        return subordinated_jump_measure(*sub);
    return effective_triplet(spec, x).nu;
}

std::uint64_t cell_seed(std::uint64_t seed, std::uint64_t index)
{
    return mix64(seed ^ mix64(index + 1));
}

std::vector<SmalltimeTable> smalltime_rates(const ProcessSpec& spec, const Vec& x,
                                            const std::vector<RegionSpec>& regions, const SmalltimeOptions& opt,
                                            std::uint64_t seed)
{
    const auto nu = reference_measure(spec, x);
    for (const auto& r : regions)
        validate_region(r, nu);
    for (double t : opt.t_list)
        if (!(t > 0.0))
            throw PreconditionError("small-time grid must be positive");

    std::vector<SmalltimeTable> tables(regions.size());
    for (std::size_t r = 0; r < regions.size(); ++r)
    {
        tables[r].region_id = regions[r].id;
        if (nu)
        {
            const auto m = region_mass(*nu, regions[r].rect);
            tables[r].nu_value = m.value;
            tables[r].nu_error = m.error;
        }
        else
            tables[r].nu_value = nan;
    }
    for (std::size_t j = 0; j < opt.t_list.size(); ++j)
    {
        const double t = opt.t_list[j];
        const std::size_t n = paths_for(t, opt.paths_scale);
        const auto e = simulate(spec, x, {t}, n, cell_seed(seed, j), opt.jobs);
        for (std::size_t r = 0; r < regions.size(); ++r)
        {
            double hits = 0.0;
            for (std::size_t k = 0; k < n; ++k)
                hits += regions[r].rect.contains(Vec(e.state(k, 0)) - x);
            const double nn = static_cast<double>(n);
            tables[r].rows.push_back({t, hits / (nn * t), proportion_se(hits, nn) / t, n});
        }
    }
    for (auto& t : tables)
        fit_line(t);
    return tables;
}

SmalltimeTable smalltime_rate(const ProcessSpec& spec, const Vec& x, const RegionSpec& region,
                              const SmalltimeOptions& opt, std::uint64_t seed)
{
    return smalltime_rates(spec, x, {region}, opt, seed).front();
}

NecessityReport puod_necessity_experiment(const ProcessSpec& spec, const Vec& x, const NecessityOptions& opt,
                                          std::uint64_t seed)
{
    const int d = spec.dim();
    if (d < 2)
        throw PreconditionError("the orthant condition is vacuous in dimension 1");
    const auto nu = reference_measure(spec, x);
    if (!nu)
        throw PreconditionError("no jump measure available to place an off-orthant rectangle");
    const auto off = offorthant_mass(*nu);
    if (!(off.mass > 0.0))
        throw PreconditionError("jump measure has zero off-orthant mass; nothing to demonstrate");
    if (!nu->is_atomic())
        throw PreconditionError("no suitable off-orthant rectangle: jump law has no atoms");
    const auto& atoms = std::get<AtomicLaw>(nu->finite().law).atoms();

    NecessityReport rep;
    double best = 0.0;
    for (const auto& a : atoms)
        if (!in_closed_orthants(a.point) && a.weight > best)
        {
            best = a.weight;
            rep.atom = a.point;
        }
    if (rep.atom.size() == 0)
        throw PreconditionError("no suitable off-orthant rectangle found");

    double smallest = inf;
    for (Eigen::Index i = 0; i < d; ++i)
        if (rep.atom[i] != 0.0)
            smallest = std::min(smallest, std::fabs(rep.atom[i]));
    rep.a = 0.5 * smallest;
    auto on_edge = [&](double a) {
        for (const auto& at : atoms)
            for (Eigen::Index i = 0; i < d; ++i)
                if (std::fabs(at.point[i]) == a)
                    return true;
        return false;
    };
    for (int tries = 0; on_edge(rep.a) && tries < 64; ++tries)
        rep.a *= 0.9;
    if (on_edge(rep.a))
        throw PreconditionError("no suitable off-orthant rectangle found");

    rep.p = rep.q = -1;
    Vec lower(d), upper(d);
    rep.puod_threshold = Vec(d);
    for (Eigen::Index i = 0; i < d; ++i)
    {
        const double y = rep.atom[i];
        lower[i] = y > 0.0 ? rep.a : -inf;
        upper[i] = y < 0.0 ? -rep.a : inf;
        rep.puod_threshold[i] = y > 0.0 ? x[i] + rep.a : (y < 0.0 ? x[i] - rep.a : -inf);
        if (y > 0.0 && rep.p < 0)
            rep.p = static_cast<int>(i);
        if (y < 0.0 && rep.q < 0)
            rep.q = static_cast<int>(i);
    }
    rep.region = {"offorthant", Rectangle{lower, upper}};
    validate_region(rep.region, nu);
    rep.nu_region = region_mass(*nu, rep.region.rect).value;

    const auto& so = opt.smalltime;
    for (std::size_t j = 0; j < so.t_list.size(); ++j)
    {
        const double t = so.t_list[j];
        const std::size_t n = paths_for(t, so.paths_scale);
        const auto e = simulate(spec, x, {t}, n, cell_seed(seed, j), so.jobs);
        double joint = 0, up = 0, down = 0;
        for (std::size_t k = 0; k < n; ++k)
        {
            const Vec dx = Vec(e.state(k, 0)) - x;
            joint += rep.region.rect.contains(dx);
            up += dx[rep.p] > rep.a;
            down += dx[rep.q] <= -rep.a;
        }
        const double nn = static_cast<double>(n);
        NecessityRow row;
        row.t = t;
        row.n_paths = n;
        row.joint_rate = joint / (nn * t);
        row.joint_se = proportion_se(joint, nn) / t;
        const double pu = up / nn;
        const double pd = down / nn;
        row.product_rate = pu * pd / t;
        row.product_se = std::hypot(pd * proportion_se(up, nn), pu * proportion_se(down, nn)) / t;
        rep.rows.push_back(row);
    }

    rep.puod_t = *std::min_element(so.t_list.begin(), so.t_list.end());
    const auto e = simulate(spec, x, {rep.puod_t}, opt.puod_paths, cell_seed(seed, 1000), so.jobs);
    const Mat states = e.terminal();
    auto thresholds = default_thresholds(states);
    thresholds.insert(thresholds.begin(), rep.puod_threshold);
    rep.puod = puod_test(states, thresholds, seed);
    return rep;
}

}  // namespace fellerdep
