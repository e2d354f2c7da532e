#include "fellerdep/semigroup.hpp"

#include "fellerdep/parallel.hpp"
#include "fellerdep/stats.hpp"

#include <fmt/format.h>

#include <algorithm>
#include <cmath>
#include <limits>

namespace fellerdep
{
namespace
{
std::vector<double> apply_rows(const TestFunction& f, const Mat& states)
{
    std::vector<double> v(static_cast<std::size_t>(states.rows()));
    for (Eigen::Index k = 0; k < states.rows(); ++k)
        v[static_cast<std::size_t>(k)] = f(states.row(k).transpose());
    return v;
}

StatEstimate to_estimate(const MeanSe& m)
{
    return {m.mean, m.std_error};
}
}  // namespace

StatEstimate sample_mean(const TestFunction& f, const Mat& states)
{
    const auto v = apply_rows(f, states);
    return to_estimate(mean_and_se(v));
}

SemigroupEstimate semigroup_apply(const ProcessSpec& spec, const TestFunction& f, const Vec& x, double t,
                                  std::size_t n_paths, std::uint64_t seed, unsigned jobs)
{
    if (!(t >= 0.0))
        throw PreconditionError("semigroup time must be nonnegative");
    SemigroupEstimate out;
    out.n_paths = n_paths;
    out.t = t;
    out.x = x;
    out.f_id = f.id();
    if (t == 0.0)
    {
        out.value = f(x);
        return out;
    }
    const auto e = simulate(spec, x, {t}, n_paths, seed, jobs);
    const auto m = sample_mean(f, e.terminal());
    out.value = m.value;
    out.std_error = m.std_error;
    return out;
}

StatEstimate covariance_estimate(const TestFunction& f, const TestFunction& g, const Mat& states)
{
    if (f.is_constant() || g.is_constant() || states.rows() < 2)
        return {};
    const auto fv = apply_rows(f, states);
    const auto gv = apply_rows(g, states);
    const double fm = compensated_mean(fv);
    const double gm = compensated_mean(gv);
    std::vector<double> prod(fv.size());
    for (std::size_t k = 0; k < fv.size(); ++k)
        prod[k] = (fv[k] - fm) * (gv[k] - gm);
    const auto m = mean_and_se(prod);
    const double n = static_cast<double>(prod.size());
    // n/(n-1) makes the covariance unbiased
    return {m.mean * n / (n - 1.0), m.std_error * n / (n - 1.0)};
}

StatEstimate association_gap(const ProcessSpec& spec, const TestFunction& f, const TestFunction& g, const Vec& x,
                             double t, std::size_t n_paths, std::uint64_t seed, unsigned jobs)
{
    if (f.is_constant() || g.is_constant())
        return {};
    const auto e = simulate(spec, x, {t}, n_paths, seed, jobs);
    return covariance_estimate(f, g, e.terminal());
}

GeneratorLimitTable generator_limit_check(const ProcessSpec& spec, const TestFunction& f, const Vec& x,
                                          const std::vector<double>& t_list, std::size_t n_paths,
                                          std::uint64_t seed, unsigned jobs)
{
    if (t_list.empty())
        throw PreconditionError("generator limit check needs at least one time");
    const double gen = generator_apply(process_triplet(spec), f, x).value;
    std::vector<double> grid = t_list;
    std::sort(grid.begin(), grid.end());
    grid.erase(std::unique(grid.begin(), grid.end()), grid.end());
    const auto e = simulate(spec, x, grid, n_paths, seed, jobs);
    const double fx = f(x);

    GeneratorLimitTable table;
    for (double t : t_list)
    {
        const auto j = static_cast<std::size_t>(std::lower_bound(grid.begin(), grid.end(), t) - grid.begin());
        std::vector<double> q(n_paths);
        for (std::size_t k = 0; k < n_paths; ++k)
            q[k] = (f(Vec(e.state(k, j))) - fx) / t;
        GeneratorLimitRow row;
        row.t = t;
        row.difference_quotient = to_estimate(mean_and_se(q));
        row.generator = gen;
        row.discrepancy = std::fabs(row.difference_quotient.value - gen);
        table.rows.push_back(row);
    }

    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    int count = 0;
    for (const auto& r : table.rows)
        if (r.discrepancy > 0.0)
        {
            const double lx = std::log(r.t);
            const double ly = std::log(r.discrepancy);
            sx += lx;
            sy += ly;
            sxx += lx * lx;
            sxy += lx * ly;
            ++count;
        }
    const double denom = count * sxx - sx * sx;
    table.log_log_slope =
        (count >= 2 && denom > 0.0) ? (count * sxy - sx * sy) / denom : std::numeric_limits<double>::quiet_NaN();
    return table;
}

DerivativeCommute derivative_commute_check(const ProcessSpec& spec, const TestFunction& f, const Vec& x, double t,
                                           double h, std::size_t n_paths, std::uint64_t seed, unsigned jobs)
{
    if (!(h > 0.0 && h < t))
        throw PreconditionError("derivative check needs 0 < h < t");
    DerivativeCommute out;
    if (f.is_constant())
        return out;
    const StateTriplet triplet = process_triplet(spec);
    const std::vector<double> grid{t - h, t - 0.5 * h, t, t + 0.5 * h, t + h};
    const auto e = simulate(spec, x, grid, n_paths, seed, jobs);

    // R = (4 D(h/2) - D(h)) / 3 with D(s) = (T_{t+s} f - T_{t-s} f) / (2s)
    const double c_outer = -1.0 / (3.0 * 2.0 * h);
    const double c_inner = 4.0 / (3.0 * h);
    std::vector<double> deriv(n_paths);
    std::vector<double> gen(n_paths);
    parallel_for(n_paths, jobs, [&](std::size_t begin, std::size_t end) {
        for (std::size_t k = begin; k < end; ++k)
        {
            const double f0 = f(Vec(e.state(k, 0)));
            const double f1 = f(Vec(e.state(k, 1)));
            const double f3 = f(Vec(e.state(k, 3)));
            const double f4 = f(Vec(e.state(k, 4)));
            deriv[k] = c_outer * (f4 - f0) + c_inner * (f3 - f1);
            gen[k] = generator_apply(triplet, f, Vec(e.state(k, 2))).value;
        }
    });
    out.time_derivative = to_estimate(mean_and_se(deriv));
    out.generator_side = to_estimate(mean_and_se(gen));
    out.pooled_se = std::hypot(out.time_derivative.std_error, out.generator_side.std_error);
    return out;
}

std::vector<MonotonicityStep> monotonicity_transfer_check(const ProcessSpec& spec, const TestFunction& f,
                                                          const std::vector<Vec>& chain, double t,
                                                          std::size_t n_paths, std::uint64_t seed, unsigned jobs)
{
    for (std::size_t i = 1; i < chain.size(); ++i)
        if (((chain[i] - chain[i - 1]).array() < 0.0).any())
            throw PreconditionError("start chain must be componentwise non-decreasing");
    std::vector<StatEstimate> values;
    for (const auto& x : chain)
    {
        const auto s = semigroup_apply(spec, f, x, t, n_paths, seed, jobs);
        values.push_back({s.value, s.std_error});
    }
    std::vector<MonotonicityStep> steps;
    for (std::size_t i = 1; i < chain.size(); ++i)
    {
        MonotonicityStep s;
        s.lower_start = chain[i - 1];
        s.upper_start = chain[i];
        s.lower = values[i - 1];
        s.upper = values[i];
        s.pooled_se = std::hypot(s.lower.std_error, s.upper.std_error);
        s.passed = s.upper.value >= s.lower.value - sigma_rule * s.pooled_se;
        steps.push_back(s);
    }
    return steps;
}

}  // namespace fellerdep
