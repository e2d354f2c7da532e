#pragma once

#include "fellerdep/core.hpp"

#include <boost/math/quadrature/gauss.hpp>
#include <boost/math/quadrature/gauss_kronrod.hpp>

#include <algorithm>
#include <cmath>
#include <complex>
#include <functional>
#include <limits>
#include <queue>
#include <span>
#include <vector>

namespace fellerdep
{
template<class T>
struct QuadResult
{
    T value{};
    double error = 0.0;
    bool converged = true;
    int evaluations = 0;
};

struct Interval
{
    double lower;
    double upper;
};

namespace detail
{
inline double magnitude(double v) { return std::fabs(v); }
inline double magnitude(const std::complex<double>& v) { return std::abs(v); }

/// 15-point Kronrod rule with embedded 7-point Gauss estimate on [a,b].
template<class T, class F>
T gauss_kronrod15(F& f, double a, double b, double& err)
{
    using gk = boost::math::quadrature::gauss_kronrod<double, 15>;
    using g7 = boost::math::quadrature::gauss<double, 7>;
    const auto& x = gk::abscissa();
    const auto& wk = gk::weights();
    const auto& wg = g7::weights();
    const double mid = 0.5 * (a + b);
    const double half = 0.5 * (b - a);

    T centre = f(mid);
    T kronrod = centre * wk[0];
    T gauss = centre * wg[0];
    for (std::size_t i = 1; i < x.size(); ++i)
    {
        const T sum = f(mid + half * x[i]) + f(mid - half * x[i]);
        kronrod += sum * wk[i];
        if (i % 2 == 0)
            gauss += sum * wg[i / 2];
    }
    kronrod *= half;
    gauss *= half;
    err = std::max(magnitude(kronrod - gauss), 4.0 * std::numeric_limits<double>::epsilon() * magnitude(kronrod));
    return kronrod;
}
}  // namespace detail

/**
 * Globally adaptive Gauss-Kronrod integration over a finite interval.
 *
 * Subintervals with the largest error are bisected until the summed error is
 * below max(abs_tol, rel_tol*|I|) or the subdivision budget runs out, in which
 * case `converged` is false. Breakpoints split the initial interval at known
 * discontinuities of the integrand.
 */
template<class T, class F>
QuadResult<T> integrate_adaptive(F&& f, double a, double b, const QuadOptions& opt,
                                 std::span<const double> breakpoints = {})
{
    struct Piece
    {
        double a, b;
        T value;
        double err;
        bool operator<(const Piece& o) const { return err < o.err; }
    };

    QuadResult<T> out;
    if (!(b > a))
        return out;

    std::vector<double> cuts{a};
    for (double p : breakpoints)
        if (p > a && p < b)
            cuts.push_back(p);
    cuts.push_back(b);
    std::sort(cuts.begin(), cuts.end());

    std::priority_queue<Piece> heap;
    T total{};
    double total_err = 0.0;
    for (std::size_t i = 0; i + 1 < cuts.size(); ++i)
    {
        if (!(cuts[i + 1] > cuts[i]))
            continue;
        double e = 0.0;
        T v = detail::gauss_kronrod15<T>(f, cuts[i], cuts[i + 1], e);
        out.evaluations += 15;
        heap.push({cuts[i], cuts[i + 1], v, e});
        total += v;
        total_err += e;
    }

    int subdivisions = 0;
    while (!heap.empty()
           && total_err > std::max(opt.abs_tol, opt.rel_tol * detail::magnitude(total)))
    {
        if (subdivisions >= opt.max_subdivisions)
        {
            out.converged = false;
            break;
        }
        Piece worst = heap.top();
        const double m = 0.5 * (worst.a + worst.b);
        if (!(m > worst.a && m < worst.b))
        {
            out.converged = false;
            break;
        }
        heap.pop();
        double e1 = 0.0, e2 = 0.0;
        T v1 = detail::gauss_kronrod15<T>(f, worst.a, m, e1);
        T v2 = detail::gauss_kronrod15<T>(f, m, worst.b, e2);
        out.evaluations += 30;
        total += v1 + v2 - worst.value;
        total_err += e1 + e2 - worst.err;
        heap.push({worst.a, m, v1, e1});
        heap.push({m, worst.b, v2, e2});
        ++subdivisions;
    }

    // re-sum to shed drift from the incremental updates
    T resummed{};
    double resummed_err = 0.0;
    while (!heap.empty())
    {
        resummed += heap.top().value;
        resummed_err += heap.top().err;
        heap.pop();
    }
    out.value = resummed;
    out.error = resummed_err;
    return out;
}

/// Maps a possibly infinite interval onto a finite one; the Jacobian is
/// folded into the returned integrand.
class IntervalMap
{
  public:
    explicit IntervalMap(Interval iv);

    Interval domain() const { return domain_; }
    double to_original(double u) const;
    double jacobian(double u) const;
    double to_domain(double y) const;

  private:
    enum class Kind
    {
        finite,
        upper_infinite,
        lower_infinite,
        both_infinite
    };
    Interval original_;
    Interval domain_;
    Kind kind_;
};

/**
 * Tensorized adaptive quadrature over a box (possibly with infinite sides).
 * The error is the outer estimate plus the largest inner estimate times the
 * outer (mapped) width.
 */
template<class T>
QuadResult<T> integrate_box(const std::function<T(std::span<const double>)>& f,
                            std::span<const Interval> box, const QuadOptions& opt,
                            std::span<const std::vector<double>> breakpoints = {})
{
    const std::size_t dims = box.size();
    std::vector<IntervalMap> maps;
    maps.reserve(dims);
    for (const auto& iv : box)
        maps.emplace_back(iv);
    std::vector<double> point(dims, 0.0);

    std::function<QuadResult<T>(std::size_t)> level = [&](std::size_t k) -> QuadResult<T> {
        const IntervalMap& map = maps[k];
        std::vector<double> cuts;
        if (k < breakpoints.size())
            for (double p : breakpoints[k])
                cuts.push_back(map.to_domain(p));
        double inner_err = 0.0;
        bool inner_ok = true;
        int inner_evals = 0;
        auto integrand = [&](double u) -> T {
            const double jac = map.jacobian(u);
            if (jac == 0.0 || !std::isfinite(jac))
                return T{};
            point[k] = map.to_original(u);
            if (k + 1 == dims)
                return f(std::span<const double>(point)) * jac;
            QuadResult<T> inner = level(k + 1);
            inner_err = std::max(inner_err, inner.error * jac);
            inner_ok = inner_ok && inner.converged;
            inner_evals += inner.evaluations;
            return inner.value * jac;
        };
        QuadOptions local = opt;
        if (k + 1 < dims)
        {
            local.abs_tol = 0.5 * opt.abs_tol;
            local.max_subdivisions = std::max(50, opt.max_subdivisions / 8);
        }
        const Interval d = map.domain();
        QuadResult<T> r = integrate_adaptive<T>(integrand, d.lower, d.upper, local, cuts);
        r.error += inner_err * (d.upper - d.lower);
        r.converged = r.converged && inner_ok;
        r.evaluations += inner_evals;
        return r;
    };

    if (dims == 0)
        return {f(std::span<const double>(point)), 0.0, true, 1};
    return level(0);
}

}  // namespace fellerdep
