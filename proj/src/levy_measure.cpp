#include "fellerdep/levy_measure.hpp"

#include <fmt/format.h>

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

namespace fellerdep
{
double cutoff(const Vec& y)
{
    const double r = y.norm();
    return (r > 0.0 && r < 1.0) ? 1.0 : 0.0;
}

AtomicLaw::AtomicLaw(int dim, std::vector<Atom> atoms) : dim_(dim), atoms_(std::move(atoms))
{
    if (dim < 1)
        throw SpecError("atomic law: dimension must be positive");
    double total = 0.0;
    for (const auto& a : atoms_)
    {
        if (a.point.size() != dim)
            throw SpecError(fmt::format("atomic law: atom of dimension {} in a {}-dimensional law", a.point.size(), dim));
        if (!(a.weight >= 0.0) || !std::isfinite(a.weight))
            throw SpecError("atomic law: weights must be finite and nonnegative");
        if (a.point.norm() == 0.0)
            throw SpecError("atomic law: an atom at the origin is not a jump");
        total += a.weight;
        cdf_.push_back(total);
    }
    if (!atoms_.empty() && std::fabs(total - 1.0) > 1e-9)
        throw SpecError(fmt::format("atomic law: weights sum to {}, expected 1", total));
}

Vec AtomicLaw::sample(Stream& rng) const
{
    if (atoms_.empty())
        throw SpecError("atomic law: cannot sample from an empty law");
    const double u = rng.uniform() * cdf_.back();
    const auto it = std::upper_bound(cdf_.begin(), cdf_.end(), u);
    const auto i = std::min<std::size_t>(static_cast<std::size_t>(it - cdf_.begin()), atoms_.size() - 1);
    return atoms_[i].point;
}

ParametricLaw::ParametricLaw(Definition def) : def_(std::move(def))
{
    if (def_.dim < 1 || def_.parameter_box.empty() || !def_.density || !def_.map || !def_.sample)
        throw SpecError("parametric law: dimension, parameter box, density, map and sampler are required");
}

ParametricLaw ParametricLaw::exponential_ray(const Vec& direction, double mean)
{
    if (!(mean > 0.0))
        throw SpecError("exponential ray: mean must be positive");
    if (direction.norm() == 0.0)
        throw SpecError("exponential ray: direction must be nonzero");
    Definition def;
    def.dim = static_cast<int>(direction.size());
    def.name = "exponential_ray";
    def.parameter_box = {{0.0, std::numeric_limits<double>::infinity()}};
    def.density = [mean](std::span<const double> u) { return std::exp(-u[0] / mean) / mean; };
    def.map = [direction](std::span<const double> u) -> Vec { return u[0] * direction; };
    def.sample = [direction, mean](Stream& rng) -> Vec { return (mean * rng.exponential()) * direction; };
    def.breakpoints = {{1.0 / direction.norm()}};
    return ParametricLaw(std::move(def));
}

int law_dim(const JumpLaw& law)
{
    return std::visit([](const auto& l) { return l.dim(); }, law);
}

Vec sample_jump(const JumpLaw& law, Stream& rng)
{
    return std::visit([&](const auto& l) { return l.sample(rng); }, law);
}

bool Rectangle::contains(const Vec& y) const
{
    for (Eigen::Index i = 0; i < y.size(); ++i)
        if (!(y[i] > lower[i] && y[i] < upper[i]))
            return false;
    return true;
}

double Rectangle::distance_from_origin() const
{
    double sq = 0.0;
    for (Eigen::Index i = 0; i < lower.size(); ++i)
    {
        double gap = 0.0;
        if (lower[i] > 0.0)
            gap = lower[i];
        else if (upper[i] < 0.0)
            gap = -upper[i];
        sq += gap * gap;
    }
    return std::sqrt(sq);
}

bool Rectangle::on_boundary(const Vec& y) const
{
    bool in_closure = true;
    bool touches = false;
    for (Eigen::Index i = 0; i < y.size(); ++i)
    {
        if (y[i] < lower[i] || y[i] > upper[i])
            in_closure = false;
        if (y[i] == lower[i] || y[i] == upper[i])
            touches = true;
    }
    return in_closure && touches;
}

LevyMeasure::LevyMeasure(FiniteActivity fa) : repr_(std::move(fa))
{
    const auto& f = std::get<FiniteActivity>(repr_);
    if (!(f.rate >= 0.0) || !std::isfinite(f.rate))
        throw SpecError("finite-activity measure: rate must be finite and nonnegative");
    if (f.rate > 0.0)
        if (const auto* a = std::get_if<AtomicLaw>(&f.law); a && a->atoms().empty())
            throw SpecError("finite-activity measure: positive rate needs a non-empty jump law");
}

LevyMeasure::LevyMeasure(AlphaStableSubordinator st) : repr_(std::move(st))
{
    const auto& s = std::get<AlphaStableSubordinator>(repr_);
    if (!(s.alpha > 0.0 && s.alpha < 1.0))
        throw SpecError("alpha-stable subordinator: alpha must lie in (0,1)");
    if (!(s.y_min > 0.0))
        throw SpecError("alpha-stable subordinator: y_min must be positive");
    if (s.direction.size() < 1 || s.direction.norm() == 0.0)
        throw SpecError("alpha-stable subordinator: direction must be a nonzero vector");
}

LevyMeasure LevyMeasure::zero(int dim)
{
    return LevyMeasure(FiniteActivity{0.0, AtomicLaw(dim, {})});
}

LevyMeasure LevyMeasure::atoms(double rate, int dim, std::vector<Atom> atoms)
{
    return LevyMeasure(FiniteActivity{rate, AtomicLaw(dim, std::move(atoms))});
}

int LevyMeasure::dim() const
{
    if (is_finite_activity())
        return law_dim(finite().law);
    return static_cast<int>(stable().direction.size());
}

bool LevyMeasure::is_atomic() const
{
    return is_finite_activity() && std::holds_alternative<AtomicLaw>(finite().law);
}

bool LevyMeasure::is_zero() const
{
    return is_finite_activity() && finite().rate == 0.0;
}

double LevyMeasure::total_mass() const
{
    return is_finite_activity() ? finite().rate : std::numeric_limits<double>::infinity();
}

double stable_truncated_second_moment(const AlphaStableSubordinator& st)
{
    const double a = st.alpha;
    const double v2 = st.direction.squaredNorm();
    return v2 * a * std::pow(st.y_min, 2.0 - a) / (std::tgamma(1.0 - a) * (2.0 - a));
}

namespace
{
template<class T>
MeasureIntegral<T> integrate_measure_impl(const LevyMeasure& nu, const std::function<T(const Vec&)>& h,
                                          double quadratic_bound, const QuadOptions& opt)
{
    MeasureIntegral<T> out;
    if (nu.is_finite_activity())
    {
        const auto& fa = nu.finite();
        if (fa.rate == 0.0)
        {
            out.exact = true;
            return out;
        }
        if (const auto* atoms = std::get_if<AtomicLaw>(&fa.law))
        {
            T sum{};
            for (const auto& a : atoms->atoms())
                sum += a.weight * h(a.point);
            out.value = fa.rate * sum;
            out.exact = true;
            return out;
        }
        const auto& law = std::get<ParametricLaw>(fa.law);
        QuadOptions scaled = opt;
        scaled.abs_tol = opt.abs_tol / fa.rate;
        const QuadResult<T> r = law.expectation<T>(h, scaled);
        out.value = fa.rate * r.value;
        out.error = fa.rate * r.error;
        if (!r.converged || out.error > std::max(opt.abs_tol, opt.rel_tol * detail::magnitude(out.value)))
            throw QuadratureError(fmt::format("quadrature against '{}' did not converge (error {:.3g})", law.name(),
                                              out.error),
                                  detail::magnitude(out.value), out.error);
        return out;
    }

    // Stable subordinator: substitute u = s^(-alpha), under which
    // alpha/Gamma(1-alpha) s^(-1-alpha) ds becomes du/Gamma(1-alpha).
    const auto& st = nu.stable();
    const double alpha = st.alpha;
    const double inv_gamma = 1.0 / std::tgamma(1.0 - alpha);
    const double u_max = std::pow(st.y_min, -alpha);
    const Vec& v = st.direction;
    auto integrand = [&](double u) -> T {
        const double s = std::min(std::pow(u, -1.0 / alpha), 1e280);
        return h(s * v) * inv_gamma;
    };
    std::vector<double> cuts{std::pow(v.norm(), alpha)};
    for (int k = -8; std::pow(10.0, k) < u_max; ++k)
        cuts.push_back(std::pow(10.0, k));
    const QuadResult<T> r = integrate_adaptive<T>(integrand, 0.0, u_max, opt, cuts);
    out.value = r.value;
    out.truncation_bound = quadratic_bound * stable_truncated_second_moment(st);
    out.error = r.error + out.truncation_bound;
    if (!r.converged || out.error > std::max(opt.abs_tol, opt.rel_tol * detail::magnitude(out.value)))
        throw QuadratureError(
            fmt::format("quadrature against the stable subordinator did not converge (error {:.3g}, truncation {:.3g})",
                        out.error, out.truncation_bound),
            detail::magnitude(out.value), out.error);
    return out;
}
}  // namespace

MeasureIntegral<double> integrate_measure(const LevyMeasure& nu, const std::function<double(const Vec&)>& h,
                                          double quadratic_bound, const QuadOptions& opt)
{
    return integrate_measure_impl<double>(nu, h, quadratic_bound, opt);
}

MeasureIntegral<std::complex<double>> integrate_measure(
    const LevyMeasure& nu, const std::function<std::complex<double>(const Vec&)>& h, double quadratic_bound,
    const QuadOptions& opt)
{
    return integrate_measure_impl<std::complex<double>>(nu, h, quadratic_bound, opt);
}

Vec small_jump_mean(const LevyMeasure& nu, const QuadOptions& opt)
{
    const int d = nu.dim();
    Vec out = Vec::Zero(d);
    if (!nu.is_finite_activity())
    {
        // closed form: alpha |v|^(alpha-1) / Gamma(2-alpha) * v
        const auto& st = nu.stable();
        const double nv = st.direction.norm();
        return st.direction * (st.alpha * std::pow(nv, st.alpha - 1.0) / std::tgamma(2.0 - st.alpha));
    }
    for (int i = 0; i < d; ++i)
    {
        std::function<double(const Vec&)> h = [i](const Vec& y) { return y[i] * cutoff(y); };
        out[i] = integrate_measure(nu, h, 0.0, opt).value;
    }
    return out;
}

Estimate<double> region_mass(const LevyMeasure& nu, const Rectangle& region, const QuadOptions& opt)
{
    if (nu.is_finite_activity())
    {
        std::function<double(const Vec&)> h = [&](const Vec& y) { return region.contains(y) ? 1.0 : 0.0; };
        const auto r = integrate_measure(nu, h, 0.0, opt);
        return {r.value, r.error};
    }
    // {s > 0 : s v in A} is an interval (s_lo, s_hi)
    const auto& st = nu.stable();
    double s_lo = 0.0;
    double s_hi = std::numeric_limits<double>::infinity();
    for (Eigen::Index i = 0; i < st.direction.size(); ++i)
    {
        const double vi = st.direction[i];
        const double lo = region.lower[i];
        const double hi = region.upper[i];
        if (vi > 0.0)
        {
            s_lo = std::max(s_lo, lo / vi);
            s_hi = std::min(s_hi, hi / vi);
        }
        else if (vi < 0.0)
        {
            s_lo = std::max(s_lo, hi / vi);
            s_hi = std::min(s_hi, lo / vi);
        }
        else if (!(lo < 0.0 && hi > 0.0))
        {
            return {0.0, 0.0};
        }
    }
    if (!(s_hi > s_lo))
        return {0.0, 0.0};
    const double inv_gamma = 1.0 / std::tgamma(1.0 - st.alpha);
    const double tail_lo = s_lo > 0.0 ? std::pow(s_lo, -st.alpha) : std::numeric_limits<double>::infinity();
    const double tail_hi = std::isinf(s_hi) ? 0.0 : std::pow(s_hi, -st.alpha);
    return {(tail_lo - tail_hi) * inv_gamma, 0.0};
}

bool in_closed_orthants(const Vec& y)
{
    return (y.array() >= 0.0).all() || (y.array() <= 0.0).all();
}

OffOrthantMass offorthant_mass(const LevyMeasure& nu, std::uint64_t seed, std::size_t samples)
{
    OffOrthantMass out;
    if (nu.dim() == 1 || nu.is_zero())
        return out;
    if (!nu.is_finite_activity())
    {
        if (!in_closed_orthants(nu.stable().direction))
            out.mass = std::numeric_limits<double>::infinity();
        return out;
    }
    const auto& fa = nu.finite();
    if (const auto* atoms = std::get_if<AtomicLaw>(&fa.law))
    {
        double w = 0.0;
        for (const auto& a : atoms->atoms())
            if (!in_closed_orthants(a.point))
                w += a.weight;
        out.mass = fa.rate * w;
        return out;
    }
    if (samples == 0)
        throw PreconditionError("off-orthant mass: sample count must be positive");
    const auto& law = std::get<ParametricLaw>(fa.law);
    Stream rng(seed, 0, StreamDomain::measure);
    std::size_t off = 0;
    for (std::size_t k = 0; k < samples; ++k)
        if (!in_closed_orthants(law.sample(rng)))
            ++off;
    const double p = static_cast<double>(off) / static_cast<double>(samples);
    out.mass = fa.rate * p;
    out.std_error = fa.rate * std::sqrt(p * (1.0 - p) / static_cast<double>(samples));
    out.exact = false;
    return out;
}

}  // namespace fellerdep
