#include "fellerdep/triplet.hpp"

#include <fmt/format.h>

#include <cmath>

namespace fellerdep
{
StateTriplet::StateTriplet(int dim, DriftFn drift, DiffusionFn diffusion, JumpFn jumps, bool symbol_bounded)
    : dim_(dim), drift_(std::move(drift)), diffusion_(std::move(diffusion)), jumps_(std::move(jumps)),
      symbol_bounded_(symbol_bounded)
{
    if (dim < 1)
        throw SpecError("triplet dimension must be at least 1");
    if (!drift_ || !jumps_)
        throw SpecError("triplet needs drift and jump functions");
}

StateTriplet StateTriplet::constant(Vec drift, Mat diffusion, LevyMeasure nu, bool symbol_bounded)
{
    const int d = static_cast<int>(drift.size());
    DiffusionFn sigma;
    if (diffusion.size() > 0)
        sigma = [diffusion](const Vec&) { return diffusion; };
    return StateTriplet(
        d, [drift](const Vec&) { return drift; }, std::move(sigma), [nu](const Vec&) { return nu; },
        symbol_bounded);
}

StateTriplet StateTriplet::linear_drift(Vec b0, double lambda, Mat diffusion, LevyMeasure nu)
{
    const int d = static_cast<int>(b0.size());
    DiffusionFn sigma;
    if (diffusion.size() > 0)
        sigma = [diffusion](const Vec&) { return diffusion; };
    return StateTriplet(
        d, [b0, lambda](const Vec& x) -> Vec { return b0 - lambda * x; }, std::move(sigma),
        [nu](const Vec&) { return nu; }, true);
}

LocalTriplet StateTriplet::at(const Vec& x) const
{
    if (x.size() != dim_)
        throw PreconditionError(fmt::format("state has dimension {}, triplet expects {}", x.size(), dim_));
    LocalTriplet out{drift_(x), Mat::Zero(dim_, dim_), jumps_(x)};
    if (out.drift.size() != dim_)
        throw SpecError("drift dimension mismatch");
    if (out.nu.dim() != dim_)
        throw SpecError("jump measure dimension mismatch");
    if (diffusion_)
    {
        out.diffusion = diffusion_(x);
        const Mat& s = out.diffusion;
        if (s.rows() != dim_ || s.cols() != dim_)
            throw SpecError("diffusion matrix has wrong shape");
        const double scale = std::max(1.0, s.cwiseAbs().maxCoeff());
        if ((s - s.transpose()).cwiseAbs().maxCoeff() > 1e-12 * scale)
            throw SpecError("diffusion matrix is not symmetric");
        Eigen::LDLT<Mat> ldlt(s);
        if (ldlt.info() != Eigen::Success || ldlt.vectorD().minCoeff() < -1e-12 * scale)
            throw SpecError("diffusion matrix is not positive semidefinite");
    }
    return out;
}

Estimate<std::complex<double>> symbol_eval(const LocalTriplet& local, const Vec& xi, const QuadOptions& opt)
{
    using cd = std::complex<double>;
    if (xi.size() != local.drift.size())
        throw PreconditionError("frequency dimension mismatch");
    cd value{-0.5 * xi.dot(local.diffusion * xi), local.drift.dot(xi)};
    if (!local.nu.is_finite_activity())
    {
        // e^{i eta s} oscillates without decay along the ray, so use the
        // closed form -(-i eta)^alpha - i eta \int s chi(s v) nu(ds), eta = xi.v
        const auto& st = local.nu.stable();
        const double eta = xi.dot(st.direction);
        const double comp = small_jump_mean(local.nu).dot(xi);
        value += -std::pow(cd{0.0, -eta}, st.alpha) - cd{0.0, comp};
        return {value, 0.0};
    }
    std::function<cd(const Vec&)> h = [&xi](const Vec& y) {
        const double phase = xi.dot(y);
        return cd{std::cos(phase) - 1.0, std::sin(phase) - phase * cutoff(y)};
    };
    const auto r = integrate_measure(local.nu, h, 0.5 * xi.squaredNorm(), opt);
    value += r.value;
    return {value, r.error};
}

Estimate<std::complex<double>> symbol_eval(const StateTriplet& triplet, const Vec& x, const Vec& xi,
                                           const QuadOptions& opt)
{
    return symbol_eval(triplet.at(x), xi, opt);
}

namespace
{
// The compensator y.grad f(x) is needed only when nu charges the unit ball.
bool charges_unit_ball(const LevyMeasure& nu)
{
    if (nu.is_zero())
        return false;
    if (!nu.is_atomic())
        return true;
    for (const auto& a : std::get<AtomicLaw>(nu.finite().law).atoms())
        if (cutoff(a.point) != 0.0)
            return true;
    return false;
}
}  // namespace

Estimate<double> generator_apply(const LocalTriplet& local, const TestFunction& f, const Vec& x, const QuadOptions& opt)
{
    if (f.dim() != x.size() || local.drift.size() != x.size())
        throw PreconditionError("generator: dimension mismatch");
    if (f.is_constant())
        return {0.0, 0.0};
    const bool need_grad = !local.drift.isZero(0.0) || charges_unit_ball(local.nu);
    const Vec grad = need_grad ? f.gradient(x) : Vec::Zero(x.size());
    double value = local.drift.dot(grad);
    if (local.has_diffusion())
        value += 0.5 * (local.diffusion.cwiseProduct(f.hessian(x))).sum();
    const double fx = f(x);
    std::function<double(const Vec&)> h = [&](const Vec& y) -> double {
        const Vec xy = x + y;
        return f(xy) - fx - y.dot(grad) * cutoff(y);
    };
    const auto r = integrate_measure(local.nu, h, 0.5 * f.curvature(), opt);
    return {value + r.value, r.error};
}

Estimate<double> generator_apply(const StateTriplet& triplet, const TestFunction& f, const Vec& x,
                                 const QuadOptions& opt)
{
    return generator_apply(triplet.at(x), f, x, opt);
}

OffOrthantMass resnick_offorthant_mass(const StateTriplet& triplet, const Vec& x, std::uint64_t seed,
                                       std::size_t samples)
{
    return offorthant_mass(triplet.at(x).nu, seed, samples);
}

LiggettGap liggett_gap(const StateTriplet& triplet, const TestFunction& f, const TestFunction& g, const Vec& x,
                       const QuadOptions& opt)
{
    const LocalTriplet local = triplet.at(x);
    if (local.has_diffusion())
        throw PreconditionError("Liggett gap requires a pure-jump triplet (Sigma = 0)");
    LiggettGap out;
    if (f.is_constant() || g.is_constant())
        return out;

    const auto fg = generator_apply(local, f * g, x, opt);
    const auto gf = generator_apply(local, g, x, opt);
    const auto ff = generator_apply(local, f, x, opt);
    const double fx = f(x);
    const double gx = g(x);
    out.direct.value = fg.value - fx * gf.value - gx * ff.value;
    out.direct.error = fg.error + std::fabs(fx) * gf.error + std::fabs(gx) * ff.error;

    std::function<double(const Vec&)> h = [&](const Vec& y) -> double {
        const Vec xy = x + y;
        return (f(xy) - fx) * (g(xy) - gx);
    };
    const auto r = integrate_measure(local.nu, h, f.lipschitz() * g.lipschitz(), opt);
    out.reduced = {r.value, r.error};
    return out;
}

SymbolBoundProbe probe_symbol_bound(const StateTriplet& triplet, std::span<const Vec> states,
                                    std::span<const Vec> frequencies, const QuadOptions& opt)
{
    SymbolBoundProbe out;
    for (const Vec& x : states)
    {
        const LocalTriplet local = triplet.at(x);
        for (const Vec& xi : frequencies)
        {
            const double ratio = std::abs(symbol_eval(local, xi, opt).value) / (1.0 + xi.squaredNorm());
            if (out.argmax_x.size() == 0 || ratio > out.sup_ratio)
            {
                out.sup_ratio = ratio;
                out.argmax_x = x;
                out.argmax_xi = xi;
            }
        }
    }
    return out;
}

}  // namespace fellerdep
