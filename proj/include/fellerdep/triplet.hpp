#pragma once

#include "fellerdep/core.hpp"
#include "fellerdep/levy_measure.hpp"
#include "fellerdep/test_function.hpp"

#include <complex>
#include <functional>
#include <span>

namespace fellerdep
{
/// Characteristics (b, Sigma, nu) frozen at one state.
struct LocalTriplet
{
    Vec drift;
    Mat diffusion;  // d x d, zero for pure-jump triplets
    LevyMeasure nu;

    bool has_diffusion() const { return diffusion.size() > 0 && !diffusion.isZero(0.0); }
};

/// x -> (b(x), Sigma(x), nu(x, dy)).
class StateTriplet
{
  public:
    using DriftFn = std::function<Vec(const Vec&)>;
    using DiffusionFn = std::function<Mat(const Vec&)>;
    using JumpFn = std::function<LevyMeasure(const Vec&)>;

    /// An empty diffusion function means Sigma = 0.
    StateTriplet(int dim, DriftFn drift, DiffusionFn diffusion, JumpFn jumps, bool symbol_bounded = true);

    /// State-independent characteristics.
    static StateTriplet constant(Vec drift, Mat diffusion, LevyMeasure nu, bool symbol_bounded = true);
    /// Drift b0 - lambda x with constant Sigma and nu.
    static StateTriplet linear_drift(Vec b0, double lambda, Mat diffusion, LevyMeasure nu);

    int dim() const { return dim_; }
    bool symbol_bounded() const { return symbol_bounded_; }

    /// Evaluates and validates the characteristics at x (Sigma symmetric PSD,
    /// dimensions consistent). Throws SpecError otherwise.
    LocalTriplet at(const Vec& x) const;

  private:
    int dim_;
    DriftFn drift_;
    DiffusionFn diffusion_;
    JumpFn jumps_;
    bool symbol_bounded_;
};

/// -p(x, xi) = i b.xi - xi.Sigma xi / 2 + \int (e^{i xi.y} - 1 - i xi.y chi(y)) nu(x, dy).
Estimate<std::complex<double>> symbol_eval(const StateTriplet& triplet, const Vec& x, const Vec& xi,
                                           const QuadOptions& opt = {});
Estimate<std::complex<double>> symbol_eval(const LocalTriplet& local, const Vec& xi, const QuadOptions& opt = {});

/// I(p) f(x) = b.grad f + (1/2) tr(Sigma Hf) + \int (f(x+y) - f(x) - y.grad f(x) chi(y)) nu(x, dy).
Estimate<double> generator_apply(const StateTriplet& triplet, const TestFunction& f, const Vec& x,
                                 const QuadOptions& opt = {});
Estimate<double> generator_apply(const LocalTriplet& local, const TestFunction& f, const Vec& x,
                                 const QuadOptions& opt = {});

/// nu(x, .) off the closed positive and negative orthants (0 when d = 1).
OffOrthantMass resnick_offorthant_mass(const StateTriplet& triplet, const Vec& x, std::uint64_t seed = 1,
                                       std::size_t samples = 100000);

struct LiggettGap
{
    /// I(fg) - f I g - g I f from three generator evaluations.
    Estimate<double> direct;
    /// \int (f(x+y) - f(x)) (g(x+y) - g(x)) nu(x, dy).
    Estimate<double> reduced;
};

/// Requires Sigma(x) = 0; throws PreconditionError otherwise.
LiggettGap liggett_gap(const StateTriplet& triplet, const TestFunction& f, const TestFunction& g, const Vec& x,
                       const QuadOptions& opt = {});

struct SymbolBoundProbe
{
    double sup_ratio = 0.0;  // sup |p(x, xi)| / (1 + |xi|^2) over the probe grid
    Vec argmax_x;
    Vec argmax_xi;
};

SymbolBoundProbe probe_symbol_bound(const StateTriplet& triplet, std::span<const Vec> states,
                                    std::span<const Vec> frequencies, const QuadOptions& opt = {});

}  // namespace fellerdep
