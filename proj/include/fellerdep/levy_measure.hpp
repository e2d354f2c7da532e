#pragma once

#include "fellerdep/core.hpp"
#include "fellerdep/quadrature.hpp"
#include "fellerdep/rng.hpp"

#include <functional>
#include <span>
#include <string>
#include <variant>
#include <vector>

namespace fellerdep
{
/// Cut-off function: 1 on the punctured open unit ball, 0 elsewhere.
double cutoff(const Vec& y);

struct Atom
{
    Vec point;
    double weight;
};

/// Probability law with finitely many atoms, none at the origin.
class AtomicLaw
{
  public:
    AtomicLaw(int dim, std::vector<Atom> atoms);

    int dim() const { return dim_; }
    const std::vector<Atom>& atoms() const { return atoms_; }
    Vec sample(Stream& rng) const;

  private:
    int dim_;
    std::vector<Atom> atoms_;
    std::vector<double> cdf_;
};

/**
 * Law of map(U) where U has a density on a parameter box.
 *
 * This covers full-dimensional densities (map = identity) as well as laws
 * concentrated on lower-dimensional sets such as rays. Breakpoints mark
 * parameter values where the image crosses the unit sphere, so quadrature
 * can split at the cut-off discontinuity.
 */
class ParametricLaw
{
  public:
    struct Definition
    {
        int dim = 0;
        std::string name;
        std::vector<Interval> parameter_box;
        std::function<double(std::span<const double>)> density;
        std::function<Vec(std::span<const double>)> map;
        std::function<Vec(Stream&)> sample;
        std::vector<std::vector<double>> breakpoints;
    };

    explicit ParametricLaw(Definition def);

    /// Jumps E*direction with E exponential of the given mean.
    static ParametricLaw exponential_ray(const Vec& direction, double mean);

    int dim() const { return def_.dim; }
    const std::string& name() const { return def_.name; }
    const Definition& definition() const { return def_; }
    Vec sample(Stream& rng) const { return def_.sample(rng); }

    /// Expectation of h(J) by tensorized adaptive quadrature.
    template<class T>
    QuadResult<T> expectation(const std::function<T(const Vec&)>& h, const QuadOptions& opt) const
    {
        std::function<T(std::span<const double>)> integrand = [&](std::span<const double> u) -> T {
            const double dens = def_.density(u);
            if (dens == 0.0)
                return T{};
            return h(def_.map(u)) * dens;
        };
        return integrate_box<T>(integrand, def_.parameter_box, opt, def_.breakpoints);
    }

  private:
    Definition def_;
};

using JumpLaw = std::variant<AtomicLaw, ParametricLaw>;

int law_dim(const JumpLaw& law);
Vec sample_jump(const JumpLaw& law, Stream& rng);

/// nu = rate * F with F a probability law without mass at 0.
struct FiniteActivity
{
    double rate = 0.0;
    JumpLaw law;
};

/**
 * Push-forward of the alpha-stable subordinator measure
 * alpha/Gamma(1-alpha) s^(-1-alpha) ds along s -> s*direction.
 * Jumps with s < y_min are not integrated numerically; their contribution is
 * bounded through the truncated second moment and reported.
 */
struct AlphaStableSubordinator
{
    double alpha = 0.5;
    double y_min = 1e-10;
    Vec direction;
};

/// Axis-aligned open rectangle; infinite sides allowed.
struct Rectangle
{
    Vec lower;
    Vec upper;

    bool contains(const Vec& y) const;
    /// Euclidean distance from the origin to the closure.
    double distance_from_origin() const;
    /// True if y lies on the boundary of the closure.
    bool on_boundary(const Vec& y) const;
};

class LevyMeasure
{
  public:
    LevyMeasure(FiniteActivity fa);
    LevyMeasure(AlphaStableSubordinator st);

    static LevyMeasure zero(int dim);
    static LevyMeasure atoms(double rate, int dim, std::vector<Atom> atoms);

    int dim() const;
    bool is_finite_activity() const { return std::holds_alternative<FiniteActivity>(repr_); }
    bool is_atomic() const;
    bool is_zero() const;
    /// Total mass; +inf for the stable subordinator.
    double total_mass() const;

    const FiniteActivity& finite() const { return std::get<FiniteActivity>(repr_); }
    const AlphaStableSubordinator& stable() const { return std::get<AlphaStableSubordinator>(repr_); }

  private:
    std::variant<FiniteActivity, AlphaStableSubordinator> repr_;
};

template<class T>
struct MeasureIntegral
{
    T value{};
    double error = 0.0;
    /// Bound on the omitted small-jump contribution (stable case only).
    double truncation_bound = 0.0;
    bool exact = false;
};

/**
 * Integral of h against nu. `quadratic_bound` must satisfy
 * |h(y)| <= quadratic_bound * |y|^2 near the origin; it controls the
 * truncation term for the stable subordinator. Throws QuadratureError when
 * the total error exceeds opt.abs_tol.
 */
MeasureIntegral<double> integrate_measure(const LevyMeasure& nu, const std::function<double(const Vec&)>& h,
                                          double quadratic_bound, const QuadOptions& opt = {});
MeasureIntegral<std::complex<double>> integrate_measure(
    const LevyMeasure& nu, const std::function<std::complex<double>(const Vec&)>& h, double quadratic_bound,
    const QuadOptions& opt = {});

/// \int y chi(y) nu(dy).
Vec small_jump_mean(const LevyMeasure& nu, const QuadOptions& opt = {});

/// nu(A) for an open rectangle. Exact for atoms and the stable subordinator.
Estimate<double> region_mass(const LevyMeasure& nu, const Rectangle& region, const QuadOptions& opt = {});

/// Second moment of the stable jumps below y_min (the part left out of quadrature).
double stable_truncated_second_moment(const AlphaStableSubordinator& st);

struct OffOrthantMass
{
    double mass = 0.0;
    double std_error = 0.0;
    bool exact = true;
};

/// True if y lies in the closed positive or closed negative orthant.
bool in_closed_orthants(const Vec& y);

/**
 * Mass of nu off the union of the closed positive and negative orthants.
 * Atoms and the stable ray are exact; parametric laws are estimated from
 * `samples` draws with a binomial standard error.
 */
OffOrthantMass offorthant_mass(const LevyMeasure& nu, std::uint64_t seed = 1, std::size_t samples = 100000);

}  // namespace fellerdep
