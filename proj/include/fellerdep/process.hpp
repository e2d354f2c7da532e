#pragma once

#include "fellerdep/core.hpp"
#include "fellerdep/levy_measure.hpp"
#include "fellerdep/test_function.hpp"
#include "fellerdep/triplet.hpp"

#include <functional>
#include <optional>
#include <string>
#include <variant>
#include <vector>

namespace fellerdep
{
/// Levy process b t + compound Poisson(rate, law). `drift` is the triplet
/// drift, so the path velocity is drift - \int y chi(y) nu(dy).
struct JumpLevySpec
{
    Vec drift;
    double rate = 0.0;
    JumpLaw law = AtomicLaw(1, {});

    int dim() const { return static_cast<int>(drift.size()); }
    LevyMeasure measure() const;
    /// Deterministic velocity between jumps.
    Vec velocity() const;
};

/// dX = -lambda X dt + dL, L a JumpLevySpec driver.
struct OrnsteinUhlenbeckSpec
{
    double mean_reversion = 1.0;
    JumpLevySpec driver;

    int dim() const { return driver.dim(); }
};

/// Finite chain on listed states with a row-stochastic matrix.
struct TransitionTable
{
    std::vector<Vec> states;
    Mat matrix;

    /// Index of the state equal to x; throws PreconditionError if none.
    std::size_t index_of(const Vec& x) const;
};

/// One step of the embedded chain, q(x, dz).
struct MarkovKernel
{
    /// nonzero displacement z - x has probability move_probability and
    /// conditional law `law`
    struct Displacement
    {
        double move_probability = 0.0;
        std::optional<JumpLaw> law;
    };

    int dim = 1;
    std::function<Vec(const Vec&, Stream&)> sample;
    std::function<Displacement(const Vec&)> displacement;
    std::optional<TransitionTable> table;

    static MarkovKernel from_table(TransitionTable table);
    /// q(x, .) = law of x + Z, Z ~ law.
    static MarkovKernel translation(JumpLaw law);
};

/// X_t = S(N_t), S the chain of `kernel`, N a Poisson clock of rate `rate`.
struct PseudoPoissonSpec
{
    double rate = 1.0;
    MarkovKernel kernel;

    int dim() const { return kernel.dim; }
};

/// Deterministic inner motion Y(s) = x + s * velocity.
struct DriftInner
{
    Vec velocity;
};

/// Subordinator N with Bernstein function psi(u) = drift u + u^alpha (stable)
/// or drift u + rate E(1 - exp(-u J)) (finite activity, J > 0).
struct SubordinatorSpec
{
    double drift = 0.0;
    std::optional<double> alpha;
    double rate = 0.0;
    std::optional<AtomicLaw> jumps;  // one-dimensional, positive atoms

    double bernstein(double u) const;
};

/// X_t = Y(N_t), Y independent of N.
struct SubordinatedSpec
{
    std::variant<DriftInner, JumpLevySpec> inner;
    SubordinatorSpec subordinator;

    int dim() const;
};

struct ProcessSpec
{
    std::string id;
    std::string description;
    std::variant<JumpLevySpec, OrnsteinUhlenbeckSpec, PseudoPoissonSpec, SubordinatedSpec> kind;

    int dim() const;
    std::string kind_name() const;
    /// Throws SpecError on inconsistent parameters.
    void validate() const;
};

/// State-dependent characteristics of the process (not for subordinated specs).
StateTriplet process_triplet(const ProcessSpec& spec);
/// process_triplet(spec).at(x).
LocalTriplet effective_triplet(const ProcessSpec& spec, const Vec& x);

/**
 * Jump measure of a subordinated process when it has a closed form: a drift
 * inner motion under a stable subordinator gives the push-forward of the
 * stable measure along the velocity; finite-activity subordinators with a
 * drift inner motion give atoms on the velocity ray.
 */
std::optional<LevyMeasure> subordinated_jump_measure(const SubordinatedSpec& spec);

/// e^{-lambda t} sum_n (lambda t)^n / n! Q^n f(x) over a finite transition table.
/// n_terms = 0 picks the count automatically so the omitted Poisson tail is below 1e-12.
double pseudo_poisson_semigroup_exact(const ProcessSpec& spec, const TestFunction& f, const Vec& x, double t,
                                      int n_terms = 0);

}  // namespace fellerdep
