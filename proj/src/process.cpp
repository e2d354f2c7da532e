#include "fellerdep/process.hpp"

#include <fmt/format.h>

#include <cmath>

namespace fellerdep
{
LevyMeasure JumpLevySpec::measure() const
{
    if (rate == 0.0)
        return LevyMeasure::zero(dim());
    return LevyMeasure(FiniteActivity{rate, law});
}

Vec JumpLevySpec::velocity() const
{
    return drift - small_jump_mean(measure());
}

std::size_t TransitionTable::index_of(const Vec& x) const
{
    for (std::size_t i = 0; i < states.size(); ++i)
        if (states[i].size() == x.size() && (states[i] - x).norm() <= 1e-12 * (1.0 + x.norm()))
            return i;
    throw PreconditionError("state is not listed in the transition table");
}

MarkovKernel MarkovKernel::from_table(TransitionTable table)
{
    const auto n = static_cast<Eigen::Index>(table.states.size());
    if (n == 0)
        throw SpecError("transition table has no states");
    if (table.matrix.rows() != n || table.matrix.cols() != n)
        throw SpecError(fmt::format("transition matrix must be {}x{}", n, n));
    const int d = static_cast<int>(table.states.front().size());
    for (const auto& s : table.states)
        if (s.size() != d)
            throw SpecError("transition table states have inconsistent dimensions");
    for (Eigen::Index i = 0; i < n; ++i)
    {
        if ((table.matrix.row(i).array() < 0.0).any())
            throw SpecError("transition matrix has negative entries");
        if (std::fabs(table.matrix.row(i).sum() - 1.0) > 1e-9)
            throw SpecError(fmt::format("transition matrix row {} does not sum to 1", i));
    }

    // cumulative rows for sampling
    auto shared = std::make_shared<const TransitionTable>(table);
    Mat cdf = table.matrix;
    for (Eigen::Index i = 0; i < n; ++i)
        for (Eigen::Index j = 1; j < n; ++j)
            cdf(i, j) += cdf(i, j - 1);

    MarkovKernel k;
    k.dim = d;
    k.table = std::move(table);
    k.sample = [shared, cdf](const Vec& x, Stream& rng) -> Vec {
        const auto i = static_cast<Eigen::Index>(shared->index_of(x));
        const double u = rng.uniform() * cdf(i, cdf.cols() - 1);
        Eigen::Index j = 0;
        while (j + 1 < cdf.cols() && u >= cdf(i, j))
            ++j;
        return shared->states[static_cast<std::size_t>(j)];
    };
    k.displacement = [shared](const Vec& x) -> Displacement {
        const std::size_t i = shared->index_of(x);
        std::vector<Atom> atoms;
        double move = 0.0;
        for (std::size_t j = 0; j < shared->states.size(); ++j)
        {
            const double p = shared->matrix(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j));
            const Vec z = shared->states[j] - x;
            if (p > 0.0 && !z.isZero(0.0))
            {
                atoms.push_back({z, p});
                move += p;
            }
        }
        Displacement out;
        out.move_probability = move;
        if (move > 0.0)
        {
            for (auto& a : atoms)
                a.weight /= move;
            out.law = AtomicLaw(static_cast<int>(x.size()), std::move(atoms));
        }
        return out;
    };
    return k;
}

MarkovKernel MarkovKernel::translation(JumpLaw law)
{
    MarkovKernel k;
    k.dim = law_dim(law);
    k.sample = [law](const Vec& x, Stream& rng) -> Vec { return x + sample_jump(law, rng); };
    k.displacement = [law](const Vec&) { return Displacement{1.0, law}; };
    return k;
}

double SubordinatorSpec::bernstein(double u) const
{
    double value = drift * u;
    if (alpha)
        value += std::pow(u, *alpha);
    if (jumps)
        for (const auto& a : jumps->atoms())
            value += rate * a.weight * (1.0 - std::exp(-u * a.point[0]));
    return value;
}

int SubordinatedSpec::dim() const
{
    if (const auto* d = std::get_if<DriftInner>(&inner))
        return static_cast<int>(d->velocity.size());
    return std::get<JumpLevySpec>(inner).dim();
}

int ProcessSpec::dim() const
{
    return std::visit([](const auto& k) { return k.dim(); }, kind);
}

std::string ProcessSpec::kind_name() const
{
    switch (kind.index())
    {
    case 0: return "jump_levy";
    case 1: return "ornstein_uhlenbeck";
    case 2: return "pseudo_poisson";
    default: return "subordinated";
    }
}

namespace
{
void validate_levy(const JumpLevySpec& s, const std::string& what)
{
    if (s.drift.size() < 1)
        throw SpecError(what + ": drift must have at least one component");
    if (!(s.rate >= 0.0) || !std::isfinite(s.rate))
        throw SpecError(what + ": rate must be finite and nonnegative");
    if (s.rate > 0.0 && law_dim(s.law) != s.dim())
        throw SpecError(fmt::format("{}: jump law has dimension {}, drift has {}", what, law_dim(s.law), s.dim()));
    if (s.rate > 0.0)
        if (const auto* a = std::get_if<AtomicLaw>(&s.law); a && a->atoms().empty())
            throw SpecError(what + ": positive rate needs at least one atom");
}
}  // namespace

void ProcessSpec::validate() const
{
    if (const auto* j = std::get_if<JumpLevySpec>(&kind))
        validate_levy(*j, "jump_levy");
    else if (const auto* ou = std::get_if<OrnsteinUhlenbeckSpec>(&kind))
    {
        if (!(ou->mean_reversion > 0.0) || !std::isfinite(ou->mean_reversion))
            throw SpecError("ornstein_uhlenbeck: mean_reversion must be positive");
        validate_levy(ou->driver, "ornstein_uhlenbeck driver");
    }
    else if (const auto* pp = std::get_if<PseudoPoissonSpec>(&kind))
    {
        if (!(pp->rate > 0.0) || !std::isfinite(pp->rate))
            throw SpecError("pseudo_poisson: rate must be positive");
        if (!pp->kernel.sample || !pp->kernel.displacement)
            throw SpecError("pseudo_poisson: kernel needs a sampler and a displacement law");
    }
    else
    {
        const auto& sub = std::get<SubordinatedSpec>(kind);
        if (const auto* d = std::get_if<DriftInner>(&sub.inner))
        {
            if (d->velocity.size() < 1)
                throw SpecError("subordinated: inner velocity must have at least one component");
        }
        else
            validate_levy(std::get<JumpLevySpec>(sub.inner), "subordinated inner");
        const auto& n = sub.subordinator;
        if (!(n.drift >= 0.0))
            throw SpecError("subordinator drift must be nonnegative");
        if (n.alpha && !(*n.alpha > 0.0 && *n.alpha < 1.0))
            throw SpecError("subordinator alpha must lie in (0,1)");
        if (n.alpha && n.jumps)
            throw SpecError("subordinator: give either alpha or a finite jump law, not both");
        if (n.jumps)
        {
            if (!(n.rate >= 0.0))
                throw SpecError("subordinator rate must be nonnegative");
            if (n.jumps->dim() != 1)
                throw SpecError("subordinator jumps must be one-dimensional");
            for (const auto& a : n.jumps->atoms())
                if (!(a.point[0] > 0.0))
                    throw SpecError("subordinator jumps must be positive");
        }
    }
}

StateTriplet process_triplet(const ProcessSpec& spec)
{
    spec.validate();
    if (const auto* j = std::get_if<JumpLevySpec>(&spec.kind))
        return StateTriplet::constant(j->drift, Mat(), j->measure());
    if (const auto* ou = std::get_if<OrnsteinUhlenbeckSpec>(&spec.kind))
        return StateTriplet::linear_drift(ou->driver.drift, ou->mean_reversion, Mat(), ou->driver.measure());
    if (const auto* pp = std::get_if<PseudoPoissonSpec>(&spec.kind))
    {
        const double rate = pp->rate;
        const MarkovKernel kernel = pp->kernel;
        const int d = kernel.dim;
        auto jumps = [rate, kernel, d](const Vec& x) -> LevyMeasure {
            const auto disp = kernel.displacement(x);
            if (disp.move_probability == 0.0 || !disp.law)
                return LevyMeasure::zero(d);
            return LevyMeasure(FiniteActivity{rate * disp.move_probability, *disp.law});
        };
        // b(x) = \int z chi(z) nu(x, dz) makes the compensator cancel
        auto drift = [jumps](const Vec& x) -> Vec { return small_jump_mean(jumps(x)); };
        return StateTriplet(d, drift, {}, jumps, true);
    }
    throw SpecError("subordinated processes have no closed-form triplet");
}

LocalTriplet effective_triplet(const ProcessSpec& spec, const Vec& x)
{
    return process_triplet(spec).at(x);
}

std::optional<LevyMeasure> subordinated_jump_measure(const SubordinatedSpec& spec)
{
    const auto* inner = std::get_if<DriftInner>(&spec.inner);
    if (!inner)
        return std::nullopt;
    const Vec& v = inner->velocity;
    const int d = static_cast<int>(v.size());
    if (v.isZero(0.0))
        return LevyMeasure::zero(d);
    const auto& n = spec.subordinator;
    if (n.alpha)
        return LevyMeasure(AlphaStableSubordinator{*n.alpha, 1e-10, v});
    if (n.jumps && n.rate > 0.0)
    {
        std::vector<Atom> atoms;
        for (const auto& a : n.jumps->atoms())
            atoms.push_back({a.point[0] * v, a.weight});
        return LevyMeasure::atoms(n.rate, d, std::move(atoms));
    }
    return LevyMeasure::zero(d);
}

double pseudo_poisson_semigroup_exact(const ProcessSpec& spec, const TestFunction& f, const Vec& x, double t,
                                      int n_terms)
{
    const auto* pp = std::get_if<PseudoPoissonSpec>(&spec.kind);
    if (!pp)
        throw PreconditionError("series semigroup needs a pseudo-Poisson spec");
    if (!(t >= 0.0))
        throw PreconditionError("time must be nonnegative");
    if (t == 0.0)
        return f(x);
    if (!pp->kernel.table)
        throw PreconditionError(
            "kernel has no finite transition table; estimate the semigroup by simulation instead");
    const auto& table = *pp->kernel.table;
    const auto i0 = static_cast<Eigen::Index>(table.index_of(x));
    const double m = pp->rate * t;

    auto log_pmf = [m](int n) { return -m + n * std::log(m) - std::lgamma(n + 1.0); };
    // tail beyond n, valid once n + 2 > m: p_{n+1} / (1 - m/(n+2))
    auto tail_after = [&](int n) {
        const double ratio = m / (n + 2.0);
        if (ratio >= 1.0)
            return 1.0;
        return std::exp(log_pmf(n + 1)) / (1.0 - ratio);
    };
    int last = 0;
    if (n_terms <= 0)
    {
        while (tail_after(last) >= 1e-12)
            ++last;
    }
    else
    {
        last = n_terms - 1;
        if (tail_after(last) >= 1e-12)
            throw PreconditionError(
                fmt::format("{} terms leave a Poisson tail of {:.3g}, above 1e-12", n_terms, tail_after(last)));
    }

    Vec v(static_cast<Eigen::Index>(table.states.size()));
    for (std::size_t i = 0; i < table.states.size(); ++i)
        v[static_cast<Eigen::Index>(i)] = f(table.states[i]);
    double sum = 0.0;
    double comp = 0.0;
    for (int n = 0; n <= last; ++n)
    {
        const double term = std::exp(log_pmf(n)) * v[i0];
        // Neumaier summation
        const double s = sum + term;
        comp += std::fabs(sum) >= std::fabs(term) ? (sum - s) + term : (term - s) + sum;
        sum = s;
        v = table.matrix * v;
    }
    return sum + comp;
}

}  // namespace fellerdep
