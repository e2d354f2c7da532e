#include "fellerdep/presets.hpp"

#include <fmt/format.h>

namespace fellerdep
{
namespace
{
Vec vec(std::initializer_list<double> v)
{
    Vec out(static_cast<Eigen::Index>(v.size()));
    Eigen::Index i = 0;
    for (double x : v)
        out[i++] = x;
    return out;
}

JumpLevySpec atoms_levy(int d, double rate, std::vector<Atom> atoms)
{
    return {Vec::Zero(d), rate, AtomicLaw(d, std::move(atoms))};
}

constexpr int birth_death_top = 10;

ProcessSpec build(const std::string& name)
{
    ProcessSpec s;
    s.id = name;
    s.description = preset_info(name).description;
    if (name == "poisson_1d")
        s.kind = atoms_levy(1, 1.0, {{vec({1.0}), 1.0}});
    else if (name == "diagonal_levy")
        s.kind = atoms_levy(2, 1.0, {{vec({1.0, 1.0}), 1.0}});
    else if (name == "antidiagonal_levy")
        s.kind = atoms_levy(2, 1.0, {{vec({1.0, -1.0}), 1.0}});
    else if (name == "antidiagonal_levy_3d")
        s.kind = atoms_levy(3, 1.0, {{vec({1.0, 1.0, -1.0}), 1.0}});
    else if (name == "orthant_levy_mixed")
        s.kind = atoms_levy(2, 2.0,
                            {{vec({1.0, 1.0}), 0.5}, {vec({-0.5, -1.0}), 0.3}, {vec({0.7, 0.0}), 0.2}});
    else if (name == "ou_poisson_driver")
        s.kind = OrnsteinUhlenbeckSpec{1.0, atoms_levy(2, 1.0, {{vec({1.0, 1.0}), 1.0}})};
    else if (name == "pseudo_poisson_2state")
    {
        TransitionTable t{{vec({0.0}), vec({1.0})}, Mat(2, 2)};
        t.matrix << 0.0, 1.0, 0.0, 1.0;
        s.kind = PseudoPoissonSpec{1.0, MarkovKernel::from_table(std::move(t))};
    }
    else if (name == "pseudo_poisson_birth_death")
    {
        const int n = birth_death_top + 1;
        TransitionTable t;
        t.matrix = Mat::Zero(n, n);
        for (int i = 0; i < n; ++i)
        {
            t.states.push_back(vec({static_cast<double>(i)}));
            t.matrix(i, std::min(i + 1, n - 1)) += 0.4;
            t.matrix(i, std::max(i - 1, 0)) += 0.3;
            t.matrix(i, i) += 0.3;
        }
        s.kind = PseudoPoissonSpec{2.0, MarkovKernel::from_table(std::move(t))};
    }
    else if (name == "pseudo_poisson_translation")
        s.kind = PseudoPoissonSpec{1.0, MarkovKernel::translation(ParametricLaw::exponential_ray(vec({1.0, 1.0}), 1.0))};
    else if (name == "alpha_stable_subordinated")
    {
        SubordinatorSpec n;
        n.alpha = 0.5;
        s.kind = SubordinatedSpec{DriftInner{vec({1.0})}, n};
    }
    else if (name == "subordinated_diagonal_levy")
    {
        SubordinatorSpec n;
        n.alpha = 0.5;
        s.kind = SubordinatedSpec{atoms_levy(2, 1.0, {{vec({1.0, 1.0}), 1.0}}), n};
    }
    else
        throw SpecError(fmt::format("unknown preset '{}'", name));
    s.validate();
    return s;
}
}  // namespace

const std::vector<PresetInfo>& preset_catalog()
{
    static const std::vector<PresetInfo> catalog = {
        {"poisson_1d", "jump_levy", "Poisson process, rate 1, unit jumps", vec({0.0})},
        {"diagonal_levy", "jump_levy", "compound Poisson in R^2, rate 1, jumps (1,1); satisfies the orthant condition",
         vec({0.0, 0.0})},
        {"antidiagonal_levy", "jump_levy", "compound Poisson in R^2, rate 1, jumps (1,-1); violates the orthant condition",
         vec({0.0, 0.0})},
        {"antidiagonal_levy_3d", "jump_levy", "compound Poisson in R^3, rate 1, jumps (1,1,-1)", vec({0.0, 0.0, 0.0})},
        {"orthant_levy_mixed", "jump_levy",
         "compound Poisson in R^2, rate 2, jumps (1,1), (-0.5,-1), (0.7,0); all in the closed orthants",
         vec({0.0, 0.0})},
        {"ou_poisson_driver", "ornstein_uhlenbeck",
         "Levy-driven Ornstein-Uhlenbeck process (Langevin equation), mean reversion 1, Poisson driver with jumps (1,1)",
         vec({0.0, 0.0})},
        {"pseudo_poisson_2state", "pseudo_poisson",
         "Feller pseudo-Poisson process on {0,1}, kernel q(x,.) = delta_1, clock rate 1", vec({0.0})},
        {"pseudo_poisson_birth_death", "pseudo_poisson",
         "pseudo-Poisson birth-death chain on {0..10}: up 0.4, down 0.3, stay 0.3, clock rate 2", vec({5.0})},
        {"pseudo_poisson_translation", "pseudo_poisson",
         "pseudo-Poisson translation kernel x -> x + E(1,1), E ~ Exp(1), clock rate 1", vec({0.0, 0.0})},
        {"alpha_stable_subordinated", "subordinated",
         "unit drift in R^1 time-changed by a 1/2-stable subordinator (Bochner subordination)", vec({0.0})},
        {"subordinated_diagonal_levy", "subordinated",
         "diagonal compound Poisson in R^2 time-changed by a 1/2-stable subordinator", vec({0.0, 0.0})},
    };
    return catalog;
}

bool has_preset(const std::string& name)
{
    for (const auto& p : preset_catalog())
        if (p.name == name)
            return true;
    return false;
}

const PresetInfo& preset_info(const std::string& name)
{
    for (const auto& p : preset_catalog())
        if (p.name == name)
            return p;
    throw SpecError(fmt::format("unknown preset '{}'", name));
}

ProcessSpec make_preset(const std::string& name)
{
    return build(name);
}

}  // namespace fellerdep
