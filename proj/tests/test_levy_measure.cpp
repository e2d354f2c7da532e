#include "oracles.hpp"

#include "fellerdep/levy_measure.hpp"

#include <doctest.h>

#include <numbers>

using namespace fellerdep;

namespace
{
Vec v2(double a, double b)
{
    return Vec{{a, b}};
}
const double inf = std::numeric_limits<double>::infinity();
}  // namespace

TEST_CASE("cut-off is the indicator of the punctured open unit ball")
{
    CHECK(cutoff(v2(0, 0)) == 0.0);
    CHECK(cutoff(v2(0.5, 0)) == 1.0);
    CHECK(cutoff(v2(0.6, 0.79)) == 1.0);
    CHECK(cutoff(v2(0.6, 0.8)) == 0.0);
    CHECK(cutoff(v2(1, 0)) == 0.0);
    CHECK(cutoff(v2(3, -4)) == 0.0);
}

TEST_CASE("atomic laws validate their atoms")
{
    CHECK_THROWS_AS(AtomicLaw(2, {{v2(0, 0), 1.0}}), SpecError);
    CHECK_THROWS_AS(AtomicLaw(2, {{v2(1, 0), 0.4}}), SpecError);
    CHECK_THROWS_AS(AtomicLaw(2, {{v2(1, 0), -0.5}, {v2(0, 1), 1.5}}), SpecError);
    CHECK_THROWS_AS(AtomicLaw(1, {{v2(1, 0), 1.0}}), SpecError);
    CHECK_NOTHROW(AtomicLaw(2, {{v2(1, 0), 0.25}, {v2(0, 1), 0.75}}));
}

TEST_CASE("atomic sampling reproduces the weights")
{
    AtomicLaw law(2, {{v2(1, 1), 0.7}, {v2(-1, -1), 0.2}, {v2(1, -1), 0.1}});
    Stream s(11, 0);
    const int n = 100000;
    int first = 0, last = 0;
    for (int i = 0; i < n; ++i)
    {
        const Vec y = law.sample(s);
        first += y == v2(1, 1);
        last += y == v2(1, -1);
    }
    CHECK(std::fabs(first / double(n) - 0.7) < 4 * std::sqrt(0.21 / n));
    CHECK(std::fabs(last / double(n) - 0.1) < 4 * std::sqrt(0.09 / n));
}

TEST_CASE("measure validation")
{
    CHECK_THROWS_AS(LevyMeasure(FiniteActivity{-1.0, AtomicLaw(1, {{Vec::Ones(1), 1.0}})}), SpecError);
    CHECK_THROWS_AS(LevyMeasure(AlphaStableSubordinator{1.5, 1e-10, Vec::Ones(1)}), SpecError);
    CHECK_THROWS_AS(LevyMeasure(AlphaStableSubordinator{0.5, 0.0, Vec::Ones(1)}), SpecError);
    CHECK_THROWS_AS(LevyMeasure(AlphaStableSubordinator{0.5, 1e-10, Vec::Zero(1)}), SpecError);
    CHECK(LevyMeasure::zero(3).is_zero());
    CHECK(LevyMeasure::zero(3).total_mass() == 0.0);
    CHECK(std::isinf(LevyMeasure(AlphaStableSubordinator{0.5, 1e-10, Vec::Ones(1)}).total_mass()));
}

TEST_CASE("rectangles")
{
    Rectangle r{v2(0.5, -inf), v2(inf, -0.5)};
    CHECK(r.contains(v2(1, -1)));
    CHECK_FALSE(r.contains(v2(0.5, -1)));
    CHECK(r.on_boundary(v2(0.5, -1)));
    CHECK_FALSE(r.on_boundary(v2(1, -1)));
    CHECK(r.distance_from_origin() == doctest::Approx(std::sqrt(0.5)));
    Rectangle touching{v2(0, 0), v2(1, 1)};
    CHECK(touching.distance_from_origin() == 0.0);
}

TEST_CASE("atomic integrals are exact sums")
{
    const auto nu = LevyMeasure::atoms(2.0, 2, {{v2(1, 1), 0.5}, {v2(0.5, 0), 0.5}});
    std::function<double(const Vec&)> h = [](const Vec& y) { return y.squaredNorm(); };
    const auto r = integrate_measure(nu, h, 1.0);
    CHECK(r.exact);
    CHECK(r.value == doctest::Approx(2.0 * (0.5 * 2 + 0.5 * 0.25)));
    const Vec m = small_jump_mean(nu);
    CHECK(m[0] == doctest::Approx(0.5));
    CHECK(m[1] == 0.0);
    CHECK(region_mass(nu, {v2(0.75, 0.75), v2(inf, inf)}).value == doctest::Approx(1.0));
}

TEST_CASE("stable subordinator tail masses are closed form")
{
    const LevyMeasure nu(AlphaStableSubordinator{0.5, 1e-10, Vec::Ones(1)});
    const Rectangle tail{Vec::Constant(1, 1.0), Vec::Constant(1, inf)};
    CHECK(region_mass(nu, tail).value == doctest::Approx(1.0 / std::sqrt(std::numbers::pi)).epsilon(1e-14));
    const Rectangle tail4{Vec::Constant(1, 4.0), Vec::Constant(1, inf)};
    CHECK(region_mass(nu, tail4).value == doctest::Approx(0.5 / std::sqrt(std::numbers::pi)).epsilon(1e-14));

    // tail integral by quadrature agrees with the closed form
    std::function<double(const Vec&)> h = [](const Vec& y) { return y[0] > 1.0 ? 1.0 : 0.0; };
    const auto r = integrate_measure(nu, h, 0.0);
    CHECK(std::fabs(r.value - 1.0 / std::sqrt(std::numbers::pi)) < 1e-9);

    // the push-forward along a direction scales the tail by |v|^alpha per coordinate crossing
    const LevyMeasure diag(AlphaStableSubordinator{0.5, 1e-10, v2(2, 1)});
    const Rectangle box{v2(1, 0.5), v2(inf, inf)};
    CHECK(region_mass(diag, box).value == doctest::Approx(std::pow(0.5, -0.5) / std::sqrt(std::numbers::pi)));
}

TEST_CASE("stable subordinator compensated Laplace integral matches the Bernstein function")
{
    // \int (e^{-u s} - 1 + u s chi(s)) nu(ds) = -u^{1/2} + u / sqrt(pi)  for alpha = 1/2
    const LevyMeasure nu(AlphaStableSubordinator{0.5, 1e-10, Vec::Ones(1)});
    for (double u : {0.3, 1.0, 2.5, 7.0})
    {
        CAPTURE(u);
        std::function<double(const Vec&)> h = [u](const Vec& y) {
            return std::exp(-u * y[0]) - 1.0 + u * y[0] * cutoff(y);
        };
        QuadOptions opt;
        opt.abs_tol = 1e-9;
        const auto r = integrate_measure(nu, h, 0.5 * u * u, opt);
        CHECK(std::fabs(r.value - (-std::sqrt(u) + u / std::sqrt(std::numbers::pi))) < 1e-9);
        CHECK(r.truncation_bound > 0.0);
    }
    const Vec m = small_jump_mean(nu);
    CHECK(m[0] == doctest::Approx(1.0 / std::sqrt(std::numbers::pi)).epsilon(1e-14));
}

TEST_CASE("stable truncation error is reported, never dropped")
{
    const LevyMeasure nu(AlphaStableSubordinator{0.5, 1e-2, Vec::Ones(1)});
    std::function<double(const Vec&)> h = [](const Vec& y) { return y[0] * y[0] / (1 + y[0] * y[0]); };
    QuadOptions opt;
    opt.abs_tol = 1e-10;
    CHECK_THROWS_AS(integrate_measure(nu, h, 1.0, opt), QuadratureError);
}

TEST_CASE("exponential ray law")
{
    const auto law = ParametricLaw::exponential_ray(v2(1, 1), 1.0);
    const LevyMeasure nu(FiniteActivity{3.0, law});
    const auto m = region_mass(nu, {v2(0.5, 0.5), v2(inf, inf)});
    CHECK(std::fabs(m.value - 3.0 * std::exp(-0.5)) < 1e-8);
    // \int y_1 chi(y) nu(dy) = 3 \int_0^{1/sqrt2} s e^{-s} ds
    const double c = 1.0 / std::sqrt(2.0);
    const double expected = 3.0 * (1.0 - (1.0 + c) * std::exp(-c));
    const Vec sm = small_jump_mean(nu);
    CHECK(std::fabs(sm[0] - expected) < 1e-8);
    CHECK(std::fabs(sm[1] - expected) < 1e-8);
    CHECK(offorthant_mass(nu).mass == 0.0);
}

TEST_CASE("off-orthant mass")
{
    SUBCASE("one dimension is always zero")
    {
        CHECK(offorthant_mass(LevyMeasure::atoms(3.0, 1, {{Vec::Constant(1, -1.0), 1.0}})).mass == 0.0);
    }
    SUBCASE("finite support sums the off-orthant weights")
    {
        const auto nu = LevyMeasure::atoms(2.0, 2, {{v2(1, 1), 0.7}, {v2(-1, -1), 0.2}, {v2(1, -1), 0.1}});
        const auto m = offorthant_mass(nu);
        CHECK(m.exact);
        CHECK(m.mass == doctest::Approx(0.2).epsilon(1e-15));
    }
    SUBCASE("axes belong to the closed orthants")
    {
        CHECK(in_closed_orthants(v2(1, 0)));
        CHECK(in_closed_orthants(v2(0, -2)));
        CHECK_FALSE(in_closed_orthants(v2(-1e-300, 1)));
        CHECK(offorthant_mass(LevyMeasure::atoms(1.0, 2, {{v2(1, 0), 0.5}, {v2(0, -1), 0.5}})).mass == 0.0);
    }
    SUBCASE("parametric laws are estimated")
    {
        // jumps E * (1, -1) with probability 1: all mass off the orthants
        const LevyMeasure nu(FiniteActivity{5.0, ParametricLaw::exponential_ray(v2(1, -1), 2.0)});
        const auto m = offorthant_mass(nu, 3, 20000);
        CHECK(m.mass == doctest::Approx(5.0));
    }
}
