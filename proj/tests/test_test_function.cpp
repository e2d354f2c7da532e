#include "oracles.hpp"

#include "fellerdep/test_function.hpp"

#include <doctest.h>

using namespace fellerdep;

namespace
{
Vec random_point(Stream& s, int d, double spread = 3.0)
{
    Vec x(d);
    for (int i = 0; i < d; ++i)
        x[i] = spread * (2 * s.uniform() - 1);
    return x;
}

std::vector<TestFunction> catalogue()
{
    return {
        TestFunction::constant(3, 2.5),
        TestFunction::logistic(Vec{{1.0, 0.5, 0.0}}, 0.3, 1.7),
        TestFunction::logistic(Vec{{0.0, 2.0, 0.0}}, -1.0),
        TestFunction::logistic_product(3, {{0, 1.5, 0.2}, {2, 0.7, -0.4}}),
        TestFunction::linear(Vec{{1.0, -2.0, 0.5}}, 0.1),
        TestFunction::coordinate_product(3, {0, 2}),
        TestFunction::gaussian(Vec{{0.1, 0.2, -0.3}}, 1.3),
        TestFunction::logistic(Vec{{1.0, 1.0, 1.0}}, 0.0) * TestFunction::gaussian(Vec::Zero(3), 2.0),
    };
}
}  // namespace

TEST_CASE("analytic gradients match central differences")
{
    Stream s(21, 0);
    for (const auto& f : catalogue())
    {
        if (!f.smooth())
            continue;
        for (int k = 0; k < 20; ++k)
        {
            const Vec x = random_point(s, 3);
            const Vec g = f.gradient(x);
            const Vec fd = oracle::fd_gradient([&](const Eigen::VectorXd& y) { return f(y); }, x);
            CHECK((g - fd).norm() <= 1e-6 * std::max(1.0, g.norm()));
            for (int i = 0; i < 3; ++i)
            {
                const Vec hcol = f.hessian(x).col(i);
                const Vec fdcol =
                    oracle::fd_gradient([&](const Eigen::VectorXd& y) { return f.gradient(y)[i]; }, x);
                CHECK((hcol - fdcol).norm() <= 1e-5 * std::max(1.0, hcol.norm()));
            }
        }
    }
}

TEST_CASE("declared bounds are never underestimated on samples")
{
    Stream s(22, 0);
    for (const auto& f : catalogue())
    {
        if (!std::isfinite(f.sup_abs()))
            continue;
        for (int k = 0; k < 200; ++k)
        {
            const Vec x = random_point(s, 3, 6.0);
            CHECK(std::fabs(f(x)) <= f.sup_abs() + 1e-12);
            if (f.smooth() && std::isfinite(f.lipschitz()))
                CHECK(f.gradient(x).norm() <= f.lipschitz() + 1e-12);
            if (f.smooth() && std::isfinite(f.curvature()))
                CHECK(f.hessian(x).operatorNorm() <= f.curvature() + 1e-12);
        }
    }
}

TEST_CASE("monotone and supermodular flags are honest")
{
    Stream s(23, 0);
    const auto st = Standardization::identity(3);
    std::vector<TestFunction> fs = catalogue();
    for (const auto& p : monotone_pair_bank(3, 8, 5, st))
    {
        fs.push_back(p.f);
        fs.push_back(p.g);
    }
    for (const auto& f : supermodular_bank(3, 8, 5, st))
        fs.push_back(f);
    fs.push_back(TestFunction::upper_orthant(Vec{{0.0, 0.5, -0.5}}));
    fs.push_back(TestFunction::lower_orthant(Vec{{0.0, 0.5, -0.5}}));
    for (const auto& f : fs)
    {
        CAPTURE(f.id());
        for (int k = 0; k < 300; ++k)
        {
            const Vec x = random_point(s, 3);
            const Vec y = random_point(s, 3);
            if (f.monotone())
            {
                const Vec hi = x.cwiseMax(y);
                CHECK(f(hi) >= f(x) - 1e-12);
                if (f.smooth())
                    CHECK((f.gradient(x).array() >= -1e-12).all());
            }
            if (f.supermodular())
                CHECK(f(x.cwiseMin(y)) + f(x.cwiseMax(y)) >= f(x) + f(y) - 1e-12);
            if (f.nonnegative())
                CHECK(f(x) >= 0.0);
        }
    }
}

TEST_CASE("bank members are monotone, smooth and reproducible")
{
    const auto st = Standardization::identity(2);
    const auto a = monotone_pair_bank(2, 32, 99, st);
    const auto b = monotone_pair_bank(2, 32, 99, st);
    const auto c = monotone_pair_bank(2, 32, 100, st);
    REQUIRE(a.size() == 32);
    Stream s(24, 0);
    bool differs = false;
    for (std::size_t k = 0; k < a.size(); ++k)
    {
        CHECK(a[k].f.monotone());
        CHECK(a[k].g.monotone());
        CHECK(a[k].f.smooth());
        const Vec x = random_point(s, 2);
        CHECK(a[k].f(x) == b[k].f(x));
        CHECK(a[k].g(x) == b[k].g(x));
        differs = differs || a[k].f(x) != c[k].f(x);
    }
    CHECK(differs);
    for (const auto& p : supermodular_pair_bank(2, 8, 99, st))
    {
        CHECK(p.f.supermodular());
        CHECK(p.f.monotone());
        CHECK(p.g.supermodular());
    }
}

TEST_CASE("factory validation")
{
    CHECK_THROWS_AS(TestFunction::logistic(Vec::Zero(0), 0.0), PreconditionError);
    CHECK_THROWS_AS(TestFunction::logistic(Vec::Ones(2), 0.0, 0.0), PreconditionError);
    CHECK_THROWS_AS(TestFunction::logistic_product(2, {{0, 1, 0}, {0, 1, 0}}), PreconditionError);
    CHECK_THROWS_AS(TestFunction::logistic_product(2, {{3, 1, 0}}), PreconditionError);
    CHECK_THROWS_AS(TestFunction::coordinate_product(2, {-1}), PreconditionError);
    CHECK_THROWS_AS(TestFunction::gaussian(Vec::Zero(2), -1.0), PreconditionError);
    CHECK_THROWS_AS(TestFunction::constant(2, 0.0) * TestFunction::constant(3, 0.0), PreconditionError);
}

TEST_CASE("orthant indicators use strict upper and closed lower sets")
{
    const auto up = TestFunction::upper_orthant(Vec{{0.0, 1.0}});
    const auto lo = TestFunction::lower_orthant(Vec{{0.0, 1.0}});
    CHECK(up(Vec{{0.1, 1.1}}) == 1.0);
    CHECK(up(Vec{{0.0, 1.1}}) == 0.0);
    CHECK(lo(Vec{{0.0, 1.0}}) == 1.0);
    CHECK(lo(Vec{{0.0, 1.01}}) == 0.0);
    CHECK_FALSE(up.smooth());
}

TEST_CASE("standardization from samples")
{
    Mat m(5, 2);
    m << 1, 7, 2, 7, 3, 7, 4, 7, 100, 7;
    const auto st = Standardization::from_samples(m);
    CHECK(st.centre[0] == 3.0);
    CHECK(st.scale[0] == doctest::Approx(2.0 / 1.349));
    CHECK(st.centre[1] == 7.0);
    CHECK(st.scale[1] == 1.0);
}
