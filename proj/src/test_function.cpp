#include "fellerdep/test_function.hpp"

#include <fmt/format.h>

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

namespace fellerdep
{
namespace
{
constexpr double inf = std::numeric_limits<double>::infinity();
// max |sigma''| = 1/(6 sqrt 3)
constexpr double logistic_curvature = 0.0962250448649376;

double sigmoid(double z)
{
    if (z >= 0.0)
        return 1.0 / (1.0 + std::exp(-z));
    const double e = std::exp(z);
    return e / (1.0 + e);
}
}  // namespace

namespace detail
{
struct FunctionImpl
{
    virtual ~FunctionImpl() = default;

    int dim = 0;
    FunctionKind kind = FunctionKind::constant;
    bool smooth = false;
    bool monotone = false;
    bool supermodular = false;
    bool nonnegative = false;
    double sup_abs = inf;
    double lipschitz = inf;
    double curvature = inf;

    virtual double value(const Vec& x) const = 0;
    virtual Vec gradient(const Vec&) const { throw PreconditionError("test function has no analytic gradient"); }
    virtual Mat hessian(const Vec&) const { throw PreconditionError("test function has no analytic Hessian"); }
};

namespace
{
struct ConstantFn final : FunctionImpl
{
    double c;
    ConstantFn(int d, double value) : c(value)
    {
        dim = d;
        kind = FunctionKind::constant;
        smooth = monotone = supermodular = true;
        nonnegative = value >= 0.0;
        sup_abs = std::fabs(value);
        lipschitz = curvature = 0.0;
    }
    double value(const Vec&) const override { return c; }
    Vec gradient(const Vec&) const override { return Vec::Zero(dim); }
    Mat hessian(const Vec&) const override { return Mat::Zero(dim, dim); }
};

struct LogisticFn final : FunctionImpl
{
    Vec w;
    double shift;
    double scale;
    LogisticFn(Vec weights, double c, double s) : w(std::move(weights)), shift(c), scale(s)
    {
        dim = static_cast<int>(w.size());
        kind = FunctionKind::logistic;
        smooth = nonnegative = true;
        monotone = (w.array() >= 0.0).all();
        // sigma of a linear form: supermodular iff all weights share a sign
        // is false in general; only claimed when at most one weight is nonzero.
        supermodular = (w.array() != 0.0).count() <= 1 && monotone;
        sup_abs = 1.0;
        lipschitz = w.norm() / (4.0 * s);
        curvature = logistic_curvature * w.squaredNorm() / (s * s);
    }
    double z(const Vec& x) const { return w.dot(x) / scale - shift; }
    double value(const Vec& x) const override { return sigmoid(z(x)); }
    Vec gradient(const Vec& x) const override
    {
        const double s = sigmoid(z(x));
        return (s * (1.0 - s) / scale) * w;
    }
    Mat hessian(const Vec& x) const override
    {
        const double s = sigmoid(z(x));
        const double d2 = s * (1.0 - s) * (1.0 - 2.0 * s);
        return (d2 / (scale * scale)) * (w * w.transpose());
    }
};

struct LogisticProductFn final : FunctionImpl
{
    std::vector<TestFunction::Factor> factors;
    LogisticProductFn(int d, std::vector<TestFunction::Factor> fs) : factors(std::move(fs))
    {
        dim = d;
        kind = FunctionKind::logistic_product;
        smooth = nonnegative = supermodular = true;
        monotone = std::all_of(factors.begin(), factors.end(), [](const auto& f) { return f.slope >= 0.0; });
        supermodular = monotone;
        sup_abs = 1.0;
        double l2 = 0.0, c2 = 0.0;
        for (const auto& a : factors)
        {
            l2 += a.slope * a.slope / 16.0;
            c2 += std::pow(logistic_curvature * a.slope * a.slope, 2);
            for (const auto& b : factors)
                if (&a != &b)
                    c2 += std::pow(a.slope * b.slope / 16.0, 2);
        }
        lipschitz = std::sqrt(l2);
        curvature = std::sqrt(c2);
    }
    double value(const Vec& x) const override
    {
        double p = 1.0;
        for (const auto& f : factors)
            p *= sigmoid(f.slope * x[f.index] - f.shift);
        return p;
    }
    Vec gradient(const Vec& x) const override
    {
        const std::size_t m = factors.size();
        std::vector<double> s(m), ds(m);
        for (std::size_t k = 0; k < m; ++k)
        {
            s[k] = sigmoid(factors[k].slope * x[factors[k].index] - factors[k].shift);
            ds[k] = factors[k].slope * s[k] * (1.0 - s[k]);
        }
        Vec g = Vec::Zero(dim);
        for (std::size_t k = 0; k < m; ++k)
        {
            double others = 1.0;
            for (std::size_t j = 0; j < m; ++j)
                if (j != k)
                    others *= s[j];
            g[factors[k].index] += ds[k] * others;
        }
        return g;
    }
    Mat hessian(const Vec& x) const override
    {
        const std::size_t m = factors.size();
        std::vector<double> s(m), ds(m), d2s(m);
        for (std::size_t k = 0; k < m; ++k)
        {
            const double a = factors[k].slope;
            s[k] = sigmoid(a * x[factors[k].index] - factors[k].shift);
            ds[k] = a * s[k] * (1.0 - s[k]);
            d2s[k] = a * a * s[k] * (1.0 - s[k]) * (1.0 - 2.0 * s[k]);
        }
        Mat h = Mat::Zero(dim, dim);
        for (std::size_t k = 0; k < m; ++k)
            for (std::size_t l = 0; l < m; ++l)
            {
                double others = 1.0;
                for (std::size_t j = 0; j < m; ++j)
                    if (j != k && j != l)
                        others *= s[j];
                const double term = (k == l) ? d2s[k] * others : ds[k] * ds[l] * others;
                h(factors[k].index, factors[l].index) += term;
            }
        return h;
    }
};

struct OrthantFn final : FunctionImpl
{
    Vec t;
    bool upper;
    OrthantFn(Vec thresholds, bool up) : t(std::move(thresholds)), upper(up)
    {
        dim = static_cast<int>(t.size());
        kind = up ? FunctionKind::upper_orthant : FunctionKind::lower_orthant;
        monotone = up;
        // both indicators are supermodular (lattice indicator of a sublattice)
        supermodular = true;
        nonnegative = true;
        sup_abs = 1.0;
    }
    double value(const Vec& x) const override
    {
        for (int i = 0; i < dim; ++i)
        {
            const bool hit = upper ? (x[i] > t[i]) : (x[i] <= t[i]);
            if (!hit)
                return 0.0;
        }
        return 1.0;
    }
};

struct LinearFn final : FunctionImpl
{
    Vec w;
    double offset;
    LinearFn(Vec weights, double c) : w(std::move(weights)), offset(c)
    {
        dim = static_cast<int>(w.size());
        kind = FunctionKind::linear;
        smooth = supermodular = true;
        monotone = (w.array() >= 0.0).all();
        lipschitz = w.norm();
        curvature = 0.0;
    }
    double value(const Vec& x) const override { return w.dot(x) + offset; }
    Vec gradient(const Vec&) const override { return w; }
    Mat hessian(const Vec&) const override { return Mat::Zero(dim, dim); }
};

struct CoordinateProductFn final : FunctionImpl
{
    std::vector<int> idx;
    CoordinateProductFn(int d, std::vector<int> indices) : idx(std::move(indices))
    {
        dim = d;
        kind = FunctionKind::coordinate_product;
        smooth = true;
        // mixed partials are products of the remaining coordinates
        supermodular = idx.size() <= 2;
    }
    double value(const Vec& x) const override
    {
        double p = 1.0;
        for (int i : idx)
            p *= x[i];
        return p;
    }
    Vec gradient(const Vec& x) const override
    {
        Vec g = Vec::Zero(dim);
        for (std::size_t k = 0; k < idx.size(); ++k)
        {
            double p = 1.0;
            for (std::size_t j = 0; j < idx.size(); ++j)
                if (j != k)
                    p *= x[idx[j]];
            g[idx[k]] += p;
        }
        return g;
    }
    Mat hessian(const Vec& x) const override
    {
        Mat h = Mat::Zero(dim, dim);
        for (std::size_t k = 0; k < idx.size(); ++k)
            for (std::size_t l = 0; l < idx.size(); ++l)
            {
                if (k == l)
                    continue;
                double p = 1.0;
                for (std::size_t j = 0; j < idx.size(); ++j)
                    if (j != k && j != l)
                        p *= x[idx[j]];
                h(idx[k], idx[l]) += p;
            }
        return h;
    }
};

struct ClippedFn final : FunctionImpl
{
    int index;
    double cap;
    ClippedFn(int d, int i, double c) : index(i), cap(c)
    {
        dim = d;
        kind = FunctionKind::clipped;
        monotone = supermodular = true;
        lipschitz = 1.0;
    }
    double value(const Vec& x) const override { return std::min(x[index], cap); }
};

struct GaussianFn final : FunctionImpl
{
    Vec c;
    double width;
    GaussianFn(Vec centre, double w) : c(std::move(centre)), width(w)
    {
        dim = static_cast<int>(c.size());
        kind = FunctionKind::gaussian;
        smooth = nonnegative = true;
        sup_abs = 1.0;
        lipschitz = std::exp(-0.5) / w;
        curvature = 1.0 / (w * w);
    }
    double value(const Vec& x) const override { return std::exp(-(x - c).squaredNorm() / (2.0 * width * width)); }
    Vec gradient(const Vec& x) const override { return -(x - c) * (value(x) / (width * width)); }
    Mat hessian(const Vec& x) const override
    {
        const double w2 = width * width;
        const Vec r = x - c;
        return value(x) * ((r * r.transpose()) / (w2 * w2) - Mat::Identity(dim, dim) / w2);
    }
};

struct ProductFn final : FunctionImpl
{
    TestFunction f, g;
    ProductFn(const TestFunction& a, const TestFunction& b) : f(a), g(b)
    {
        dim = a.dim();
        kind = FunctionKind::product;
        smooth = a.smooth() && b.smooth();
        nonnegative = a.nonnegative() && b.nonnegative();
        monotone = a.monotone() && b.monotone() && nonnegative;
        supermodular = monotone && a.supermodular() && b.supermodular();
        sup_abs = a.sup_abs() * b.sup_abs();
        lipschitz = a.sup_abs() * b.lipschitz() + b.sup_abs() * a.lipschitz();
        curvature = a.sup_abs() * b.curvature() + b.sup_abs() * a.curvature() + 2.0 * a.lipschitz() * b.lipschitz();
        if (std::isnan(lipschitz))
            lipschitz = inf;
        if (std::isnan(curvature))
            curvature = inf;
    }
    double value(const Vec& x) const override { return f(x) * g(x); }
    Vec gradient(const Vec& x) const override { return f(x) * g.gradient(x) + g(x) * f.gradient(x); }
    Mat hessian(const Vec& x) const override
    {
        const Vec gf = f.gradient(x);
        const Vec gg = g.gradient(x);
        return f(x) * g.hessian(x) + g(x) * f.hessian(x) + gf * gg.transpose() + gg * gf.transpose();
    }
};
}  // namespace
}  // namespace detail

TestFunction::TestFunction(std::shared_ptr<const detail::FunctionImpl> impl, std::string id)
    : impl_(std::move(impl)), id_(std::move(id))
{
}

TestFunction TestFunction::constant(int dim, double value)
{
    return {std::make_shared<detail::ConstantFn>(dim, value), fmt::format("const({:g})", value)};
}

TestFunction TestFunction::logistic(Vec weights, double shift, double scale)
{
    if (weights.size() == 0 || !weights.allFinite())
        throw PreconditionError("logistic test function: weights must be a finite non-empty vector");
    if (!(scale > 0.0))
        throw PreconditionError("logistic test function: scale must be positive");
    return {std::make_shared<detail::LogisticFn>(std::move(weights), shift, scale), "logistic"};
}

TestFunction TestFunction::logistic_product(int dim, std::vector<Factor> factors)
{
    std::vector<int> seen;
    for (const auto& f : factors)
    {
        if (f.index < 0 || f.index >= dim)
            throw PreconditionError("logistic product: factor index out of range");
        if (std::find(seen.begin(), seen.end(), f.index) != seen.end())
            throw PreconditionError("logistic product: factor indices must be distinct");
        seen.push_back(f.index);
    }
    return {std::make_shared<detail::LogisticProductFn>(dim, std::move(factors)), "logistic_product"};
}

TestFunction TestFunction::upper_orthant(Vec thresholds)
{
    return {std::make_shared<detail::OrthantFn>(std::move(thresholds), true), "upper_orthant"};
}

TestFunction TestFunction::lower_orthant(Vec thresholds)
{
    return {std::make_shared<detail::OrthantFn>(std::move(thresholds), false), "lower_orthant"};
}

TestFunction TestFunction::linear(Vec weights, double offset)
{
    return {std::make_shared<detail::LinearFn>(std::move(weights), offset), "linear"};
}

TestFunction TestFunction::coordinate_product(int dim, std::vector<int> indices)
{
    for (int i : indices)
        if (i < 0 || i >= dim)
            throw PreconditionError("coordinate product: index out of range");
    return {std::make_shared<detail::CoordinateProductFn>(dim, std::move(indices)), "coordinate_product"};
}

TestFunction TestFunction::clipped(int dim, int index, double cap)
{
    if (index < 0 || index >= dim)
        throw PreconditionError("clipped test function: index out of range");
    return {std::make_shared<detail::ClippedFn>(dim, index, cap), fmt::format("min(x{},{:g})", index + 1, cap)};
}

TestFunction TestFunction::gaussian(Vec centre, double width)
{
    if (!(width > 0.0))
        throw PreconditionError("gaussian test function: width must be positive");
    return {std::make_shared<detail::GaussianFn>(std::move(centre), width), "gaussian"};
}

TestFunction operator*(const TestFunction& f, const TestFunction& g)
{
    if (f.dim() != g.dim())
        throw PreconditionError("product of test functions with different dimensions");
    return {std::make_shared<detail::ProductFn>(f, g), f.id() + "*" + g.id()};
}

double TestFunction::operator()(const Vec& x) const { return impl_->value(x); }
Vec TestFunction::gradient(const Vec& x) const { return impl_->gradient(x); }
Mat TestFunction::hessian(const Vec& x) const { return impl_->hessian(x); }
int TestFunction::dim() const { return impl_->dim; }
FunctionKind TestFunction::kind() const { return impl_->kind; }
bool TestFunction::smooth() const { return impl_->smooth; }
bool TestFunction::monotone() const { return impl_->monotone; }
bool TestFunction::supermodular() const { return impl_->supermodular; }
bool TestFunction::nonnegative() const { return impl_->nonnegative; }
double TestFunction::sup_abs() const { return impl_->sup_abs; }
double TestFunction::lipschitz() const { return impl_->lipschitz; }
double TestFunction::curvature() const { return impl_->curvature; }

TestFunction TestFunction::with_id(std::string id) const
{
    return {impl_, std::move(id)};
}

Standardization Standardization::identity(int dim)
{
    return {Vec::Zero(dim), Vec::Ones(dim)};
}

Standardization Standardization::from_samples(const Mat& samples)
{
    const auto d = samples.cols();
    const auto n = samples.rows();
    Standardization st{Vec::Zero(d), Vec::Ones(d)};
    if (n == 0)
        return st;
    std::vector<double> col(static_cast<std::size_t>(n));
    auto quantile = [&](double p) {
        const auto k = static_cast<std::size_t>(std::floor(p * static_cast<double>(n - 1)));
        std::nth_element(col.begin(), col.begin() + static_cast<std::ptrdiff_t>(k), col.end());
        return col[k];
    };
    for (Eigen::Index j = 0; j < d; ++j)
    {
        for (Eigen::Index i = 0; i < n; ++i)
            col[static_cast<std::size_t>(i)] = samples(i, j);
        const double med = quantile(0.5);
        const double q1 = quantile(0.25);
        const double q3 = quantile(0.75);
        double scale = (q3 - q1) / 1.349;
        if (!(scale > 0.0))
        {
            const double mean = samples.col(j).mean();
            scale = std::sqrt((samples.col(j).array() - mean).square().mean());
        }
        if (!(scale > 0.0) || !std::isfinite(scale))
            scale = 1.0;
        st.centre[j] = med;
        st.scale[j] = scale;
    }
    return st;
}

namespace
{
std::vector<int> random_subset(Stream& rng, std::span<const int> coords, std::size_t min_size)
{
    std::vector<int> pool(coords.begin(), coords.end());
    for (std::size_t i = pool.size(); i > 1; --i)
        std::swap(pool[i - 1], pool[rng.index(i)]);
    const std::size_t lo = std::min(min_size, pool.size());
    const std::size_t size = lo + rng.index(pool.size() - lo + 1);
    pool.resize(std::max<std::size_t>(size, 1));
    std::sort(pool.begin(), pool.end());
    return pool;
}

std::vector<int> all_coords(int dim)
{
    std::vector<int> c(static_cast<std::size_t>(dim));
    std::iota(c.begin(), c.end(), 0);
    return c;
}
}  // namespace

TestFunction random_monotone(Stream& rng, int dim, const Standardization& st, std::span<const int> coords)
{
    const auto used = random_subset(rng, coords, 1);
    Vec w = Vec::Zero(dim);
    double total = 0.0;
    for (int i : used)
    {
        w[i] = 0.25 + rng.exponential();
        total += w[i];
    }
    const double steepness = 0.5 + 2.0 * rng.uniform();
    const double shift = -1.5 + 3.0 * rng.uniform();
    // z = sum_i k w_i (x_i - m_i)/s_i - shift
    Vec weights = Vec::Zero(dim);
    double offset = shift;
    for (int i : used)
    {
        const double wi = steepness * w[i] / total;
        weights[i] = wi / st.scale[i];
        offset += wi * st.centre[i] / st.scale[i];
    }
    return TestFunction::logistic(weights, offset);
}

TestFunction random_supermodular(Stream& rng, int dim, const Standardization& st, std::span<const int> coords)
{
    const auto used = random_subset(rng, coords, 2);
    std::vector<TestFunction::Factor> factors;
    for (int i : used)
    {
        const double k = 0.5 + 2.0 * rng.uniform();
        const double shift = -1.0 + 2.0 * rng.uniform();
        factors.push_back({i, k / st.scale[i], k * st.centre[i] / st.scale[i] + shift});
    }
    return TestFunction::logistic_product(dim, std::move(factors));
}

std::vector<FunctionPair> monotone_pair_bank(int dim, int pairs, std::uint64_t seed, const Standardization& st)
{
    Stream rng(seed, 0, StreamDomain::bank);
    const auto coords = all_coords(dim);
    std::vector<FunctionPair> bank;
    for (int k = 0; k < pairs; ++k)
    {
        const auto id = fmt::format("mono{:02d}", k);
        auto f = random_monotone(rng, dim, st, coords).with_id(id + ".f");
        auto g = random_monotone(rng, dim, st, coords).with_id(id + ".g");
        bank.push_back({id, std::move(f), std::move(g)});
    }
    return bank;
}

std::vector<FunctionPair> supermodular_pair_bank(int dim, int pairs, std::uint64_t seed, const Standardization& st)
{
    Stream rng(seed, 1, StreamDomain::bank);
    const auto coords = all_coords(dim);
    std::vector<FunctionPair> bank;
    for (int k = 0; k < pairs; ++k)
    {
        const auto id = fmt::format("ism{:02d}", k);
        auto f = random_supermodular(rng, dim, st, coords).with_id(id + ".f");
        auto g = random_supermodular(rng, dim, st, coords).with_id(id + ".g");
        bank.push_back({id, std::move(f), std::move(g)});
    }
    return bank;
}

std::vector<TestFunction> supermodular_bank(int dim, int count, std::uint64_t seed, const Standardization& st)
{
    Stream rng(seed, 2, StreamDomain::bank);
    const auto coords = all_coords(dim);
    std::vector<TestFunction> bank;
    for (int k = 0; k < count; ++k)
        bank.push_back(random_supermodular(rng, dim, st, coords).with_id(fmt::format("sm{:02d}", k)));
    return bank;
}

}  // namespace fellerdep
