#include "fellerdep/dependence.hpp"

#include "fellerdep/parallel.hpp"
#include "fellerdep/simulate.hpp"
#include "fellerdep/stats.hpp"

#include <fmt/format.h>

#include <algorithm>
#include <cmath>
#include <numeric>
#include <set>

namespace fellerdep
{
std::string to_string(Verdict v)
{
    switch (v)
    {
    case Verdict::consistent: return "consistent";
    case Verdict::violated: return "violated";
    default: return "inconclusive";
    }
}

std::string to_string(TestKind k)
{
    switch (k)
    {
    case TestKind::A: return "A";
    case TestKind::WA: return "WA";
    case TestKind::PSA: return "PSA";
    case TestKind::PSD: return "PSD";
    case TestKind::PUOD: return "PUOD";
    case TestKind::PLOD: return "PLOD";
    case TestKind::POD: return "POD";
    default: return "TemporalA";
    }
}

TestKind test_kind_from_string(const std::string& s)
{
    for (auto k : {TestKind::A, TestKind::WA, TestKind::PSA, TestKind::PSD, TestKind::PUOD, TestKind::PLOD,
                   TestKind::POD, TestKind::TemporalA})
        if (to_string(k) == s)
            return k;
    throw SpecError(fmt::format("unknown dependence test '{}'", s));
}

Verdict row_verdict(double estimate, double se)
{
    // a few ulps of slack so exact zeros computed with rounding are not flagged
    const double slack = 1e-14 * (1.0 + std::fabs(estimate));
    return estimate < -sigma_rule * se - slack ? Verdict::violated : Verdict::consistent;
}

Verdict DependenceReport::verdict() const
{
    bool any_conclusive = false;
    for (const auto& r : rows)
    {
        if (r.verdict == Verdict::violated)
            return Verdict::violated;
        if (r.verdict == Verdict::consistent)
            any_conclusive = true;
    }
    return any_conclusive ? Verdict::consistent : Verdict::inconclusive;
}

bool DependenceReport::powered_positive() const
{
    return std::any_of(rows.begin(), rows.end(), [](const DependenceRow& r) {
        return r.verdict != Verdict::inconclusive && r.estimate > sigma_rule * r.se && r.se > 0.0;
    });
}

namespace
{
const char* covariance_rule = "violated if estimate < -3 se (one-sided, per row); covariance rows need n >= 100";
const char* orthant_rule =
    "violated if estimate < -3 se (one-sided, per row); a row is inconclusive when both the joint count and "
    "the count expected under independence are below 20";

void add_multiplicity_note(DependenceReport& r)
{
    if (r.rows.size() > 20)
        r.note = fmt::format(
            "{} rows tested at the per-row 3 s.e. level (one-sided 0.00135); Bonferroni bound on the family-wise "
            "false violation rate: {:.3g}",
            r.rows.size(), std::min(1.0, 0.00135 * static_cast<double>(r.rows.size())));
}

std::vector<double> column_values(const TestFunction& f, const Mat& samples)
{
    std::vector<double> v(static_cast<std::size_t>(samples.rows()));
    for (Eigen::Index k = 0; k < samples.rows(); ++k)
        v[static_cast<std::size_t>(k)] = f(samples.row(k).transpose());
    return v;
}

DependenceReport covariance_report(TestKind kind, const Mat& samples, const std::vector<FunctionPair>& pairs,
                                   std::uint64_t seed)
{
    DependenceReport rep;
    rep.test = kind;
    rep.n = static_cast<std::size_t>(samples.rows());
    rep.seed = seed;
    rep.rule = covariance_rule;
    rep.rows.resize(pairs.size());
    const bool enough = rep.n >= min_covariance_samples;
    parallel_for(pairs.size(), 0, [&](std::size_t begin, std::size_t end) {
        for (std::size_t i = begin; i < end; ++i)
        {
            const auto& p = pairs[i];
            auto& row = rep.rows[i];
            row.id = p.id;
            if (!enough)
            {
                row.verdict = Verdict::inconclusive;
                continue;
            }
            const auto c = jackknife_covariance(column_values(p.f, samples), column_values(p.g, samples));
            row.estimate = c.estimate;
            row.se = c.jackknife_se;
            row.verdict = row_verdict(row.estimate, row.se);
        }
    });
    add_multiplicity_note(rep);
    return rep;
}

double quantile(std::vector<double> v, double p)
{
    std::sort(v.begin(), v.end());
    const double pos = p * static_cast<double>(v.size() - 1);
    const auto lo = static_cast<std::size_t>(std::floor(pos));
    const auto hi = std::min(lo + 1, v.size() - 1);
    const double w = pos - static_cast<double>(lo);
    return (1.0 - w) * v[lo] + w * v[hi];
}

DependenceReport orthant_report(TestKind kind, const Mat& samples, const std::vector<Vec>& thresholds,
                                std::uint64_t seed)
{
    const bool upper = kind == TestKind::PUOD;
    const auto n = static_cast<std::size_t>(samples.rows());
    const auto d = samples.cols();
    DependenceReport rep;
    rep.test = kind;
    rep.n = n;
    rep.seed = seed;
    rep.rule = orthant_rule;
    rep.rows.resize(thresholds.size());
    auto hit = [upper](double x, double t) { return upper ? x > t : x <= t; };

    parallel_for(thresholds.size(), 0, [&](std::size_t begin, std::size_t end) {
        for (std::size_t r = begin; r < end; ++r)
        {
            const Vec& t = thresholds[r];
            auto& row = rep.rows[r];
            std::string id = upper ? "gt(" : "le(";
            for (Eigen::Index i = 0; i < d; ++i)
                id += fmt::format("{}{}", i ? ";" : "", t[i]);
            row.id = id + ")";
            if (t.size() != d)
                throw PreconditionError("threshold dimension mismatch");
            if (n == 0)
                continue;

            std::vector<double> marg(static_cast<std::size_t>(d), 0.0);
            double joint = 0.0;
            for (std::size_t k = 0; k < n; ++k)
            {
                bool all = true;
                for (Eigen::Index i = 0; i < d; ++i)
                {
                    const bool h = hit(samples(static_cast<Eigen::Index>(k), i), t[i]);
                    marg[static_cast<std::size_t>(i)] += h;
                    all = all && h;
                }
                joint += all;
            }
            const double nn = static_cast<double>(n);
            double prod = 1.0;
            for (auto& m : marg)
            {
                m /= nn;
                prod *= m;
            }
            const double pj = joint / nn;
            row.estimate = pj - prod;

            // influence function 1_J - p_J - sum_i (prod_{k != i} p_k)(1_i - p_i)
            std::vector<double> others(static_cast<std::size_t>(d));
            for (Eigen::Index i = 0; i < d; ++i)
            {
                double o = 1.0;
                for (Eigen::Index k = 0; k < d; ++k)
                    if (k != i)
                        o *= marg[static_cast<std::size_t>(k)];
                others[static_cast<std::size_t>(i)] = o;
            }
            CompensatedSum ss;
            for (std::size_t k = 0; k < n; ++k)
            {
                bool all = true;
                double infl = 0.0;
                for (Eigen::Index i = 0; i < d; ++i)
                {
                    const bool h = hit(samples(static_cast<Eigen::Index>(k), i), t[i]);
                    all = all && h;
                    infl -= others[static_cast<std::size_t>(i)] * ((h ? 1.0 : 0.0) - marg[static_cast<std::size_t>(i)]);
                }
                infl += (all ? 1.0 : 0.0) - pj;
                ss.add(infl * infl);
            }
            row.se = n > 1 ? std::sqrt(ss.value() / (nn - 1.0) / nn) : 0.0;
            if (std::max(joint, nn * prod) < min_orthant_cell_count)
                row.verdict = Verdict::inconclusive;
            else
                row.verdict = row_verdict(row.estimate, row.se);
        }
    });
    add_multiplicity_note(rep);
    return rep;
}
}  // namespace

CovarianceRow jackknife_covariance(const std::vector<double>& a, const std::vector<double>& b)
{
    const std::size_t n = a.size();
    if (n != b.size())
        throw PreconditionError("covariance inputs differ in length");
    CovarianceRow out;
    if (n < 3)
        return out;
    const double am = compensated_mean(a);
    const double bm = compensated_mean(b);
    std::vector<double> prod(n);
    for (std::size_t k = 0; k < n; ++k)
        prod[k] = (a[k] - am) * (b[k] - bm);
    // one factor constant on every sample: covariance is exactly zero
    if (std::all_of(a.begin(), a.end(), [&](double v) { return v == a[0]; }) ||
        std::all_of(b.begin(), b.end(), [&](double v) { return v == b[0]; }))
        return out;
    CompensatedSum s;
    for (double p : prod)
        s.add(p);
    const double sum = s.value();
    const double nn = static_cast<double>(n);
    out.estimate = sum / (nn - 1.0);

    // delete-one values on centred data: (S - a_i b_i n/(n-1)) / (n-2)
    std::vector<double> loo(n);
    for (std::size_t k = 0; k < n; ++k)
        loo[k] = (sum - prod[k] * nn / (nn - 1.0)) / (nn - 2.0);
    const double lm = compensated_mean(loo);
    CompensatedSum dev;
    for (double v : loo)
        dev.add((v - lm) * (v - lm));
    out.jackknife_se = std::sqrt((nn - 1.0) / nn * dev.value());
    return out;
}

std::vector<FunctionPair> default_monotone_bank(const Mat& samples, int pairs, std::uint64_t seed)
{
    return monotone_pair_bank(static_cast<int>(samples.cols()), pairs, seed, Standardization::from_samples(samples));
}

DependenceReport assoc_test(const Mat& samples, const std::vector<FunctionPair>& bank, std::uint64_t seed)
{
    return covariance_report(TestKind::A, samples, bank, seed);
}

std::vector<Partition> default_partitions(int dim)
{
    std::vector<Partition> out;
    std::set<std::pair<std::vector<int>, std::vector<int>>> seen;
    auto add = [&](std::vector<int> i, std::vector<int> j) {
        auto key = i < j ? std::make_pair(i, j) : std::make_pair(j, i);
        if (seen.insert(key).second)
            out.emplace_back(std::move(i), std::move(j));
    };
    for (int i = 0; i < dim; ++i)
    {
        std::vector<int> rest;
        for (int k = 0; k < dim; ++k)
            if (k != i)
                rest.push_back(k);
        if (!rest.empty())
            add({i}, rest);
    }
    for (int i = 0; i < dim; ++i)
        for (int j = i + 1; j < dim; ++j)
            add({i}, {j});
    return out;
}

DependenceReport wa_test(const Mat& samples, const std::vector<Partition>& partitions, int pairs_per_partition,
                         std::uint64_t seed)
{
    const int d = static_cast<int>(samples.cols());
    const auto st = Standardization::from_samples(samples);
    std::vector<FunctionPair> pairs;
    for (std::size_t p = 0; p < partitions.size(); ++p)
    {
        const auto& [I, J] = partitions[p];
        for (int i : I)
            if (std::find(J.begin(), J.end(), i) != J.end() || i < 0 || i >= d)
                throw PreconditionError("weak association blocks must be disjoint coordinate sets");
        auto block = [](const std::vector<int>& s) {
            std::string out;
            for (int i : s)
                out += fmt::format("{}{}", out.empty() ? "" : ",", i + 1);
            return out;
        };
        Stream rng(seed, 100 + p, StreamDomain::bank);
        for (int k = 0; k < pairs_per_partition; ++k)
        {
            const auto id = fmt::format("I{{{}}}J{{{}}}#{:02d}", block(I), block(J), k);
            pairs.push_back({id, random_monotone(rng, d, st, I).with_id(id + ".f"),
                             random_monotone(rng, d, st, J).with_id(id + ".g")});
        }
    }
    return covariance_report(TestKind::WA, samples, pairs, seed);
}

DependenceReport psa_test(const Mat& samples, const std::vector<FunctionPair>& supermodular_pairs,
                          std::uint64_t seed)
{
    return covariance_report(TestKind::PSA, samples, supermodular_pairs, seed);
}

Mat independent_marginals(const Mat& samples, std::uint64_t seed)
{
    Mat out = samples;
    const auto n = static_cast<std::uint64_t>(samples.rows());
    for (Eigen::Index i = 0; i < samples.cols(); ++i)
    {
        Stream rng(seed, static_cast<std::uint64_t>(i), StreamDomain::permutation);
        for (std::uint64_t k = n; k > 1; --k)
        {
            const auto j = rng.index(k);
            std::swap(out(static_cast<Eigen::Index>(k - 1), i), out(static_cast<Eigen::Index>(j), i));
        }
    }
    return out;
}

DependenceReport psd_test(const Mat& samples, const std::vector<TestFunction>& supermodular_functions,
                          std::uint64_t seed)
{
    DependenceReport rep;
    rep.test = TestKind::PSD;
    rep.n = static_cast<std::size_t>(samples.rows());
    rep.seed = seed;
    rep.rule = covariance_rule;
    const Mat hat = independent_marginals(samples, seed);
    rep.rows.resize(supermodular_functions.size());
    const bool enough = rep.n >= min_covariance_samples;
    parallel_for(supermodular_functions.size(), 0, [&](std::size_t begin, std::size_t end) {
        for (std::size_t i = begin; i < end; ++i)
        {
            const auto& f = supermodular_functions[i];
            auto& row = rep.rows[i];
            row.id = f.id();
            if (!enough)
                continue;
            const auto a = mean_and_se(column_values(f, samples));
            const auto b = mean_and_se(column_values(f, hat));
            row.estimate = a.mean - b.mean;
            row.se = std::hypot(a.std_error, b.std_error);
            row.verdict = row_verdict(row.estimate, row.se);
        }
    });
    add_multiplicity_note(rep);
    return rep;
}

std::vector<Vec> default_thresholds(const Mat& samples, const std::vector<double>& levels)
{
    const auto d = samples.cols();
    std::vector<std::vector<double>> per(static_cast<std::size_t>(d));
    for (Eigen::Index i = 0; i < d; ++i)
    {
        std::vector<double> col(samples.col(i).data(), samples.col(i).data() + samples.rows());
        for (double p : levels)
        {
            const double q = col.empty() ? 0.0 : quantile(col, p);
            auto& v = per[static_cast<std::size_t>(i)];
            if (std::find(v.begin(), v.end(), q) == v.end())
                v.push_back(q);
        }
    }
    std::vector<Vec> out;
    Vec cur(d);
    std::function<void(Eigen::Index)> rec = [&](Eigen::Index i) {
        if (i == d)
        {
            out.push_back(cur);
            return;
        }
        for (double q : per[static_cast<std::size_t>(i)])
        {
            cur[i] = q;
            rec(i + 1);
        }
    };
    rec(0);
    return out;
}

DependenceReport puod_test(const Mat& samples, const std::vector<Vec>& thresholds, std::uint64_t seed)
{
    return orthant_report(TestKind::PUOD, samples, thresholds, seed);
}

DependenceReport plod_test(const Mat& samples, const std::vector<Vec>& thresholds, std::uint64_t seed)
{
    return orthant_report(TestKind::PLOD, samples, thresholds, seed);
}

DependenceReport pod_report(const DependenceReport& puod, const DependenceReport& plod)
{
    DependenceReport rep;
    rep.test = TestKind::POD;
    rep.n = puod.n;
    rep.seed = puod.seed;
    rep.rule = "conjunction of the upper and lower orthant reports";
    for (const auto* part : {&puod, &plod})
        for (const auto& r : part->rows)
            rep.rows.push_back({to_string(part->test) + ":" + r.id, r.estimate, r.se, r.verdict});
    add_multiplicity_note(rep);
    return rep;
}

DependenceReport temporal_assoc_test(const ProcessSpec& spec, const Vec& x, const std::vector<double>& grid,
                                     std::size_t n_paths, std::uint64_t seed, int bank_pairs, unsigned jobs)
{
    const auto e = simulate(spec, x, grid, n_paths, seed, jobs);
    const Mat stacked = e.stacked();
    auto rep = assoc_test(stacked, default_monotone_bank(stacked, bank_pairs, seed), seed);
    rep.test = TestKind::TemporalA;
    return rep;
}

std::vector<std::pair<TestKind, TestKind>> implication_arrows()
{
    using K = TestKind;
    return {{K::A, K::WA},     {K::A, K::PSA},    {K::WA, K::PUOD}, {K::WA, K::PLOD},
            {K::PSA, K::PSD},  {K::PSD, K::POD},  {K::POD, K::PUOD}, {K::POD, K::PLOD}};
}

bool implies(TestKind premise, TestKind conclusion)
{
    if (premise == conclusion)
        return false;
    std::vector<TestKind> frontier{premise};
    std::set<TestKind> seen{premise};
    const auto arrows = implication_arrows();
    while (!frontier.empty())
    {
        const TestKind k = frontier.back();
        frontier.pop_back();
        for (const auto& [from, to] : arrows)
            if (from == k && seen.insert(to).second)
            {
                if (to == conclusion)
                    return true;
                frontier.push_back(to);
            }
    }
    return false;
}

std::vector<ImplicationViolation> implication_consistency(const std::map<TestKind, DependenceReport>& reports)
{
    std::vector<ImplicationViolation> out;
    for (const auto& [conclusion, crep] : reports)
    {
        if (conclusion == TestKind::POD || conclusion == TestKind::TemporalA || crep.verdict() != Verdict::violated)
            continue;
        ImplicationViolation v;
        v.conclusion = conclusion;
        for (const auto& [premise, prep] : reports)
            if (implies(premise, conclusion) && prep.verdict() == Verdict::consistent && prep.powered_positive())
                v.premises.push_back(premise);
        if (v.premises.empty())
            continue;
        std::string names;
        for (auto p : v.premises)
            names += (names.empty() ? "" : ", ") + to_string(p);
        v.message = fmt::format("{} violated although implied by consistent and powered {}", to_string(conclusion),
                                names);
        out.push_back(std::move(v));
    }
    return out;
}

std::map<TestKind, DependenceReport> dependence_suite(const Mat& samples, std::uint64_t seed,
                                                      const DependenceSuiteOptions& opt)
{
    const int d = static_cast<int>(samples.cols());
    const auto st = Standardization::from_samples(samples);
    std::map<TestKind, DependenceReport> out;
    out[TestKind::A] = assoc_test(samples, monotone_pair_bank(d, opt.monotone_pairs, seed, st), seed);
    out[TestKind::WA] = wa_test(samples, default_partitions(d), opt.wa_pairs_per_partition, seed);
    out[TestKind::PSA] = psa_test(samples, supermodular_pair_bank(d, opt.supermodular_pairs, seed, st), seed);
    out[TestKind::PSD] = psd_test(samples, supermodular_bank(d, opt.supermodular_functions, seed, st), seed);
    auto thresholds = default_thresholds(samples, opt.quantile_levels);
    thresholds.insert(thresholds.end(), opt.extra_thresholds.begin(), opt.extra_thresholds.end());
    out[TestKind::PUOD] = puod_test(samples, thresholds, seed);
    out[TestKind::PLOD] = plod_test(samples, thresholds, seed);
    out[TestKind::POD] = pod_report(out[TestKind::PUOD], out[TestKind::PLOD]);
    return out;
}

}  // namespace fellerdep
