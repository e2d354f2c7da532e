// Acceptance suite: one PASS/FAIL line per criterion, exit status 1 if any fails.

#include "oracles.hpp"
#include "runner.hpp"

#include "fellerdep/dependence.hpp"
#include "fellerdep/presets.hpp"
#include "fellerdep/process.hpp"
#include "fellerdep/semigroup.hpp"
#include "fellerdep/smalltime.hpp"
#include "fellerdep/triplet.hpp"

#include <fmt/format.h>

#include <chrono>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <numbers>
#include <numeric>
#include <sstream>

#include <unistd.h>

using namespace fellerdep;
namespace fs = std::filesystem;

namespace
{
const double inf = std::numeric_limits<double>::infinity();
constexpr std::uint64_t master_seed = 20240601;

struct Outcome
{
    bool passed = false;
    std::string detail;
};

struct Criterion
{
    int number;
    std::string name;
    double budget_seconds;
    std::function<Outcome()> body;
};

Vec v1(double a)
{
    return Vec::Constant(1, a);
}
Vec v2(double a, double b)
{
    return Vec{{a, b}};
}

// Random finite-atom measure; on_orthant keeps every atom in the closed
// positive or negative orthant.
LevyMeasure random_atoms(Stream& rng, int d, bool on_orthant)
{
    const int k = 1 + static_cast<int>(rng.index(4));
    std::vector<std::pair<Vec, double>> atoms;
    double total = 0.0;
    for (int i = 0; i < k; ++i)
    {
        Vec y(d);
        const double sign = rng.uniform() < 0.5 ? -1.0 : 1.0;
        for (int j = 0; j < d; ++j)
        {
            // mix of small (compensated) and large jumps
            const double mag = rng.uniform() < 0.5 ? 0.05 + 0.5 * rng.uniform() : 0.5 + 2.0 * rng.uniform();
            y[j] = on_orthant ? sign * mag : (rng.uniform() < 0.5 ? -mag : mag);
        }
        if (on_orthant && rng.uniform() < 0.2)
            y[static_cast<Eigen::Index>(rng.index(static_cast<std::uint64_t>(d)))] = 0.0;
        const double w = 0.1 + rng.uniform();
        total += w;
        atoms.emplace_back(y, w);
    }
    std::vector<Atom> normalized;
    for (auto& [y, w] : atoms)
        normalized.push_back({y, w / total});
    return LevyMeasure::atoms(0.2 + 3.0 * rng.uniform(), d, std::move(normalized));
}

Vec random_vec(Stream& rng, int d, double scale)
{
    Vec v(d);
    for (int j = 0; j < d; ++j)
        v[j] = scale * (2.0 * rng.uniform() - 1.0);
    return v;
}

TestFunction random_function(Stream& rng, int d)
{
    const auto st = Standardization::identity(d);
    std::vector<int> all(static_cast<std::size_t>(d));
    std::iota(all.begin(), all.end(), 0);
    switch (rng.index(3))
    {
    case 0: return random_monotone(rng, d, st, all);
    case 1: return random_supermodular(rng, d, st, all);
    default: return TestFunction::gaussian(random_vec(rng, d, 1.0), 0.5 + rng.uniform());
    }
}

Outcome liggett_identity()
{
    Stream rng(master_seed, 1, StreamDomain::test);
    double worst = 0.0;
    for (int c = 0; c < 100; ++c)
    {
        const int d = 1 + static_cast<int>(rng.index(3));
        const auto nu = random_atoms(rng, d, false);
        const auto triplet = rng.uniform() < 0.5
                                 ? StateTriplet::constant(random_vec(rng, d, 1.0), Mat(), nu)
                                 : StateTriplet::linear_drift(random_vec(rng, d, 1.0), rng.uniform(), Mat(), nu);
        const auto f = random_function(rng, d);
        const auto g = random_function(rng, d);
        const Vec x = random_vec(rng, d, 1.5);
        const auto gap = liggett_gap(triplet, f, g, x);
        const double r = std::fabs(gap.direct.value - gap.reduced.value) / (1.0 + std::fabs(gap.reduced.value));
        worst = std::max(worst, r);
    }
    return {worst <= 1e-8, fmt::format("100 cases, max |direct - reduced| / (1 + |reduced|) = {:.3g}", worst)};
}

Outcome orthant_nonnegative()
{
    Stream rng(master_seed, 2, StreamDomain::test);
    double lowest = inf;
    for (int c = 0; c < 50; ++c)
    {
        const int d = 2 + static_cast<int>(rng.index(2));
        const auto nu = random_atoms(rng, d, true);
        const auto triplet = StateTriplet::constant(random_vec(rng, d, 1.0), Mat(), nu);
        const Vec x = random_vec(rng, d, 1.0);
        for (const auto& p : monotone_pair_bank(d, 32, master_seed + std::uint64_t(c), Standardization::identity(d)))
            lowest = std::min(lowest, liggett_gap(triplet, p.f, p.g, x).reduced.value);
    }
    return {lowest >= -1e-12, fmt::format("50 measures x 32 pairs, min reduced gap = {:.3g}", lowest)};
}

Outcome offorthant_counterexample()
{
    const auto triplet = process_triplet(make_preset("antidiagonal_levy"));
    double lowest = inf;
    int negative = 0;
    for (const auto& p : monotone_pair_bank(2, 32, master_seed, Standardization::identity(2)))
    {
        const auto g = liggett_gap(triplet, p.f, p.g, v2(0, 0));
        lowest = std::min(lowest, g.reduced.value);
        negative += g.reduced.value < 0.0;
    }
    return {negative > 0, fmt::format("{} of 32 pairs negative, min reduced gap = {:.4g}", negative, lowest)};
}

Outcome smalltime_diagonal()
{
    SmalltimeOptions opt;
    opt.t_list = {0.2, 0.1, 0.05, 0.02, 0.01};
    opt.paths_scale = 5e4;
    const RegionSpec a{"upper_quadrant", {v2(0.5, 0.5), v2(inf, inf)}};
    const auto table = smalltime_rate(make_preset("diagonal_levy"), v2(0, 0), a, opt, master_seed);
    std::size_t total = 0;
    bool per_t = true;
    for (const auto& r : table.rows)
    {
        total += r.n_paths;
        per_t = per_t && std::fabs(r.rate - (-std::expm1(-r.t) / r.t)) <= 3 * r.se;
    }
    const bool ok = per_t && total <= 10'000'000 && std::fabs(table.intercept - 1.0) <= 0.03;
    return {ok, fmt::format("intercept {:.4f} (nu(A) = 1), per-t oracle within 3 se: {}, {} paths", table.intercept,
                            per_t ? "yes" : "no", total)};
}

Outcome stable_tail()
{
    SmalltimeOptions opt;
    opt.t_list = {0.2, 0.1, 0.05, 0.02, 0.01};
    opt.paths_scale = 5e4;
    const RegionSpec a{"tail_1", {v1(1.0), v1(inf)}};
    const auto table = smalltime_rate(make_preset("alpha_stable_subordinated"), v1(0), a, opt, master_seed);
    const double target = 1.0 / std::sqrt(std::numbers::pi);
    bool per_t = true;
    for (const auto& r : table.rows)
        per_t = per_t && std::fabs(r.rate - oracle::half_stable_tail_rate(r.t)) <= 3 * r.se;
    const double rel = std::fabs(table.intercept - target) / target;
    return {rel <= 0.05 && per_t, fmt::format("intercept {:.4f} vs 1/sqrt(pi) = {:.4f} ({:.2f}%), per-t oracle: {}",
                                              table.intercept, target, 100 * rel, per_t ? "yes" : "no")};
}

Outcome puod_necessity()
{
    NecessityOptions opt;
    opt.smalltime.t_list = {0.2, 0.1, 0.05, 0.02, 0.01};
    opt.smalltime.paths_scale = 2e4;
    opt.puod_paths = 1'000'000;
    const auto rep = puod_necessity_experiment(make_preset("antidiagonal_levy"), v2(0, 0), opt, master_seed);
    const auto& last = rep.rows.back();
    const bool ok = std::fabs(last.joint_rate - 1.0) <= 0.05 && last.t == 0.01 && last.product_rate < 0.05 &&
                    rep.puod_t == 0.01 && rep.puod.n == 1'000'000 && rep.puod.verdict() == Verdict::violated;
    return {ok, fmt::format("curve 1 at t=0.01: {:.4f}, curve 2: {:.4f}, PUOD on 1e6 paths: {}", last.joint_rate,
                            last.product_rate, to_string(rep.puod.verdict()))};
}

Outcome lattice_positive()
{
    const Mat x = simulate(make_preset("diagonal_levy"), v2(0, 0), {1.0}, 100000, master_seed).terminal();
    const auto reps = dependence_suite(x, master_seed);
    std::string verdicts;
    bool all = reps.size() == 7;
    for (const auto& [k, r] : reps)
    {
        all = all && r.verdict() == Verdict::consistent;
        verdicts += fmt::format("{}{}={}", verdicts.empty() ? "" : " ", to_string(k), to_string(r.verdict()));
    }
    const auto contradictions = implication_consistency(reps);
    return {all && contradictions.empty(),
            fmt::format("{}; {} implication contradictions", verdicts, contradictions.size())};
}

Outcome common_shock()
{
    const Mat x = simulate(make_preset("diagonal_levy"), v2(0, 0), {1.0}, 100000, master_seed).terminal();
    const auto rep = puod_test(x, {v2(0, 0)});
    const double p = -std::expm1(-1.0);
    const double exact = p - p * p;
    const auto& r = rep.rows.front();
    return {std::fabs(r.estimate - exact) <= 3 * r.se,
            fmt::format("gap {:.5f} +- {:.5f} vs {:.5f}", r.estimate, r.se, exact)};
}

Outcome temporal()
{
    const auto rep = temporal_assoc_test(make_preset("diagonal_levy"), v2(0, 0), {0.5, 1.0}, 100000, master_seed);
    return {rep.verdict() == Verdict::consistent,
            fmt::format("stacked R^4, {} pairs: {}", rep.rows.size(), to_string(rep.verdict()))};
}

Outcome generator_limits()
{
    const auto spec = make_preset("poisson_1d");
    const auto f = TestFunction::logistic(v1(1), 0.5);
    const auto tf = [&](double t) { return oracle::poisson_expectation([&](int k) { return f(v1(k)); }, t); };
    const auto table = generator_limit_check(spec, f, v1(0), {0.4, 0.2, 0.1, 0.05}, 1'000'000, master_seed);
    bool oracle_ok = true;
    for (const auto& r : table.rows)
        oracle_ok = oracle_ok && std::fabs(r.difference_quotient.value - (tf(r.t) - f(v1(0))) / r.t) <=
                                     3 * r.difference_quotient.std_error;
    const bool shrink = table.rows.back().discrepancy < table.rows.front().discrepancy;
    const auto dc = derivative_commute_check(spec, f, v1(0), 1.0, 0.05, 1'000'000, master_seed);
    const bool commute = std::fabs(dc.time_derivative.value - dc.generator_side.value) <= 3 * dc.pooled_se;
    return {oracle_ok && shrink && commute,
            fmt::format("discrepancy {:.4g} at t=0.4 -> {:.4g} at t=0.05, oracle per t: {}, "
                        "d/dt {:.5f} vs T_t I f {:.5f} (pooled se {:.2g})",
                        table.rows.front().discrepancy, table.rows.back().discrepancy, oracle_ok ? "yes" : "no",
                        dc.time_derivative.value, dc.generator_side.value, dc.pooled_se)};
}

Outcome series_oracle()
{
    const auto spec = make_preset("pseudo_poisson_2state");
    const auto id = TestFunction::linear(Vec::Ones(1));
    const double series1 = pseudo_poisson_semigroup_exact(spec, id, v1(0), 1.0);
    bool ok = std::fabs(series1 - (1.0 - std::exp(-1.0))) <= 1e-12;
    std::string detail = fmt::format("series(1) - (1 - 1/e) = {:.2g}", series1 - (1.0 - std::exp(-1.0)));
    for (double t : {0.5, 1.0})
    {
        const auto mc = semigroup_apply(spec, id, v1(0), t, 100000, master_seed);
        const double exact = pseudo_poisson_semigroup_exact(spec, id, v1(0), t);
        ok = ok && std::fabs(mc.value - exact) <= 3 * mc.std_error;
        detail += fmt::format("; t={}: MC {:.5f} +- {:.5f} vs {:.5f}", t, mc.value, mc.std_error, exact);
    }
    return {ok, detail};
}

Outcome monotonicity()
{
    struct Case
    {
        const char* preset;
        TestFunction f;
        std::vector<std::vector<Vec>> chains;
    };
    const auto up2 = [](double a, double b) {
        // five starts increasing along (a, b)
        std::vector<Vec> c;
        for (int k = -2; k <= 2; ++k)
            c.push_back(v2(a * k, b * k));
        return c;
    };
    const auto up1 = [](double lo, double step) {
        std::vector<Vec> c;
        for (int k = 0; k < 5; ++k)
            c.push_back(v1(lo + step * k));
        return c;
    };
    const std::vector<Case> cases{
        {"diagonal_levy",
         TestFunction::logistic(v2(1, 1), 0.5),
         {up2(1, 1), up2(1, 0), up2(0, 1), up2(0.5, 1), up2(1, 0.25)}},
        {"ou_poisson_driver",
         TestFunction::logistic(v2(1, 1), 1.0),
         {up2(1, 1), up2(1, 0), up2(0, 1), up2(0.5, 1), up2(1, 0.25)}},
        {"pseudo_poisson_birth_death",
         TestFunction::logistic(v1(1), 5.0, 1.5),
         {up1(0, 1), up1(1, 2), up1(2, 2), up1(3, 1), up1(6, 1)}},
        {"alpha_stable_subordinated",
         TestFunction::logistic(v1(1), 0.5),
         {up1(-2, 1), up1(-1, 0.5), up1(-4, 2), up1(0, 0.25), up1(-0.5, 0.25)}},
    };
    int steps = 0, failed = 0;
    std::string where;
    for (const auto& c : cases)
        for (std::size_t i = 0; i < c.chains.size(); ++i)
            for (const auto& s : monotonicity_transfer_check(make_preset(c.preset), c.f, c.chains[i], 1.0, 100000,
                                                             master_seed + i))
            {
                ++steps;
                if (!s.passed)
                {
                    ++failed;
                    where = fmt::format(" (first failure: {} chain {})", c.preset, i);
                }
            }
    return {failed == 0 && steps == 4 * 5 * 4,
            fmt::format("4 presets x 5 chains of 5 starts, {} steps, {} failed{}", steps, failed, where)};
}

std::string slurp(const fs::path& p)
{
    std::ifstream in(p, std::ios::binary);
    std::stringstream s;
    s << in.rdbuf();
    return s.str();
}

Outcome reproducibility()
{
    const fs::path root = fs::temp_directory_path() / fmt::format("fellerdep-accept-{}", ::getpid());
    fs::remove_all(root);
    int configs = 0, files = 0;
    std::vector<std::string> mismatches;
    for (const auto& entry : fs::directory_iterator(FELLERDEP_CONFIG_DIR))
    {
        if (entry.path().extension() != ".json")
            continue;
        ++configs;
        std::vector<fs::path> outs;
        std::vector<int> codes;
        for (unsigned jobs : {1u, 4u, 1u})
        {
            cli::RunOptions opt;
            opt.config_path = entry.path().string();
            opt.jobs = jobs;
            opt.seed = master_seed;
            outs.push_back(root / fmt::format("{}-{}-{}", entry.path().stem().string(), jobs, outs.size()));
            opt.out = outs.back().string();
            std::ostringstream log, err;
            codes.push_back(cli::run(opt, log, err));
        }
        if (codes[0] != codes[1] || codes[0] != codes[2] || codes[0] == cli::bad_config)
            mismatches.push_back(entry.path().filename().string() + " (exit code)");
        for (const auto& f : fs::directory_iterator(outs[0]))
        {
            const auto ext = f.path().extension();
            if (ext != ".csv" && ext != ".tsv")
                continue;
            ++files;
            const auto ref = slurp(f.path());
            for (std::size_t i = 1; i < outs.size(); ++i)
                if (slurp(outs[i] / f.path().filename()) != ref)
                    mismatches.push_back(entry.path().filename().string() + "/" + f.path().filename().string());
        }
    }
    fs::remove_all(root);
    std::string detail = fmt::format("{} configs, {} CSV/TSV files, runs with --jobs 1, 4, 1", configs, files);
    if (!mismatches.empty())
        detail += "; differing: " + mismatches.front();
    return {mismatches.empty() && configs > 0 && files > 0, detail};
}

}  // namespace

int main()
{
    const std::vector<Criterion> criteria{
        {1, "Liggett identity on random finite-atom triplets", 10, liggett_identity},
        {2, "on-orthant measures give nonnegative reduced gaps", 10, orthant_nonnegative},
        {3, "off-orthant atom gives a negative reduced gap", 1, offorthant_counterexample},
        {4, "small-time rate intercept for the diagonal process", 120, smalltime_diagonal},
        {5, "alpha-stable small-time tail intercept", 120, stable_tail},
        {6, "PUOD necessity experiment", 120, puod_necessity},
        {7, "dependence lattice on the diagonal process", 60, lattice_positive},
        {8, "exact common-shock PUOD gap", 10, common_shock},
        {9, "temporal association of the diagonal process", 60, temporal},
        {10, "generator and semigroup limits for the Poisson process", 60, generator_limits},
        {11, "pseudo-Poisson series oracle", 30, series_oracle},
        {12, "stochastic monotonicity transfer", 180, monotonicity},
        {13, "byte-identical reruns across worker counts", 600, reproducibility},
    };
    int failed = 0;
    for (const auto& c : criteria)
    {
        const auto start = std::chrono::steady_clock::now();
        Outcome o;
        try
        {
            o = c.body();
        }
        catch (const std::exception& e)
        {
            o = {false, std::string("exception: ") + e.what()};
        }
        const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
        const bool in_budget = secs <= c.budget_seconds;
        const bool pass = o.passed && in_budget;
        failed += !pass;
        std::cout << fmt::format("{} [{:2}] {} ({:.2f} s, budget {} s){}: {}\n", pass ? "PASS" : "FAIL", c.number,
                                 c.name, secs, c.budget_seconds, in_budget ? "" : " over budget", o.detail)
                  << std::flush;
    }
    std::cout << fmt::format("{} of {} criteria passed\n", criteria.size() - std::size_t(failed), criteria.size());
    return failed == 0 ? 0 : 1;
}
