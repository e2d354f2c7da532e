#include "runner.hpp"

#include "fellerdep/dependence.hpp"
#include "fellerdep/path_io.hpp"
#include "fellerdep/presets.hpp"
#include "fellerdep/report_io.hpp"
#include "fellerdep/semigroup.hpp"
#include "fellerdep/simulate.hpp"
#include "fellerdep/smalltime.hpp"
#include "fellerdep/spec_json.hpp"
#include "fellerdep/triplet.hpp"

#include <fmt/format.h>
#include <fmt/ostream.h>

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <map>
#include <sstream>

namespace fellerdep::cli
{
using nlohmann::json;
namespace fs = std::filesystem;

namespace
{
const std::vector<std::string> experiments = {"simulate",       "check-resnick", "liggett",         "dependence",
                                              "smalltime",      "puod-necessity", "generator-checks"};

const std::vector<std::string> top_level_keys = {
    "experiment", "description", "process", "triplet", "seed",    "n_paths",     "start",      "states",
    "t",          "grid",        "t_list",  "h",       "bank",    "tests",       "expect",     "regions",
    "paths_scale", "puod_paths", "functions", "chain", "format",  "out"};

struct Context
{
    json cfg;
    std::string out_dir;
    unsigned jobs = 0;
    std::ostream& log;
    std::vector<std::string> outputs;
    std::vector<std::string> failures;

    void write(const std::string& name, const std::string& text)
    {
        write_text((fs::path(out_dir) / name).string(), text);
        outputs.push_back(name);
        fmt::print(log, "wrote {}\n", name);
    }
    void fail(std::string message)
    {
        fmt::print(log, "FAILED: {}\n", message);
        failures.push_back(std::move(message));
    }
};

std::uint64_t seed_of(const Context& c)
{
    return c.cfg.at("seed").get<std::uint64_t>();
}

std::size_t paths_of(const Context& c)
{
    return c.cfg.at("n_paths").get<std::size_t>();
}

double double_or(const json& cfg, const char* key, double fallback)
{
    if (!cfg.contains(key))
        return fallback;
    if (!cfg.at(key).is_number())
        throw SchemaError(key, "expected a number");
    return cfg.at(key).get<double>();
}

std::vector<double> list_or(const json& cfg, const char* key, std::vector<double> fallback)
{
    if (!cfg.contains(key))
        return fallback;
    const auto& j = cfg.at(key);
    if (!j.is_array() || j.empty())
        throw SchemaError(key, "expected a non-empty list of numbers");
    std::vector<double> out;
    for (std::size_t i = 0; i < j.size(); ++i)
    {
        if (!j[i].is_number())
            throw SchemaError(fmt::format("{}[{}]", key, i), "expected a number");
        out.push_back(j[i].get<double>());
    }
    return out;
}

int int_field(const json& j, const std::string& key, const char* name, int fallback)
{
    if (!j.contains(name))
        return fallback;
    if (!j.at(name).is_number_integer() || j.at(name).get<long long>() < 0)
        throw SchemaError(key + "." + name, "expected a nonnegative integer");
    return j.at(name).get<int>();
}

std::optional<std::string> preset_name(const json& process)
{
    if (process.is_string())
        return process.get<std::string>();
    if (process.is_object() && process.contains("preset") && process.at("preset").is_string())
        return process.at("preset").get<std::string>();
    return std::nullopt;
}

ProcessSpec process_of(const Context& c)
{
    if (!c.cfg.contains("process"))
        throw SchemaError("process", "missing required key");
    return process_from_json(c.cfg.at("process"), "process");
}

Vec start_of(const Context& c, int d)
{
    if (c.cfg.contains("start"))
        return vec_from_json(c.cfg.at("start"), "start", d);
    if (c.cfg.contains("process"))
        if (const auto name = preset_name(c.cfg.at("process")); name && has_preset(*name))
            return preset_info(*name).default_start;
    return Vec::Zero(d);
}

std::vector<Vec> states_of(const Context& c, int d)
{
    if (!c.cfg.contains("states"))
        return {start_of(c, d)};
    const auto& j = c.cfg.at("states");
    if (!j.is_array() || j.empty())
        throw SchemaError("states", "expected a non-empty list of states");
    std::vector<Vec> out;
    for (std::size_t i = 0; i < j.size(); ++i)
        out.push_back(vec_from_json(j[i], fmt::format("states[{}]", i), d));
    return out;
}

std::string vec_label(const Vec& v)
{
    std::string s;
    for (Eigen::Index i = 0; i < v.size(); ++i)
        s += (i ? ";" : "") + format_number(v[i]);
    return s;
}

StateTriplet triplet_of(const Context& c)
{
    if (c.cfg.contains("triplet"))
        return triplet_from_json(c.cfg.at("triplet"), "triplet");
    return process_triplet(process_of(c));
}

json bank_cfg(const Context& c)
{
    if (!c.cfg.contains("bank"))
        return json::object();
    const auto& b = c.cfg.at("bank");
    if (!b.is_object())
        throw SchemaError("bank", "expected an object");
    for (const auto& item : b.items())
        if (item.key() != "pairs" && item.key() != "supermodular_pairs" && item.key() != "supermodular_functions" &&
            item.key() != "wa_pairs" && item.key() != "seed")
            throw SchemaError("bank." + item.key(), "unknown key");
    return b;
}

std::uint64_t bank_seed(const Context& c)
{
    const auto b = bank_cfg(c);
    if (b.contains("seed"))
    {
        if (!b.at("seed").is_number_unsigned())
            throw SchemaError("bank.seed", "expected an unsigned integer");
        return b.at("seed").get<std::uint64_t>();
    }
    return seed_of(c);
}

std::vector<TestFunction> functions_of(const Context& c, int d)
{
    if (!c.cfg.contains("functions"))
        return {TestFunction::logistic(Vec::Ones(d), 0.0).with_id("logistic_sum")};
    const auto& j = c.cfg.at("functions");
    if (!j.is_array() || j.empty())
        throw SchemaError("functions", "expected a non-empty list of test functions");
    std::vector<TestFunction> out;
    for (std::size_t i = 0; i < j.size(); ++i)
    {
        const auto key = fmt::format("functions[{}]", i);
        out.push_back(test_function_from_json(j[i], d, key).with_id(fmt::format("f{}", i)));
    }
    return out;
}

// ---------------------------------------------------------------- experiments

void run_simulate(Context& c)
{
    const auto spec = process_of(c);
    const Vec x = start_of(c, spec.dim());
    const auto grid = list_or(c.cfg, "grid", {double_or(c.cfg, "t", 1.0)});
    const auto e = simulate(spec, x, grid, paths_of(c), seed_of(c), c.jobs);
    std::string format = "csv";
    if (c.cfg.contains("format"))
    {
        if (!c.cfg.at("format").is_string())
            throw SchemaError("format", "expected \"csv\", \"binary\" or \"both\"");
        format = c.cfg.at("format").get<std::string>();
        if (format != "csv" && format != "binary" && format != "both")
            throw SchemaError("format", "expected \"csv\", \"binary\" or \"both\"");
    }
    if (format != "binary")
    {
        std::ostringstream ss;
        write_paths_csv(e, ss);
        c.write("paths.csv", ss.str());
    }
    if (format != "csv")
    {
        std::ostringstream ss;
        write_paths_binary(e, ss);
        c.write("paths.bin", ss.str());
    }
    std::vector<double> t, mean;
    for (std::size_t j = 0; j < e.n_times(); ++j)
    {
        t.push_back(e.grid[j]);
        mean.push_back(e.snapshot(j).col(0).mean());
    }
    c.write("mean_x1.tsv", two_column_tsv("t", "mean_x1", t, mean));
}

void run_check_resnick(Context& c)
{
    const auto triplet = triplet_of(c);
    const int d = triplet.dim();
    const auto states = states_of(c, d);
    const int pairs = int_field(bank_cfg(c), "bank", "pairs", 32);
    const auto bank = monotone_pair_bank(d, pairs, bank_seed(c), Standardization::identity(d));
    std::string csv = "x,offorthant_mass,std_error,exact,min_reduced_gap,sign_law\n";
    for (const auto& x : states)
    {
        const auto m = resnick_offorthant_mass(triplet, x, seed_of(c));
        double min_gap = std::numeric_limits<double>::infinity();
        for (const auto& p : bank)
            min_gap = std::min(min_gap, liggett_gap(triplet, p.f, p.g, x).reduced.value);
        std::string law = "n/a";
        if (m.exact && m.mass == 0.0)
        {
            law = min_gap >= -1e-12 ? "pass" : "fail";
            if (law == "fail")
                c.fail(fmt::format("orthant condition holds at x={} but a monotone pair has reduced gap {}",
                                   vec_label(x), min_gap));
        }
        csv += fmt::format("{},{},{},{},{},{}\n", vec_label(x), format_number(m.mass), format_number(m.std_error),
                           m.exact ? "true" : "false", format_number(min_gap), law);
    }
    c.write("resnick.csv", csv);
}

void run_liggett(Context& c)
{
    const auto triplet = triplet_of(c);
    const int d = triplet.dim();
    const auto states = states_of(c, d);
    const int pairs = int_field(bank_cfg(c), "bank", "pairs", 32);
    const auto bank = monotone_pair_bank(d, pairs, bank_seed(c), Standardization::identity(d));
    std::string csv = "x,pair,direct,direct_error,reduced,reduced_error,abs_difference,cancellation\n";
    for (const auto& x : states)
        for (const auto& p : bank)
        {
            const auto g = liggett_gap(triplet, p.f, p.g, x);
            const double diff = std::fabs(g.direct.value - g.reduced.value);
            const double tol = 1e-8 * (1.0 + std::fabs(g.reduced.value)) + g.direct.error + g.reduced.error;
            const bool okay = diff <= tol;
            if (!okay)
                c.fail(fmt::format("product-rule cancellation fails at x={} for {}: |{} - {}| > {}", vec_label(x),
                                   p.id, g.direct.value, g.reduced.value, tol));
            csv += fmt::format("{},{},{},{},{},{},{},{}\n", vec_label(x), p.id, format_number(g.direct.value),
                               format_number(g.direct.error), format_number(g.reduced.value),
                               format_number(g.reduced.error), format_number(diff), okay ? "pass" : "fail");
        }
    c.write("liggett.csv", csv);
}

void run_dependence(Context& c)
{
    const auto spec = process_of(c);
    const Vec x = start_of(c, spec.dim());
    const double t = double_or(c.cfg, "t", 1.0);
    std::vector<std::string> tests = {"A", "WA", "PSA", "PSD", "PUOD", "PLOD", "POD"};
    if (c.cfg.contains("tests"))
    {
        const auto& j = c.cfg.at("tests");
        if (!j.is_array() || j.empty())
            throw SchemaError("tests", "expected a non-empty list of test names");
        tests.clear();
        for (std::size_t i = 0; i < j.size(); ++i)
        {
            if (!j[i].is_string())
                throw SchemaError(fmt::format("tests[{}]", i), "expected a string");
            const auto name = j[i].get<std::string>();
            try
            {
                test_kind_from_string(name);
            }
            catch (const SpecError& e)
            {
                throw SchemaError(fmt::format("tests[{}]", i), e.what());
            }
            tests.push_back(name);
        }
    }
    std::string expect = "consistent";
    if (c.cfg.contains("expect"))
    {
        if (!c.cfg.at("expect").is_string() ||
            (c.cfg.at("expect") != "consistent" && c.cfg.at("expect") != "violated"))
            throw SchemaError("expect", "expected \"consistent\" or \"violated\"");
        expect = c.cfg.at("expect").get<std::string>();
    }
    const auto b = bank_cfg(c);
    DependenceSuiteOptions so;
    so.monotone_pairs = int_field(b, "bank", "pairs", 32);
    so.supermodular_pairs = int_field(b, "bank", "supermodular_pairs", 16);
    so.supermodular_functions = int_field(b, "bank", "supermodular_functions", 16);
    so.wa_pairs_per_partition = int_field(b, "bank", "wa_pairs", 8);
    const std::uint64_t seed = seed_of(c);

    const auto e = simulate(spec, x, {t}, paths_of(c), seed, c.jobs);
    const Mat samples = e.terminal();
    auto all = dependence_suite(samples, bank_seed(c), so);
    for (auto& [k, r] : all)
        r.seed = seed;

    std::vector<DependenceReport> selected;
    std::map<TestKind, DependenceReport> for_implications;
    for (const auto& name : tests)
    {
        const TestKind k = test_kind_from_string(name);
        if (k == TestKind::TemporalA)
        {
            const auto grid = list_or(c.cfg, "grid", {0.5 * t, t});
            auto rep = temporal_assoc_test(spec, x, grid, paths_of(c), seed, so.monotone_pairs, c.jobs);
            selected.push_back(rep);
            continue;
        }
        selected.push_back(all.at(k));
        for_implications[k] = all.at(k);
    }

    bool any_violated = false;
    for (const auto& r : selected)
    {
        c.write(fmt::format("dependence_{}.json", to_string(r.test)), dependence_report_json(r).dump(2) + "\n");
        fmt::print(c.log, "{}: {}\n", to_string(r.test), to_string(r.verdict()));
        if (r.verdict() == Verdict::violated)
        {
            any_violated = true;
            if (expect == "consistent")
                c.fail(fmt::format("{} reported violated rows", to_string(r.test)));
        }
    }
    if (expect == "violated" && !any_violated)
        c.fail("no dependence test reported a violation");
    c.write("dependence.csv", dependence_reports_csv(selected));

    const auto violations = implication_consistency(for_implications);
    json iv = json::array();
    for (const auto& v : violations)
    {
        json premises = json::array();
        for (auto p : v.premises)
            premises.push_back(to_string(p));
        iv.push_back({{"conclusion", to_string(v.conclusion)}, {"premises", premises}, {"message", v.message}});
        c.fail("implication map: " + v.message);
    }
    c.write("implications.json", iv.dump(2) + "\n");
}

std::vector<RegionSpec> regions_of(const Context& c, int d)
{
    if (!c.cfg.contains("regions"))
        throw SchemaError("regions", "missing required key");
    const auto& j = c.cfg.at("regions");
    if (!j.is_array() || j.empty())
        throw SchemaError("regions", "expected a non-empty list of rectangles");
    std::vector<RegionSpec> out;
    for (std::size_t i = 0; i < j.size(); ++i)
    {
        const auto key = fmt::format("regions[{}]", i);
        const auto& r = j[i];
        if (!r.is_object())
            throw SchemaError(key, "expected an object");
        for (const auto& item : r.items())
            if (item.key() != "id" && item.key() != "lower" && item.key() != "upper")
                throw SchemaError(key + "." + item.key(), "unknown key");
        auto bound = [&](const char* name, double fill) {
            if (!r.contains(name))
                throw SchemaError(key + "." + name, "missing required key");
            const auto& b = r.at(name);
            if (!b.is_array() || static_cast<int>(b.size()) != d)
                throw SchemaError(key + "." + name, fmt::format("expected {} entries", d));
            Vec v(d);
            for (int k = 0; k < d; ++k)
            {
                // null stands for an infinite side
                if (b[static_cast<std::size_t>(k)].is_null())
                    v[k] = fill;
                else if (b[static_cast<std::size_t>(k)].is_number())
                    v[k] = b[static_cast<std::size_t>(k)].get<double>();
                else
                    throw SchemaError(fmt::format("{}.{}[{}]", key, name, k), "expected a number or null");
            }
            return v;
        };
        const double inf = std::numeric_limits<double>::infinity();
        std::string id = fmt::format("region{}", i);
        if (r.contains("id"))
        {
            if (!r.at("id").is_string())
                throw SchemaError(key + ".id", "expected a string");
            id = r.at("id").get<std::string>();
        }
        out.push_back({id, Rectangle{bound("lower", -inf), bound("upper", inf)}});
    }
    return out;
}

SmalltimeOptions smalltime_options(const Context& c, const RunOptions& ro)
{
    SmalltimeOptions so;
    so.t_list = list_or(c.cfg, "t_list", so.t_list);
    for (double t : so.t_list)
        if (!(t > 0.0))
            throw SchemaError("t_list", "times must be positive");
    so.paths_scale = double_or(c.cfg, "paths_scale", so.paths_scale);
    if (ro.paths)
        so.paths_scale = static_cast<double>(*ro.paths) * *std::min_element(so.t_list.begin(), so.t_list.end());
    if (!(so.paths_scale > 0.0))
        throw SchemaError("paths_scale", "must be positive");
    so.jobs = c.jobs;
    return so;
}

void run_smalltime(Context& c, const RunOptions& ro)
{
    const auto spec = process_of(c);
    const Vec x = start_of(c, spec.dim());
    const auto regions = regions_of(c, spec.dim());
    const auto so = smalltime_options(c, ro);
    const auto tables = smalltime_rates(spec, x, regions, so, seed_of(c));
    c.write("smalltime.csv", smalltime_csv(tables));

    const auto nu = reference_measure(spec, x);
    const double t_min = *std::min_element(so.t_list.begin(), so.t_list.end());
    std::string fit = "region_id,nu_value,intercept,intercept_se,slope,tolerance,verdict\n";
    for (const auto& tab : tables)
    {
        std::vector<double> t, rate;
        for (const auto& r : tab.rows)
        {
            t.push_back(r.t);
            rate.push_back(r.rate);
        }
        c.write(fmt::format("smalltime_{}.tsv", tab.region_id), two_column_tsv("t", "rate", t, rate));
        std::string verdict = "n/a";
        double tol = std::numeric_limits<double>::quiet_NaN();
        if (std::isfinite(tab.nu_value))
        {
            // O(t) bias of the first-order expansion, or a relative band for infinite activity
            const double lambda = nu ? nu->total_mass() : std::numeric_limits<double>::infinity();
            tol = 3.0 * tab.intercept_se +
                  (std::isfinite(lambda) ? lambda * lambda * t_min * std::max(1.0, tab.nu_value)
                                         : 0.05 * tab.nu_value);
            const bool pass = std::fabs(tab.intercept - tab.nu_value) <= tol;
            verdict = pass ? "pass" : "fail";
            if (!pass)
                c.fail(fmt::format("region {}: intercept {} differs from nu(A) = {} by more than {}", tab.region_id,
                                   tab.intercept, tab.nu_value, tol));
        }
        fit += fmt::format("{},{},{},{},{},{},{}\n", tab.region_id, format_number(tab.nu_value),
                           format_number(tab.intercept), format_number(tab.intercept_se), format_number(tab.slope),
                           format_number(tol), verdict);
    }
    c.write("smalltime_fit.csv", fit);
}

void run_puod_necessity(Context& c, const RunOptions& ro)
{
    const auto spec = process_of(c);
    const Vec x = start_of(c, spec.dim());
    NecessityOptions no;
    no.smalltime = smalltime_options(c, ro);
    no.puod_paths = c.cfg.contains("puod_paths") ? c.cfg.at("puod_paths").get<std::size_t>() : no.puod_paths;
    if (ro.paths)
        no.puod_paths = *ro.paths;
    const auto rep = puod_necessity_experiment(spec, x, no, seed_of(c));

    std::string csv = "t,n_paths,joint_rate,joint_se,product_rate,product_se,nu_region\n";
    std::vector<double> t, joint, product;
    for (const auto& r : rep.rows)
    {
        csv += fmt::format("{},{},{},{},{},{},{}\n", format_number(r.t), r.n_paths, format_number(r.joint_rate),
                           format_number(r.joint_se), format_number(r.product_rate), format_number(r.product_se),
                           format_number(rep.nu_region));
        t.push_back(r.t);
        joint.push_back(r.joint_rate);
        product.push_back(r.product_rate);
    }
    c.write("necessity.csv", csv);
    c.write("necessity_joint.tsv", two_column_tsv("t", "joint_rate", t, joint));
    c.write("necessity_product.tsv", two_column_tsv("t", "product_rate", t, product));
    json puod = dependence_report_json(rep.puod);
    puod["t"] = rep.puod_t;
    puod["region"] = {{"lower", vec_label(rep.region.rect.lower)}, {"upper", vec_label(rep.region.rect.upper)}};
    puod["atom"] = vec_to_json(rep.atom);
    puod["a"] = rep.a;
    c.write("necessity_puod.json", puod.dump(2) + "\n");
    fmt::print(c.log, "PUOD at t={}: {}\n", rep.puod_t, to_string(rep.puod.verdict()));
    if (rep.puod.verdict() != Verdict::violated)
        c.fail("PUOD was not violated at the smallest time");
}

void run_generator_checks(Context& c)
{
    const auto spec = process_of(c);
    const int d = spec.dim();
    const Vec x = start_of(c, d);
    const double t = double_or(c.cfg, "t", 1.0);
    const double h = double_or(c.cfg, "h", 0.05);
    const auto t_list = list_or(c.cfg, "t_list", {0.4, 0.2, 0.1, 0.05});
    const auto functions = functions_of(c, d);
    const std::size_t n = paths_of(c);
    const std::uint64_t seed = seed_of(c);
    const bool has_triplet = !std::holds_alternative<SubordinatedSpec>(spec.kind);
    const auto* pp = std::get_if<PseudoPoissonSpec>(&spec.kind);

    std::vector<Vec> chain;
    if (c.cfg.contains("chain"))
        chain = [&] {
            const auto& j = c.cfg.at("chain");
            if (!j.is_array() || j.size() < 2)
                throw SchemaError("chain", "expected at least two states");
            std::vector<Vec> out;
            for (std::size_t i = 0; i < j.size(); ++i)
                out.push_back(vec_from_json(j[i], fmt::format("chain[{}]", i), d));
            return out;
        }();
    else if (pp && pp->kernel.table)
    {
        const auto& states = pp->kernel.table->states;
        const std::size_t k = std::min<std::size_t>(5, states.size());
        for (std::size_t i = 0; i < k; ++i)
            chain.push_back(states[k == 1 ? 0 : i * (states.size() - 1) / (k - 1)]);
    }
    else
        for (int k = 0; k < 5; ++k)
            chain.push_back(x + static_cast<double>(k) * Vec::Ones(d));

    std::vector<CheckRow> rows;
    for (const auto& f : functions)
    {
        const auto s = semigroup_apply(spec, f, x, t, n, seed, c.jobs);
        CheckRow row{"semigroup:" + f.id(), spec.id, x, t, s.value, s.std_error, std::nullopt, "n/a"};
        if (pp && pp->kernel.table)
        {
            row.oracle = pseudo_poisson_semigroup_exact(spec, f, x, t);
            const bool pass = std::fabs(s.value - *row.oracle) <= 3.0 * s.std_error + 1e-12;
            row.verdict = pass ? "pass" : "fail";
            if (!pass)
                c.fail(fmt::format("semigroup estimate for {} differs from the series value", f.id()));
        }
        rows.push_back(row);

        if (has_triplet && f.smooth())
        {
            const auto table = generator_limit_check(spec, f, x, t_list, n, seed, c.jobs);
            const auto [lo, hi] = std::minmax_element(table.rows.begin(), table.rows.end(),
                                                      [](const auto& a, const auto& b) { return a.t < b.t; });
            for (const auto& r : table.rows)
                rows.push_back({"generator_limit:" + f.id(), spec.id, x, r.t, r.difference_quotient.value,
                                r.difference_quotient.std_error, r.generator,
                                fmt::format("discrepancy={}", format_number(r.discrepancy))});
            const bool shrinking = table.rows.size() < 2 || f.is_constant() || lo->discrepancy < hi->discrepancy;
            rows.push_back({"generator_limit_trend:" + f.id(), spec.id, x, lo->t, lo->discrepancy, 0.0,
                            hi->discrepancy, shrinking ? "pass" : "fail"});
            if (!shrinking)
                c.fail(fmt::format("generator discrepancy for {} does not shrink with t", f.id()));

            if (h < t)
            {
                const auto dc = derivative_commute_check(spec, f, x, t, h, n, seed, c.jobs);
                const bool agree = std::fabs(dc.time_derivative.value - dc.generator_side.value) <=
                                   3.0 * dc.pooled_se + 1e-12;
                rows.push_back({"derivative_commute:" + f.id(), spec.id, x, t, dc.time_derivative.value,
                                dc.time_derivative.std_error, dc.generator_side.value, agree ? "pass" : "fail"});
                if (!agree)
                    c.fail(fmt::format("time derivative and T_t I f disagree for {}", f.id()));
            }
        }

        if (f.monotone())
        {
            const auto steps = monotonicity_transfer_check(spec, f, chain, t, n, seed, c.jobs);
            for (const auto& s : steps)
            {
                rows.push_back({"monotonicity:" + f.id(), spec.id, s.upper_start, t, s.upper.value - s.lower.value,
                                s.pooled_se, std::nullopt, s.passed ? "pass" : "fail"});
                if (!s.passed)
                    c.fail(fmt::format("T_t {} decreases between {} and {}", f.id(), vec_label(s.lower_start),
                                       vec_label(s.upper_start)));
            }
        }
    }
    c.write("checks.csv", check_rows_csv(rows));
}

std::uint64_t resolve_seed(const RunOptions& ro, const json& cfg)
{
    if (ro.seed)
        return *ro.seed;
    if (cfg.contains("seed"))
    {
        if (!cfg.at("seed").is_number_unsigned())
            throw SchemaError("seed", "expected an unsigned 64-bit integer");
        return cfg.at("seed").get<std::uint64_t>();
    }
    if (const char* env = std::getenv("FELLERDEP_SEED"); env && *env)
    {
        try
        {
            std::size_t used = 0;
            const auto v = std::stoull(env, &used);
            if (used != std::string(env).size())
                throw std::invalid_argument(env);
            return v;
        }
        catch (const std::exception&)
        {
            throw SchemaError("FELLERDEP_SEED", "expected an unsigned 64-bit integer");
        }
    }
    return builtin_seed;
}

std::size_t default_paths(const std::string& experiment)
{
    if (experiment == "simulate")
        return 1000;
    if (experiment == "generator-checks")
        return 100000;
    return 100000;
}
}  // namespace

void list_presets(std::ostream& out)
{
    fmt::print(out, "{:<28} {:<20} {}\n", "name", "family", "description");
    for (const auto& p : preset_catalog())
        fmt::print(out, "{:<28} {:<20} {}\n", p.name, p.family, p.description);
}

int run(const RunOptions& ro, std::ostream& log, std::ostream& err)
{
    json raw;
    Context c{json::object(), "", ro.jobs, log, {}, {}};
    std::string experiment;
    try
    {
        std::ifstream in(ro.config_path, std::ios::binary);
        if (!in)
        {
            fmt::print(err, "error: cannot read config '{}'\n", ro.config_path);
            return bad_config;
        }
        std::ostringstream ss;
        ss << in.rdbuf();
        raw = parse_json_text(ss.str(), ro.config_path);
        if (!raw.is_object())
            throw SchemaError("<root>", "expected an object");
        for (const auto& item : raw.items())
            if (std::find(top_level_keys.begin(), top_level_keys.end(), item.key()) == top_level_keys.end())
                throw SchemaError(item.key(), "unknown key");
        if (!raw.contains("experiment") || !raw.at("experiment").is_string())
            throw SchemaError("experiment", "missing or not a string");
        experiment = raw.at("experiment").get<std::string>();
        if (std::find(experiments.begin(), experiments.end(), experiment) == experiments.end())
            throw SchemaError("experiment", fmt::format("unknown experiment '{}'", experiment));

        c.cfg = raw;
        c.cfg.erase("out");
        c.cfg["seed"] = resolve_seed(ro, raw);
        if (ro.paths)
            c.cfg["n_paths"] = *ro.paths;
        else if (raw.contains("n_paths"))
        {
            if (!raw.at("n_paths").is_number_unsigned() || raw.at("n_paths").get<std::size_t>() == 0)
                throw SchemaError("n_paths", "expected a positive integer");
        }
        else
            c.cfg["n_paths"] = default_paths(experiment);
        if (raw.contains("puod_paths") && !raw.at("puod_paths").is_number_unsigned())
            throw SchemaError("puod_paths", "expected a positive integer");

        if (ro.out)
            c.out_dir = *ro.out;
        else if (raw.contains("out"))
        {
            if (!raw.at("out").is_string())
                throw SchemaError("out", "expected a directory name");
            c.out_dir = raw.at("out").get<std::string>();
        }
        else
            c.out_dir = "feller-dep-out";
        fs::create_directories(c.out_dir);

        if (experiment == "simulate")
            run_simulate(c);
        else if (experiment == "check-resnick")
            run_check_resnick(c);
        else if (experiment == "liggett")
            run_liggett(c);
        else if (experiment == "dependence")
            run_dependence(c);
        else if (experiment == "smalltime")
            run_smalltime(c, ro);
        else if (experiment == "puod-necessity")
            run_puod_necessity(c, ro);
        else
            run_generator_checks(c);
    }
    catch (const SchemaError& e)
    {
        fmt::print(err, "config error: {}\n", e.what());
        return bad_config;
    }
    catch (const QuadratureError& e)
    {
        fmt::print(err, "error: {}\n", e.what());
        return check_failed;
    }
    catch (const SpecError& e)
    {
        fmt::print(err, "config error: {}\n", e.what());
        return bad_config;
    }
    catch (const PreconditionError& e)
    {
        fmt::print(err, "config error: {}\n", e.what());
        return bad_config;
    }
    catch (const std::exception& e)
    {
        fmt::print(err, "error: {}\n", e.what());
        return check_failed;
    }

    json outputs = json::array();
    for (const auto& name : c.outputs)
        outputs.push_back({{"file", name}, {"fnv1a64", hex64(file_hash((fs::path(c.out_dir) / name).string()))}});
    json manifest = {{"tool", "feller-dep"},
                     {"experiment", experiment},
                     {"config", c.cfg},
                     {"config_hash", hex64(fnv1a64(c.cfg.dump()))},
                     {"outputs", outputs},
                     {"status", c.failures.empty() ? "ok" : "check_failed"},
                     {"failures", c.failures}};
    try
    {
        write_text((fs::path(c.out_dir) / "manifest.json").string(), manifest.dump(2) + "\n");
    }
    catch (const std::exception& e)
    {
        fmt::print(err, "error: {}\n", e.what());
        return check_failed;
    }
    return c.failures.empty() ? ok : check_failed;
}

}  // namespace fellerdep::cli
