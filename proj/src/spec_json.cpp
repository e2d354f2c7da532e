#include "fellerdep/spec_json.hpp"

#include "fellerdep/presets.hpp"

#include <fmt/format.h>

#include <algorithm>
#include <cmath>
#include <initializer_list>

namespace fellerdep
{
using nlohmann::json;

namespace
{
std::string sub(const std::string& key, const std::string& name)
{
    return key.empty() ? name : key + "." + name;
}

std::string idx(const std::string& key, std::size_t i)
{
    return fmt::format("{}[{}]", key, i);
}

void expect_object(const json& j, const std::string& key, std::initializer_list<const char*> allowed)
{
    if (!j.is_object())
        throw SchemaError(key, "expected an object");
    for (const auto& item : j.items())
        if (std::none_of(allowed.begin(), allowed.end(), [&](const char* a) { return item.key() == a; }))
            throw SchemaError(sub(key, item.key()), "unknown key");
}

const json& field(const json& j, const std::string& key, const char* name)
{
    if (!j.contains(name))
        throw SchemaError(sub(key, name), "missing required key");
    return j.at(name);
}

double number(const json& j, const std::string& key)
{
    if (!j.is_number())
        throw SchemaError(key, "expected a number");
    const double v = j.get<double>();
    if (!std::isfinite(v))
        throw SchemaError(key, "expected a finite number");
    return v;
}

double number_field(const json& j, const std::string& key, const char* name)
{
    return number(field(j, key, name), sub(key, name));
}

double number_or(const json& j, const std::string& key, const char* name, double fallback)
{
    return j.contains(name) ? number(j.at(name), sub(key, name)) : fallback;
}

std::string string_field(const json& j, const std::string& key, const char* name)
{
    const auto& v = field(j, key, name);
    if (!v.is_string())
        throw SchemaError(sub(key, name), "expected a string");
    return v.get<std::string>();
}

std::string kind_or(const json& j, const std::string& key, const char* fallback)
{
    return j.contains("kind") ? string_field(j, key, "kind") : std::string(fallback);
}

int integer(const json& j, const std::string& key)
{
    if (!j.is_number_integer())
        throw SchemaError(key, "expected an integer");
    return j.get<int>();
}

template<class Fn>
auto rethrow_as_schema(const std::string& key, Fn&& fn)
{
    try
    {
        return fn();
    }
    catch (const SchemaError&)
    {
        throw;
    }
    catch (const Error& e)
    {
        throw SchemaError(key, e.what());
    }
}

AtomicLaw atomic_law_from_json(const json& atoms, int d, const std::string& key)
{
    if (!atoms.is_array())
        throw SchemaError(key, "expected a list of atoms");
    std::vector<Atom> out;
    for (std::size_t i = 0; i < atoms.size(); ++i)
    {
        const auto& a = atoms[i];
        const auto k = idx(key, i);
        expect_object(a, k, {"point", "weight"});
        Vec p;
        if (d == 1 && field(a, k, "point").is_number())
            p = Vec::Constant(1, number(a.at("point"), sub(k, "point")));
        else
            p = vec_from_json(field(a, k, "point"), sub(k, "point"), d);
        out.push_back({p, number_field(a, k, "weight")});
    }
    return rethrow_as_schema(key, [&] { return AtomicLaw(d, std::move(out)); });
}

JumpLaw law_from_json(const json& j, int d, const std::string& key)
{
    const std::string kind = kind_or(j, key, "atoms");
    if (kind == "atoms")
    {
        expect_object(j, key, {"kind", "atoms"});
        return atomic_law_from_json(field(j, key, "atoms"), d, sub(key, "atoms"));
    }
    if (kind == "exponential_ray")
    {
        expect_object(j, key, {"kind", "direction", "mean"});
        const Vec dir = vec_from_json(field(j, key, "direction"), sub(key, "direction"), d);
        const double mean = number_or(j, key, "mean", 1.0);
        return rethrow_as_schema(key, [&] { return JumpLaw(ParametricLaw::exponential_ray(dir, mean)); });
    }
    throw SchemaError(sub(key, "kind"), fmt::format("unknown jump law kind '{}'", kind));
}

// Finite-activity part: rate and law keys live in the same object.
std::pair<double, JumpLaw> finite_from_json(const json& j, int d, const std::string& key)
{
    const std::string kind = kind_or(j, key, "finite");
    if (kind == "finite" || kind == "atoms")
    {
        expect_object(j, key, {"kind", "rate", "atoms"});
        const double rate = number_field(j, key, "rate");
        if (rate < 0.0)
            throw SchemaError(sub(key, "rate"), "rate must be nonnegative");
        if (!j.contains("atoms"))
        {
            if (rate != 0.0)
                throw SchemaError(sub(key, "atoms"), "missing required key");
            return {0.0, AtomicLaw(d, {})};
        }
        return {rate, atomic_law_from_json(j.at("atoms"), d, sub(key, "atoms"))};
    }
    if (kind == "exponential_ray")
    {
        expect_object(j, key, {"kind", "rate", "direction", "mean"});
        const double rate = number_field(j, key, "rate");
        if (rate < 0.0)
            throw SchemaError(sub(key, "rate"), "rate must be nonnegative");
        json law = j;
        law.erase("rate");
        return {rate, law_from_json(law, d, key)};
    }
    throw SchemaError(sub(key, "kind"), fmt::format("unknown measure kind '{}'", kind));
}

JumpLevySpec levy_from_json(const json& j, int d, const std::string& key, bool allow_kind)
{
    if (allow_kind)
        expect_object(j, key, {"kind", "drift", "nu"});
    else
        expect_object(j, key, {"drift", "nu"});
    JumpLevySpec s;
    s.drift = vec_from_json(field(j, key, "drift"), sub(key, "drift"), d);
    const int dim = static_cast<int>(s.drift.size());
    std::tie(s.rate, s.law) = finite_from_json(field(j, key, "nu"), dim, sub(key, "nu"));
    if (s.rate == 0.0)
        s.law = AtomicLaw(dim, {});
    return s;
}

std::vector<Vec> states_from_json(const json& j, const std::string& key)
{
    if (!j.is_array() || j.empty())
        throw SchemaError(key, "expected a non-empty list of states");
    std::vector<Vec> out;
    for (std::size_t i = 0; i < j.size(); ++i)
    {
        if (j[i].is_number())
            out.push_back(Vec::Constant(1, number(j[i], idx(key, i))));
        else
            out.push_back(vec_from_json(j[i], idx(key, i), out.empty() ? -1 : static_cast<int>(out[0].size())));
    }
    return out;
}

Mat matrix_from_json(const json& j, const std::string& key, Eigen::Index rows, Eigen::Index cols)
{
    if (!j.is_array() || static_cast<Eigen::Index>(j.size()) != rows)
        throw SchemaError(key, fmt::format("expected {} rows", rows));
    Mat m(rows, cols);
    for (Eigen::Index r = 0; r < rows; ++r)
    {
        const auto k = idx(key, static_cast<std::size_t>(r));
        const auto& row = j[static_cast<std::size_t>(r)];
        if (!row.is_array() || static_cast<Eigen::Index>(row.size()) != cols)
            throw SchemaError(k, fmt::format("expected {} entries", cols));
        for (Eigen::Index c = 0; c < cols; ++c)
            m(r, c) = number(row[static_cast<std::size_t>(c)], idx(k, static_cast<std::size_t>(c)));
    }
    return m;
}

MarkovKernel kernel_from_json(const json& j, const std::string& key)
{
    const std::string kind = string_field(j, key, "kind");
    if (kind == "table")
    {
        expect_object(j, key, {"kind", "states", "matrix"});
        TransitionTable t;
        t.states = states_from_json(field(j, key, "states"), sub(key, "states"));
        const auto n = static_cast<Eigen::Index>(t.states.size());
        t.matrix = matrix_from_json(field(j, key, "matrix"), sub(key, "matrix"), n, n);
        return rethrow_as_schema(key, [&] { return MarkovKernel::from_table(std::move(t)); });
    }
    if (kind == "translation")
    {
        expect_object(j, key, {"kind", "law", "dim"});
        int d = -1;
        const auto& law = field(j, key, "law");
        if (j.contains("dim"))
            d = integer(j.at("dim"), sub(key, "dim"));
        else if (law.contains("direction") && law.at("direction").is_array())
            d = static_cast<int>(law.at("direction").size());
        else if (law.contains("atoms") && law.at("atoms").is_array() && !law.at("atoms").empty() &&
                 law.at("atoms")[0].contains("point") && law.at("atoms")[0].at("point").is_array())
            d = static_cast<int>(law.at("atoms")[0].at("point").size());
        if (d < 1)
            throw SchemaError(sub(key, "dim"), "cannot infer the dimension of the translation law");
        return MarkovKernel::translation(law_from_json(law, d, sub(key, "law")));
    }
    throw SchemaError(sub(key, "kind"), fmt::format("unknown kernel kind '{}'", kind));
}

SubordinatorSpec subordinator_from_json(const json& j, const std::string& key)
{
    expect_object(j, key, {"drift", "alpha", "rate", "atoms"});
    SubordinatorSpec s;
    s.drift = number_or(j, key, "drift", 0.0);
    if (j.contains("alpha"))
        s.alpha = number(j.at("alpha"), sub(key, "alpha"));
    if (j.contains("atoms"))
    {
        s.rate = number_field(j, key, "rate");
        s.jumps = atomic_law_from_json(j.at("atoms"), 1, sub(key, "atoms"));
    }
    else if (j.contains("rate"))
        throw SchemaError(sub(key, "atoms"), "a subordinator rate needs a jump law");
    return s;
}
}  // namespace

json parse_json_text(const std::string& text, const std::string& source)
{
    try
    {
        return json::parse(text);
    }
    catch (const json::parse_error& e)
    {
        std::size_t line = 1;
        std::size_t col = 1;
        const std::size_t end = std::min<std::size_t>(e.byte == 0 ? 0 : e.byte - 1, text.size());
        for (std::size_t i = 0; i < end; ++i)
        {
            if (text[i] == '\n')
            {
                ++line;
                col = 1;
            }
            else
                ++col;
        }
        throw SchemaError(source, fmt::format("malformed JSON at line {}, column {}", line, col));
    }
}

Vec vec_from_json(const json& j, const std::string& key, int expected_dim)
{
    if (!j.is_array() || j.empty())
        throw SchemaError(key, "expected a non-empty list of numbers");
    if (expected_dim > 0 && static_cast<int>(j.size()) != expected_dim)
        throw SchemaError(key, fmt::format("expected {} components, found {}", expected_dim, j.size()));
    Vec v(static_cast<Eigen::Index>(j.size()));
    for (std::size_t i = 0; i < j.size(); ++i)
        v[static_cast<Eigen::Index>(i)] = number(j[i], idx(key, i));
    return v;
}

json vec_to_json(const Vec& v)
{
    json out = json::array();
    for (Eigen::Index i = 0; i < v.size(); ++i)
        out.push_back(v[i]);
    return out;
}

LevyMeasure measure_from_json(const json& j, int d, const std::string& key)
{
    if (!j.is_object())
        throw SchemaError(key, "expected an object");
    const std::string kind = kind_or(j, key, "finite");
    if (kind == "alpha_stable")
    {
        expect_object(j, key, {"kind", "alpha", "y_min", "direction"});
        AlphaStableSubordinator st;
        st.alpha = number_field(j, key, "alpha");
        st.y_min = number_or(j, key, "y_min", 1e-10);
        st.direction = j.contains("direction") ? vec_from_json(j.at("direction"), sub(key, "direction"), d)
                                               : Vec::Ones(d);
        return rethrow_as_schema(key, [&] { return LevyMeasure(st); });
    }
    auto [rate, law] = finite_from_json(j, d, key);
    if (rate == 0.0)
        return LevyMeasure::zero(d);
    return rethrow_as_schema(key, [&] { return LevyMeasure(FiniteActivity{rate, law}); });
}

StateTriplet triplet_from_json(const json& j, const std::string& key)
{
    expect_object(j, key, {"d", "drift", "diffusion", "nu", "symbol_bounded"});
    const int d = integer(field(j, key, "d"), sub(key, "d"));
    if (d < 1)
        throw SchemaError(sub(key, "d"), "dimension must be positive");
    const auto& drift = field(j, key, "drift");
    Mat diffusion;
    if (j.contains("diffusion"))
        diffusion = matrix_from_json(j.at("diffusion"), sub(key, "diffusion"), d, d);
    const LevyMeasure nu = measure_from_json(field(j, key, "nu"), d, sub(key, "nu"));
    bool bounded = true;
    if (j.contains("symbol_bounded"))
    {
        if (!j.at("symbol_bounded").is_boolean())
            throw SchemaError(sub(key, "symbol_bounded"), "expected true or false");
        bounded = j.at("symbol_bounded").get<bool>();
    }
    if (drift.is_array())
        return StateTriplet::constant(vec_from_json(drift, sub(key, "drift"), d), diffusion, nu, bounded);
    const auto dk = sub(key, "drift");
    expect_object(drift, dk, {"b0", "lambda"});
    const Vec b0 = vec_from_json(field(drift, dk, "b0"), sub(dk, "b0"), d);
    const double lambda = number_field(drift, dk, "lambda");
    Mat sigma = diffusion;
    StateTriplet::DiffusionFn sfn;
    if (sigma.size() > 0)
        sfn = [sigma](const Vec&) { return sigma; };
    return StateTriplet(
        d, [b0, lambda](const Vec& x) -> Vec { return b0 - lambda * x; }, sfn, [nu](const Vec&) { return nu; },
        bounded);
}

ProcessSpec process_from_json(const json& j, const std::string& key)
{
    if (j.is_string())
        return rethrow_as_schema(key, [&] { return make_preset(j.get<std::string>()); });
    if (!j.is_object())
        throw SchemaError(key, "expected a preset name or an object");
    if (j.contains("preset"))
    {
        expect_object(j, key, {"preset"});
        return rethrow_as_schema(sub(key, "preset"),
                                 [&] { return make_preset(string_field(j, key, "preset")); });
    }
    const std::string kind = string_field(j, key, "kind");
    ProcessSpec spec;
    spec.id = kind;
    if (kind == "jump_levy")
        spec.kind = levy_from_json(j, -1, key, true);
    else if (kind == "ornstein_uhlenbeck")
    {
        expect_object(j, key, {"kind", "mean_reversion", "driver"});
        OrnsteinUhlenbeckSpec ou;
        ou.mean_reversion = number_field(j, key, "mean_reversion");
        ou.driver = levy_from_json(field(j, key, "driver"), -1, sub(key, "driver"), false);
        spec.kind = ou;
    }
    else if (kind == "pseudo_poisson")
    {
        expect_object(j, key, {"kind", "rate", "kernel"});
        PseudoPoissonSpec pp;
        pp.rate = number_field(j, key, "rate");
        pp.kernel = kernel_from_json(field(j, key, "kernel"), sub(key, "kernel"));
        spec.kind = pp;
    }
    else if (kind == "subordinated")
    {
        expect_object(j, key, {"kind", "inner", "subordinator"});
        SubordinatedSpec s;
        const auto& inner = field(j, key, "inner");
        const auto ik = sub(key, "inner");
        const std::string ikind = string_field(inner, ik, "kind");
        if (ikind == "drift")
        {
            expect_object(inner, ik, {"kind", "velocity"});
            s.inner = DriftInner{vec_from_json(field(inner, ik, "velocity"), sub(ik, "velocity"))};
        }
        else if (ikind == "jump_levy")
            s.inner = levy_from_json(inner, -1, ik, true);
        else
            throw SchemaError(sub(ik, "kind"), fmt::format("unknown inner process kind '{}'", ikind));
        s.subordinator = subordinator_from_json(field(j, key, "subordinator"), sub(key, "subordinator"));
        spec.kind = s;
    }
    else
        throw SchemaError(sub(key, "kind"), fmt::format("unknown process kind '{}'", kind));
    rethrow_as_schema(key, [&] {
        spec.validate();
        return 0;
    });
    return spec;
}

TestFunction test_function_from_json(const json& j, int d, const std::string& key)
{
    const std::string kind = string_field(j, key, "kind");
    auto build = [&]() -> TestFunction {
        if (kind == "constant")
        {
            expect_object(j, key, {"kind", "value"});
            return TestFunction::constant(d, number_field(j, key, "value"));
        }
        if (kind == "logistic")
        {
            expect_object(j, key, {"kind", "weights", "shift", "scale"});
            return TestFunction::logistic(vec_from_json(field(j, key, "weights"), sub(key, "weights"), d),
                                          number_or(j, key, "shift", 0.0), number_or(j, key, "scale", 1.0));
        }
        if (kind == "logistic_product")
        {
            expect_object(j, key, {"kind", "factors"});
            const auto& fs = field(j, key, "factors");
            if (!fs.is_array())
                throw SchemaError(sub(key, "factors"), "expected a list");
            std::vector<TestFunction::Factor> factors;
            for (std::size_t i = 0; i < fs.size(); ++i)
            {
                const auto k = idx(sub(key, "factors"), i);
                expect_object(fs[i], k, {"index", "slope", "shift"});
                factors.push_back({integer(field(fs[i], k, "index"), sub(k, "index")),
                                   number_or(fs[i], k, "slope", 1.0), number_or(fs[i], k, "shift", 0.0)});
            }
            return TestFunction::logistic_product(d, std::move(factors));
        }
        if (kind == "upper_orthant" || kind == "lower_orthant")
        {
            expect_object(j, key, {"kind", "thresholds"});
            const Vec t = vec_from_json(field(j, key, "thresholds"), sub(key, "thresholds"), d);
            return kind == "upper_orthant" ? TestFunction::upper_orthant(t) : TestFunction::lower_orthant(t);
        }
        if (kind == "linear")
        {
            expect_object(j, key, {"kind", "weights", "offset"});
            return TestFunction::linear(vec_from_json(field(j, key, "weights"), sub(key, "weights"), d),
                                        number_or(j, key, "offset", 0.0));
        }
        if (kind == "coordinate_product")
        {
            expect_object(j, key, {"kind", "indices"});
            const auto& ix = field(j, key, "indices");
            if (!ix.is_array())
                throw SchemaError(sub(key, "indices"), "expected a list of integers");
            std::vector<int> indices;
            for (std::size_t i = 0; i < ix.size(); ++i)
                indices.push_back(integer(ix[i], idx(sub(key, "indices"), i)));
            return TestFunction::coordinate_product(d, std::move(indices));
        }
        if (kind == "clipped")
        {
            expect_object(j, key, {"kind", "index", "cap"});
            return TestFunction::clipped(d, integer(field(j, key, "index"), sub(key, "index")),
                                         number_field(j, key, "cap"));
        }
        if (kind == "gaussian")
        {
            expect_object(j, key, {"kind", "centre", "width"});
            return TestFunction::gaussian(vec_from_json(field(j, key, "centre"), sub(key, "centre"), d),
                                          number_field(j, key, "width"));
        }
        throw SchemaError(sub(key, "kind"), fmt::format("unknown test function kind '{}'", kind));
    };
    return rethrow_as_schema(key, build).with_id(kind);
}

}  // namespace fellerdep
