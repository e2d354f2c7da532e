#include "fellerdep/report_io.hpp"

#include <fmt/format.h>

#include <cmath>
#include <fstream>
#include <iterator>
#include <sstream>

namespace fellerdep
{
std::uint64_t fnv1a64(std::string_view bytes)
{
    std::uint64_t h = 0xcbf29ce484222325ull;
    for (unsigned char c : bytes)
    {
        h ^= c;
        h *= 0x100000001b3ull;
    }
    return h;
}

std::string hex64(std::uint64_t v)
{
    return fmt::format("{:016x}", v);
}

std::uint64_t file_hash(const std::string& path)
{
    std::ifstream in(path, std::ios::binary);
    if (!in)
        throw Error(fmt::format("cannot open '{}'", path));
    std::ostringstream ss;
    ss << in.rdbuf();
    return fnv1a64(ss.str());
}

std::string format_number(double v)
{
    if (std::isnan(v))
        return "nan";
    if (std::isinf(v))
        return v > 0 ? "inf" : "-inf";
    return fmt::format("{}", v);
}

void write_text(const std::string& path, const std::string& text)
{
    std::ofstream out(path, std::ios::binary);
    if (!out)
        throw Error(fmt::format("cannot open '{}' for writing", path));
    out << text;
    if (!out)
        throw Error(fmt::format("write to '{}' failed", path));
}

namespace
{
std::string join(const Vec& v)
{
    std::string out;
    for (Eigen::Index i = 0; i < v.size(); ++i)
        out += (i ? ";" : "") + format_number(v[i]);
    return out;
}

// ids may contain commas (block lists); quote them
std::string csv_field(const std::string& s)
{
    if (s.find_first_of(",\"\n") == std::string::npos)
        return s;
    std::string out = "\"";
    for (char c : s)
    {
        if (c == '"')
            out += '"';
        out += c;
    }
    return out + "\"";
}
}  // namespace

std::string check_rows_csv(const std::vector<CheckRow>& rows)
{
    std::string out = "check,spec_id,x,t,estimate,std_error,oracle,verdict\n";
    for (const auto& r : rows)
        out += fmt::format("{},{},{},{},{},{},{},{}\n", csv_field(r.check), csv_field(r.spec_id), join(r.x),
                           format_number(r.t), format_number(r.estimate), format_number(r.std_error),
                           r.oracle ? format_number(*r.oracle) : std::string(), r.verdict);
    return out;
}

nlohmann::json dependence_report_json(const DependenceReport& r)
{
    nlohmann::json rows = nlohmann::json::array();
    for (const auto& row : r.rows)
        rows.push_back({{"id", row.id}, {"estimate", row.estimate}, {"se", row.se}, {"verdict", to_string(row.verdict)}});
    nlohmann::json out = {{"test", to_string(r.test)}, {"rows", rows},       {"n", r.n},
                          {"seed", r.seed},            {"rule", r.rule},     {"verdict", to_string(r.verdict())}};
    if (!r.note.empty())
        out["note"] = r.note;
    return out;
}

std::string dependence_reports_csv(const std::vector<DependenceReport>& reports)
{
    std::string out = "test,id,estimate,se,verdict\n";
    for (const auto& r : reports)
        for (const auto& row : r.rows)
            out += fmt::format("{},{},{},{},{}\n", to_string(r.test), csv_field(row.id), format_number(row.estimate),
                               format_number(row.se), to_string(row.verdict));
    return out;
}

std::string smalltime_csv(const std::vector<SmalltimeTable>& tables)
{
    std::string out = "t,region_id,rate_estimate,se,nu_value,n_paths\n";
    for (const auto& tab : tables)
        for (const auto& row : tab.rows)
            out += fmt::format("{},{},{},{},{},{}\n", format_number(row.t), csv_field(tab.region_id),
                               format_number(row.rate), format_number(row.se), format_number(tab.nu_value),
                               row.n_paths);
    return out;
}

std::string two_column_tsv(const std::string& x_name, const std::string& y_name, const std::vector<double>& x,
                           const std::vector<double>& y)
{
    std::string out = x_name + "\t" + y_name + "\n";
    for (std::size_t i = 0; i < x.size() && i < y.size(); ++i)
        out += format_number(x[i]) + "\t" + format_number(y[i]) + "\n";
    return out;
}

}  // namespace fellerdep
