#pragma once

#include "fellerdep/dependence.hpp"
#include "fellerdep/semigroup.hpp"
#include "fellerdep/smalltime.hpp"

#include <json.hpp>

#include <cstdint>
#include <string>
#include <vector>

namespace fellerdep
{
/// 64-bit FNV-1a.
std::uint64_t fnv1a64(std::string_view bytes);
std::string hex64(std::uint64_t v);
/// FNV-1a of a file's bytes.
std::uint64_t file_hash(const std::string& path);

/// Shortest round-trip decimal; non-finite values print as nan, inf, -inf.
std::string format_number(double v);

/// Writes `text` to `path`, throwing on failure.
void write_text(const std::string& path, const std::string& text);

/// `check,spec_id,x,t,estimate,std_error,oracle,verdict`; x joined by ';', missing oracle left empty.
std::string check_rows_csv(const std::vector<CheckRow>& rows);

/// {test, rows: [{id, estimate, se, verdict}], n, seed} plus verdict, rule and note.
nlohmann::json dependence_report_json(const DependenceReport& r);
/// `test,id,estimate,se,verdict`
std::string dependence_reports_csv(const std::vector<DependenceReport>& reports);

/// `t,region_id,rate_estimate,se,nu_value,n_paths`
std::string smalltime_csv(const std::vector<SmalltimeTable>& tables);

/// Two-column TSV with a header line.
std::string two_column_tsv(const std::string& x_name, const std::string& y_name, const std::vector<double>& x,
                           const std::vector<double>& y);

}  // namespace fellerdep
