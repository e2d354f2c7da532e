#pragma once

#include "fellerdep/core.hpp"
#include "fellerdep/process.hpp"
#include "fellerdep/test_function.hpp"

#include <map>
#include <optional>
#include <string>
#include <utility>
#include <vector>

namespace fellerdep
{
enum class Verdict
{
    consistent,
    violated,
    inconclusive,
};

enum class TestKind
{
    A,
    WA,
    PSA,
    PSD,
    PUOD,
    PLOD,
    POD,
    TemporalA,
};

std::string to_string(Verdict v);
std::string to_string(TestKind k);
TestKind test_kind_from_string(const std::string& s);

struct DependenceRow
{
    std::string id;
    double estimate = 0.0;
    double se = 0.0;
    Verdict verdict = Verdict::inconclusive;
};

struct DependenceReport
{
    TestKind test = TestKind::A;
    std::vector<DependenceRow> rows;
    std::size_t n = 0;
    std::uint64_t seed = 0;
    std::string rule;
    std::string note;

    /// violated if any row is; consistent if every conclusive row is and at
    /// least one row is conclusive; inconclusive otherwise.
    Verdict verdict() const;
    /// Some row lies more than 3 s.e. above zero.
    bool powered_positive() const;
};

/// violated iff estimate < -3 se; inconclusive rows are passed through.
Verdict row_verdict(double estimate, double se);

/// Rows with fewer samples than this are inconclusive in covariance tests.
constexpr std::size_t min_covariance_samples = 100;
/// Orthant rows need max(joint count, expected count under independence) >= this.
constexpr double min_orthant_cell_count = 20.0;

struct CovarianceRow
{
    double estimate = 0.0;
    double jackknife_se = 0.0;
};

/// Unbiased sample covariance with its delete-one jackknife standard error.
CovarianceRow jackknife_covariance(const std::vector<double>& a, const std::vector<double>& b);

/// Pair bank placed on the data by median/IQR standardization.
std::vector<FunctionPair> default_monotone_bank(const Mat& samples, int pairs, std::uint64_t seed);

DependenceReport assoc_test(const Mat& samples, const std::vector<FunctionPair>& bank, std::uint64_t seed = 0);

using Partition = std::pair<std::vector<int>, std::vector<int>>;
/// ({i}, rest) for every i plus all singleton pairs ({i}, {j}), duplicates removed.
std::vector<Partition> default_partitions(int dim);
DependenceReport wa_test(const Mat& samples, const std::vector<Partition>& partitions, int pairs_per_partition,
                         std::uint64_t seed);

DependenceReport psa_test(const Mat& samples, const std::vector<FunctionPair>& supermodular_pairs,
                          std::uint64_t seed = 0);
/// E f(X) - E f(Xhat), Xhat by independent column permutations drawn from `seed`.
DependenceReport psd_test(const Mat& samples, const std::vector<TestFunction>& supermodular_functions,
                          std::uint64_t seed);
/// Column-wise permutation used by psd_test: coordinate i uses its own substream.
Mat independent_marginals(const Mat& samples, std::uint64_t seed);

/// Per-coordinate quantiles crossed over coordinates.
std::vector<Vec> default_thresholds(const Mat& samples, const std::vector<double>& levels = {0.25, 0.5, 0.75});
/// P(X > t) - prod P(X_i > t_i) per threshold vector (strict inequalities).
DependenceReport puod_test(const Mat& samples, const std::vector<Vec>& thresholds, std::uint64_t seed = 0);
/// P(X <= t) - prod P(X_i <= t_i).
DependenceReport plod_test(const Mat& samples, const std::vector<Vec>& thresholds, std::uint64_t seed = 0);
/// Conjunction of the two orthant reports.
DependenceReport pod_report(const DependenceReport& puod, const DependenceReport& plod);

/// assoc_test on (X_{t_1}, ..., X_{t_m}) stacked into R^{dm}.
DependenceReport temporal_assoc_test(const ProcessSpec& spec, const Vec& x, const std::vector<double>& grid,
                                     std::size_t n_paths, std::uint64_t seed, int bank_pairs = 32,
                                     unsigned jobs = 0);

struct ImplicationViolation
{
    TestKind conclusion;
    std::vector<TestKind> premises;
    std::string message;
};

/// Directed arrows A=>WA, A=>PSA, WA=>PUOD, WA=>PLOD, PSA=>PSD, PSD=>POD,
/// POD=>PUOD, POD=>PLOD and their transitive closure.
std::vector<std::pair<TestKind, TestKind>> implication_arrows();
bool implies(TestKind premise, TestKind conclusion);

/**
 * A violated conclusion is contradicted by any premise implying it whose
 * report is consistent and powered positive. One entry per contradicted
 * conclusion; POD is not used as a conclusion because its violation is
 * already carried by PUOD or PLOD.
 */
std::vector<ImplicationViolation> implication_consistency(const std::map<TestKind, DependenceReport>& reports);

/// Thresholds and functions applied to all seven spatial tests of one sample.
struct DependenceSuiteOptions
{
    int monotone_pairs = 32;
    int supermodular_pairs = 16;
    int supermodular_functions = 16;
    int wa_pairs_per_partition = 8;
    std::vector<double> quantile_levels{0.25, 0.5, 0.75};
    std::vector<Vec> extra_thresholds;
};

std::map<TestKind, DependenceReport> dependence_suite(const Mat& samples, std::uint64_t seed,
                                                      const DependenceSuiteOptions& opt = {});

}  // namespace fellerdep
