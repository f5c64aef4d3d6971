// End-to-end measurement (program + suite + objectives in, score out) and
// the scaling benchmark.
#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "htolcov/coverage/engine.hpp"
#include "htolcov/criteria/annotate.hpp"
#include "htolcov/trace/suite.hpp"

namespace htolcov::cli {

/// Pipeline stage names used in diagnostics.
enum class Stage : std::uint8_t { Program, Suite, Annotate, Htl, WellFormed, Normalize, Harvest, Consolidate, Report };

const char* to_string(Stage s);

/// An error tagged with the stage that raised it.
class StageError : public Error {
public:
    StageError(Stage stage, const std::string& what);
    [[nodiscard]] Stage stage() const { return stage_; }

private:
    Stage stage_;
};

struct MeasureConfig {
    std::string program_path;
    std::optional<std::string> entry;

    // Exactly one of suite_path / random_tests.
    std::optional<std::string> suite_path;
    std::optional<std::size_t> random_tests;
    std::uint64_t seed = 1;
    trace::IntRange range;

    // Exactly one of criteria / htl_path.
    std::vector<crit::Criterion> criteria;
    std::optional<std::string> htl_path;
    bool array_cells = false;

    std::size_t step_limit = trace::kDefaultStepLimit;
    std::size_t budget = cov::kDefaultBudget;
    std::size_t dnf_cap = htl::kDefaultDnfCap;
    int threads = 0;
    double threshold = 0.0;
};

/// Throws StageError when the configuration is inconsistent.
void validate(const MeasureConfig& cfg);

struct CoverageReport {
    mini::ProgramPtr program;
    trace::TestSuite suite;
    std::vector<htl::Hyperlabel> hyperlabels;
    crit::ProvenanceMap provenance;  // empty for HTL input
    cov::Measurement measurement;
};

/// annotate or parse_htl → check_well_formed → normalize_dnf → harvest →
/// consolidate → coverage_score. Every failure is a StageError.
CoverageReport measure(const MeasureConfig& cfg);

/// Same pipeline on objects already in memory.
CoverageReport measure(mini::ProgramPtr program, trace::TestSuite suite, std::vector<htl::Hyperlabel> hyperlabels,
                       const cov::MeasureOptions& options = {});

/// Distinct ids of the tests a verdict's witness draws on, in first-use order.
std::vector<std::string> witness_tests(const CoverageReport& r, std::size_t verdict);

std::string format_text(const CoverageReport& r);

inline constexpr const char* kCsvVersion = "htolcov-report-v1";

/// `# htolcov-report-v1`, a header row, then one row per hyperlabel.
std::string format_csv(const CoverageReport& r);

/// Every hyperlabel in normal form, one `id = disjunct + ...` per line.
std::string format_dnf(const CoverageReport& r);

/// 0 when the score reaches `threshold` and nothing ran out of budget, else 1.
int exit_status(const CoverageReport& r, double threshold);

// Benchmark.

struct LinearFit {
    double slope = 0;
    double intercept = 0;
    double r2 = 0;
};

/// Least-squares line through (x, y). R² is 1 for a perfect fit and also
/// when y is constant and matched exactly.
LinearFit fit_line(const std::vector<double>& x, const std::vector<double>& y);

struct BenchConfig {
    std::vector<std::string> programs;
    std::vector<crit::Criterion> criteria;
    std::vector<std::size_t> sizes;  // strictly increasing
    std::size_t reps = 5;
    std::uint64_t seed = 1;
    std::size_t step_limit = 100'000;
    bool parallel = false;  // baseline and measurement use the same setting
    int threads = 0;
};

struct BenchPoint {
    std::size_t size = 0;
    double seconds = 0;   // median measurement time
    double baseline = 0;  // median time to run the suite unobserved
    [[nodiscard]] double overhead() const { return baseline > 0 ? seconds / baseline : 0; }
};

struct BenchSeries {
    std::string program;
    std::string criterion;  // "none" for the baseline itself
    std::size_t objectives = 0;
    std::vector<BenchPoint> points;
    LinearFit fit;
    double median_overhead = 0;
};

struct BenchResult {
    std::vector<BenchSeries> series;
};

/// Throws StageError on unusable configuration or programs.
BenchResult bench(const BenchConfig& cfg);

std::string format_bench(const BenchResult& r);

/// Parses `lo:hi:step` or a comma-separated list.
std::vector<std::size_t> parse_sizes(const std::string& text);

/// Parses a comma-separated criterion list; throws StageError on unknown names.
std::vector<crit::Criterion> parse_criteria(const std::string& text);

}  // namespace htolcov::cli
