#include <gtest/gtest.h>

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "htolcov/cli/pipeline.hpp"

namespace htolcov::cli {
namespace {

namespace fs = std::filesystem;

const std::string kSamples = HTOLCOV_SAMPLES;

class TempDir {
public:
    TempDir() {
        static int counter = 0;
        path_ = fs::temp_directory_path() /
                ("htolcov_cli_test_" + std::to_string(::getpid()) + "_" + std::to_string(counter++));
        fs::create_directories(path_);
    }
    ~TempDir() { fs::remove_all(path_); }
    std::string write(const std::string& name, const std::string& text) const {
        std::ofstream(path_ / name) << text;
        return (path_ / name).string();
    }
    [[nodiscard]] std::string file(const std::string& name) const { return (path_ / name).string(); }

private:
    fs::path path_;
};

std::string slurp(const std::string& path) {
    std::ifstream in(path);
    std::stringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

int run_cli(const std::string& args) {
    std::string cmd = std::string(HTOLCOV_CLI) + " " + args + " > /dev/null 2>&1";
    int status = std::system(cmd.c_str());
    return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

MeasureConfig sample(std::vector<crit::Criterion> cs) {
    MeasureConfig cfg;
    cfg.program_path = kSamples + "/mcdc.mimp";
    cfg.suite_path = kSamples + "/mcdc.suite";
    cfg.criteria = std::move(cs);
    return cfg;
}

TEST(Measure, SampleScores) {
    EXPECT_DOUBLE_EQ(measure(sample({crit::Criterion::RACC})).measurement.score.value(), 1.0);
    EXPECT_DOUBLE_EQ(measure(sample({crit::Criterion::MCC})).measurement.score.value(), 0.75);
    auto two = sample({crit::Criterion::MCC});
    TempDir dir;
    two.suite_path = dir.write("two.suite", "t1 | x=1, y=1, a=0, b=1\nt2 | x=0, y=1, a=0, b=1\n");
    EXPECT_DOUBLE_EQ(measure(two).measurement.score.value(), 0.5);
    auto none = sample({crit::Criterion::MCC});
    none.suite_path = dir.write("empty.suite", "# no tests\n");
    auto r = measure(none);
    EXPECT_EQ(r.measurement.score.total, 4u);
    EXPECT_DOUBLE_EQ(r.measurement.score.value(), 0.0);
}

TEST(Measure, RandomSuiteIsSeeded) {
    auto cfg = sample({crit::Criterion::CC});
    cfg.suite_path.reset();
    cfg.random_tests = 20;
    cfg.seed = 9;
    auto a = measure(cfg), b = measure(cfg);
    EXPECT_EQ(a.suite.tests.size(), 20u);
    EXPECT_EQ(format_csv(a), format_csv(b));
}

TEST(Measure, ErrorsAreTaggedWithTheirStage) {
    TempDir dir;
    auto stage_of = [](const MeasureConfig& cfg) {
        try {
            measure(cfg);
        } catch (const StageError& e) {
            return e.stage();
        }
        ADD_FAILURE() << "no error";
        return Stage::Report;
    };
    auto bad_program = sample({crit::Criterion::DC});
    bad_program.program_path = dir.write("bad.mimp", "int f( {");
    EXPECT_EQ(stage_of(bad_program), Stage::Program);
    auto missing = sample({crit::Criterion::DC});
    missing.program_path = dir.file("absent.mimp");
    EXPECT_EQ(stage_of(missing), Stage::Program);
    auto bad_suite = sample({crit::Criterion::DC});
    bad_suite.suite_path = dir.write("bad.suite", "t1 | x=1\n");
    EXPECT_EQ(stage_of(bad_suite), Stage::Suite);
    auto bad_htl = sample({});
    bad_htl.htl_path = dir.write("bad.htl", "h = l(loc3, true){c <- x} + l(loc3, true){d <- y}\n");
    EXPECT_EQ(stage_of(bad_htl), Stage::Htl);  // the parser rejects ill-formed objectives
    try {
        measure(bad_htl);
    } catch (const StageError& e) {
        EXPECT_NE(std::string(e.what()).find("not well-formed"), std::string::npos) << e.what();
    }
    auto htl_syntax = sample({});
    htl_syntax.htl_path = dir.write("syntax.htl", "h = l(loc3,\n");
    EXPECT_EQ(stage_of(htl_syntax), Stage::Htl);
    auto wide = sample({crit::Criterion::MCC});
    std::string cond = "x > 0";
    for (int i = 1; i < 17; ++i) cond += " && x > " + std::to_string(i);
    wide.program_path = dir.write("wide.mimp", "int f(int x) { int r := 0; if (" + cond + ") { r := 1; } return r; }");
    wide.suite_path = dir.write("wide.suite", "t | x=1\n");
    EXPECT_EQ(stage_of(wide), Stage::Annotate);
    auto cap = sample({crit::Criterion::MCC});
    cap.dnf_cap = 0;
    EXPECT_EQ(stage_of(cap), Stage::Normalize);
    auto both = sample({crit::Criterion::DC});
    both.htl_path = dir.write("ok.htl", "h = l(loc3, true)\n");
    EXPECT_THROW(validate(both), StageError);
}

TEST(Report, CsvFormat) {
    auto r = measure(sample({crit::Criterion::MCC, crit::Criterion::RACC}));
    EXPECT_EQ(format_csv(r),
              "# htolcov-report-v1\n"
              "id,criterion,status,witness-tests\n"
              "mcc_loc3_1,MCC,covered,t1\n"
              "mcc_loc3_2,MCC,covered,t2\n"
              "mcc_loc3_3,MCC,covered,t3\n"
              "mcc_loc3_4,MCC,uncovered,\n"
              "racc_loc3_c1,RACC,covered,t1;t2\n"
              "racc_loc3_c2,RACC,covered,t1;t3\n");
    EXPECT_EQ(witness_tests(r, 4), (std::vector<std::string>{"t1", "t2"}));
    EXPECT_NE(format_text(r).find("5/6"), std::string::npos);
    EXPECT_NE(format_dnf(r).find("racc_loc3_c1"), std::string::npos);
}

TEST(Report, ExitStatus) {
    auto r = measure(sample({crit::Criterion::MCC}));
    EXPECT_EQ(exit_status(r, 0.0), 0);
    EXPECT_EQ(exit_status(r, 0.75), 0);
    EXPECT_EQ(exit_status(r, 0.8), 1);
}

TEST(Binary, ExitCodesAndReports) {
    TempDir dir;
    std::string base = "measure --program " + kSamples + "/mcdc.mimp --suite " + kSamples + "/mcdc.suite -q";
    EXPECT_EQ(run_cli(base + " --criterion RACC --threshold 1"), 0);
    EXPECT_EQ(run_cli(base + " --criterion MCC --threshold 1"), 1);
    EXPECT_EQ(run_cli(base + " --criterion NOPE"), 2);
    EXPECT_EQ(run_cli(base + " --criterion MCC --htl x.htl"), 2);
    EXPECT_EQ(run_cli("measure"), 2);
    std::string a = dir.file("a.csv"), b = dir.file("b.csv"), h = dir.file("all.htl");
    ASSERT_EQ(run_cli(base + " --criterion MCC,RACC,GACC --threads 1 --report " + a), 0);
    ASSERT_EQ(run_cli(base + " --criterion MCC,RACC,GACC --threads 4 --report " + b + " --dump-htl " + h), 0);
    EXPECT_EQ(slurp(a), slurp(b));
    EXPECT_EQ(slurp(a).rfind("# htolcov-report-v1\n", 0), 0u);
    // The dumped objectives measure the same as the criteria.
    std::string c = dir.file("c.csv");
    ASSERT_EQ(run_cli("measure --program " + kSamples + "/mcdc.mimp --suite " + kSamples + "/mcdc.suite -q --htl " +
                      h + " --report " + c),
              0);
    EXPECT_EQ(slurp(a), slurp(c));
}

TEST(Bench, FitLine) {
    LinearFit f = fit_line({1, 2, 3, 4}, {3, 5, 7, 9});
    EXPECT_NEAR(f.slope, 2.0, 1e-12);
    EXPECT_NEAR(f.intercept, 1.0, 1e-12);
    EXPECT_NEAR(f.r2, 1.0, 1e-12);
    LinearFit flat = fit_line({1, 2, 3}, {4, 4, 4});
    EXPECT_NEAR(flat.slope, 0.0, 1e-12);
    EXPECT_NEAR(flat.r2, 1.0, 1e-12);
    // y = x with one outlier: R² = 1 - SSres/SStot computed by hand.
    LinearFit noisy = fit_line({0, 1, 2, 3}, {0, 1, 2, 7});
    double slope = 2.2, intercept = -0.8;
    double ss_res = 0, ss_tot = 0, mean = 2.5;
    std::vector<double> ys = {0, 1, 2, 7};
    for (int i = 0; i < 4; ++i) {
        double r = ys[i] - (slope * i + intercept);
        ss_res += r * r;
        ss_tot += (ys[i] - mean) * (ys[i] - mean);
    }
    EXPECT_NEAR(noisy.slope, slope, 1e-12);
    EXPECT_NEAR(noisy.intercept, intercept, 1e-12);
    EXPECT_NEAR(noisy.r2, 1 - ss_res / ss_tot, 1e-12);
}

TEST(Bench, ParseArguments) {
    EXPECT_EQ(parse_sizes("100:400:100"), (std::vector<std::size_t>{100, 200, 300, 400}));
    EXPECT_EQ(parse_sizes("5,10,20"), (std::vector<std::size_t>{5, 10, 20}));
    EXPECT_THROW(parse_sizes("10,5"), StageError);
    EXPECT_THROW(parse_sizes("1:x:1"), StageError);
    EXPECT_EQ(parse_criteria("cc,RACC"), (std::vector<crit::Criterion>{crit::Criterion::CC, crit::Criterion::RACC}));
    EXPECT_THROW(parse_criteria("CC,??"), StageError);
}

TEST(Bench, SmallRun) {
    BenchConfig cfg;
    cfg.programs = {kSamples + "/mcdc.mimp"};
    cfg.criteria = {crit::Criterion::CC, crit::Criterion::RACC};
    cfg.sizes = {20, 40, 60};
    cfg.reps = 1;
    BenchResult r = bench(cfg);
    ASSERT_EQ(r.series.size(), 3u);
    EXPECT_EQ(r.series[0].criterion, "none");
    EXPECT_EQ(r.series[1].criterion, "CC");
    EXPECT_EQ(r.series[1].objectives, 4u);
    EXPECT_EQ(r.series[2].objectives, 2u);
    for (const auto& s : r.series) {
        ASSERT_EQ(s.points.size(), 3u);
        for (const auto& pt : s.points) EXPECT_GT(pt.seconds, 0.0);
    }
    EXPECT_FALSE(format_bench(r).empty());
}

}  // namespace
}  // namespace htolcov::cli
