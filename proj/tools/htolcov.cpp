// htolcov: coverage measurement for MiniImp programs.
//
//   htolcov measure --program p.mimp --suite p.suite --criterion MCC,RACC
//   htolcov measure --program p.mimp --random-tests 100 --htl objectives.htl
//   htolcov bench --programs a.mimp b.mimp --sizes 100:1000:100 --reps 7
#include <fstream>
#include <iostream>

#include <CLI11.hpp>

#include "htolcov/cli/pipeline.hpp"

using namespace htolcov;

namespace {

void write_file(const std::string& path, const std::string& text) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw cli::StageError(cli::Stage::Report, "cannot write '" + path + "'");
    out << text;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Hyperlabel coverage measurement for MiniImp"};
    app.require_subcommand(1);

    cli::MeasureConfig mc;
    std::string criteria;
    std::optional<std::string> dump_htl;
    std::optional<std::string> report;
    std::optional<std::string> text_report;
    bool dump_dnf = false;
    bool quiet = false;
    std::int64_t lo = mc.range.lo;
    std::int64_t hi = mc.range.hi;

    CLI::App* measure = app.add_subcommand("measure", "Measure a test suite against coverage objectives");
    measure->add_option("--program", mc.program_path, "MiniImp source (.mimp)")->required();
    measure->add_option("--entry", mc.entry, "Entry function (default: main, else the first)");
    auto* suite_opt = measure->add_option("--suite", mc.suite_path, "Test suite file");
    auto* random_opt = measure->add_option("--random-tests", mc.random_tests, "Generate N random tests instead");
    suite_opt->excludes(random_opt);
    measure->add_option("--seed", mc.seed, "Random suite seed")->capture_default_str();
    measure->add_option("--int-min", lo, "Smallest random int")->capture_default_str();
    measure->add_option("--int-max", hi, "Largest random int")->capture_default_str();
    auto* crit_opt = measure->add_option("--criterion", criteria, "Comma-separated criteria, e.g. MCC,RACC");
    auto* htl_opt = measure->add_option("--htl", mc.htl_path, "Hand-written objectives in HTL");
    crit_opt->excludes(htl_opt);
    measure->add_flag("--array-cells", mc.array_cells, "Dataflow criteria on array cells");
    measure->add_option("--step-limit", mc.step_limit, "Steps per test")->capture_default_str();
    measure->add_option("--budget", mc.budget, "Combinations per hyperlabel")->capture_default_str();
    measure->add_option("--dnf-cap", mc.dnf_cap, "Disjuncts per hyperlabel")->capture_default_str();
    measure->add_option("--threads", mc.threads, "Harvest threads (1: serial, 0: all)")->capture_default_str();
    measure->add_option("--threshold", mc.threshold, "Minimum score for exit status 0")->capture_default_str();
    measure->add_option("--dump-htl", dump_htl, "Write the objectives in HTL syntax");
    measure->add_flag("--dump-dnf", dump_dnf, "Print every objective in normal form");
    measure->add_option("--report", report, "Write the CSV report");
    measure->add_option("--text-report", text_report, "Write the text report");
    measure->add_flag("-q,--quiet", quiet, "Do not print the text report");

    cli::BenchConfig bc;
    std::string sizes = "100:1000:100";
    std::string bench_criteria = "CC,GACC,CACC,RACC,FCC,ALL_DEFS";
    std::optional<std::string> bench_csv;
    CLI::App* bench = app.add_subcommand("bench", "Measurement time against suite size");
    bench->add_option("--programs", bc.programs, "MiniImp sources")->required();
    bench->add_option("--sizes", sizes, "lo:hi:step or a comma list")->capture_default_str();
    bench->add_option("--reps", bc.reps, "Repetitions per point (median)")->capture_default_str();
    bench->add_option("--criteria", bench_criteria, "Comma-separated criteria")->capture_default_str();
    bench->add_option("--seed", bc.seed, "Random suite seed")->capture_default_str();
    bench->add_option("--step-limit", bc.step_limit, "Steps per test")->capture_default_str();
    bench->add_flag("--parallel", bc.parallel, "Parallel harvest and baseline");
    bench->add_option("--threads", bc.threads, "Threads with --parallel (0: all)");
    bench->add_option("--csv", bench_csv, "Write the series as CSV");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        int code = app.exit(e);
        return code == 0 ? 0 : 2;
    }

    try {
        if (*measure) {
            if (!criteria.empty()) mc.criteria = cli::parse_criteria(criteria);
            mc.range = {lo, hi};
            if (mc.range.lo > mc.range.hi) throw cli::StageError(cli::Stage::Suite, "--int-min exceeds --int-max");
            cli::CoverageReport r = cli::measure(mc);
            if (dump_htl) write_file(*dump_htl, htl::print_htl(r.hyperlabels));
            if (dump_dnf) std::cout << cli::format_dnf(r);
            std::string text = cli::format_text(r);
            if (!quiet) std::cout << text;
            if (text_report) write_file(*text_report, text);
            if (report) write_file(*report, cli::format_csv(r));
            return cli::exit_status(r, mc.threshold);
        }
        bc.sizes = cli::parse_sizes(sizes);
        bc.criteria = cli::parse_criteria(bench_criteria);
        cli::BenchResult r = cli::bench(bc);
        std::cout << cli::format_bench(r);
        if (bench_csv) {
            std::string csv = "program,criterion,objectives,tests,seconds,baseline,overhead\n";
            for (const auto& s : r.series)
                for (const auto& pt : s.points)
                    csv += s.program + ',' + s.criterion + ',' + std::to_string(s.objectives) + ',' +
                           std::to_string(pt.size) + ',' + std::to_string(pt.seconds) + ',' +
                           std::to_string(pt.baseline) + ',' + std::to_string(pt.overhead()) + '\n';
            write_file(*bench_csv, csv);
        }
        return 0;
    } catch (const cli::StageError& e) {
        std::cerr << "htolcov: " << e.what() << '\n';
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "htolcov: " << e.what() << '\n';
        return 2;
    }
}
