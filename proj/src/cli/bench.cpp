#include <algorithm>
#include <chrono>
#include <cstdio>
#include <sstream>

#include <omp.h>

#include "htolcov/cli/pipeline.hpp"

namespace htolcov::cli {

namespace {

using Clock = std::chrono::steady_clock;

double median(std::vector<double> v) {
    std::sort(v.begin(), v.end());
    std::size_t n = v.size();
    return n % 2 ? v[n / 2] : 0.5 * (v[n / 2 - 1] + v[n / 2]);
}

template <class Fn>
double time_median(std::size_t reps, Fn&& fn) {
    std::vector<double> samples;
    for (std::size_t i = 0; i < reps; ++i) {
        auto t0 = Clock::now();
        fn();
        samples.push_back(std::chrono::duration<double>(Clock::now() - t0).count());
    }
    return median(std::move(samples));
}

trace::TestSuite prefix(const trace::TestSuite& s, std::size_t n) {
    trace::TestSuite out;
    out.tests.assign(s.tests.begin(), s.tests.begin() + static_cast<std::ptrdiff_t>(n));
    return out;
}

void run_unobserved(const mini::LocatedProgram& p, const trace::TestSuite& ts, const BenchConfig& cfg) {
    const auto n = static_cast<std::ptrdiff_t>(ts.tests.size());
    if (cfg.parallel) {
        if (cfg.threads > 0) omp_set_num_threads(cfg.threads);
#pragma omp parallel for schedule(dynamic, 16)
        for (std::ptrdiff_t i = 0; i < n; ++i)
            trace::run_program(p, ts.tests[static_cast<std::size_t>(i)], cfg.step_limit, nullptr);
    } else {
        for (std::ptrdiff_t i = 0; i < n; ++i)
            trace::run_program(p, ts.tests[static_cast<std::size_t>(i)], cfg.step_limit, nullptr);
    }
}

void finish(BenchSeries& s) {
    std::vector<double> x;
    std::vector<double> y;
    std::vector<double> ratios;
    for (const BenchPoint& pt : s.points) {
        x.push_back(static_cast<double>(pt.size));
        y.push_back(pt.seconds);
        ratios.push_back(pt.overhead());
    }
    s.fit = fit_line(x, y);
    s.median_overhead = median(std::move(ratios));
}

}  // namespace

LinearFit fit_line(const std::vector<double>& x, const std::vector<double>& y) {
    LinearFit f;
    const std::size_t n = x.size();
    if (n == 0 || n != y.size()) return f;
    double mx = 0;
    double my = 0;
    for (std::size_t i = 0; i < n; ++i) {
        mx += x[i];
        my += y[i];
    }
    mx /= static_cast<double>(n);
    my /= static_cast<double>(n);
    double sxx = 0;
    double sxy = 0;
    double syy = 0;
    for (std::size_t i = 0; i < n; ++i) {
        sxx += (x[i] - mx) * (x[i] - mx);
        sxy += (x[i] - mx) * (y[i] - my);
        syy += (y[i] - my) * (y[i] - my);
    }
    f.slope = sxx > 0 ? sxy / sxx : 0;
    f.intercept = my - f.slope * mx;
    double ss_res = 0;
    for (std::size_t i = 0; i < n; ++i) {
        double e = y[i] - (f.intercept + f.slope * x[i]);
        ss_res += e * e;
    }
    f.r2 = syy > 0 ? 1.0 - ss_res / syy : (ss_res == 0 ? 1.0 : 0.0);
    return f;
}

BenchResult bench(const BenchConfig& cfg) {
    if (cfg.sizes.size() < 2) throw StageError(Stage::Report, "bench needs at least two suite sizes");
    if (!std::is_sorted(cfg.sizes.begin(), cfg.sizes.end()) ||
        std::adjacent_find(cfg.sizes.begin(), cfg.sizes.end()) != cfg.sizes.end())
        throw StageError(Stage::Report, "suite sizes must be strictly increasing");
    if (cfg.reps == 0) throw StageError(Stage::Report, "bench needs at least one repetition");

    cov::MeasureOptions options;
    options.harvest.step_limit = cfg.step_limit;
    options.harvest.parallel = cfg.parallel;
    options.harvest.threads = cfg.threads;

    BenchResult result;
    for (const std::string& path : cfg.programs) {
        mini::ProgramPtr p;
        try {
            p = mini::load_program(path);
        } catch (const std::exception& e) {
            throw StageError(Stage::Program, path + ": " + e.what());
        }
        trace::TestSuite all = trace::random_suite(*p, cfg.sizes.back(), cfg.seed);

        BenchSeries base{path, "none", 0, {}, {}, 0};
        for (std::size_t n : cfg.sizes) {
            trace::TestSuite ts = prefix(all, n);
            double t = time_median(cfg.reps, [&] { run_unobserved(*p, ts, cfg); });
            base.points.push_back({n, t, t});
        }
        finish(base);

        for (crit::Criterion c : cfg.criteria) {
            auto hs = crit::annotate(p, c).hyperlabels;
            BenchSeries s{path, crit::name(c), hs.size(), {}, {}, 0};
            for (std::size_t i = 0; i < cfg.sizes.size(); ++i) {
                trace::TestSuite ts = prefix(all, cfg.sizes[i]);
                std::vector<double> samples;
                for (std::size_t rep = 0; rep < cfg.reps; ++rep) {
                    trace::TestSuite suite = ts;
                    std::vector<htl::Hyperlabel> copy = hs;
                    auto t0 = Clock::now();
                    measure(p, std::move(suite), std::move(copy), options);
                    samples.push_back(std::chrono::duration<double>(Clock::now() - t0).count());
                }
                s.points.push_back({cfg.sizes[i], median(std::move(samples)), base.points[i].seconds});
            }
            finish(s);
            result.series.push_back(std::move(s));
        }
        result.series.insert(result.series.end() - static_cast<std::ptrdiff_t>(cfg.criteria.size()), std::move(base));
    }
    return result;
}

std::string format_bench(const BenchResult& r) {
    std::ostringstream os;
    char line[256];
    std::snprintf(line, sizeof line, "%-28s %-9s %6s %7s %12s %12s %9s\n", "program", "criterion", "objs", "tests",
                  "seconds", "baseline", "overhead");
    os << line;
    for (const BenchSeries& s : r.series) {
        for (const BenchPoint& pt : s.points) {
            std::snprintf(line, sizeof line, "%-28s %-9s %6zu %7zu %12.6f %12.6f %9.2f\n", s.program.c_str(),
                          s.criterion.c_str(), s.objectives, pt.size, pt.seconds, pt.baseline, pt.overhead());
            os << line;
        }
    }
    os << '\n';
    std::snprintf(line, sizeof line, "%-28s %-9s %14s %8s %16s\n", "program", "criterion", "slope(s/test)", "R2",
                  "median overhead");
    os << line;
    for (const BenchSeries& s : r.series) {
        std::snprintf(line, sizeof line, "%-28s %-9s %14.3e %8.4f %16.2f\n", s.program.c_str(), s.criterion.c_str(),
                      s.fit.slope, s.fit.r2, s.median_overhead);
        os << line;
    }
    return os.str();
}

std::vector<std::size_t> parse_sizes(const std::string& text) {
    std::vector<std::size_t> out;
    auto number = [&](const std::string& s) {
        std::size_t used = 0;
        unsigned long long v = 0;
        try {
            v = std::stoull(s, &used);
        } catch (const std::exception&) {
            used = 0;
        }
        if (used != s.size() || s.empty()) throw StageError(Stage::Report, "bad size '" + s + "'");
        return static_cast<std::size_t>(v);
    };
    if (text.find(':') != std::string::npos) {
        std::stringstream ss(text);
        std::string lo_s, hi_s, step_s;
        std::getline(ss, lo_s, ':');
        std::getline(ss, hi_s, ':');
        std::getline(ss, step_s);
        std::size_t lo = number(lo_s), hi = number(hi_s), step = number(step_s);
        if (step == 0 || lo > hi) throw StageError(Stage::Report, "bad size range '" + text + "'");
        for (std::size_t n = lo; n <= hi; n += step) out.push_back(n);
        return out;
    }
    std::stringstream ss(text);
    std::string item;
    while (std::getline(ss, item, ',')) {
        out.push_back(number(item));
        if (out.size() > 1 && out[out.size() - 2] >= out.back())
            throw StageError(Stage::Report, "sizes must be strictly increasing: '" + text + "'");
    }
    return out;
}

}  // namespace htolcov::cli
