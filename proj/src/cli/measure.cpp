#include <algorithm>
#include <cstdio>
#include <iomanip>
#include <map>
#include <set>
#include <sstream>

#include "htolcov/cli/pipeline.hpp"

namespace htolcov::cli {

const char* to_string(Stage s) {
    switch (s) {
    case Stage::Program: return "program";
    case Stage::Suite: return "suite";
    case Stage::Annotate: return "annotate";
    case Stage::Htl: return "htl";
    case Stage::WellFormed: return "well-formed";
    case Stage::Normalize: return "normalize";
    case Stage::Harvest: return "harvest";
    case Stage::Consolidate: return "consolidate";
    case Stage::Report: return "report";
    }
    return "?";
}

StageError::StageError(Stage stage, const std::string& what)
    : Error(std::string("[") + to_string(stage) + "] " + what), stage_(stage) {}

namespace {

/// Runs `fn`, re-raising any failure as a StageError for `stage`.
template <class Fn>
auto staged(Stage stage, Fn&& fn) -> decltype(fn()) {
    try {
        return fn();
    } catch (const StageError&) {
        throw;
    } catch (const std::exception& e) {
        throw StageError(stage, e.what());
    }
}

}  // namespace

void validate(const MeasureConfig& cfg) {
    if (cfg.program_path.empty()) throw StageError(Stage::Program, "no program given");
    if (cfg.suite_path.has_value() == cfg.random_tests.has_value())
        throw StageError(Stage::Suite, "give exactly one of a suite file or a random test count");
    if (cfg.criteria.empty() == !cfg.htl_path.has_value())
        throw StageError(Stage::Annotate, "give exactly one of a criterion list or an HTL file");
    if (cfg.step_limit == 0) throw StageError(Stage::Harvest, "step limit must be at least 1");
    if (cfg.dnf_cap == 0) throw StageError(Stage::Normalize, "DNF cap must be at least 1");
}

CoverageReport measure(const MeasureConfig& cfg) {
    validate(cfg);
    mini::ProgramPtr program = staged(Stage::Program, [&] { return mini::load_program(cfg.program_path, cfg.entry); });
    trace::TestSuite suite = staged(Stage::Suite, [&] {
        return cfg.suite_path ? trace::load_suite(*cfg.suite_path, *program)
                              : trace::random_suite(*program, *cfg.random_tests, cfg.seed, cfg.range);
    });
    crit::ProvenanceMap provenance;
    std::vector<htl::Hyperlabel> hs;
    if (cfg.htl_path) {
        hs = staged(Stage::Htl, [&] { return htl::load_htl(*cfg.htl_path, *program); });
    } else {
        auto annotated = staged(Stage::Annotate, [&] {
            return crit::annotate(program, cfg.criteria, crit::AnnotateOptions{cfg.array_cells});
        });
        hs = std::move(annotated.hyperlabels);
        provenance = std::move(annotated.provenance);
    }
    cov::MeasureOptions options;
    options.harvest.step_limit = cfg.step_limit;
    options.harvest.threads = cfg.threads;
    options.harvest.parallel = cfg.threads != 1;
    options.budget = cfg.budget;
    options.dnf_cap = cfg.dnf_cap;
    CoverageReport r = measure(program, std::move(suite), std::move(hs), options);
    r.provenance = std::move(provenance);
    return r;
}

CoverageReport measure(mini::ProgramPtr program, trace::TestSuite suite, std::vector<htl::Hyperlabel> hyperlabels,
                       const cov::MeasureOptions& options) {
    CoverageReport r;
    r.program = std::move(program);
    r.suite = std::move(suite);
    r.hyperlabels = std::move(hyperlabels);
    cov::Measurement& m = r.measurement;
    std::set<std::string> ids;
    for (const htl::Hyperlabel& h : r.hyperlabels) {
        if (!ids.insert(h.id).second) throw StageError(Stage::WellFormed, "duplicate hyperlabel id '" + h.id + "'");
        auto violations = htl::check_well_formed(*h.term);
        if (!violations.empty())
            throw StageError(Stage::WellFormed, h.id + ": " + violations.front().rule + ": " + violations.front().message);
    }
    staged(Stage::Normalize, [&] {
        for (const htl::Hyperlabel& h : r.hyperlabels)
            m.planned.push_back(cov::plan(htl::normalize_dnf(h, options.dnf_cap), m.atoms));
        return 0;
    });
    m.log = staged(Stage::Harvest, [&] { return cov::harvest(*r.program, m.atoms, r.suite, options.harvest); });
    staged(Stage::Consolidate, [&] {
        for (const cov::PlannedHyperlabel& h : m.planned)
            m.verdicts.push_back(cov::consolidate(h, m.atoms, m.log, options.budget));
        return 0;
    });
    m.score = cov::coverage_score(m.verdicts);
    return r;
}

std::vector<std::string> witness_tests(const CoverageReport& r, std::size_t verdict) {
    const cov::Measurement& m = r.measurement;
    const cov::Verdict& v = m.verdicts.at(verdict);
    std::vector<std::string> out;
    if (!v.witness) return out;
    const auto& ids = m.planned.at(verdict).atom_ids.at(v.witness->disjunct);
    for (std::size_t pos = 0; pos < ids.size(); ++pos) {
        const cov::Occurrence& occ = m.log.atoms[ids[pos]][v.witness->occurrences[pos]];
        const std::string& id = r.suite.tests[occ.test].id;
        if (std::find(out.begin(), out.end(), id) == out.end()) out.push_back(id);
    }
    return out;
}

namespace {

std::string join(const std::vector<std::string>& parts, char sep) {
    std::string out;
    for (std::size_t i = 0; i < parts.size(); ++i) {
        if (i) out += sep;
        out += parts[i];
    }
    return out;
}

std::string ratio(std::size_t covered, std::size_t total) {
    char buf[64];
    double v = total == 0 ? 1.0 : static_cast<double>(covered) / static_cast<double>(total);
    std::snprintf(buf, sizeof buf, "%zu/%zu (%.1f%%)", covered, total, 100.0 * v);
    return buf;
}

}  // namespace

std::string format_text(const CoverageReport& r) {
    const cov::Measurement& m = r.measurement;
    std::ostringstream os;
    os << "tests:      " << r.suite.tests.size() << '\n';
    os << "objectives: " << m.verdicts.size() << '\n';
    os << "score:      " << ratio(m.score.covered, m.score.total) << '\n';
    if (m.score.unknown) os << "unknown-budget: " << m.score.unknown << '\n';

    std::vector<std::string> order;
    std::map<std::string, std::pair<std::size_t, std::size_t>> per;  // criterion -> (covered, total)
    for (const cov::Verdict& v : m.verdicts) {
        std::string c = v.criterion.empty() ? "-" : v.criterion;
        if (!per.count(c)) order.push_back(c);
        auto& [cov_n, tot] = per[c];
        ++tot;
        if (v.status == cov::Status::Covered) ++cov_n;
    }
    if (order.size() > 1 || (order.size() == 1 && order.front() != "-")) {
        os << '\n';
        for (const std::string& c : order)
            os << "  " << std::left << std::setw(10) << c << ratio(per[c].first, per[c].second) << '\n';
    }

    std::size_t width = 2;
    for (const cov::Verdict& v : m.verdicts) width = std::max(width, v.id.size());
    os << '\n';
    for (std::size_t i = 0; i < m.verdicts.size(); ++i) {
        const cov::Verdict& v = m.verdicts[i];
        os << "  " << std::left << std::setw(static_cast<int>(width)) << v.id << "  ";
        auto tests = witness_tests(r, i);
        if (tests.empty())
            os << cov::to_string(v.status);
        else
            os << std::setw(14) << cov::to_string(v.status) << join(tests, ' ');
        os << '\n';
    }
    return os.str();
}

std::string format_csv(const CoverageReport& r) {
    const cov::Measurement& m = r.measurement;
    std::ostringstream os;
    os << "# " << kCsvVersion << '\n' << "id,criterion,status,witness-tests\n";
    for (std::size_t i = 0; i < m.verdicts.size(); ++i) {
        const cov::Verdict& v = m.verdicts[i];
        os << v.id << ',' << v.criterion << ',' << cov::to_string(v.status) << ',' << join(witness_tests(r, i), ';')
           << '\n';
    }
    return os.str();
}

std::string format_dnf(const CoverageReport& r) {
    std::string out;
    for (const cov::PlannedHyperlabel& h : r.measurement.planned) out += htl::print_dnf(h.dnf) + '\n';
    return out;
}

int exit_status(const CoverageReport& r, double threshold) {
    const cov::Score& s = r.measurement.score;
    return s.value() >= threshold && s.unknown == 0 ? 0 : 1;
}

std::vector<crit::Criterion> parse_criteria(const std::string& text) {
    std::vector<crit::Criterion> out;
    std::stringstream ss(text);
    std::string item;
    while (std::getline(ss, item, ',')) {
        item.erase(0, item.find_first_not_of(" \t"));
        item.erase(item.find_last_not_of(" \t") + 1);
        if (item.empty()) continue;
        auto c = crit::parse_criterion(item);
        if (!c) throw StageError(Stage::Annotate, "unknown criterion '" + item + "'");
        out.push_back(*c);
    }
    if (out.empty()) throw StageError(Stage::Annotate, "empty criterion list");
    return out;
}

}  // namespace htolcov::cli
