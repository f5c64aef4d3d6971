#include <gtest/gtest.h>

#include <set>

#include "generators.hpp"
#include "htolcov/cli/pipeline.hpp"
#include "htolcov/coverage/engine.hpp"
#include "htolcov/criteria/annotate.hpp"
#include "htolcov/oracle/oracle.hpp"
#include "htolcov/trace/suite.hpp"

namespace htolcov::cov {
namespace {

using testing::Rng;

constexpr const char* kTwoConditions = R"(
int f(int x, int y, int a, int b) {
  int s := 0;
  if (x == y && a < b) {
    s := 1;
  }
  return s;
}
)";

constexpr const char* kTwoConditionsSuite = R"(
t1 | x=1, y=1, a=0, b=1
t2 | x=1, y=2, a=0, b=1
t3 | x=1, y=1, a=1, b=0
)";

constexpr const char* kFoo = R"(
int foo(int i, int j, int k) {
  int a[4];
  int x := 1;
  int y := 2;
  int z := 0;
  a[i] := x;
  a[j] := y;
  z := a[k] + 1;
  return z;
}
)";

constexpr const char* kH9 =
    "h9 = guard([l(loc6, true){v1 <- i} ->(pc == loc7 => j != v1) l(loc8, true){v2 <- k}]) with (v1 == v2)";

trace::TestSuite subset(const trace::TestSuite& ts, std::vector<std::size_t> keep) {
    trace::TestSuite out;
    for (std::size_t i : keep) out.tests.push_back(ts.tests[i]);
    return out;
}

std::map<std::string, Status> statuses(const Measurement& m) {
    std::map<std::string, Status> out;
    for (const Verdict& v : m.verdicts) out[v.id] = v.status;
    return out;
}

std::set<std::vector<Value>> envs(const std::vector<Occurrence>& occ) {
    std::set<std::vector<Value>> out;
    for (const Occurrence& o : occ) out.insert(o.env);
    return out;
}

TEST(Harvest, RecordsOneOccurrencePerDistinctEnvironment) {
    auto p = mini::parse_program(kTwoConditions);
    auto ts = trace::parse_suite(kTwoConditionsSuite, *p);
    AtomTable table;
    auto hs = htl::parse_htl("h = l(loc3, true){c1 <- x == y}", *p);
    std::size_t id = table.intern(htl::normalize_term(*hs[0].term)[0].atoms[0]);
    OccurrenceLog log = harvest(*p, table, ts, {.parallel = false});
    // t3 repeats the environment of t1.
    ASSERT_EQ(log.atoms[id].size(), 2u);
    EXPECT_EQ(log.atoms[id][0].env, (std::vector<Value>{Value::boolean(true)}));
    EXPECT_EQ(log.atoms[id][1].env, (std::vector<Value>{Value::boolean(false)}));
    EXPECT_EQ(log.atoms[id][1].test, 1u);
    EXPECT_EQ(harvest(*p, table, ts, {.dedup = false, .parallel = false}).atoms[id].size(), 3u);
    EXPECT_EQ(log.atoms[id][0].steps, (std::vector<std::size_t>{2}));
    ASSERT_EQ(log.outcomes.size(), 3u);
    EXPECT_EQ(log.outcomes[0].value, Value::integer(1));
}

TEST(Harvest, StructurallyEqualAtomsAreInterned) {
    auto p = mini::parse_program(kTwoConditions);
    auto hs = htl::parse_htl("h = l(loc3, x == y) . l(loc3, x == y)", *p);
    AtomTable table;
    PlannedHyperlabel ph = plan(htl::normalize_dnf(hs[0]), table);
    EXPECT_EQ(table.size(), 1u);
    EXPECT_EQ(ph.atom_ids[0], (std::vector<std::size_t>{0, 0}));
}

TEST(MatchSequence, PathPredicateFiltersMatches) {
    auto p = mini::parse_program(kFoo);
    auto seq = htl::parse_htl(kH9, *p)[0].term->lhs;
    auto hit = trace::execute(*p, trace::parse_suite("t | i=2, j=1, k=2", *p).tests[0]);
    auto occ = match_sequence(*p, hit, *seq);
    ASSERT_EQ(occ.size(), 1u);
    EXPECT_EQ(occ[0].env, (std::vector<Value>{Value::integer(2), Value::integer(2)}));
    EXPECT_EQ(occ[0].steps, (std::vector<std::size_t>{5, 7}));
    // a[j] overwrites a[i]: the path predicate fails at loc7.
    auto miss = trace::execute(*p, trace::parse_suite("t | i=2, j=2, k=2", *p).tests[0]);
    EXPECT_TRUE(match_sequence(*p, miss, *seq).empty());
}

TEST(MatchSequence, SequenceWithoutPathPredicate) {
    auto p = mini::parse_program(kFoo);
    auto seq = htl::parse_htl("h4 = [l(loc7, true){v1 <- j} -> l(loc8, true){v2 <- k}]", *p)[0].term;
    auto run = trace::execute(*p, trace::parse_suite("t | i=0, j=1, k=3", *p).tests[0]);
    auto occ = match_sequence(*p, run, *seq);
    ASSERT_EQ(occ.size(), 1u);
    EXPECT_EQ(occ[0].env, (std::vector<Value>{Value::integer(1), Value::integer(3)}));
}

TEST(Consolidate, RaccOnTwoConditions) {
    auto p = mini::parse_program(kTwoConditions);
    auto ts = trace::parse_suite(kTwoConditionsSuite, *p);
    auto hs = crit::annotate(p, crit::Criterion::RACC).hyperlabels;
    ASSERT_EQ(hs.size(), 2u);
    auto all = statuses(measure_hyperlabels(*p, hs, ts));
    EXPECT_EQ(all.at("racc_loc3_c1"), Status::Covered);
    EXPECT_EQ(all.at("racc_loc3_c2"), Status::Covered);
    auto two = statuses(measure_hyperlabels(*p, hs, subset(ts, {0, 1})));
    EXPECT_EQ(two.at("racc_loc3_c1"), Status::Covered);
    EXPECT_EQ(two.at("racc_loc3_c2"), Status::Uncovered);
}

TEST(Consolidate, WitnessNamesItsOccurrences) {
    auto p = mini::parse_program(kTwoConditions);
    auto ts = trace::parse_suite(kTwoConditionsSuite, *p);
    auto hs = crit::annotate(p, crit::Criterion::RACC).hyperlabels;
    Measurement m = measure_hyperlabels(*p, hs, ts);
    const Verdict& v = m.verdicts[1];
    ASSERT_TRUE(v.witness.has_value());
    EXPECT_TRUE(replay_witness(m.planned[1], m.atoms, m.log, *v.witness));
    htl::Environment env = witness_env(m.planned[1], m.atoms, m.log, *v.witness);
    EXPECT_EQ(env.at("c1"), env.at("c1'"));
    EXPECT_NE(env.at("c2"), env.at("c2'"));
}

TEST(Consolidate, BudgetGivesUnknown) {
    auto p = mini::parse_program(kTwoConditions);
    auto ts = trace::random_suite(*p, 60, 3);
    auto hs = htl::parse_htl("h = guard(l(loc1, true){v <- x} . l(loc1, true){w <- y}) with (v == w + 1000)", *p);
    MeasureOptions small;
    small.budget = 100;
    Measurement m = measure_hyperlabels(*p, hs, ts, small);
    EXPECT_EQ(m.verdicts[0].status, Status::UnknownBudget);
    EXPECT_EQ(m.score.unknown, 1u);
    EXPECT_EQ(m.score.covered, 0u);
    EXPECT_EQ(measure_hyperlabels(*p, hs, ts).verdicts[0].status, Status::Uncovered);
}

TEST(Oracle, FixedSuites) {
    auto p = mini::parse_program(kTwoConditions);
    auto ts = trace::parse_suite(kTwoConditionsSuite, *p);
    auto hs = crit::annotate(p, crit::Criterion::RACC).hyperlabels;
    EXPECT_TRUE(oracle::oracle_covers(*hs[0].term, *p, ts));
    EXPECT_TRUE(oracle::oracle_covers(*hs[1].term, *p, ts));
    EXPECT_FALSE(oracle::oracle_covers(*hs[1].term, *p, subset(ts, {0, 1})));
    auto foo = mini::parse_program(kFoo);
    auto h9 = htl::parse_htl(kH9, *foo)[0].term;
    EXPECT_TRUE(oracle::oracle_covers(*h9, *foo, trace::parse_suite("t | i=2, j=1, k=2", *foo)));
    EXPECT_FALSE(oracle::oracle_covers(*h9, *foo, trace::parse_suite("t | i=2, j=2, k=2", *foo)));
}

TEST(Score, CountsUnknownAsUncovered) {
    std::vector<Verdict> vs(4);
    vs[0].status = Status::Covered;
    vs[1].status = Status::Covered;
    vs[2].status = Status::UnknownBudget;
    Score s = coverage_score(vs);
    EXPECT_EQ(s.covered, 2u);
    EXPECT_EQ(s.total, 4u);
    EXPECT_EQ(s.unknown, 1u);
    EXPECT_DOUBLE_EQ(s.value(), 0.5);
    Score none = coverage_score({});
    EXPECT_TRUE(none.empty);
    EXPECT_DOUBLE_EQ(none.value(), 1.0);
}

struct Instance {
    mini::ProgramPtr program;
    trace::TestSuite suite;
    std::vector<htl::Hyperlabel> hyperlabels;
};

Instance random_instance(Rng& rng, std::size_t objectives = 4) {
    Instance in;
    in.program = testing::random_program(rng);
    in.suite = testing::small_suite(*in.program, rng);
    for (std::size_t i = 0; i < objectives; ++i)
        in.hyperlabels.push_back(testing::random_hyperlabel(rng, *in.program, "h" + std::to_string(i)));
    return in;
}

MeasureOptions bounded(bool parallel = false, bool dedup = true) {
    MeasureOptions o;
    o.harvest.step_limit = 200;
    o.harvest.parallel = parallel;
    o.harvest.dedup = dedup;
    return o;
}

TEST(CoverageProperty, AgreesWithTheOracle) {
    Rng rng(61);
    std::size_t decided = 0, covered = 0;
    for (int n = 0; n < 300; ++n) {
        Instance in = random_instance(rng);
        Measurement m = measure_hyperlabels(*in.program, in.hyperlabels, in.suite, bounded());
        for (std::size_t i = 0; i < in.hyperlabels.size(); ++i) {
            try {
                bool expect = oracle::oracle_covers(*in.hyperlabels[i].term, *in.program, in.suite);
                ASSERT_EQ(m.verdicts[i].status == Status::Covered, expect)
                    << htl::print_hyperlabel(in.hyperlabels[i]) << "\n" << trace::print_suite(in.suite, *in.program)
                    << mini::print_program(*in.program);
                ++decided;
                covered += expect ? 1 : 0;
            } catch (const oracle::Refused&) {
            }
        }
    }
    EXPECT_GT(decided, 1000u);
    EXPECT_GT(covered, decided / 10);
    EXPECT_LT(covered, decided - decided / 10);
}

TEST(CoverageProperty, DedupAndThreadingDoNotChangeVerdicts) {
    Rng rng(62);
    for (int n = 0; n < 200; ++n) {
        Instance in = random_instance(rng);
        in.suite = trace::random_suite(*in.program, 40, static_cast<std::uint64_t>(n), {-2, 2});
        auto ref = measure_hyperlabels(*in.program, in.hyperlabels, in.suite, bounded());
        MeasureOptions par = bounded(true);
        par.harvest.threads = 4;
        auto threaded = measure_hyperlabels(*in.program, in.hyperlabels, in.suite, par);
        auto raw = measure_hyperlabels(*in.program, in.hyperlabels, in.suite, bounded(false, false));
        ASSERT_EQ(ref.log.atoms.size(), threaded.log.atoms.size());
        for (std::size_t a = 0; a < ref.log.atoms.size(); ++a) {
            const auto& x = ref.log.atoms[a];
            const auto& y = threaded.log.atoms[a];
            ASSERT_EQ(x.size(), y.size());
            for (std::size_t k = 0; k < x.size(); ++k) {
                ASSERT_EQ(x[k].test, y[k].test);
                ASSERT_EQ(x[k].steps, y[k].steps);
                ASSERT_EQ(x[k].env, y[k].env);
            }
            ASSERT_GE(raw.log.atoms[a].size(), x.size());
            ASSERT_EQ(envs(raw.log.atoms[a]), envs(x));
            ASSERT_EQ(envs(x).size(), x.size());
        }
        for (std::size_t i = 0; i < ref.verdicts.size(); ++i) {
            ASSERT_EQ(ref.verdicts[i].status, threaded.verdicts[i].status);
            ASSERT_EQ(ref.verdicts[i].status, raw.verdicts[i].status);
        }
    }
}

TEST(CoverageProperty, StreamingHarvestMatchesRecordedRuns) {
    Rng rng(63);
    for (int n = 0; n < 300; ++n) {
        Instance in = random_instance(rng, 3);
        Measurement m = measure_hyperlabels(*in.program, in.hyperlabels, in.suite, bounded());
        std::vector<std::set<std::vector<Value>>> ref(m.atoms.size());
        for (std::size_t t = 0; t < in.suite.tests.size(); ++t) {
            trace::Run run = trace::execute(*in.program, in.suite.tests[t], 200);
            for (std::size_t a = 0; a < m.atoms.size(); ++a)
                for (const Occurrence& o : match_atom(*in.program, m.atoms[a], run, t)) ref[a].insert(o.env);
        }
        for (std::size_t a = 0; a < m.atoms.size(); ++a)
            ASSERT_EQ(ref[a], envs(m.log.atoms[a])) << htl::print_term(*m.atoms[a].term);
    }
}

TEST(CoverageProperty, WitnessesReplay) {
    Rng rng(64);
    std::size_t replayed = 0;
    for (int n = 0; n < 300; ++n) {
        Instance in = random_instance(rng);
        Measurement m = measure_hyperlabels(*in.program, in.hyperlabels, in.suite, bounded());
        for (std::size_t i = 0; i < m.verdicts.size(); ++i) {
            const Verdict& v = m.verdicts[i];
            ASSERT_EQ(v.witness.has_value(), v.status == Status::Covered);
            if (!v.witness) continue;
            ASSERT_TRUE(replay_witness(m.planned[i], m.atoms, m.log, *v.witness));
            // The witness environment satisfies the original objective.
            htl::Environment env = witness_env(m.planned[i], m.atoms, m.log, *v.witness);
            std::vector<trace::Run> runs;
            for (const auto& t : in.suite.tests) runs.push_back(trace::execute(*in.program, t, 200));
            const htl::Term& dj = *htl::to_term({m.planned[i].dnf.disjuncts[v.witness->disjunct]});
            ASSERT_TRUE(oracle::covers_with(dj, *in.program, runs, env));
            ++replayed;
        }
    }
    EXPECT_GT(replayed, 200u);
}

TEST(CoverageProperty, AddingTestsNeverLosesCoverage) {
    Rng rng(65);
    for (int n = 0; n < 200; ++n) {
        Instance in = random_instance(rng);
        auto big = trace::random_suite(*in.program, 8, static_cast<std::uint64_t>(n), {-2, 1});
        auto small = subset(big, {0, 1, 2});
        auto before = measure_hyperlabels(*in.program, in.hyperlabels, small, bounded());
        auto after = measure_hyperlabels(*in.program, in.hyperlabels, big, bounded());
        for (std::size_t i = 0; i < before.verdicts.size(); ++i)
            if (before.verdicts[i].status == Status::Covered) {
                ASSERT_EQ(after.verdicts[i].status, Status::Covered);
            }
        ASSERT_GE(after.score.covered, before.score.covered);
    }
}

TEST(CoverageProperty, DisjunctionAndConjunctionSemantics) {
    Rng rng(66);
    for (int n = 0; n < 300; ++n) {
        auto p = testing::random_program(rng);
        auto ts = testing::small_suite(*p, rng);
        // Fresh labels with no bindings: any pair is a well-formed + and ·.
        auto h1 = testing::random_hyperlabel(rng, *p, "a", {1, 0});
        auto h2 = testing::random_hyperlabel(rng, *p, "b", {1, 0});
        htl::Hyperlabel dis{"d", "", htl::make_disj(h1.term, h2.term)};
        htl::Hyperlabel con{"c", "", htl::make_conj(h1.term, h2.term)};
        ASSERT_TRUE(htl::well_formed(*dis.term) && htl::well_formed(*con.term));
        auto m = measure_hyperlabels(*p, {h1, h2, dis, con}, ts, bounded());
        bool a = m.verdicts[0].status == Status::Covered;
        bool b = m.verdicts[1].status == Status::Covered;
        ASSERT_EQ(m.verdicts[2].status == Status::Covered, a || b);
        ASSERT_EQ(m.verdicts[3].status == Status::Covered, a && b);
    }
}

}  // namespace
}  // namespace htolcov::cov
