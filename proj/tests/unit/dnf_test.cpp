#include <gtest/gtest.h>

#include "generators.hpp"
#include "htolcov/htol/dnf.hpp"
#include "htolcov/oracle/oracle.hpp"

namespace htolcov::htl {
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

BoundLabel label(LocationId loc, std::vector<std::string> names = {}) {
    BoundLabel l{loc, make_bool(true), {}};
    for (auto& n : names) l.bindings.push_back({n, make_int(0)});
    return l;
}

ExprPtr meta(const std::string& n) { return make_var(n, VarRole::Meta, -1, Type::integer()); }

// Disjunct count by structural recursion over the term.
std::size_t expected_disjuncts(const Term& h) {
    switch (h.kind) {
    case TermKind::Label:
    case TermKind::Sequence: return 1;
    case TermKind::Guard: return expected_disjuncts(*h.lhs);
    case TermKind::Conj: return expected_disjuncts(*h.lhs) * expected_disjuncts(*h.rhs);
    case TermKind::Disj: return expected_disjuncts(*h.lhs) + expected_disjuncts(*h.rhs);
    }
    return 0;
}

TEST(Normalize, SingleLabel) {
    auto dnf = normalize_term(*make_label(label(3)));
    ASSERT_EQ(dnf.size(), 1u);
    EXPECT_EQ(dnf[0].atoms.size(), 1u);
    EXPECT_TRUE(dnf[0].guard.empty());
}

TEST(Normalize, GuardedPairStaysOneDisjunct) {
    auto p = mini::parse_program(kTwoConditions);
    auto hs = parse_htl("h7 = guard(l(loc3, x == y && (true && a < b) != (false && a < b)){r <- x == y && a < b} . "
                        "l(loc3, x != y && (true && a < b) != (false && a < b)){r' <- x == y && a < b}) with (r != r')",
                        *p);
    DNFHyperlabel d = normalize_dnf(hs[0]);
    ASSERT_EQ(d.disjuncts.size(), 1u);
    EXPECT_EQ(d.disjuncts[0].atoms.size(), 2u);
    ASSERT_EQ(d.disjuncts[0].guard.size(), 1u);
    EXPECT_EQ(print_expr(*d.disjuncts[0].guard[0]), "r != r'");
    EXPECT_EQ(d.id, "h7");
}

TEST(Normalize, ConjunctionDistributesOverBothDisjunctions) {
    TermPtr a = make_label(label(1, {"v"})), b = make_label(label(2, {"v"}));
    TermPtr c = make_label(label(3, {"w"})), d = make_label(label(4, {"w"}));
    TermPtr h = make_guard(make_conj(make_disj(a, b), make_disj(c, d)),
                           make_binary(BinaryOp::Ne, meta("v"), meta("w")));
    auto dnf = normalize_term(*h);
    ASSERT_EQ(dnf.size(), 4u);
    std::set<std::pair<LocationId, LocationId>> pairs;
    for (const auto& gc : dnf) {
        ASSERT_EQ(gc.atoms.size(), 2u);
        ASSERT_EQ(gc.guard.size(), 1u);
        EXPECT_EQ(print_expr(*gc.guard[0]), "v != w");
        pairs.insert({gc.atoms[0]->label.loc, gc.atoms[1]->label.loc});
    }
    EXPECT_EQ(pairs, (std::set<std::pair<LocationId, LocationId>>{{1, 3}, {1, 4}, {2, 3}, {2, 4}}));
}

TEST(Normalize, NestedGuardsAccumulate) {
    TermPtr h = make_guard(make_guard(make_label(label(1, {"v"})), make_binary(BinaryOp::Gt, meta("v"), make_int(0))),
                           make_and(make_bool(true), make_binary(BinaryOp::Lt, meta("v"), make_int(9))));
    auto dnf = normalize_term(*h);
    ASSERT_EQ(dnf.size(), 1u);
    EXPECT_EQ(dnf[0].guard.size(), 2u);
    EXPECT_EQ(print_expr(*guard_expr(dnf[0].guard)), "v > 0 && v < 9");
    EXPECT_EQ(print_expr(*guard_expr({})), "true");
}

TEST(Normalize, CapIsEnforced) {
    auto factor = [](std::size_t i) {
        auto n = "v" + std::to_string(i);
        return make_disj(make_label(label(1, {n})), make_label(label(2, {n})));
    };
    TermPtr h12 = factor(0);
    for (std::size_t i = 1; i < 12; ++i) h12 = make_conj(h12, factor(i));
    EXPECT_EQ(normalize_term(*h12).size(), 4096u);
    TermPtr h13 = make_conj(h12, factor(12));
    EXPECT_THROW(normalize_term(*h13), DnfCapExceeded);
    EXPECT_EQ(normalize_term(*h13, 8192).size(), 8192u);
}

TEST(DnfProperty, CountLawAndIdempotence) {
    Rng rng(51);
    for (int n = 0; n < 1000; ++n) {
        auto p = testing::random_program(rng);
        Hyperlabel h = testing::random_hyperlabel(rng, *p, "h");
        auto dnf = normalize_term(*h.term);
        ASSERT_EQ(dnf.size(), expected_disjuncts(*h.term)) << print_hyperlabel(h);
        for (const auto& gc : dnf)
            for (const TermPtr& a : gc.atoms)
                ASSERT_TRUE(a->kind == TermKind::Label || a->kind == TermKind::Sequence);
        TermPtr back = to_term(dnf);
        ASSERT_TRUE(well_formed(*back)) << print_term(*back);
        ASSERT_EQ(visible_names(*back), visible_names(*h.term));
        ASSERT_TRUE(same_dnf(normalize_term(*back), dnf)) << print_hyperlabel(h);
        // The printed normal form parses back to the same normal form.
        DNFHyperlabel d = normalize_dnf(h);
        auto reparsed = parse_htl(print_dnf(d), *p);
        ASSERT_TRUE(same_dnf(normalize_dnf(reparsed.at(0)).disjuncts, d.disjuncts)) << print_dnf(d);
    }
}

TEST(DnfProperty, NormalFormIsCoveredExactlyWhenTheOriginalIs) {
    Rng rng(52);
    std::size_t decided = 0, covered = 0;
    for (int n = 0; n < 400; ++n) {
        auto p = testing::random_program(rng);
        auto ts = testing::small_suite(*p, rng);
        Hyperlabel h = testing::random_hyperlabel(rng, *p, "h");
        TermPtr d = to_term(normalize_term(*h.term));
        try {
            bool a = oracle::oracle_covers(*h.term, *p, ts);
            bool b = oracle::oracle_covers(*d, *p, ts);
            ASSERT_EQ(a, b) << print_hyperlabel(h) << "\n" << print_term(*d);
            ++decided;
            covered += a ? 1 : 0;
        } catch (const oracle::Refused&) {
        }
    }
    EXPECT_GT(decided, 300u);
    EXPECT_GT(covered, 0u);
    EXPECT_LT(covered, decided);
}

}  // namespace
}  // namespace htolcov::htl
