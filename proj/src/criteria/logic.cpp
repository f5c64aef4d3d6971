#include <stdexcept>

#include "common.hpp"

namespace htolcov::crit {

using detail::Emitter;
using detail::label;
using detail::loc_tag;
using detail::meta;

namespace {

bool is_connective(const Expr& e) {
    if (e.kind == ExprKind::Unary) return e.unary == UnaryOp::Not;
    return e.kind == ExprKind::Binary && (e.binary == BinaryOp::And || e.binary == BinaryOp::Or);
}

void leaves(const ExprPtr& e, std::vector<ExprPtr>& out) {
    if (!is_connective(*e)) {
        out.push_back(e);
        return;
    }
    leaves(e->lhs, out);
    if (e->rhs) leaves(e->rhs, out);
}

ExprPtr substitute(const ExprPtr& e, std::size_t target, bool value, std::size_t& counter) {
    if (!is_connective(*e)) return counter++ == target ? make_bool(value) : e;
    auto copy = std::make_shared<Expr>(*e);
    copy->lhs = substitute(e->lhs, target, value, counter);
    if (e->rhs) copy->rhs = substitute(e->rhs, target, value, counter);
    return copy;
}

ExprPtr conjunction(const std::vector<ExprPtr>& terms) {
    ExprPtr out = terms.front();
    for (std::size_t i = 1; i < terms.size(); ++i) out = make_and(out, terms[i]);
    return out;
}

/// d[cᵢ←true] != d[cᵢ←false]: cᵢ alone determines d.
ExprPtr determines(const ExprPtr& d, std::size_t i) {
    return make_binary(BinaryOp::Ne, substitute_condition(d, i, true), substitute_condition(d, i, false));
}

std::string cond_tag(LocationId loc, std::size_t i) { return loc_tag(loc) + "_c" + std::to_string(i + 1); }

void emit_cc(Emitter& em, const detail::Decision& d, const std::vector<ExprPtr>& cs) {
    for (std::size_t i = 0; i < cs.size(); ++i) {
        std::string what = "condition `" + print_expr(*cs[i]) + "` at " + loc_tag(d.loc);
        em.emit(cond_tag(d.loc, i) + "_t", label(d.loc, cs[i]), what + " true");
        em.emit(cond_tag(d.loc, i) + "_f", label(d.loc, negate(cs[i])), what + " false");
    }
}

void emit_dc(Emitter& em, const detail::Decision& d) {
    std::string what = "decision `" + print_expr(*d.expr) + "` at " + loc_tag(d.loc);
    em.emit(loc_tag(d.loc) + "_t", label(d.loc, d.expr), what + " true");
    em.emit(loc_tag(d.loc) + "_f", label(d.loc, negate(d.expr)), what + " false");
}

void emit_mcc(Emitter& em, const detail::Decision& d, const std::vector<ExprPtr>& cs) {
    if (cs.size() > kMaxMccConditions)
        throw Error("MCC: decision at " + loc_tag(d.loc) + " has " + std::to_string(cs.size()) +
                    " conditions (limit " + std::to_string(kMaxMccConditions) + ")");
    std::size_t n = cs.size();
    for (std::size_t k = 0; k < (std::size_t{1} << n); ++k) {
        std::vector<ExprPtr> parts;
        for (std::size_t i = 0; i < n; ++i) parts.push_back((k >> i) & 1U ? negate(cs[i]) : cs[i]);
        em.emit(loc_tag(d.loc) + "_" + std::to_string(k + 1), label(d.loc, conjunction(parts)),
                "valuation " + std::to_string(k + 1) + " of decision `" + print_expr(*d.expr) + "` at " +
                    loc_tag(d.loc));
    }
}

void emit_gacc(Emitter& em, const detail::Decision& d, const std::vector<ExprPtr>& cs) {
    for (std::size_t i = 0; i < cs.size(); ++i) {
        ExprPtr det = determines(d.expr, i);
        std::string what = "condition `" + print_expr(*cs[i]) + "` at " + loc_tag(d.loc);
        em.emit(cond_tag(d.loc, i) + "_t", label(d.loc, make_and(cs[i], det)), what + " true and determining");
        em.emit(cond_tag(d.loc, i) + "_f", label(d.loc, make_and(negate(cs[i]), det)),
                what + " false and determining");
    }
}

void emit_cacc(Emitter& em, const detail::Decision& d, const std::vector<ExprPtr>& cs) {
    for (std::size_t i = 0; i < cs.size(); ++i) {
        ExprPtr det = determines(d.expr, i);
        auto t = label(d.loc, make_and(cs[i], det), {{"r", d.expr}});
        auto f = label(d.loc, make_and(negate(cs[i]), det), {{"r'", d.expr}});
        ExprPtr psi = make_binary(BinaryOp::Ne, meta("r", Type::boolean()), meta("r'", Type::boolean()));
        em.emit(cond_tag(d.loc, i), htl::make_guard(htl::make_conj(t, f), psi),
                "condition `" + print_expr(*cs[i]) + "` at " + loc_tag(d.loc) + " correlated");
    }
}

void emit_racc(Emitter& em, const detail::Decision& d, const std::vector<ExprPtr>& cs) {
    std::vector<htl::Binding> first;
    std::vector<htl::Binding> second;
    for (std::size_t j = 0; j < cs.size(); ++j) {
        first.push_back({"c" + std::to_string(j + 1), cs[j]});
        second.push_back({"c" + std::to_string(j + 1) + "'", cs[j]});
    }
    auto l = label(d.loc, d.expr, first);
    auto l2 = label(d.loc, negate(d.expr), second);
    for (std::size_t i = 0; i < cs.size(); ++i) {
        std::vector<ExprPtr> parts;
        for (std::size_t j = 0; j < cs.size(); ++j)
            parts.push_back(make_binary(j == i ? BinaryOp::Ne : BinaryOp::Eq, meta(first[j].name, Type::boolean()),
                                        meta(second[j].name, Type::boolean())));
        em.emit(cond_tag(d.loc, i), htl::make_guard(htl::make_conj(l, l2), conjunction(parts)),
                "condition `" + print_expr(*cs[i]) + "` at " + loc_tag(d.loc) + " alone flips the decision");
    }
}

}  // namespace

std::vector<ExprPtr> atomic_conditions(const ExprPtr& decision) {
    std::vector<ExprPtr> out;
    leaves(decision, out);
    return out;
}

ExprPtr substitute_condition(const ExprPtr& decision, std::size_t i, bool value) {
    std::size_t counter = 0;
    ExprPtr out = substitute(decision, i, value, counter);
    if (i >= counter) throw std::out_of_range("no atomic condition " + std::to_string(i));
    return out;
}

ExprPtr negate(const ExprPtr& e) {
    if (e->kind == ExprKind::BoolLit) return make_bool(e->literal == 0);
    if (e->kind == ExprKind::Unary && e->unary == UnaryOp::Not) return e->lhs;
    if (e->kind == ExprKind::Binary && is_relational(e->binary)) {
        BinaryOp flipped = e->binary;
        switch (e->binary) {
        case BinaryOp::Eq: flipped = BinaryOp::Ne; break;
        case BinaryOp::Ne: flipped = BinaryOp::Eq; break;
        case BinaryOp::Lt: flipped = BinaryOp::Ge; break;
        case BinaryOp::Ge: flipped = BinaryOp::Lt; break;
        case BinaryOp::Le: flipped = BinaryOp::Gt; break;
        case BinaryOp::Gt: flipped = BinaryOp::Le; break;
        default: break;
        }
        auto copy = std::make_shared<Expr>(*e);
        copy->binary = flipped;
        return copy;
    }
    return make_not(e);
}

std::vector<htl::Hyperlabel> annotate_logic(const mini::LocatedProgram& p, Criterion variant, ProvenanceMap* prov) {
    Emitter em(variant, prov);
    for (const detail::Decision& d : detail::decisions(p)) {
        std::vector<ExprPtr> cs = atomic_conditions(d.expr);
        switch (variant) {
        case Criterion::CC: emit_cc(em, d, cs); break;
        case Criterion::DCC:
            emit_cc(em, d, cs);
            emit_dc(em, d);
            break;
        case Criterion::MCC: emit_mcc(em, d, cs); break;
        case Criterion::GACC: emit_gacc(em, d, cs); break;
        case Criterion::CACC: emit_cacc(em, d, cs); break;
        case Criterion::RACC: emit_racc(em, d, cs); break;
        default: throw std::invalid_argument(std::string("not a logic criterion: ") + name(variant));
        }
    }
    return em.take();
}

namespace detail {

void emit_decision_labels(Emitter& em, const Decision& d) { emit_dc(em, d); }

}  // namespace detail

}  // namespace htolcov::crit
