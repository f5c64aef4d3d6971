#include <algorithm>

#include "common.hpp"

namespace htolcov::crit {

using detail::Emitter;
using detail::label;
using detail::loc_tag;

namespace {

constexpr BinaryOp kRelational[] = {BinaryOp::Eq, BinaryOp::Ne, BinaryOp::Lt,
                                    BinaryOp::Le, BinaryOp::Gt, BinaryOp::Ge};

ExprPtr with_op(const ExprPtr& e, BinaryOp op) {
    auto copy = std::make_shared<Expr>(*e);
    copy->binary = op;
    return copy;
}

void mutate_node(const ExprPtr& e, std::vector<Mutant>& out) {
    auto add = [&](MutationOp op, ExprPtr m) {
        if (!same_expr(*e, *m)) out.push_back({op, e, std::move(m)});
    };
    if (e->kind == ExprKind::Binary) {
        switch (e->binary) {
        case BinaryOp::Add: add(MutationOp::AOR, with_op(e, BinaryOp::Sub)); break;
        case BinaryOp::Sub: add(MutationOp::AOR, with_op(e, BinaryOp::Add)); break;
        case BinaryOp::Mul: add(MutationOp::AOR, with_op(e, BinaryOp::Div)); break;
        case BinaryOp::Div: add(MutationOp::AOR, with_op(e, BinaryOp::Mul)); break;
        case BinaryOp::And: add(MutationOp::COR, with_op(e, BinaryOp::Or)); break;
        case BinaryOp::Or: add(MutationOp::COR, with_op(e, BinaryOp::And)); break;
        default: break;
        }
        if (is_relational(e->binary)) {
            bool ints = e->lhs->type.kind == TypeKind::Int;
            for (BinaryOp op : kRelational) {
                if (op == e->binary) continue;
                if (!ints && op != BinaryOp::Eq && op != BinaryOp::Ne) continue;
                add(MutationOp::ROR, with_op(e, op));
            }
        }
    }
    if ((e->kind == ExprKind::Var || e->kind == ExprKind::Index) && e->type.kind == TypeKind::Int)
        add(MutationOp::ABS, make_unary(UnaryOp::Neg, e));
}

void walk(const ExprPtr& e, std::vector<Mutant>& out) {
    if (!e) return;
    mutate_node(e, out);
    walk(e->lhs, out);
    walk(e->rhs, out);
}

bool reads_any(const Expr& e, const std::vector<std::int32_t>& slots) {
    if ((e.kind == ExprKind::Var || e.kind == ExprKind::Index) &&
        std::find(slots.begin(), slots.end(), e.slot) != slots.end())
        return true;
    return (e.lhs && reads_any(*e.lhs, slots)) || (e.rhs && reads_any(*e.rhs, slots));
}

}  // namespace

const char* to_string(MutationOp op) {
    switch (op) {
    case MutationOp::AOR: return "AOR";
    case MutationOp::ROR: return "ROR";
    case MutationOp::COR: return "COR";
    case MutationOp::ABS: return "ABS";
    }
    return "?";
}

std::vector<Mutant> mutants(const ExprPtr& e) {
    std::vector<Mutant> out;
    walk(e, out);
    return out;
}

std::vector<htl::Hyperlabel> annotate_wm_prime(const mini::LocatedProgram& p, ProvenanceMap* prov) {
    Emitter em(Criterion::WMPrime, prov);
    for (const mini::LocationInfo& info : p.locations) {
        if (!info.stmt) continue;
        // Labels see the state after the location; sites reading a variable
        // written here would be checked against the wrong values.
        std::vector<std::int32_t> written = defined_slots(p, info.id);
        std::size_t k = 0;
        mini::for_each_expr(*info.stmt, [&](const ExprPtr& site) {
            for (const Mutant& m : mutants(site)) {
                if (reads_any(*m.original, written)) continue;
                ExprPtr pred = make_binary(BinaryOp::Ne, m.original, m.mutated);
                em.emit(loc_tag(info.id) + "_" + std::to_string(++k), label(info.id, pred),
                        std::string(to_string(m.op)) + " on `" + print_expr(*m.original) + "` at " +
                            loc_tag(info.id) + ": `" + print_expr(*m.mutated) + "`");
            }
        });
    }
    return em.take();
}

}  // namespace htolcov::crit
