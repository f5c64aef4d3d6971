#include "htolcov/htol/hyperlabel.hpp"

#include <algorithm>
#include <sstream>
#include <stdexcept>

namespace htolcov::htl {

TermPtr make_label(BoundLabel l) {
    auto t = std::make_shared<Term>();
    t->kind = TermKind::Label;
    t->label = std::move(l);
    return t;
}

TermPtr make_sequence(std::vector<BoundLabel> elems, std::vector<ExprPtr> path) {
    if (elems.size() < 2 || path.size() + 1 != elems.size())
        throw std::invalid_argument("sequence needs n >= 2 elements and n-1 path predicates");
    auto t = std::make_shared<Term>();
    t->kind = TermKind::Sequence;
    t->elems = std::move(elems);
    t->path = std::move(path);
    return t;
}

TermPtr make_guard(TermPtr body, ExprPtr psi) {
    auto t = std::make_shared<Term>();
    t->kind = TermKind::Guard;
    t->lhs = std::move(body);
    t->psi = std::move(psi);
    return t;
}

TermPtr make_conj(TermPtr lhs, TermPtr rhs) {
    auto t = std::make_shared<Term>();
    t->kind = TermKind::Conj;
    t->lhs = std::move(lhs);
    t->rhs = std::move(rhs);
    return t;
}

TermPtr make_disj(TermPtr lhs, TermPtr rhs) {
    auto t = std::make_shared<Term>();
    t->kind = TermKind::Disj;
    t->lhs = std::move(lhs);
    t->rhs = std::move(rhs);
    return t;
}

NameSet names_of(const BoundLabel& l) {
    NameSet out;
    for (const Binding& b : l.bindings) out.insert(b.name);
    return out;
}

NameSet visible_names(const Term& h) {
    switch (h.kind) {
    case TermKind::Label:
        return names_of(h.label);
    case TermKind::Sequence: {
        NameSet out;
        for (const BoundLabel& e : h.elems) out.merge(names_of(e));
        return out;
    }
    case TermKind::Guard:
        return visible_names(*h.lhs);
    case TermKind::Conj: {
        NameSet out = visible_names(*h.lhs);
        out.merge(visible_names(*h.rhs));
        return out;
    }
    case TermKind::Disj: {
        NameSet l = visible_names(*h.lhs);
        NameSet r = visible_names(*h.rhs);
        NameSet out;
        std::set_intersection(l.begin(), l.end(), r.begin(), r.end(), std::inserter(out, out.end()));
        return out;
    }
    }
    return {};
}

namespace {

std::string join(const NameSet& s) {
    std::string out = "{";
    for (const std::string& n : s) out += (out.size() > 1 ? ", " : "") + n;
    return out + "}";
}

NameSet intersect(const NameSet& a, const NameSet& b) {
    NameSet out;
    std::set_intersection(a.begin(), a.end(), b.begin(), b.end(), std::inserter(out, out.end()));
    return out;
}

void check_bindings(const BoundLabel& l, std::vector<Violation>& out) {
    NameSet seen;
    for (const Binding& b : l.bindings)
        if (!seen.insert(b.name).second)
            out.push_back({"bindings", "name '" + b.name + "' bound twice at loc" + std::to_string(l.loc)});
}

void check(const Term& h, std::vector<Violation>& out) {
    switch (h.kind) {
    case TermKind::Label:
        check_bindings(h.label, out);
        return;
    case TermKind::Sequence:
        for (const BoundLabel& e : h.elems) check_bindings(e, out);
        for (std::size_t i = 0; i < h.elems.size(); ++i)
            for (std::size_t j = i + 1; j < h.elems.size(); ++j) {
                NameSet common = intersect(names_of(h.elems[i]), names_of(h.elems[j]));
                if (!common.empty())
                    out.push_back({"sequence", "sequence elements " + std::to_string(i + 1) + " and " +
                                                   std::to_string(j + 1) + " share " + join(common)});
            }
        return;
    case TermKind::Guard:
        check(*h.lhs, out);
        return;
    case TermKind::Conj: {
        check(*h.lhs, out);
        check(*h.rhs, out);
        NameSet common = intersect(visible_names(*h.lhs), visible_names(*h.rhs));
        if (!common.empty()) out.push_back({"conj", "conjunction operands share " + join(common)});
        return;
    }
    case TermKind::Disj: {
        check(*h.lhs, out);
        check(*h.rhs, out);
        NameSet l = visible_names(*h.lhs);
        NameSet r = visible_names(*h.rhs);
        if (l != r) out.push_back({"disj", "disjunction operands bind " + join(l) + " and " + join(r)});
        return;
    }
    }
}

bool same_opt_expr(const ExprPtr& a, const ExprPtr& b) {
    if (!a || !b) return !a && !b;
    return same_expr(*a, *b);
}

bool same_label(const BoundLabel& a, const BoundLabel& b) {
    if (a.loc != b.loc || !same_opt_expr(a.pred, b.pred) || a.bindings.size() != b.bindings.size()) return false;
    for (std::size_t i = 0; i < a.bindings.size(); ++i)
        if (a.bindings[i].name != b.bindings[i].name || !same_opt_expr(a.bindings[i].expr, b.bindings[i].expr))
            return false;
    return true;
}

}  // namespace

std::vector<Violation> check_well_formed(const Term& h) {
    std::vector<Violation> out;
    check(h, out);
    return out;
}

bool same_term(const Term& a, const Term& b) {
    if (a.kind != b.kind) return false;
    switch (a.kind) {
    case TermKind::Label:
        return same_label(a.label, b.label);
    case TermKind::Sequence:
        if (a.elems.size() != b.elems.size()) return false;
        for (std::size_t i = 0; i < a.elems.size(); ++i)
            if (!same_label(a.elems[i], b.elems[i])) return false;
        for (std::size_t i = 0; i < a.path.size(); ++i)
            if (!same_opt_expr(a.path[i], b.path[i])) return false;
        return true;
    case TermKind::Guard:
        return same_opt_expr(a.psi, b.psi) && same_term(*a.lhs, *b.lhs);
    case TermKind::Conj:
    case TermKind::Disj:
        return same_term(*a.lhs, *b.lhs) && same_term(*a.rhs, *b.rhs);
    }
    return false;
}

bool eval_bindings(const std::vector<Binding>& b, const mini::LocatedProgram& p, LocationId loc,
                   const trace::Frame& state, Environment& out) {
    trace::FrameScope scope(p, loc, state);
    for (const Binding& e : b) {
        EvalResult r = evaluate(*e.expr, scope);
        if (!r.ok()) return false;
        out[e.name] = r.value;
    }
    return true;
}

bool label_holds(const BoundLabel& l, const mini::LocatedProgram& p, LocationId loc, const trace::Frame& state) {
    return loc == l.loc && holds(*l.pred, trace::FrameScope(p, loc, state));
}

bool eval_guard(const Expr& psi, const Environment& env) {
    std::set<std::string> names;
    collect_names(psi, names);
    for (const std::string& n : names)
        if (!env.count(n)) throw std::logic_error("guard evaluated without a value for '" + n + "'");
    return holds(psi, EnvScope(env));
}

bool eval_path_pred(const Expr& phi, const Environment& env, const mini::LocatedProgram& p, LocationId loc,
                    const trace::Frame& state) {
    EnvScope meta(env);
    trace::FrameScope frame(p, loc, state);
    return holds(phi, PathScope<EnvScope>(meta, frame));
}

// ---------------------------------------------------------------------------
// Printing

namespace {

bool is_true(const ExprPtr& e) { return e && e->kind == ExprKind::BoolLit && e->literal != 0; }

void print_into(const Term& h, std::string& out);

void print_operand(const Term& h, bool parens, std::string& out) {
    if (parens) out += '(';
    print_into(h, out);
    if (parens) out += ')';
}

void print_into(const Term& h, std::string& out) {
    switch (h.kind) {
    case TermKind::Label:
        out += print_label(h.label);
        return;
    case TermKind::Sequence:
        out += '[';
        for (std::size_t i = 0; i < h.elems.size(); ++i) {
            if (i) out += is_true(h.path[i - 1]) ? " -> " : " ->(" + print_expr(*h.path[i - 1]) + ") ";
            out += print_label(h.elems[i]);
        }
        out += ']';
        return;
    case TermKind::Guard:
        out += "guard(";
        print_into(*h.lhs, out);
        out += ") with (" + print_expr(*h.psi) + ")";
        return;
    case TermKind::Conj:
        // `.` binds tighter than `+`; both associate to the left.
        print_operand(*h.lhs, h.lhs->kind == TermKind::Disj, out);
        out += " . ";
        print_operand(*h.rhs, h.rhs->kind == TermKind::Disj || h.rhs->kind == TermKind::Conj, out);
        return;
    case TermKind::Disj:
        print_into(*h.lhs, out);
        out += " + ";
        print_operand(*h.rhs, h.rhs->kind == TermKind::Disj, out);
        return;
    }
}

}  // namespace

std::string print_label(const BoundLabel& l) {
    std::string out = "l(loc" + std::to_string(l.loc) + ", " + print_expr(*l.pred) + ")";
    if (!l.bindings.empty()) {
        out += '{';
        for (std::size_t i = 0; i < l.bindings.size(); ++i)
            out += (i ? "; " : "") + l.bindings[i].name + " <- " + print_expr(*l.bindings[i].expr);
        out += '}';
    }
    return out;
}

std::string print_term(const Term& h) {
    std::string out;
    print_into(h, out);
    return out;
}

std::string print_hyperlabel(const Hyperlabel& h) {
    std::string out = h.id;
    if (!h.criterion.empty()) out += " : " + h.criterion;
    return out + " = " + print_term(*h.term);
}

std::string print_htl(const std::vector<Hyperlabel>& hs) {
    std::string out;
    for (const Hyperlabel& h : hs) out += print_hyperlabel(h) + '\n';
    return out;
}

}  // namespace htolcov::htl
