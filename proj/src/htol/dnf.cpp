#include "htolcov/htol/dnf.hpp"

namespace htolcov::htl {

namespace {

void flatten(const ExprPtr& e, std::vector<ExprPtr>& out) {
    if (e->kind == ExprKind::Binary && e->binary == BinaryOp::And) {
        flatten(e->lhs, out);
        flatten(e->rhs, out);
        return;
    }
    if (e->kind == ExprKind::BoolLit && e->literal != 0) return;
    out.push_back(e);
}

void check_cap(std::size_t n, std::size_t cap) {
    if (n > cap)
        throw DnfCapExceeded("normal form needs " + std::to_string(n) + " disjuncts, above the cap of " +
                             std::to_string(cap));
}

}  // namespace

std::vector<ExprPtr> conjuncts(const ExprPtr& psi) {
    std::vector<ExprPtr> out;
    if (psi) flatten(psi, out);
    return out;
}

ExprPtr guard_expr(const std::vector<ExprPtr>& guard) {
    if (guard.empty()) return make_bool(true);
    ExprPtr out = guard.front();
    for (std::size_t i = 1; i < guard.size(); ++i) out = make_and(out, guard[i]);
    return out;
}

std::vector<GuardedConjunction> normalize_term(const Term& h, std::size_t cap) {
    switch (h.kind) {
    case TermKind::Label:
    case TermKind::Sequence: {
        auto self = std::make_shared<Term>(h);
        return {GuardedConjunction{{self}, {}}};
    }
    case TermKind::Guard: {
        std::vector<GuardedConjunction> body = normalize_term(*h.lhs, cap);
        std::vector<ExprPtr> psi = conjuncts(h.psi);
        for (GuardedConjunction& c : body) c.guard.insert(c.guard.end(), psi.begin(), psi.end());
        return body;
    }
    case TermKind::Disj: {
        std::vector<GuardedConjunction> l = normalize_term(*h.lhs, cap);
        std::vector<GuardedConjunction> r = normalize_term(*h.rhs, cap);
        check_cap(l.size() + r.size(), cap);
        l.insert(l.end(), std::make_move_iterator(r.begin()), std::make_move_iterator(r.end()));
        return l;
    }
    case TermKind::Conj: {
        std::vector<GuardedConjunction> l = normalize_term(*h.lhs, cap);
        std::vector<GuardedConjunction> r = normalize_term(*h.rhs, cap);
        check_cap(l.size() * r.size(), cap);
        std::vector<GuardedConjunction> out;
        out.reserve(l.size() * r.size());
        for (const GuardedConjunction& a : l)
            for (const GuardedConjunction& b : r) {
                GuardedConjunction c = a;
                c.atoms.insert(c.atoms.end(), b.atoms.begin(), b.atoms.end());
                c.guard.insert(c.guard.end(), b.guard.begin(), b.guard.end());
                out.push_back(std::move(c));
            }
        return out;
    }
    }
    return {};
}

DNFHyperlabel normalize_dnf(const Hyperlabel& h, std::size_t cap) {
    return {h.id, h.criterion, normalize_term(*h.term, cap)};
}

TermPtr to_term(const std::vector<GuardedConjunction>& dnf) {
    TermPtr out;
    for (const GuardedConjunction& c : dnf) {
        TermPtr conj = c.atoms.front();
        for (std::size_t i = 1; i < c.atoms.size(); ++i) conj = make_conj(conj, c.atoms[i]);
        if (!c.guard.empty()) conj = make_guard(conj, guard_expr(c.guard));
        out = out ? make_disj(out, conj) : conj;
    }
    return out;
}

Hyperlabel to_hyperlabel(const DNFHyperlabel& d) {
    return {d.id, d.criterion, to_term(d.disjuncts)};
}

bool same_dnf(const std::vector<GuardedConjunction>& a, const std::vector<GuardedConjunction>& b) {
    if (a.size() != b.size()) return false;
    for (std::size_t i = 0; i < a.size(); ++i) {
        if (a[i].atoms.size() != b[i].atoms.size() || a[i].guard.size() != b[i].guard.size()) return false;
        for (std::size_t k = 0; k < a[i].atoms.size(); ++k)
            if (!same_term(*a[i].atoms[k], *b[i].atoms[k])) return false;
        for (std::size_t k = 0; k < a[i].guard.size(); ++k)
            if (!same_expr(*a[i].guard[k], *b[i].guard[k])) return false;
    }
    return true;
}

std::string print_dnf(const DNFHyperlabel& d) {
    return print_hyperlabel(to_hyperlabel(d));
}

}  // namespace htolcov::htl
