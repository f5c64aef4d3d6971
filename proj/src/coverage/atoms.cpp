#include <algorithm>
#include <stdexcept>

#include "htolcov/coverage/engine.hpp"

namespace htolcov::cov {

namespace {

AtomElem compile_elem(const htl::BoundLabel& l, std::vector<std::string>& names) {
    AtomElem e;
    e.loc = l.loc;
    e.pred = l.pred;
    e.offset = names.size();
    for (const htl::Binding& b : l.bindings) {
        e.bindings.push_back(b.expr);
        names.push_back(b.name);
    }
    return e;
}

}  // namespace

Atom compile_atom(const htl::TermPtr& term) {
    Atom a;
    a.term = term;
    if (term->kind == htl::TermKind::Label) {
        a.elems.push_back(compile_elem(term->label, a.names));
        return a;
    }
    if (term->kind != htl::TermKind::Sequence) throw std::invalid_argument("atom must be a label or a sequence");
    a.sequence = true;
    for (const htl::BoundLabel& l : term->elems) a.elems.push_back(compile_elem(l, a.names));
    for (const ExprPtr& phi : term->path) {
        a.path.push_back(rewrite_vars(phi, [&](Expr& v) {
            if (v.role != VarRole::Meta) return;
            auto it = std::find(a.names.begin(), a.names.end(), v.name);
            if (it == a.names.end()) throw std::invalid_argument("path predicate mentions unbound '" + v.name + "'");
            v.slot = static_cast<std::int32_t>(it - a.names.begin());
        }));
    }
    return a;
}

std::size_t AtomTable::intern(const htl::TermPtr& atom) {
    std::string key = htl::print_term(*atom);
    auto [it, fresh] = index_.emplace(std::move(key), atoms_.size());
    if (fresh) atoms_.push_back(compile_atom(atom));
    return it->second;
}

PlannedHyperlabel plan(htl::DNFHyperlabel dnf, AtomTable& table) {
    PlannedHyperlabel out;
    for (const htl::GuardedConjunction& c : dnf.disjuncts) {
        std::vector<std::size_t> ids;
        for (const htl::TermPtr& a : c.atoms) ids.push_back(table.intern(a));
        out.atom_ids.push_back(std::move(ids));
    }
    out.dnf = std::move(dnf);
    return out;
}

const char* to_string(Status s) {
    switch (s) {
    case Status::Covered: return "covered";
    case Status::Uncovered: return "uncovered";
    case Status::UnknownBudget: return "unknown-budget";
    }
    return "?";
}

Score coverage_score(const std::vector<Verdict>& verdicts) {
    Score s;
    s.total = verdicts.size();
    s.empty = verdicts.empty();
    for (const Verdict& v : verdicts) {
        if (v.status == Status::Covered) ++s.covered;
        if (v.status == Status::UnknownBudget) ++s.unknown;
    }
    return s;
}

Measurement measure_hyperlabels(const mini::LocatedProgram& p, const std::vector<htl::Hyperlabel>& hs,
                                const trace::TestSuite& ts, const MeasureOptions& options) {
    Measurement m;
    for (const htl::Hyperlabel& h : hs) m.planned.push_back(plan(htl::normalize_dnf(h, options.dnf_cap), m.atoms));
    m.log = harvest(p, m.atoms, ts, options.harvest);
    for (const PlannedHyperlabel& h : m.planned) m.verdicts.push_back(consolidate(h, m.atoms, m.log, options.budget));
    m.score = coverage_score(m.verdicts);
    return m;
}

}  // namespace htolcov::cov
