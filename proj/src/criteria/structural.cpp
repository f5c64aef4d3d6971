#include <set>
#include <stdexcept>

#include "common.hpp"

namespace htolcov::crit {

using detail::Emitter;
using detail::label;
using detail::loc_tag;

namespace {

/// First location of each basic block.
std::set<LocationId> leaders(const mini::FunctionCfg& g) {
    std::set<LocationId> out{g.entry};
    for (LocationId n : g.nodes) {
        const auto& preds = g.predecessors(n);
        if (preds.size() != 1) out.insert(n);
        for (const mini::CfgEdge& e : preds)
            if (g.is_branch(e.from)) out.insert(n);
    }
    return out;
}

}  // namespace

std::vector<htl::Hyperlabel> annotate_structural(const mini::LocatedProgram& p, Criterion variant,
                                                 ProvenanceMap* prov) {
    Emitter em(variant, prov);
    switch (variant) {
    case Criterion::FC:
        for (const mini::FunctionDef& f : p.functions)
            em.emit(f.name, label(f.entry, make_bool(true)), "function " + f.name);
        break;
    case Criterion::BBC: {
        mini::Cfg cfg = build_cfg(p);
        for (const mini::FunctionCfg& g : cfg.functions) {
            const std::string& fname = p.functions[g.function].name;
            for (LocationId l : leaders(g))
                em.emit(fname + "_" + loc_tag(l), label(l, make_bool(true)),
                        "basic block of " + fname + " starting at " + loc_tag(l));
        }
        break;
    }
    case Criterion::DC:
        for (const detail::Decision& d : detail::decisions(p)) detail::emit_decision_labels(em, d);
        break;
    default: throw std::invalid_argument(std::string("not a structural criterion: ") + name(variant));
    }
    return em.take();
}

std::vector<htl::Hyperlabel> annotate_fcc(const mini::LocatedProgram& p, ProvenanceMap* prov) {
    Emitter em(Criterion::FCC, prov);
    mini::CallGraph cg = build_callgraph(p);
    for (const mini::CallEdge& e : cg.edges) {
        htl::TermPtr term;
        for (LocationId site : e.sites) {
            auto l = label(site, make_bool(true));
            term = term ? htl::make_disj(term, l) : l;
        }
        const std::string& f = cg.nodes[e.caller];
        const std::string& g = cg.nodes[e.callee];
        em.emit(f + "_" + g, term, "calls from " + f + " to " + g);
    }
    return em.take();
}

}  // namespace htolcov::crit
