#include <algorithm>
#include <deque>
#include <limits>
#include <map>
#include <set>

#include "common.hpp"

namespace htolcov::crit {

using detail::Emitter;
using detail::label;
using detail::loc_tag;

namespace {

using mini::CfgEdge;
using mini::EdgeKind;
using mini::FunctionCfg;
using mini::kExitNode;

std::set<LocationId> reachable(const FunctionCfg& g) {
    std::set<LocationId> seen{g.entry};
    std::deque<LocationId> work{g.entry};
    while (!work.empty()) {
        LocationId n = work.front();
        work.pop_front();
        for (const CfgEdge& e : g.successors(n))
            if (seen.insert(e.to).second) work.push_back(e.to);
    }
    return seen;
}

/// Dominator sets, iterated to a fixed point over the reachable nodes.
std::map<LocationId, std::set<LocationId>> dominators(const FunctionCfg& g, const std::set<LocationId>& nodes) {
    std::map<LocationId, std::set<LocationId>> dom;
    for (LocationId n : nodes) dom[n] = n == g.entry ? std::set<LocationId>{n} : nodes;
    bool changed = true;
    while (changed) {
        changed = false;
        for (LocationId n : nodes) {
            if (n == g.entry) continue;
            std::set<LocationId> meet;
            bool first = true;
            for (const CfgEdge& e : g.predecessors(n)) {
                if (!nodes.count(e.from)) continue;
                const auto& d = dom[e.from];
                if (first) {
                    meet = d;
                    first = false;
                } else {
                    std::set<LocationId> tmp;
                    std::set_intersection(meet.begin(), meet.end(), d.begin(), d.end(),
                                          std::inserter(tmp, tmp.begin()));
                    meet = std::move(tmp);
                }
            }
            meet.insert(n);
            if (meet != dom[n]) {
                dom[n] = std::move(meet);
                changed = true;
            }
        }
    }
    return dom;
}

/// Edges into a node still on the depth-first stack.
std::vector<CfgEdge> retreating_edges(const FunctionCfg& g) {
    std::vector<CfgEdge> out;
    std::set<LocationId> done;
    std::set<LocationId> on_stack;
    struct Frame {
        LocationId node;
        std::size_t next;
    };
    std::vector<Frame> stack{{g.entry, 0}};
    on_stack.insert(g.entry);
    while (!stack.empty()) {
        Frame& f = stack.back();
        const auto& succ = g.successors(f.node);
        if (f.next == succ.size()) {
            on_stack.erase(f.node);
            done.insert(f.node);
            stack.pop_back();
            continue;
        }
        const CfgEdge& e = succ[f.next++];
        if (on_stack.count(e.to)) {
            out.push_back(e);
        } else if (!done.count(e.to)) {
            on_stack.insert(e.to);
            stack.push_back({e.to, 0});
        }
    }
    return out;
}

/// Distance to the exit along successor edges.
std::map<LocationId, std::size_t> exit_distance(const FunctionCfg& g) {
    std::map<LocationId, std::size_t> dist{{kExitNode, 0}};
    std::deque<LocationId> work{kExitNode};
    while (!work.empty()) {
        LocationId n = work.front();
        work.pop_front();
        for (const CfgEdge& e : g.predecessors(n))
            if (dist.emplace(e.from, dist[n] + 1).second) work.push_back(e.from);
    }
    return dist;
}

struct Step {
    LocationId node;
    std::size_t edge;  // index into successors(node)
};

}  // namespace

bool reducible(const FunctionCfg& g) {
    std::set<LocationId> nodes = reachable(g);
    auto dom = dominators(g, nodes);
    for (const CfgEdge& e : retreating_edges(g))
        if (!dom[e.from].count(e.to)) return false;
    return true;
}

std::size_t cyclomatic_complexity(const FunctionCfg& g) {
    std::set<LocationId> nodes = reachable(g);
    std::size_t edges = 0;
    for (LocationId n : nodes) edges += g.successors(n).size();
    return edges + 2 - nodes.size();
}

std::vector<BasisPath> basis_paths(const FunctionCfg& g) {
    if (!reducible(g)) throw SemanticError({}, "BPC: irreducible control flow at " + loc_tag(g.entry));
    auto dist = exit_distance(g);
    auto far = [&](LocationId n) {
        auto it = dist.find(n);
        return it == dist.end() ? std::numeric_limits<std::size_t>::max() : it->second;
    };
    // The default choice heads for the exit, ties broken by edge order.
    std::map<LocationId, std::size_t> preferred;
    for (LocationId n : g.nodes) {
        const auto& succ = g.successors(n);
        std::size_t best = 0;
        for (std::size_t i = 1; i < succ.size(); ++i)
            if (far(succ[i].to) < far(succ[best].to)) best = i;
        preferred[n] = best;
    }
    auto complete = [&](std::vector<Step> path, LocationId from) {
        for (LocationId n = from; n != kExitNode && !g.successors(n).empty();) {
            std::size_t i = preferred[n];
            path.push_back({n, i});
            n = g.successors(n)[i].to;
        }
        return path;
    };

    std::vector<std::vector<Step>> paths{complete({}, g.entry)};
    std::set<LocationId> flipped;
    for (std::size_t p = 0; p < paths.size(); ++p) {
        for (std::size_t i = 0; i < paths[p].size(); ++i) {
            Step s = paths[p][i];
            if (!g.is_branch(s.node) || !flipped.insert(s.node).second) continue;
            std::vector<Step> prefix(paths[p].begin(), paths[p].begin() + static_cast<std::ptrdiff_t>(i));
            std::size_t other = 1 - s.edge;
            prefix.push_back({s.node, other});
            paths.push_back(complete(std::move(prefix), g.successors(s.node)[other].to));
        }
    }

    std::vector<BasisPath> out;
    for (const auto& path : paths) {
        BasisPath b;
        for (const Step& s : path)
            if (g.is_branch(s.node))
                b.decisions.emplace_back(s.node, g.successors(s.node)[s.edge].kind == EdgeKind::BranchTrue);
        out.push_back(std::move(b));
    }
    return out;
}

std::vector<htl::Hyperlabel> annotate_bpc(const mini::LocatedProgram& p, ProvenanceMap* prov) {
    Emitter em(Criterion::BPC, prov);
    mini::Cfg cfg = build_cfg(p);
    for (const FunctionCfg& g : cfg.functions) {
        const std::string& fname = p.functions[g.function].name;
        // Between two recorded points the run may not enter the function
        // again or take any other decision of it.
        ExprPtr phi = make_binary(BinaryOp::Eq, make_pc(), make_loc(g.entry));
        for (LocationId n : g.nodes)
            if (g.is_branch(n)) phi = make_or(phi, make_binary(BinaryOp::Eq, make_pc(), make_loc(n)));
        phi = make_not(phi);

        std::vector<BasisPath> paths = basis_paths(g);
        for (std::size_t k = 0; k < paths.size(); ++k) {
            std::vector<htl::BoundLabel> elems{{g.entry, make_bool(true), {}}};
            std::string what = "basis path " + std::to_string(k + 1) + " of " + fname + ":";
            for (const auto& [loc, taken] : paths[k].decisions) {
                ExprPtr cond = p.location(loc).stmt->value;
                elems.push_back({loc, taken ? cond : negate(cond), {}});
                what += " " + loc_tag(loc) + (taken ? "+" : "-");
            }
            if (paths[k].decisions.empty()) what += " straight line";
            htl::TermPtr term;
            if (elems.size() == 1) {
                term = htl::make_label(elems.front());
            } else {
                std::vector<ExprPtr> path(elems.size() - 1, phi);
                term = htl::make_sequence(std::move(elems), std::move(path));
            }
            em.emit(fname + "_" + std::to_string(k + 1), term, what);
        }
    }
    return em.take();
}

}  // namespace htolcov::crit
