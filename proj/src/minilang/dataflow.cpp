#include "htolcov/minilang/dataflow.hpp"

#include <algorithm>
#include <deque>

namespace htolcov::mini {

namespace {

void expr_slots(const Expr& e, std::vector<std::int32_t>& out) {
    if ((e.kind == ExprKind::Var || e.kind == ExprKind::Index) && e.slot >= 0) out.push_back(e.slot);
    if (e.lhs) expr_slots(*e.lhs, out);
    if (e.rhs) expr_slots(*e.rhs, out);
}

void unique(std::vector<std::int32_t>& v) {
    std::sort(v.begin(), v.end());
    v.erase(std::unique(v.begin(), v.end()), v.end());
}

}  // namespace

std::vector<std::int32_t> defined_slots(const LocatedProgram& p, LocationId loc) {
    const LocationInfo& info = p.location(loc);
    if (info.kind == LocationKind::Entry) return p.functions[info.function].params;
    const Stmt& s = *info.stmt;
    if (s.kind == StmtKind::Decl || s.kind == StmtKind::Assign) return {s.slot};
    return {};
}

std::vector<std::int32_t> used_slots(const LocatedProgram& p, LocationId loc) {
    const LocationInfo& info = p.location(loc);
    std::vector<std::int32_t> out;
    if (!info.stmt) return out;
    for_each_expr(*info.stmt, [&](const ExprPtr& e) { expr_slots(*e, out); });
    unique(out);
    return out;
}

const std::string& var_name(const LocatedProgram& p, VarKey v) {
    return p.functions[v.function].variables[static_cast<std::size_t>(v.slot)].name;
}

DefUseInfo compute_def_use(const LocatedProgram& p, const Cfg& cfg) {
    DefUseInfo info;
    for (const LocationInfo& loc : p.locations) {
        for (std::int32_t s : defined_slots(p, loc.id)) info.defs[{loc.function, s}].insert(loc.id);
        for (std::int32_t s : used_slots(p, loc.id)) info.uses[{loc.function, s}].insert(loc.id);
    }
    // Forward search from each definition, stopping past redefinitions.
    for (const auto& [var, def_locs] : info.defs) {
        auto use_it = info.uses.find(var);
        if (use_it == info.uses.end()) continue;
        const std::set<LocationId>& uses = use_it->second;
        const FunctionCfg& g = cfg.functions[var.function];
        for (LocationId d : def_locs) {
            std::set<LocationId> seen;
            std::deque<LocationId> work;
            for (const CfgEdge& e : g.successors(d))
                if (e.to != kExitNode && seen.insert(e.to).second) work.push_back(e.to);
            while (!work.empty()) {
                LocationId n = work.front();
                work.pop_front();
                if (uses.count(n)) info.du_pairs.push_back({var, d, n});
                if (def_locs.count(n)) continue;
                for (const CfgEdge& e : g.successors(n))
                    if (e.to != kExitNode && seen.insert(e.to).second) work.push_back(e.to);
            }
        }
    }
    std::sort(info.du_pairs.begin(), info.du_pairs.end(), [](const DuPair& a, const DuPair& b) {
        if (a.var != b.var) return a.var < b.var;
        if (a.def != b.def) return a.def < b.def;
        return a.use < b.use;
    });
    return info;
}

namespace {

void collect_calls(const std::vector<Stmt>& stmts, std::vector<std::pair<std::size_t, LocationId>>& out) {
    for (const Stmt& s : stmts) {
        if (s.call) out.emplace_back(s.call->function, s.loc);
        collect_calls(s.body, out);
        collect_calls(s.else_body, out);
    }
}

}  // namespace

CallGraph build_callgraph(const LocatedProgram& p) {
    CallGraph g;
    for (const FunctionDef& f : p.functions) g.nodes.push_back(f.name);
    for (std::size_t fi = 0; fi < p.functions.size(); ++fi) {
        std::vector<std::pair<std::size_t, LocationId>> calls;
        collect_calls(p.functions[fi].body, calls);
        std::sort(calls.begin(), calls.end(), [](const auto& a, const auto& b) { return a.second < b.second; });
        std::vector<CallEdge> edges;
        for (const auto& [callee, site] : calls) {
            auto it = std::find_if(edges.begin(), edges.end(), [&](const CallEdge& e) { return e.callee == callee; });
            if (it == edges.end()) {
                edges.push_back({fi, callee, {site}});
            } else {
                it->sites.push_back(site);
            }
        }
        g.edges.insert(g.edges.end(), edges.begin(), edges.end());
    }
    return g;
}

}  // namespace htolcov::mini
