#include <algorithm>
#include <deque>
#include <map>
#include <set>
#include <stdexcept>

#include "common.hpp"

namespace htolcov::crit {

using detail::Emitter;
using detail::label;
using detail::loc_tag;
using detail::meta;

namespace {

/// Locations reachable from a node through at least one edge.
class Reachability {
public:
    const std::set<LocationId>& from(const mini::FunctionCfg& g, LocationId n) {
        auto it = cache_.find(n);
        if (it != cache_.end()) return it->second;
        std::set<LocationId> seen;
        std::deque<LocationId> work{n};
        while (!work.empty()) {
            LocationId m = work.front();
            work.pop_front();
            for (const mini::CfgEdge& e : g.successors(m))
                if (e.to != mini::kExitNode && seen.insert(e.to).second) work.push_back(e.to);
        }
        return cache_.emplace(n, std::move(seen)).first->second;
    }

    /// m can occur strictly between d and u on some path.
    bool between(const mini::FunctionCfg& g, LocationId d, LocationId m, LocationId u) {
        return from(g, d).count(m) && from(g, m).count(u);
    }

private:
    std::map<LocationId, std::set<LocationId>> cache_;
};

struct Objective {
    mini::VarKey var;
    LocationId def = 0;
    LocationId use = 0;
    std::size_t occurrence = 0;
    bool numbered = false;  // several cell reads at the same use
    htl::TermPtr term;
    std::string construct;
};

ExprPtr pc_is(LocationId l) { return make_binary(BinaryOp::Eq, make_pc(), make_loc(l)); }

/// !(pc == m1 || pc == m2 || ...), or null when `kills` is empty.
ExprPtr avoid(const std::vector<LocationId>& kills) {
    if (kills.empty()) return nullptr;
    ExprPtr any = pc_is(kills.front());
    for (std::size_t i = 1; i < kills.size(); ++i) any = make_or(any, pc_is(kills[i]));
    return make_not(any);
}

ExprPtr dynamic(const ExprPtr& e) {
    return rewrite_vars(e, [](Expr& v) {
        v.role = VarRole::Dynamic;
        v.slot = -1;
    });
}

bool reads_slot(const Expr& e, std::int32_t slot) {
    if ((e.kind == ExprKind::Var || e.kind == ExprKind::Index) && e.slot == slot) return true;
    return (e.lhs && reads_slot(*e.lhs, slot)) || (e.rhs && reads_slot(*e.rhs, slot));
}

bool reads_any(const Expr& e, const std::vector<std::int32_t>& slots) {
    return std::any_of(slots.begin(), slots.end(), [&](std::int32_t s) { return reads_slot(e, s); });
}

void cell_reads(const ExprPtr& e, std::int32_t slot, std::vector<ExprPtr>& out) {
    if (!e) return;
    if (e->kind == ExprKind::Index && e->slot == slot) out.push_back(e->lhs);
    cell_reads(e->lhs, slot, out);
    cell_reads(e->rhs, slot, out);
}

/// Metavariable name that cannot clash with a program variable in a path predicate.
std::string fresh(const mini::LocatedProgram& p, const std::string& base) {
    for (const mini::FunctionDef& f : p.functions)
        for (const mini::Variable& v : f.variables)
            if (v.name == base) return base + "'";
    return base;
}

class DataflowBuilder {
public:
    DataflowBuilder(const mini::LocatedProgram& p, bool array_cells)
        : p_(p), cfg_(build_cfg(p)), du_(compute_def_use(p, cfg_)), cells_(array_cells),
          v1_(fresh(p, "v1")), v2_(fresh(p, "v2")) {}

    std::vector<Objective> build() {
        std::vector<Objective> out;
        for (const mini::DuPair& pair : du_.du_pairs) {
            if (cells_ && is_array(pair.var) && element_index(pair.def)) continue;
            out.push_back(whole(pair));
        }
        if (cells_) {
            for (const auto& [var, defs] : du_.defs)
                if (is_array(var))
                    for (LocationId d : defs) cell_objectives(var, d, out);
        }
        std::stable_sort(out.begin(), out.end(), [](const Objective& a, const Objective& b) {
            if (a.var != b.var) return a.var < b.var;
            if (a.def != b.def) return a.def < b.def;
            if (a.use != b.use) return a.use < b.use;
            return a.occurrence < b.occurrence;
        });
        return out;
    }

    const mini::LocatedProgram& program() const { return p_; }

private:
    bool is_array(mini::VarKey v) const {
        return p_.functions[v.function].variables[static_cast<std::size_t>(v.slot)].type.kind == TypeKind::IntArray;
    }

    /// Subscript of an element assignment at `loc`, null for whole definitions.
    ExprPtr element_index(LocationId loc) const {
        const mini::LocationInfo& info = p_.location(loc);
        if (!info.stmt || info.stmt->kind != mini::StmtKind::Assign) return nullptr;
        return info.stmt->index;
    }

    const mini::FunctionCfg& graph(mini::VarKey v) const { return cfg_.functions[v.function]; }

    std::string describe(mini::VarKey v, LocationId d, LocationId u) const {
        return "def-use of " + var_name(p_, v) + " from " + loc_tag(d) + " to " + loc_tag(u);
    }

    Objective whole(const mini::DuPair& pair) {
        const mini::FunctionCfg& g = graph(pair.var);
        std::vector<LocationId> kills;
        for (LocationId m : du_.defs.at(pair.var))
            if (m != pair.def && reach_.between(g, pair.def, m, pair.use)) kills.push_back(m);
        ExprPtr phi = avoid(kills);
        auto term = htl::make_sequence({{pair.def, make_bool(true), {}}, {pair.use, make_bool(true), {}}},
                                       {phi ? phi : make_bool(true)});
        return {pair.var, pair.def, pair.use, 0, false, term, describe(pair.var, pair.def, pair.use)};
    }

    void cell_objectives(mini::VarKey var, LocationId d, std::vector<Objective>& out) {
        ExprPtr index = element_index(d);
        if (!index || reads_slot(*index, var.slot)) return;
        const mini::FunctionCfg& g = graph(var);
        const std::set<LocationId>& defs = du_.defs.at(var);

        // Uses reachable from d without passing a whole definition.
        std::set<LocationId> uses;
        std::set<LocationId> seen;
        std::deque<LocationId> work;
        auto push_succ = [&](LocationId n) {
            for (const mini::CfgEdge& e : g.successors(n))
                if (e.to != mini::kExitNode && seen.insert(e.to).second) work.push_back(e.to);
        };
        push_succ(d);
        while (!work.empty()) {
            LocationId n = work.front();
            work.pop_front();
            uses.insert(n);
            if (defs.count(n) && !element_index(n)) continue;
            push_succ(n);
        }

        for (LocationId u : uses) {
            const mini::LocationInfo& info = p_.location(u);
            if (!info.stmt) continue;
            std::vector<ExprPtr> reads;
            mini::for_each_expr(*info.stmt, [&](const ExprPtr& e) { cell_reads(e, var.slot, reads); });
            std::vector<std::int32_t> written = defined_slots(p_, u);
            for (std::size_t o = 0; o < reads.size(); ++o) {
                if (reads_any(*reads[o], written)) continue;
                out.push_back({var, d, u, o, reads.size() > 1, cell_term(var, d, index, u, reads[o]),
                               "cell " + describe(var, d, u)});
            }
        }
    }

    htl::TermPtr cell_term(mini::VarKey var, LocationId d, const ExprPtr& index, LocationId u,
                           const ExprPtr& subscript) {
        const mini::FunctionCfg& g = graph(var);
        std::vector<LocationId> whole_kills;
        std::vector<ExprPtr> parts;
        for (LocationId m : du_.defs.at(var)) {
            if (m == d || !reach_.between(g, d, m, u)) continue;
            ExprPtr j = element_index(m);
            if (!j || reads_slot(*j, var.slot)) {
                whole_kills.push_back(m);
                continue;
            }
            parts.push_back(make_binary(BinaryOp::Implies, pc_is(m),
                                        make_binary(BinaryOp::Ne, dynamic(j), meta(v1_, Type::integer()))));
        }
        ExprPtr phi = avoid(whole_kills);
        for (const ExprPtr& part : parts) phi = phi ? make_and(phi, part) : part;
        auto seq = htl::make_sequence({{d, make_bool(true), {{v1_, index}}}, {u, make_bool(true), {{v2_, subscript}}}},
                                      {phi ? phi : make_bool(true)});
        return htl::make_guard(seq, make_binary(BinaryOp::Eq, meta(v1_, Type::integer()), meta(v2_, Type::integer())));
    }

    const mini::LocatedProgram& p_;
    mini::Cfg cfg_;
    mini::DefUseInfo du_;
    Reachability reach_;
    bool cells_;
    std::string v1_;
    std::string v2_;
};

std::string var_tag(const mini::LocatedProgram& p, mini::VarKey v) {
    return p.functions[v.function].name + "_" + var_name(p, v);
}

}  // namespace

std::vector<htl::Hyperlabel> annotate_dataflow(const mini::LocatedProgram& p, Criterion variant, bool array_cells,
                                               ProvenanceMap* prov) {
    if (variant != Criterion::AllUses && variant != Criterion::AllDefs)
        throw std::invalid_argument(std::string("not a dataflow criterion: ") + name(variant));
    DataflowBuilder builder(p, array_cells);
    std::vector<Objective> objectives = builder.build();
    Emitter em(variant, prov);
    if (variant == Criterion::AllUses) {
        for (const Objective& o : objectives) {
            std::string id = var_tag(p, o.var) + "_" + loc_tag(o.def) + "_" + loc_tag(o.use);
            if (o.numbered) id += "_" + std::to_string(o.occurrence + 1);
            em.emit(id, o.term, o.construct);
        }
        return em.take();
    }
    for (std::size_t i = 0; i < objectives.size();) {
        std::size_t j = i;
        htl::TermPtr term;
        while (j < objectives.size() && objectives[j].var == objectives[i].var && objectives[j].def == objectives[i].def) {
            term = term ? htl::make_disj(term, objectives[j].term) : objectives[j].term;
            ++j;
        }
        const Objective& o = objectives[i];
        em.emit(var_tag(p, o.var) + "_" + loc_tag(o.def), term,
                "definition of " + var_name(p, o.var) + " at " + loc_tag(o.def) + " reaching a use");
        i = j;
    }
    return em.take();
}

}  // namespace htolcov::crit
