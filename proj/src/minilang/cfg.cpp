#include "htolcov/minilang/cfg.hpp"

#include <algorithm>

namespace htolcov::mini {

const char* to_string(EdgeKind k) {
    switch (k) {
    case EdgeKind::Fallthrough: return "fallthrough";
    case EdgeKind::BranchTrue: return "branch-true";
    case EdgeKind::BranchFalse: return "branch-false";
    }
    return "?";
}

const std::vector<CfgEdge>& FunctionCfg::successors(LocationId n) const {
    static const std::vector<CfgEdge> kNone;
    auto it = succ.find(n);
    return it == succ.end() ? kNone : it->second;
}

const std::vector<CfgEdge>& FunctionCfg::predecessors(LocationId n) const {
    static const std::vector<CfgEdge> kNone;
    auto it = pred.find(n);
    return it == pred.end() ? kNone : it->second;
}

namespace {

class Lowering {
public:
    explicit Lowering(FunctionCfg& g) : g_(g) {}

    LocationId block(const std::vector<Stmt>& stmts, LocationId next) {
        LocationId cont = next;
        for (auto it = stmts.rbegin(); it != stmts.rend(); ++it) cont = stmt(*it, cont);
        return cont;
    }

private:
    LocationId stmt(const Stmt& s, LocationId next) {
        g_.nodes.push_back(s.loc);
        switch (s.kind) {
        case StmtKind::Decl:
        case StmtKind::Assign:
        case StmtKind::Call:
            edge(s.loc, next, EdgeKind::Fallthrough);
            break;
        case StmtKind::Return:
            edge(s.loc, kExitNode, EdgeKind::Fallthrough);
            break;
        case StmtKind::If: {
            LocationId then_entry = block(s.body, next);
            LocationId else_entry = block(s.else_body, next);
            edge(s.loc, then_entry, EdgeKind::BranchTrue);
            edge(s.loc, else_entry, EdgeKind::BranchFalse);
            break;
        }
        case StmtKind::While: {
            LocationId body_entry = block(s.body, s.loc);
            edge(s.loc, body_entry, EdgeKind::BranchTrue);
            edge(s.loc, next, EdgeKind::BranchFalse);
            break;
        }
        }
        return s.loc;
    }

    void edge(LocationId from, LocationId to, EdgeKind kind) { g_.edges.push_back({from, to, kind}); }

    FunctionCfg& g_;
};

}  // namespace

Cfg build_cfg(const LocatedProgram& p) {
    Cfg cfg;
    for (std::size_t fi = 0; fi < p.functions.size(); ++fi) {
        const FunctionDef& f = p.functions[fi];
        FunctionCfg g;
        g.function = fi;
        g.entry = f.entry;
        g.nodes.push_back(f.entry);
        Lowering low(g);
        LocationId first = low.block(f.body, kExitNode);
        g.edges.push_back({f.entry, first, EdgeKind::Fallthrough});
        std::sort(g.nodes.begin(), g.nodes.end());
        std::stable_sort(g.edges.begin(), g.edges.end(), [](const CfgEdge& a, const CfgEdge& b) {
            return a.from != b.from ? a.from < b.from : a.kind < b.kind;
        });
        for (const CfgEdge& e : g.edges) {
            g.succ[e.from].push_back(e);
            g.pred[e.to].push_back(e);
        }
        cfg.functions.push_back(std::move(g));
    }
    return cfg;
}

}  // namespace htolcov::mini
