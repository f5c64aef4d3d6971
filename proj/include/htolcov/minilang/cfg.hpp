// Intra-procedural control-flow graphs over locations.
#pragma once

#include <map>
#include <vector>

#include "htolcov/minilang/program.hpp"

namespace htolcov::mini {

enum class EdgeKind : std::uint8_t { Fallthrough, BranchTrue, BranchFalse };

const char* to_string(EdgeKind k);

/// Virtual exit node shared by every function graph; never a real location.
inline constexpr LocationId kExitNode = 0;

struct CfgEdge {
    LocationId from = 0;
    LocationId to = 0;
    EdgeKind kind = EdgeKind::Fallthrough;
    friend bool operator==(const CfgEdge&, const CfgEdge&) = default;
};

struct FunctionCfg {
    std::size_t function = 0;
    LocationId entry = 0;
    std::vector<LocationId> nodes;  // real locations, ascending; the exit node is implicit
    std::vector<CfgEdge> edges;     // sorted by (from, kind)

    [[nodiscard]] const std::vector<CfgEdge>& successors(LocationId n) const;
    [[nodiscard]] const std::vector<CfgEdge>& predecessors(LocationId n) const;
    [[nodiscard]] bool is_branch(LocationId n) const { return successors(n).size() == 2; }

    std::map<LocationId, std::vector<CfgEdge>> succ;
    std::map<LocationId, std::vector<CfgEdge>> pred;
};

struct Cfg {
    std::vector<FunctionCfg> functions;  // indexed like LocatedProgram::functions
};

Cfg build_cfg(const LocatedProgram& p);

}  // namespace htolcov::mini
