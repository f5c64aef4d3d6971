// Static def-use pairs (arrays as whole variables) and the call graph.
#pragma once

#include <map>
#include <set>
#include <string>
#include <vector>

#include "htolcov/minilang/cfg.hpp"

namespace htolcov::mini {

/// A program variable: a slot of one function.
struct VarKey {
    std::size_t function = 0;
    std::int32_t slot = -1;
    friend auto operator<=>(const VarKey&, const VarKey&) = default;
};

struct DuPair {
    VarKey var;
    LocationId def = 0;
    LocationId use = 0;
    friend bool operator==(const DuPair&, const DuPair&) = default;
};

struct DefUseInfo {
    std::map<VarKey, std::set<LocationId>> defs;
    std::map<VarKey, std::set<LocationId>> uses;
    std::vector<DuPair> du_pairs;  // sorted by (var, def, use)
};

/// Slots written by the location (parameters at entries).
std::vector<std::int32_t> defined_slots(const LocatedProgram& p, LocationId loc);
/// Slots read by the expressions evaluated at the location.
std::vector<std::int32_t> used_slots(const LocatedProgram& p, LocationId loc);

const std::string& var_name(const LocatedProgram& p, VarKey v);

DefUseInfo compute_def_use(const LocatedProgram& p, const Cfg& cfg);

struct CallEdge {
    std::size_t caller = 0;
    std::size_t callee = 0;
    std::vector<LocationId> sites;  // ascending
};

struct CallGraph {
    std::vector<std::string> nodes;  // function names, program order
    std::vector<CallEdge> edges;     // ordered by (caller, first call site)
};

CallGraph build_callgraph(const LocatedProgram& p);

}  // namespace htolcov::mini
