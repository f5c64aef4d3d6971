// MiniImp: the subject language. Parsed programs carry one LocationId per
// statement, per branching condition and per function entry.
#pragma once

#include <memory>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "htolcov/expr.hpp"

namespace htolcov::mini {

enum class StmtKind : std::uint8_t { Decl, Assign, Call, If, While, Return };

/// What kind of program point a location is.
enum class LocationKind : std::uint8_t { Entry, Decl, Assign, Call, IfCond, WhileCond, Return };

const char* to_string(LocationKind k);

struct CallSite {
    std::string callee;
    std::size_t function = 0;  // index into LocatedProgram::functions
    std::vector<ExprPtr> args;
};

struct Stmt {
    StmtKind kind = StmtKind::Decl;
    LocationId loc = 0;
    SourcePos pos;

    // Decl and Assign: written variable; `index` set for element assignment.
    std::string target;
    std::int32_t slot = -1;
    Type decl_type;
    ExprPtr index;

    // Decl initialiser, Assign rhs, If/While condition, Return value.
    ExprPtr value;
    // Call statement, or Decl/Assign whose right-hand side is a call.
    std::optional<CallSite> call;

    std::vector<Stmt> body;       // If then-branch, While body
    std::vector<Stmt> else_body;  // If else-branch
    bool has_else = false;
};

struct Variable {
    std::string name;
    Type type;
    std::int32_t slot = -1;
    bool is_param = false;
    LocationId decl_loc = 0;  // entry location for parameters
};

struct FunctionDef {
    std::string name;
    Type return_type;
    std::vector<std::int32_t> params;
    std::vector<Variable> variables;  // indexed by slot
    std::vector<Stmt> body;
    LocationId entry = 0;
    SourcePos pos;

    /// Slot holding the pending return value at return locations.
    [[nodiscard]] std::int32_t result_slot() const { return static_cast<std::int32_t>(variables.size()); }
    [[nodiscard]] std::size_t slot_count() const { return variables.size() + 1; }
};

/// Name reserved for the pending return value in states and label predicates.
inline constexpr std::string_view kResultName = "__result";

struct VisibleVar {
    std::string name;
    std::int32_t slot = -1;
    Type type;
};

struct LocationInfo {
    LocationId id = 0;
    std::size_t function = 0;
    LocationKind kind = LocationKind::Entry;
    SourcePos pos;
    const Stmt* stmt = nullptr;        // null for function entries
    std::vector<VisibleVar> visible;   // variables in scope in the state after this location

    [[nodiscard]] const VisibleVar* find(std::string_view name) const;
    [[nodiscard]] bool is_decision() const {
        return kind == LocationKind::IfCond || kind == LocationKind::WhileCond;
    }
};

class LocatedProgram {
public:
    LocatedProgram() = default;
    LocatedProgram(const LocatedProgram&) = delete;
    LocatedProgram& operator=(const LocatedProgram&) = delete;
    LocatedProgram(LocatedProgram&&) = default;
    LocatedProgram& operator=(LocatedProgram&&) = default;

    std::vector<FunctionDef> functions;
    std::vector<LocationInfo> locations;  // locations[id - 1]
    std::size_t entry_function = 0;

    [[nodiscard]] const LocationInfo& location(LocationId id) const { return locations.at(id - 1); }
    [[nodiscard]] bool has_location(LocationId id) const {
        return id >= 1 && id <= locations.size();
    }
    [[nodiscard]] std::size_t location_count() const { return locations.size(); }
    [[nodiscard]] std::optional<std::size_t> find_function(std::string_view name) const;
    [[nodiscard]] const FunctionDef& entry() const { return functions.at(entry_function); }
    /// Locations of one function, in increasing order.
    [[nodiscard]] std::vector<LocationId> locations_of(std::size_t function) const;
};

using ProgramPtr = std::shared_ptr<const LocatedProgram>;

/// Parses and type-checks MiniImp source. The entry function defaults to
/// `main` when present, otherwise the first function.
ProgramPtr parse_program(std::string_view source, std::optional<std::string> entry = std::nullopt);
ProgramPtr load_program(const std::string& path, std::optional<std::string> entry = std::nullopt);

/// Canonical source form; parse_program(print_program(p)) is structurally
/// identical to p.
std::string print_program(const LocatedProgram& p);

/// Visits every expression evaluated at a location (condition, right-hand
/// side, subscripts, return value, call arguments), in evaluation order.
template <class Fn>
void for_each_expr(const Stmt& s, Fn&& fn) {
    if (s.index) fn(s.index);
    if (s.value) fn(s.value);
    if (s.call)
        for (const ExprPtr& a : s.call->args) fn(a);
}

}  // namespace htolcov::mini
