// Annotation functions: coverage criteria compiled to hyperlabels.
#pragma once

#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "htolcov/htol/hyperlabel.hpp"
#include "htolcov/minilang/cfg.hpp"
#include "htolcov/minilang/dataflow.hpp"

namespace htolcov::crit {

enum class Criterion : std::uint8_t {
    FC, BBC, DC, CC, DCC, MCC, GACC, WMPrime, CACC, RACC, FCC, BPC, AllDefs, AllUses,
};

inline constexpr std::size_t kCriterionCount = 14;

/// Canonical name, e.g. "MCC", "WM'", "ALL_USES".
const char* name(Criterion c);
/// Case-insensitive; also accepts WM, WMP and the hyphenated forms ALL-DEFS, ALL-USES.
std::optional<Criterion> parse_criterion(std::string_view text);
std::vector<Criterion> all_criteria();

/// Largest decision MCC accepts.
inline constexpr std::size_t kMaxMccConditions = 16;

struct AnnotateOptions {
    bool array_cells = false;  // ALL_USES / ALL_DEFS on array elements
};

struct Provenance {
    Criterion criterion;
    std::string construct;  // human-readable source construct
};

struct AnnotatedProgram {
    mini::ProgramPtr program;
    std::vector<htl::Hyperlabel> hyperlabels;
    std::map<std::string, Provenance> provenance;  // by hyperlabel id
};

/// One hyperlabel set per criterion, concatenated in argument order. Ids are
/// prefixed by the criterion, so sets for different criteria never clash.
AnnotatedProgram annotate(const mini::ProgramPtr& p, const std::vector<Criterion>& criteria,
                          const AnnotateOptions& options = {});
AnnotatedProgram annotate(const mini::ProgramPtr& p, Criterion c, const AnnotateOptions& options = {});

// Per-family entry points. Each returns hyperlabels in location order and
// appends provenance entries when `prov` is non-null.

using ProvenanceMap = std::map<std::string, Provenance>;

std::vector<htl::Hyperlabel> annotate_logic(const mini::LocatedProgram& p, Criterion variant,
                                            ProvenanceMap* prov = nullptr);
std::vector<htl::Hyperlabel> annotate_structural(const mini::LocatedProgram& p, Criterion variant,
                                                 ProvenanceMap* prov = nullptr);
std::vector<htl::Hyperlabel> annotate_fcc(const mini::LocatedProgram& p, ProvenanceMap* prov = nullptr);
std::vector<htl::Hyperlabel> annotate_dataflow(const mini::LocatedProgram& p, Criterion variant, bool array_cells,
                                               ProvenanceMap* prov = nullptr);
std::vector<htl::Hyperlabel> annotate_wm_prime(const mini::LocatedProgram& p, ProvenanceMap* prov = nullptr);
std::vector<htl::Hyperlabel> annotate_bpc(const mini::LocatedProgram& p, ProvenanceMap* prov = nullptr);

// Building blocks, exposed for testing.

/// Atomic conditions of a decision: leaves under &&, || and !, left to right.
std::vector<ExprPtr> atomic_conditions(const ExprPtr& decision);
/// The decision with its i-th atomic condition replaced by a literal.
ExprPtr substitute_condition(const ExprPtr& decision, std::size_t i, bool value);
/// Logical negation; relational operators are flipped instead of wrapped.
ExprPtr negate(const ExprPtr& e);

/// Weak-mutation operators.
enum class MutationOp : std::uint8_t { AOR, ROR, COR, ABS };
const char* to_string(MutationOp op);

struct Mutant {
    MutationOp op;
    ExprPtr original;  // mutated subexpression
    ExprPtr mutated;
};

/// Every mutant of every subexpression of `e`, pre-order, operators in
/// AOR, ROR, COR, ABS order. Mutants equal to their original are dropped.
std::vector<Mutant> mutants(const ExprPtr& e);

/// A basis path as its sequence of decision outcomes.
struct BasisPath {
    std::vector<std::pair<LocationId, bool>> decisions;
};

/// McCabe's baseline method on one function graph. Throws SemanticError when
/// the graph is irreducible.
std::vector<BasisPath> basis_paths(const mini::FunctionCfg& g);
bool reducible(const mini::FunctionCfg& g);
/// Edges minus nodes plus two, with the exit node counted.
std::size_t cyclomatic_complexity(const mini::FunctionCfg& g);

}  // namespace htolcov::crit
