// Hyperlabels: atomic labels with bindings, sequences with path predicates,
// guards, conjunction and disjunction.
#pragma once

#include <map>
#include <memory>
#include <set>
#include <string>
#include <string_view>
#include <vector>

#include "htolcov/minilang/program.hpp"
#include "htolcov/trace/interpreter.hpp"

namespace htolcov::htl {

struct Binding {
    std::string name;
    ExprPtr expr;  // pure expression at the host label's location
};

/// An atomic label ⟨loc, pred⟩ together with its bindings.
struct BoundLabel {
    LocationId loc = 0;
    ExprPtr pred;
    std::vector<Binding> bindings;
};

enum class TermKind : std::uint8_t { Label, Sequence, Guard, Conj, Disj };

struct Term;
using TermPtr = std::shared_ptr<const Term>;

struct Term {
    TermKind kind = TermKind::Label;
    BoundLabel label;                 // Label
    std::vector<BoundLabel> elems;    // Sequence, length >= 2
    std::vector<ExprPtr> path;        // Sequence, path[i] constrains steps between elems[i] and elems[i+1]
    ExprPtr psi;                      // Guard
    TermPtr lhs;                      // Guard body, Conj/Disj left operand
    TermPtr rhs;                      // Conj/Disj right operand
};

TermPtr make_label(BoundLabel l);
TermPtr make_sequence(std::vector<BoundLabel> elems, std::vector<ExprPtr> path);
TermPtr make_guard(TermPtr body, ExprPtr psi);
TermPtr make_conj(TermPtr lhs, TermPtr rhs);
TermPtr make_disj(TermPtr lhs, TermPtr rhs);

/// A named test objective.
struct Hyperlabel {
    std::string id;
    std::string criterion;  // empty for hand-written objectives without a tag
    TermPtr term;
};

using NameSet = std::set<std::string>;

NameSet names_of(const BoundLabel& l);
/// NM(h): the metavariables guaranteed to be recorded when h is covered.
NameSet visible_names(const Term& h);

struct Violation {
    std::string rule;  // "bindings", "sequence", "conj", "disj"
    std::string message;
};

/// Every well-formedness rule that fails anywhere in `h`. Empty means well-formed.
std::vector<Violation> check_well_formed(const Term& h);
inline bool well_formed(const Term& h) { return check_well_formed(h).empty(); }

bool same_term(const Term& a, const Term& b);

using Environment = std::map<std::string, Value>;

/// ⟦B⟧s. Returns false, leaving `out` unspecified, when a binding expression
/// fails to evaluate.
bool eval_bindings(const std::vector<Binding>& b, const mini::LocatedProgram& p, LocationId loc,
                   const trace::Frame& state, Environment& out);

/// s ⊨ φ for the label's predicate.
bool label_holds(const BoundLabel& l, const mini::LocatedProgram& p, LocationId loc, const trace::Frame& state);

/// E ⊨ ψ. Throws std::logic_error when ψ mentions a name outside dom(E).
bool eval_guard(const Expr& psi, const Environment& env);

/// φ(E, loc, s) for an intermediate step of a sequence.
bool eval_path_pred(const Expr& phi, const Environment& env, const mini::LocatedProgram& p, LocationId loc,
                    const trace::Frame& state);

/// Scope for guards: metavariables only.
class EnvScope {
public:
    explicit EnvScope(const Environment& env) : env_(&env) {}
    const Value* scalar(const Expr&) const { return nullptr; }
    const ArrayValue* array(const Expr&) const { return nullptr; }
    const Value* meta(const Expr& v) const {
        auto it = env_->find(v.name);
        return it == env_->end() ? nullptr : &it->second;
    }
    std::optional<LocationId> pc() const { return std::nullopt; }

private:
    const Environment* env_;
};

/// Scope for path predicates: metavariables from `Meta`, everything else
/// from the intermediate program state.
template <class Meta>
class PathScope {
public:
    PathScope(const Meta& meta, const trace::FrameScope& frame) : meta_(&meta), frame_(&frame) {}
    const Value* scalar(const Expr& v) const { return frame_->scalar(v); }
    const ArrayValue* array(const Expr& v) const { return frame_->array(v); }
    const Value* meta(const Expr& v) const { return meta_->meta(v); }
    std::optional<LocationId> pc() const { return frame_->pc(); }

private:
    const Meta* meta_;
    const trace::FrameScope* frame_;
};

// ---------------------------------------------------------------------------
// Concrete syntax

/// Parses, resolves and type-checks an HTL text against `p`. Every objective
/// must be well-formed; ids must be unique.
std::vector<Hyperlabel> parse_htl(std::string_view text, const mini::LocatedProgram& p);
std::vector<Hyperlabel> load_htl(const std::string& path, const mini::LocatedProgram& p);

std::string print_label(const BoundLabel& l);
std::string print_term(const Term& h);
std::string print_hyperlabel(const Hyperlabel& h);
std::string print_htl(const std::vector<Hyperlabel>& hs);

}  // namespace htolcov::htl
