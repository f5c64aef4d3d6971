// Pure expression trees shared by MiniImp statements, label predicates,
// binding expressions, guards and path predicates.
#pragma once

#include <memory>
#include <optional>
#include <set>
#include <string>

#include "htolcov/value.hpp"

namespace htolcov {

enum class ExprKind : std::uint8_t { IntLit, BoolLit, LocLit, Pc, Var, Index, Unary, Binary };

enum class UnaryOp : std::uint8_t { Neg, Not };

enum class BinaryOp : std::uint8_t {
    Add, Sub, Mul, Div, Mod,
    Eq, Ne, Lt, Le, Gt, Ge,
    And, Or,
    Implies,  // HTL path predicates and guards only; short-circuit
};

/// How a variable reference is looked up at evaluation time.
enum class VarRole : std::uint8_t {
    Program,  // program variable, `slot` valid in the enclosing frame
    Dynamic,  // program variable resolved by name against the current location
    Meta,     // metavariable, `slot` indexes the evaluation environment when >= 0
};

struct Expr;
using ExprPtr = std::shared_ptr<const Expr>;

struct Expr {
    ExprKind kind = ExprKind::IntLit;
    UnaryOp unary = UnaryOp::Neg;
    BinaryOp binary = BinaryOp::Add;
    std::int64_t literal = 0;  // IntLit, BoolLit (0/1), LocLit
    std::string name;          // Var, Index
    VarRole role = VarRole::Program;
    std::int32_t slot = -1;
    Type type = Type::unknown();
    ExprPtr lhs;  // Unary operand, Binary lhs, Index subscript
    ExprPtr rhs;  // Binary rhs
    SourcePos pos;
};

ExprPtr make_int(std::int64_t v);
ExprPtr make_bool(bool b);
ExprPtr make_loc(LocationId loc);
ExprPtr make_pc();
ExprPtr make_var(std::string name, VarRole role = VarRole::Program, std::int32_t slot = -1,
                 Type type = Type::unknown());
ExprPtr make_index(std::string name, ExprPtr subscript, VarRole role = VarRole::Program,
                   std::int32_t slot = -1);
ExprPtr make_unary(UnaryOp op, ExprPtr operand);
ExprPtr make_binary(BinaryOp op, ExprPtr lhs, ExprPtr rhs);
ExprPtr make_not(ExprPtr e);
ExprPtr make_and(ExprPtr lhs, ExprPtr rhs);
ExprPtr make_or(ExprPtr lhs, ExprPtr rhs);

/// Operator precedence, higher binds tighter. Implies is lowest.
int precedence(BinaryOp op);
const char* spelling(BinaryOp op);
bool is_relational(BinaryOp op);
bool is_arithmetic(BinaryOp op);

std::string print_expr(const Expr& e);

/// Structural equality, ignoring resolution data (slot, role) and positions.
bool same_expr(const Expr& a, const Expr& b);

/// Names of every variable reference (Var and Index bases) in `e`.
void collect_names(const Expr& e, std::set<std::string>& out);
bool mentions_pc(const Expr& e);

/// Returns a copy of `e` in which every Var/Index node is passed through `fn`,
/// which may rewrite role/slot/type in place.
template <class Fn>
ExprPtr rewrite_vars(const ExprPtr& e, Fn&& fn) {
    if (!e) return e;
    auto copy = std::make_shared<Expr>(*e);
    copy->lhs = rewrite_vars(e->lhs, fn);
    copy->rhs = rewrite_vars(e->rhs, fn);
    if (copy->kind == ExprKind::Var || copy->kind == ExprKind::Index) fn(*copy);
    return copy;
}

enum class EvalError : std::uint8_t { None, DivisionByZero, OutOfBounds, Unresolved, TypeMismatch };

const char* to_string(EvalError e);

struct EvalResult {
    Value value;
    EvalError error = EvalError::None;
    [[nodiscard]] bool ok() const { return error == EvalError::None; }
};

namespace detail {

inline std::int64_t wrap_add(std::int64_t a, std::int64_t b) {
    return static_cast<std::int64_t>(static_cast<std::uint64_t>(a) + static_cast<std::uint64_t>(b));
}
inline std::int64_t wrap_sub(std::int64_t a, std::int64_t b) {
    return static_cast<std::int64_t>(static_cast<std::uint64_t>(a) - static_cast<std::uint64_t>(b));
}
inline std::int64_t wrap_mul(std::int64_t a, std::int64_t b) {
    return static_cast<std::int64_t>(static_cast<std::uint64_t>(a) * static_cast<std::uint64_t>(b));
}

EvalResult apply_binary(BinaryOp op, Value a, Value b);

}  // namespace detail

/// Evaluates a pure expression. `Scope` provides
///   const Value* scalar(const Expr& var) const;
///   const ArrayValue* array(const Expr& var) const;
///   const Value* meta(const Expr& var) const;
///   std::optional<LocationId> pc() const;
/// A null pointer means the name cannot be resolved here.
template <class Scope>
EvalResult evaluate(const Expr& e, const Scope& scope) {
    switch (e.kind) {
    case ExprKind::IntLit:
        return {Value::integer(e.literal)};
    case ExprKind::BoolLit:
        return {Value::boolean(e.literal != 0)};
    case ExprKind::LocLit:
        return {Value::integer(e.literal)};
    case ExprKind::Pc: {
        auto pc = scope.pc();
        if (!pc) return {{}, EvalError::Unresolved};
        return {Value::integer(static_cast<std::int64_t>(*pc))};
    }
    case ExprKind::Var: {
        const Value* v = e.role == VarRole::Meta ? scope.meta(e) : scope.scalar(e);
        if (!v) return {{}, EvalError::Unresolved};
        return {*v};
    }
    case ExprKind::Index: {
        const ArrayValue* arr = scope.array(e);
        if (!arr) return {{}, EvalError::Unresolved};
        EvalResult idx = evaluate(*e.lhs, scope);
        if (!idx.ok()) return idx;
        if (idx.value.is_bool()) return {{}, EvalError::TypeMismatch};
        if (idx.value.data < 0 || static_cast<std::uint64_t>(idx.value.data) >= arr->size())
            return {{}, EvalError::OutOfBounds};
        return {Value::integer((*arr)[static_cast<std::size_t>(idx.value.data)])};
    }
    case ExprKind::Unary: {
        EvalResult v = evaluate(*e.lhs, scope);
        if (!v.ok()) return v;
        if (e.unary == UnaryOp::Not) {
            if (!v.value.is_bool()) return {{}, EvalError::TypeMismatch};
            return {Value::boolean(!v.value.truthy())};
        }
        if (v.value.is_bool()) return {{}, EvalError::TypeMismatch};
        return {Value::integer(detail::wrap_sub(0, v.value.data))};
    }
    case ExprKind::Binary: {
        EvalResult l = evaluate(*e.lhs, scope);
        if (e.binary == BinaryOp::Implies) {
            if (!l.ok()) return l;
            if (!l.value.is_bool()) return {{}, EvalError::TypeMismatch};
            if (!l.value.truthy()) return {Value::boolean(true)};
            EvalResult r = evaluate(*e.rhs, scope);
            if (!r.ok()) return r;
            if (!r.value.is_bool()) return {{}, EvalError::TypeMismatch};
            return r;
        }
        // && and || are total: both operands are always evaluated.
        EvalResult r = evaluate(*e.rhs, scope);
        if (!l.ok()) return l;
        if (!r.ok()) return r;
        return detail::apply_binary(e.binary, l.value, r.value);
    }
    }
    return {{}, EvalError::TypeMismatch};
}

/// Evaluates a predicate; any evaluation error counts as false. A conjunction
/// stops at its first failing operand, which gives the same answer: an error
/// or a false operand makes the whole predicate false either way.
template <class Scope>
bool holds(const Expr& e, const Scope& scope) {
    if (e.kind == ExprKind::Binary && e.binary == BinaryOp::And) return holds(*e.lhs, scope) && holds(*e.rhs, scope);
    EvalResult r = evaluate(e, scope);
    return r.ok() && r.value.is_bool() && r.value.truthy();
}

}  // namespace htolcov
