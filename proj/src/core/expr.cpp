#include "htolcov/expr.hpp"

#include <algorithm>
#include <limits>

namespace htolcov {

ExprPtr make_int(std::int64_t v) {
    auto e = std::make_shared<Expr>();
    e->kind = ExprKind::IntLit;
    e->literal = v;
    e->type = Type::integer();
    return e;
}

ExprPtr make_bool(bool b) {
    auto e = std::make_shared<Expr>();
    e->kind = ExprKind::BoolLit;
    e->literal = b ? 1 : 0;
    e->type = Type::boolean();
    return e;
}

ExprPtr make_loc(LocationId loc) {
    auto e = std::make_shared<Expr>();
    e->kind = ExprKind::LocLit;
    e->literal = loc;
    e->type = Type::integer();
    return e;
}

ExprPtr make_pc() {
    auto e = std::make_shared<Expr>();
    e->kind = ExprKind::Pc;
    e->type = Type::integer();
    return e;
}

ExprPtr make_var(std::string name, VarRole role, std::int32_t slot, Type type) {
    auto e = std::make_shared<Expr>();
    e->kind = ExprKind::Var;
    e->name = std::move(name);
    e->role = role;
    e->slot = slot;
    e->type = type;
    return e;
}

ExprPtr make_index(std::string name, ExprPtr subscript, VarRole role, std::int32_t slot) {
    auto e = std::make_shared<Expr>();
    e->kind = ExprKind::Index;
    e->name = std::move(name);
    e->role = role;
    e->slot = slot;
    e->type = Type::integer();
    e->lhs = std::move(subscript);
    return e;
}

ExprPtr make_unary(UnaryOp op, ExprPtr operand) {
    auto e = std::make_shared<Expr>();
    e->kind = ExprKind::Unary;
    e->unary = op;
    e->type = op == UnaryOp::Not ? Type::boolean() : Type::integer();
    e->lhs = std::move(operand);
    return e;
}

ExprPtr make_binary(BinaryOp op, ExprPtr lhs, ExprPtr rhs) {
    auto e = std::make_shared<Expr>();
    e->kind = ExprKind::Binary;
    e->binary = op;
    e->type = is_arithmetic(op) ? Type::integer() : Type::boolean();
    e->lhs = std::move(lhs);
    e->rhs = std::move(rhs);
    return e;
}

ExprPtr make_not(ExprPtr e) { return make_unary(UnaryOp::Not, std::move(e)); }
ExprPtr make_and(ExprPtr lhs, ExprPtr rhs) {
    return make_binary(BinaryOp::And, std::move(lhs), std::move(rhs));
}
ExprPtr make_or(ExprPtr lhs, ExprPtr rhs) {
    return make_binary(BinaryOp::Or, std::move(lhs), std::move(rhs));
}

int precedence(BinaryOp op) {
    switch (op) {
    case BinaryOp::Implies: return 1;
    case BinaryOp::Or: return 2;
    case BinaryOp::And: return 3;
    case BinaryOp::Eq:
    case BinaryOp::Ne: return 4;
    case BinaryOp::Lt:
    case BinaryOp::Le:
    case BinaryOp::Gt:
    case BinaryOp::Ge: return 5;
    case BinaryOp::Add:
    case BinaryOp::Sub: return 6;
    case BinaryOp::Mul:
    case BinaryOp::Div:
    case BinaryOp::Mod: return 7;
    }
    return 0;
}

const char* spelling(BinaryOp op) {
    switch (op) {
    case BinaryOp::Add: return "+";
    case BinaryOp::Sub: return "-";
    case BinaryOp::Mul: return "*";
    case BinaryOp::Div: return "/";
    case BinaryOp::Mod: return "%";
    case BinaryOp::Eq: return "==";
    case BinaryOp::Ne: return "!=";
    case BinaryOp::Lt: return "<";
    case BinaryOp::Le: return "<=";
    case BinaryOp::Gt: return ">";
    case BinaryOp::Ge: return ">=";
    case BinaryOp::And: return "&&";
    case BinaryOp::Or: return "||";
    case BinaryOp::Implies: return "=>";
    }
    return "?";
}

bool is_relational(BinaryOp op) {
    switch (op) {
    case BinaryOp::Eq:
    case BinaryOp::Ne:
    case BinaryOp::Lt:
    case BinaryOp::Le:
    case BinaryOp::Gt:
    case BinaryOp::Ge: return true;
    default: return false;
    }
}

bool is_arithmetic(BinaryOp op) {
    switch (op) {
    case BinaryOp::Add:
    case BinaryOp::Sub:
    case BinaryOp::Mul:
    case BinaryOp::Div:
    case BinaryOp::Mod: return true;
    default: return false;
    }
}

namespace {

constexpr int kUnaryPrec = 8;
constexpr int kPrimaryPrec = 9;

int expr_prec(const Expr& e) {
    if (e.kind == ExprKind::Binary) return precedence(e.binary);
    if (e.kind == ExprKind::Unary) return kUnaryPrec;
    if (e.kind == ExprKind::IntLit && e.literal < 0) return kUnaryPrec;
    return kPrimaryPrec;
}

void print_into(const Expr& e, std::string& out);

void print_operand(const Expr& e, int min_prec, std::string& out) {
    if (expr_prec(e) < min_prec) {
        out += '(';
        print_into(e, out);
        out += ')';
    } else {
        print_into(e, out);
    }
}

void print_into(const Expr& e, std::string& out) {
    switch (e.kind) {
    case ExprKind::IntLit:
        out += std::to_string(e.literal);
        return;
    case ExprKind::BoolLit:
        out += e.literal ? "true" : "false";
        return;
    case ExprKind::LocLit:
        out += "loc" + std::to_string(e.literal);
        return;
    case ExprKind::Pc:
        out += "pc";
        return;
    case ExprKind::Var:
        out += e.name;
        return;
    case ExprKind::Index:
        out += e.name;
        out += '[';
        print_into(*e.lhs, out);
        out += ']';
        return;
    case ExprKind::Unary:
        out += e.unary == UnaryOp::Not ? "!" : "-";
        print_operand(*e.lhs, kUnaryPrec, out);
        return;
    case ExprKind::Binary: {
        int p = precedence(e.binary);
        bool right_assoc = e.binary == BinaryOp::Implies;
        if (is_relational(e.binary)) {
            // Comparisons of comparisons are always parenthesised.
            int tight = std::max(precedence(BinaryOp::Eq), precedence(BinaryOp::Lt)) + 1;
            print_operand(*e.lhs, tight, out);
            out += ' ';
            out += spelling(e.binary);
            out += ' ';
            print_operand(*e.rhs, tight, out);
            return;
        }
        print_operand(*e.lhs, right_assoc ? p + 1 : p, out);
        out += ' ';
        out += spelling(e.binary);
        out += ' ';
        print_operand(*e.rhs, right_assoc ? p : p + 1, out);
        return;
    }
    }
}

}  // namespace

std::string print_expr(const Expr& e) {
    std::string out;
    print_into(e, out);
    return out;
}

bool same_expr(const Expr& a, const Expr& b) {
    if (a.kind != b.kind) return false;
    switch (a.kind) {
    case ExprKind::IntLit:
    case ExprKind::BoolLit:
    case ExprKind::LocLit: return a.literal == b.literal;
    case ExprKind::Pc: return true;
    case ExprKind::Var: return a.name == b.name;
    case ExprKind::Index: return a.name == b.name && same_expr(*a.lhs, *b.lhs);
    case ExprKind::Unary: return a.unary == b.unary && same_expr(*a.lhs, *b.lhs);
    case ExprKind::Binary:
        return a.binary == b.binary && same_expr(*a.lhs, *b.lhs) && same_expr(*a.rhs, *b.rhs);
    }
    return false;
}

void collect_names(const Expr& e, std::set<std::string>& out) {
    if (e.kind == ExprKind::Var || e.kind == ExprKind::Index) out.insert(e.name);
    if (e.lhs) collect_names(*e.lhs, out);
    if (e.rhs) collect_names(*e.rhs, out);
}

bool mentions_pc(const Expr& e) {
    if (e.kind == ExprKind::Pc) return true;
    return (e.lhs && mentions_pc(*e.lhs)) || (e.rhs && mentions_pc(*e.rhs));
}

const char* to_string(EvalError e) {
    switch (e) {
    case EvalError::None: return "none";
    case EvalError::DivisionByZero: return "division-by-zero";
    case EvalError::OutOfBounds: return "index-out-of-bounds";
    case EvalError::Unresolved: return "unresolved-name";
    case EvalError::TypeMismatch: return "type-mismatch";
    }
    return "unknown";
}

namespace detail {

EvalResult apply_binary(BinaryOp op, Value a, Value b) {
    if (op == BinaryOp::Eq || op == BinaryOp::Ne) {
        if (a.kind != b.kind) return {{}, EvalError::TypeMismatch};
        bool eq = a.data == b.data;
        return {Value::boolean(op == BinaryOp::Eq ? eq : !eq)};
    }
    if (op == BinaryOp::And || op == BinaryOp::Or) {
        if (!a.is_bool() || !b.is_bool()) return {{}, EvalError::TypeMismatch};
        bool r = op == BinaryOp::And ? (a.truthy() && b.truthy()) : (a.truthy() || b.truthy());
        return {Value::boolean(r)};
    }
    if (a.is_bool() || b.is_bool()) return {{}, EvalError::TypeMismatch};
    std::int64_t x = a.data;
    std::int64_t y = b.data;
    switch (op) {
    case BinaryOp::Add: return {Value::integer(wrap_add(x, y))};
    case BinaryOp::Sub: return {Value::integer(wrap_sub(x, y))};
    case BinaryOp::Mul: return {Value::integer(wrap_mul(x, y))};
    case BinaryOp::Div:
        if (y == 0) return {{}, EvalError::DivisionByZero};
        if (x == std::numeric_limits<std::int64_t>::min() && y == -1) return {Value::integer(x)};
        return {Value::integer(x / y)};
    case BinaryOp::Mod:
        if (y == 0) return {{}, EvalError::DivisionByZero};
        if (y == -1) return {Value::integer(0)};
        return {Value::integer(x % y)};
    case BinaryOp::Lt: return {Value::boolean(x < y)};
    case BinaryOp::Le: return {Value::boolean(x <= y)};
    case BinaryOp::Gt: return {Value::boolean(x > y)};
    case BinaryOp::Ge: return {Value::boolean(x >= y)};
    default: return {{}, EvalError::TypeMismatch};
    }
}

}  // namespace detail

}  // namespace htolcov
