#include "htolcov/value.hpp"

namespace htolcov {

std::string to_string(const Value& v) {
    if (v.is_bool()) return v.truthy() ? "true" : "false";
    return std::to_string(v.data);
}

std::string to_string(Type t) {
    switch (t.kind) {
    case TypeKind::Int: return "int";
    case TypeKind::Bool: return "bool";
    case TypeKind::IntArray: return "int[" + std::to_string(t.length) + "]";
    case TypeKind::Void: return "void";
    case TypeKind::Unknown: return "<unknown>";
    }
    return "<unknown>";
}

namespace {
std::string located(SourcePos pos, const std::string& what) {
    return std::to_string(pos.line) + ":" + std::to_string(pos.column) + ": " + what;
}
}  // namespace

SyntaxError::SyntaxError(SourcePos pos, const std::string& what)
    : Error(located(pos, "syntax error: " + what)), pos_(pos) {}

SemanticError::SemanticError(SourcePos pos, const std::string& what)
    : Error(located(pos, what)), pos_(pos) {}

}  // namespace htolcov
