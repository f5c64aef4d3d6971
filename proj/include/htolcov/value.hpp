// Scalar values, static types and the error types shared by every stage.
#pragma once

#include <compare>
#include <cstddef>
#include <cstdint>
#include <functional>
#include <stdexcept>
#include <string>
#include <vector>

namespace htolcov {

/// Dense statement/condition/entry location identifier, starting at 1.
using LocationId = std::uint32_t;

enum class ValueKind : std::uint8_t { Int, Bool };

/// A MiniImp scalar. Metavariables range over the same domain.
struct Value {
    ValueKind kind = ValueKind::Int;
    std::int64_t data = 0;

    static constexpr Value integer(std::int64_t v) { return {ValueKind::Int, v}; }
    static constexpr Value boolean(bool b) { return {ValueKind::Bool, b ? 1 : 0}; }

    [[nodiscard]] constexpr bool is_bool() const { return kind == ValueKind::Bool; }
    [[nodiscard]] constexpr bool truthy() const { return data != 0; }

    friend constexpr bool operator==(const Value&, const Value&) = default;
    friend constexpr auto operator<=>(const Value&, const Value&) = default;
};

std::string to_string(const Value& v);

using ArrayValue = std::vector<std::int64_t>;

struct ValueVectorHash {
    std::size_t operator()(const std::vector<Value>& vs) const noexcept {
        std::size_t h = 0x9e3779b97f4a7c15ULL ^ vs.size();
        for (const Value& v : vs) {
            std::size_t x = std::hash<std::int64_t>{}(v.data) ^ (static_cast<std::size_t>(v.kind) << 1);
            h ^= x + 0x9e3779b97f4a7c15ULL + (h << 6) + (h >> 2);
        }
        return h;
    }
};

enum class TypeKind : std::uint8_t { Int, Bool, IntArray, Void, Unknown };

struct Type {
    TypeKind kind = TypeKind::Unknown;
    std::uint32_t length = 0;  // IntArray only

    static constexpr Type integer() { return {TypeKind::Int, 0}; }
    static constexpr Type boolean() { return {TypeKind::Bool, 0}; }
    static constexpr Type array(std::uint32_t n) { return {TypeKind::IntArray, n}; }
    static constexpr Type void_type() { return {TypeKind::Void, 0}; }
    static constexpr Type unknown() { return {TypeKind::Unknown, 0}; }

    [[nodiscard]] constexpr bool is_scalar() const {
        return kind == TypeKind::Int || kind == TypeKind::Bool;
    }
    friend constexpr bool operator==(const Type&, const Type&) = default;
};

std::string to_string(Type t);

/// Position in a source text (1-based).
struct SourcePos {
    int line = 1;
    int column = 1;
    friend bool operator==(const SourcePos&, const SourcePos&) = default;
};

/// Base of every diagnostic raised by the toolkit.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

class SyntaxError : public Error {
public:
    SyntaxError(SourcePos pos, const std::string& what);
    [[nodiscard]] SourcePos position() const { return pos_; }

private:
    SourcePos pos_;
};

class SemanticError : public Error {
public:
    SemanticError(SourcePos pos, const std::string& what);
    [[nodiscard]] SourcePos position() const { return pos_; }

private:
    SourcePos pos_;
};

}  // namespace htolcov
