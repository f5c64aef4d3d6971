// Tokenizer and expression parser shared by the MiniImp and HTL front ends.
#pragma once

#include <string>
#include <string_view>
#include <vector>

#include "htolcov/expr.hpp"

namespace htolcov {

enum class Tok : std::uint8_t {
    End, Newline, Ident, Int,
    LParen, RParen, LBrace, RBrace, LBracket, RBracket,
    Comma, Semi, Colon,
    ColonEq, Equals, EqEq, NotEq, Lt, Le, Gt, Ge,
    Plus, Minus, Star, Slash, Percent,
    AndAnd, OrOr, Bang,
    Dot, Arrow, LArrow, Implies,
};

const char* describe(Tok t);

struct Token {
    Tok kind = Tok::End;
    std::string text;
    SourcePos pos;
};

struct LexOptions {
    /// HTL mode: primed identifiers, `.`, `->`, `<-`, `=>`, `#` comments, and
    /// newline tokens outside of brackets.
    bool htl = false;
};

std::vector<Token> lex(std::string_view source, LexOptions options = {});

class TokenStream {
public:
    explicit TokenStream(std::vector<Token> tokens);

    [[nodiscard]] const Token& peek(std::size_t ahead = 0) const;
    [[nodiscard]] bool at(Tok kind) const { return peek().kind == kind; }
    [[nodiscard]] bool at_ident(std::string_view text) const {
        return peek().kind == Tok::Ident && peek().text == text;
    }
    Token next();
    bool accept(Tok kind);
    Token expect(Tok kind, std::string_view context);
    Token expect_ident(std::string_view context);
    void expect_keyword(std::string_view keyword);
    void skip_newlines();
    /// Rewrites a `<-` token at the cursor into `<` followed by `-`.
    void split_left_arrow();
    [[noreturn]] void fail(const std::string& what) const;

private:
    std::vector<Token> tokens_;
    std::size_t cursor_ = 0;
};

struct ExprSyntax {
    bool htl = false;  // allows `=>`, `pc`, `locN`
};

/// Parses an expression; variable references come back with role Program
/// and no slot. Callers resolve names afterwards.
ExprPtr parse_expression(TokenStream& ts, ExprSyntax syntax = {});

/// Returns N when `name` spells a location literal `locN`.
std::optional<LocationId> location_literal(std::string_view name);

}  // namespace htolcov
