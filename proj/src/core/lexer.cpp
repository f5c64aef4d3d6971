#include "htolcov/lexer.hpp"

#include <cctype>
#include <charconv>
#include <limits>

namespace htolcov {

const char* describe(Tok t) {
    switch (t) {
    case Tok::End: return "end of input";
    case Tok::Newline: return "newline";
    case Tok::Ident: return "identifier";
    case Tok::Int: return "integer";
    case Tok::LParen: return "'('";
    case Tok::RParen: return "')'";
    case Tok::LBrace: return "'{'";
    case Tok::RBrace: return "'}'";
    case Tok::LBracket: return "'['";
    case Tok::RBracket: return "']'";
    case Tok::Comma: return "','";
    case Tok::Semi: return "';'";
    case Tok::Colon: return "':'";
    case Tok::ColonEq: return "':='";
    case Tok::Equals: return "'='";
    case Tok::EqEq: return "'=='";
    case Tok::NotEq: return "'!='";
    case Tok::Lt: return "'<'";
    case Tok::Le: return "'<='";
    case Tok::Gt: return "'>'";
    case Tok::Ge: return "'>='";
    case Tok::Plus: return "'+'";
    case Tok::Minus: return "'-'";
    case Tok::Star: return "'*'";
    case Tok::Slash: return "'/'";
    case Tok::Percent: return "'%'";
    case Tok::AndAnd: return "'&&'";
    case Tok::OrOr: return "'||'";
    case Tok::Bang: return "'!'";
    case Tok::Dot: return "'.'";
    case Tok::Arrow: return "'->'";
    case Tok::LArrow: return "'<-'";
    case Tok::Implies: return "'=>'";
    }
    return "token";
}

std::vector<Token> lex(std::string_view src, LexOptions options) {
    std::vector<Token> out;
    int line = 1;
    int col = 1;
    int depth = 0;
    std::size_t i = 0;

    auto advance = [&](std::size_t n) {
        for (std::size_t k = 0; k < n && i < src.size(); ++k, ++i) {
            if (src[i] == '\n') {
                ++line;
                col = 1;
            } else {
                ++col;
            }
        }
    };
    auto push = [&](Tok kind, std::size_t len, SourcePos pos) {
        out.push_back({kind, std::string(src.substr(i, len)), pos});
        advance(len);
    };

    while (i < src.size()) {
        char c = src[i];
        SourcePos pos{line, col};
        if (c == '\n') {
            if (options.htl && depth == 0 && !out.empty() && out.back().kind != Tok::Newline)
                out.push_back({Tok::Newline, "\n", pos});
            advance(1);
            continue;
        }
        if (std::isspace(static_cast<unsigned char>(c))) {
            advance(1);
            continue;
        }
        if (c == '/' && i + 1 < src.size() && src[i + 1] == '/') {
            while (i < src.size() && src[i] != '\n') advance(1);
            continue;
        }
        if (options.htl && c == '#') {
            while (i < src.size() && src[i] != '\n') advance(1);
            continue;
        }
        if (c == '/' && i + 1 < src.size() && src[i + 1] == '*') {
            std::size_t end = src.find("*/", i + 2);
            if (end == std::string_view::npos) throw SyntaxError(pos, "unterminated comment");
            advance(end + 2 - i);
            continue;
        }
        if (std::isalpha(static_cast<unsigned char>(c)) || c == '_') {
            std::size_t j = i;
            while (j < src.size() && (std::isalnum(static_cast<unsigned char>(src[j])) || src[j] == '_')) ++j;
            if (options.htl)
                while (j < src.size() && src[j] == '\'') ++j;
            push(Tok::Ident, j - i, pos);
            continue;
        }
        if (std::isdigit(static_cast<unsigned char>(c))) {
            std::size_t j = i;
            while (j < src.size() && std::isdigit(static_cast<unsigned char>(src[j]))) ++j;
            if (j < src.size() && (std::isalpha(static_cast<unsigned char>(src[j])) || src[j] == '_'))
                throw SyntaxError(pos, "malformed number");
            push(Tok::Int, j - i, pos);
            continue;
        }
        auto two = [&](char a, char b) { return c == a && i + 1 < src.size() && src[i + 1] == b; };
        if (two(':', '=')) { push(Tok::ColonEq, 2, pos); continue; }
        if (two('=', '=')) { push(Tok::EqEq, 2, pos); continue; }
        if (two('!', '=')) { push(Tok::NotEq, 2, pos); continue; }
        if (two('<', '=')) { push(Tok::Le, 2, pos); continue; }
        if (two('>', '=')) { push(Tok::Ge, 2, pos); continue; }
        if (two('&', '&')) { push(Tok::AndAnd, 2, pos); continue; }
        if (two('|', '|')) { push(Tok::OrOr, 2, pos); continue; }
        if (options.htl) {
            if (two('-', '>')) { push(Tok::Arrow, 2, pos); continue; }
            if (two('<', '-')) { push(Tok::LArrow, 2, pos); continue; }
            if (two('=', '>')) { push(Tok::Implies, 2, pos); continue; }
        }
        Tok kind;
        switch (c) {
        case '(': kind = Tok::LParen; ++depth; break;
        case ')': kind = Tok::RParen; --depth; break;
        case '{': kind = Tok::LBrace; ++depth; break;
        case '}': kind = Tok::RBrace; --depth; break;
        case '[': kind = Tok::LBracket; ++depth; break;
        case ']': kind = Tok::RBracket; --depth; break;
        case ',': kind = Tok::Comma; break;
        case ';': kind = Tok::Semi; break;
        case ':': kind = Tok::Colon; break;
        case '=': kind = Tok::Equals; break;
        case '<': kind = Tok::Lt; break;
        case '>': kind = Tok::Gt; break;
        case '+': kind = Tok::Plus; break;
        case '-': kind = Tok::Minus; break;
        case '*': kind = Tok::Star; break;
        case '/': kind = Tok::Slash; break;
        case '%': kind = Tok::Percent; break;
        case '!': kind = Tok::Bang; break;
        case '.':
            if (!options.htl) throw SyntaxError(pos, "unexpected character '.'");
            kind = Tok::Dot;
            break;
        default:
            throw SyntaxError(pos, std::string("unexpected character '") + c + "'");
        }
        if (depth < 0) depth = 0;
        push(kind, 1, pos);
    }
    out.push_back({Tok::End, "", {line, col}});
    return out;
}

TokenStream::TokenStream(std::vector<Token> tokens) : tokens_(std::move(tokens)) {
    if (tokens_.empty() || tokens_.back().kind != Tok::End) tokens_.push_back({Tok::End, "", {}});
}

const Token& TokenStream::peek(std::size_t ahead) const {
    std::size_t k = cursor_ + ahead;
    return k < tokens_.size() ? tokens_[k] : tokens_.back();
}

Token TokenStream::next() {
    Token t = peek();
    if (cursor_ < tokens_.size() - 1) ++cursor_;
    return t;
}

bool TokenStream::accept(Tok kind) {
    if (!at(kind)) return false;
    next();
    return true;
}

void TokenStream::fail(const std::string& what) const {
    const Token& t = peek();
    std::string found = t.kind == Tok::End ? "end of input" : "'" + t.text + "'";
    if (t.kind == Tok::Newline) found = "newline";
    throw SyntaxError(t.pos, what + ", found " + found);
}

Token TokenStream::expect(Tok kind, std::string_view context) {
    if (!at(kind)) fail(std::string("expected ") + describe(kind) + " " + std::string(context));
    return next();
}

Token TokenStream::expect_ident(std::string_view context) {
    return expect(Tok::Ident, context);
}

void TokenStream::expect_keyword(std::string_view keyword) {
    if (!at_ident(keyword)) fail("expected '" + std::string(keyword) + "'");
    next();
}

void TokenStream::skip_newlines() {
    while (at(Tok::Newline)) next();
}

void TokenStream::split_left_arrow() {
    Token& t = tokens_[cursor_];
    if (t.kind != Tok::LArrow) return;
    Token minus{Tok::Minus, "-", {t.pos.line, t.pos.column + 1}};
    t.kind = Tok::Lt;
    t.text = "<";
    tokens_.insert(tokens_.begin() + static_cast<std::ptrdiff_t>(cursor_) + 1, minus);
}

std::optional<LocationId> location_literal(std::string_view name) {
    if (name.size() < 4 || name.substr(0, 3) != "loc") return std::nullopt;
    LocationId v = 0;
    auto digits = name.substr(3);
    if (digits.front() == '0') return std::nullopt;
    auto [p, ec] = std::from_chars(digits.data(), digits.data() + digits.size(), v);
    if (ec != std::errc{} || p != digits.data() + digits.size()) return std::nullopt;
    return v;
}

namespace {

class ExprParser {
public:
    ExprParser(TokenStream& ts, ExprSyntax syntax) : ts_(ts), syntax_(syntax) {}

    ExprPtr parse() { return syntax_.htl ? implication() : disjunction(); }

private:
    template <class F>
    ExprPtr located(SourcePos pos, F&& make) {
        ExprPtr e = make();
        const_cast<Expr&>(*e).pos = pos;
        return e;
    }

    ExprPtr implication() {
        ExprPtr lhs = disjunction();
        if (ts_.at(Tok::Implies)) {
            SourcePos pos = ts_.next().pos;
            ExprPtr rhs = implication();
            return located(pos, [&] { return make_binary(BinaryOp::Implies, lhs, rhs); });
        }
        return lhs;
    }

    ExprPtr disjunction() {
        ExprPtr lhs = conjunction();
        while (ts_.at(Tok::OrOr)) {
            SourcePos pos = ts_.next().pos;
            ExprPtr rhs = conjunction();
            lhs = located(pos, [&] { return make_binary(BinaryOp::Or, lhs, rhs); });
        }
        return lhs;
    }

    ExprPtr conjunction() {
        ExprPtr lhs = equality();
        while (ts_.at(Tok::AndAnd)) {
            SourcePos pos = ts_.next().pos;
            ExprPtr rhs = equality();
            lhs = located(pos, [&] { return make_binary(BinaryOp::And, lhs, rhs); });
        }
        return lhs;
    }

    ExprPtr equality() {
        ExprPtr lhs = relational();
        while (ts_.at(Tok::EqEq) || ts_.at(Tok::NotEq)) {
            Token op = ts_.next();
            ExprPtr rhs = relational();
            BinaryOp bop = op.kind == Tok::EqEq ? BinaryOp::Eq : BinaryOp::Ne;
            lhs = located(op.pos, [&] { return make_binary(bop, lhs, rhs); });
        }
        return lhs;
    }

    ExprPtr relational() {
        ExprPtr lhs = additive();
        for (;;) {
            if (ts_.at(Tok::LArrow)) ts_.split_left_arrow();
            BinaryOp bop;
            switch (ts_.peek().kind) {
            case Tok::Lt: bop = BinaryOp::Lt; break;
            case Tok::Le: bop = BinaryOp::Le; break;
            case Tok::Gt: bop = BinaryOp::Gt; break;
            case Tok::Ge: bop = BinaryOp::Ge; break;
            default: return lhs;
            }
            SourcePos pos = ts_.next().pos;
            ExprPtr rhs = additive();
            lhs = located(pos, [&] { return make_binary(bop, lhs, rhs); });
        }
    }

    ExprPtr additive() {
        ExprPtr lhs = multiplicative();
        while (ts_.at(Tok::Plus) || ts_.at(Tok::Minus)) {
            Token op = ts_.next();
            ExprPtr rhs = multiplicative();
            BinaryOp bop = op.kind == Tok::Plus ? BinaryOp::Add : BinaryOp::Sub;
            lhs = located(op.pos, [&] { return make_binary(bop, lhs, rhs); });
        }
        return lhs;
    }

    ExprPtr multiplicative() {
        ExprPtr lhs = unary();
        for (;;) {
            BinaryOp bop;
            switch (ts_.peek().kind) {
            case Tok::Star: bop = BinaryOp::Mul; break;
            case Tok::Slash: bop = BinaryOp::Div; break;
            case Tok::Percent: bop = BinaryOp::Mod; break;
            default: return lhs;
            }
            SourcePos pos = ts_.next().pos;
            ExprPtr rhs = unary();
            lhs = located(pos, [&] { return make_binary(bop, lhs, rhs); });
        }
    }

    ExprPtr unary() {
        if (ts_.at(Tok::Bang)) {
            SourcePos pos = ts_.next().pos;
            ExprPtr operand = unary();
            return located(pos, [&] { return make_unary(UnaryOp::Not, operand); });
        }
        if (ts_.at(Tok::Minus)) {
            SourcePos pos = ts_.next().pos;
            if (ts_.at(Tok::Int)) {
                Token lit = ts_.next();
                return located(pos, [&] { return make_int(integer(lit, true)); });
            }
            ExprPtr operand = unary();
            return located(pos, [&] { return make_unary(UnaryOp::Neg, operand); });
        }
        return primary();
    }

    static std::int64_t integer(const Token& t, bool negative) {
        std::uint64_t v = 0;
        auto [p, ec] = std::from_chars(t.text.data(), t.text.data() + t.text.size(), v);
        constexpr auto max = static_cast<std::uint64_t>(std::numeric_limits<std::int64_t>::max());
        if (ec != std::errc{} || v > max + (negative ? 1 : 0))
            throw SyntaxError(t.pos, "integer literal out of range");
        if (negative) return static_cast<std::int64_t>(0 - v);
        return static_cast<std::int64_t>(v);
    }

    ExprPtr primary() {
        const Token& t = ts_.peek();
        SourcePos pos = t.pos;
        if (t.kind == Tok::Int) {
            Token lit = ts_.next();
            return located(pos, [&] { return make_int(integer(lit, false)); });
        }
        if (t.kind == Tok::LParen) {
            ts_.next();
            ExprPtr inner = parse();
            ts_.expect(Tok::RParen, "to close parenthesised expression");
            return inner;
        }
        if (t.kind == Tok::Ident) {
            Token id = ts_.next();
            if (id.text == "true" || id.text == "false")
                return located(pos, [&] { return make_bool(id.text == "true"); });
            if (syntax_.htl) {
                if (id.text == "pc") return located(pos, [] { return make_pc(); });
                if (auto loc = location_literal(id.text))
                    return located(pos, [&] { return make_loc(*loc); });
            }
            if (ts_.accept(Tok::LBracket)) {
                ExprPtr sub = parse();
                ts_.expect(Tok::RBracket, "to close array subscript");
                return located(pos, [&] { return make_index(id.text, sub); });
            }
            if (ts_.at(Tok::LParen))
                throw SyntaxError(pos, "call to '" + id.text + "' is not allowed inside an expression");
            return located(pos, [&] { return make_var(id.text); });
        }
        ts_.fail("expected expression");
    }

    TokenStream& ts_;
    ExprSyntax syntax_;
};

}  // namespace

ExprPtr parse_expression(TokenStream& ts, ExprSyntax syntax) {
    return ExprParser(ts, syntax).parse();
}

}  // namespace htolcov
