#include <fstream>
#include <sstream>

#include "htolcov/htol/hyperlabel.hpp"
#include "htolcov/lexer.hpp"

namespace htolcov::htl {

namespace {

using mini::LocatedProgram;

bool reserved(std::string_view name) {
    return name == "def" || name == "guard" || name == "with" || name == "true" ||
           name == "false" || name == "pc" || location_literal(name).has_value();
}

// ---------------------------------------------------------------------------
// Name resolution and typing of HTL expressions

bool fits(Type t, Type want) { return t.kind == TypeKind::Unknown || t == want; }

class Resolver {
public:
    const LocatedProgram* program = nullptr;
    LocationId loc = 0;                                   // program scope, 0 when none
    const std::map<std::string, Type>* metas = nullptr;  // visible metavariables
    bool path = false;                                    // pc, locN and dynamic program variables
    std::string unknown_name;                             // diagnostic suffix for unresolved names

    ExprPtr run(const Expr& e) const {
        auto out = std::make_shared<Expr>(e);
        switch (e.kind) {
        case ExprKind::IntLit:
        case ExprKind::BoolLit:
            out->type = e.kind == ExprKind::IntLit ? Type::integer() : Type::boolean();
            return out;
        case ExprKind::Pc:
        case ExprKind::LocLit:
            if (!path) throw SemanticError(e.pos, "'pc' and location literals are only allowed in path predicates");
            if (e.kind == ExprKind::LocLit && !program->has_location(static_cast<LocationId>(e.literal)))
                throw SemanticError(e.pos, "unknown location loc" + std::to_string(e.literal));
            out->type = Type::integer();
            return out;
        case ExprKind::Var: {
            if (metas) {
                auto it = metas->find(e.name);
                if (it != metas->end()) {
                    out->role = VarRole::Meta;
                    out->slot = -1;
                    out->type = it->second;
                    return out;
                }
            }
            if (loc) {
                const mini::VisibleVar* v = program->location(loc).find(e.name);
                if (!v) throw SemanticError(e.pos, "'" + e.name + "' is not in scope at loc" + std::to_string(loc));
                if (v->type.kind == TypeKind::IntArray)
                    throw SemanticError(e.pos, "array '" + e.name + "' used as a scalar");
                out->role = VarRole::Program;
                out->slot = v->slot;
                out->type = v->type;
                return out;
            }
            if (path) {
                out->role = VarRole::Dynamic;
                out->slot = -1;
                out->type = Type::unknown();
                return out;
            }
            throw SemanticError(e.pos, "'" + e.name + "' " + unknown_name);
        }
        case ExprKind::Index: {
            out->lhs = operand(*e.lhs, Type::integer(), "subscript");
            out->type = Type::integer();
            if (loc) {
                const mini::VisibleVar* v = program->location(loc).find(e.name);
                if (!v) throw SemanticError(e.pos, "'" + e.name + "' is not in scope at loc" + std::to_string(loc));
                if (v->type.kind != TypeKind::IntArray)
                    throw SemanticError(e.pos, "'" + e.name + "' is not an array");
                out->role = VarRole::Program;
                out->slot = v->slot;
                return out;
            }
            if (path) {
                out->role = VarRole::Dynamic;
                out->slot = -1;
                return out;
            }
            throw SemanticError(e.pos, "'" + e.name + "' " + unknown_name);
        }
        case ExprKind::Unary: {
            Type want = e.unary == UnaryOp::Not ? Type::boolean() : Type::integer();
            out->lhs = operand(*e.lhs, want, e.unary == UnaryOp::Not ? "operand of '!'" : "operand of '-'");
            out->type = want;
            return out;
        }
        case ExprKind::Binary: {
            ExprPtr l = run(*e.lhs);
            ExprPtr r = run(*e.rhs);
            Type want = Type::integer();
            if (e.binary == BinaryOp::And || e.binary == BinaryOp::Or || e.binary == BinaryOp::Implies)
                want = Type::boolean();
            bool ok;
            if (e.binary == BinaryOp::Eq || e.binary == BinaryOp::Ne)
                ok = l->type.kind == TypeKind::Unknown || r->type.kind == TypeKind::Unknown || l->type == r->type;
            else
                ok = fits(l->type, want) && fits(r->type, want);
            if (!ok)
                throw SemanticError(e.pos, std::string("type mismatch for '") + spelling(e.binary) + "': " +
                                               to_string(l->type) + " and " + to_string(r->type));
            out->lhs = l;
            out->rhs = r;
            out->type = is_arithmetic(e.binary) ? Type::integer() : Type::boolean();
            return out;
        }
        }
        return out;
    }

    ExprPtr operand(const Expr& e, Type want, const char* what) const {
        ExprPtr r = run(e);
        if (!fits(r->type, want))
            throw SemanticError(e.pos, std::string("type mismatch in ") + what + ": expected " + to_string(want) +
                                           ", found " + to_string(r->type));
        return r;
    }
};

// ---------------------------------------------------------------------------
// Syntax

struct RawBinding {
    std::string name;
    ExprPtr expr;
    SourcePos pos;
};

struct RawLabel {
    LocationId loc = 0;
    ExprPtr pred;
    std::vector<RawBinding> bindings;
    SourcePos pos;
};

struct RawTerm;
using RawPtr = std::shared_ptr<const RawTerm>;

struct RawTerm {
    TermKind kind = TermKind::Label;
    RawLabel label;
    std::vector<RawLabel> elems;
    std::vector<ExprPtr> path;
    ExprPtr psi;
    RawPtr lhs;
    RawPtr rhs;
    SourcePos pos;
};

struct RawDecl {
    std::string id;
    std::string criterion;
    RawPtr term;
    SourcePos pos;
};

class Parser {
public:
    Parser(std::string_view text, const LocatedProgram& p) : ts_(lex(text, {.htl = true})), prog_(p) {}

    std::vector<RawDecl> parse() {
        std::vector<RawDecl> out;
        skip_separators();
        while (!ts_.at(Tok::End)) {
            if (ts_.at_ident("def")) {
                ts_.next();
                Token name = ts_.expect_ident("after 'def'");
                if (reserved(name.text)) throw SyntaxError(name.pos, "'" + name.text + "' is reserved");
                if (defs_.count(name.text)) throw SemanticError(name.pos, "'" + name.text + "' defined twice");
                ts_.expect(Tok::Equals, "after definition name");
                defs_[name.text] = term();
            } else {
                RawDecl d;
                Token name = ts_.expect_ident("at start of declaration");
                if (reserved(name.text)) throw SyntaxError(name.pos, "'" + name.text + "' is reserved");
                d.id = name.text;
                d.pos = name.pos;
                if (ts_.accept(Tok::Colon)) d.criterion = ts_.expect_ident("as criterion tag").text;
                ts_.expect(Tok::Equals, "after hyperlabel name");
                d.term = term();
                out.push_back(std::move(d));
            }
            if (!ts_.at(Tok::End) && !ts_.at(Tok::Newline) && !ts_.at(Tok::Semi))
                ts_.fail("expected end of declaration");
            skip_separators();
        }
        return out;
    }

private:
    void skip_separators() {
        while (ts_.accept(Tok::Newline) || ts_.accept(Tok::Semi)) {
        }
    }

    RawPtr binary(TermKind kind, RawPtr lhs, RawPtr rhs, SourcePos pos) {
        auto t = std::make_shared<RawTerm>();
        t->kind = kind;
        t->lhs = std::move(lhs);
        t->rhs = std::move(rhs);
        t->pos = pos;
        return t;
    }

    RawPtr term() {
        RawPtr lhs = conjunction();
        while (ts_.at(Tok::Plus)) {
            SourcePos pos = ts_.next().pos;
            lhs = binary(TermKind::Disj, lhs, conjunction(), pos);
        }
        return lhs;
    }

    RawPtr conjunction() {
        RawPtr lhs = primary();
        while (ts_.at(Tok::Dot)) {
            SourcePos pos = ts_.next().pos;
            lhs = binary(TermKind::Conj, lhs, primary(), pos);
        }
        return lhs;
    }

    RawPtr primary() {
        SourcePos pos = ts_.peek().pos;
        if (ts_.accept(Tok::LParen)) {
            RawPtr inner = term();
            ts_.expect(Tok::RParen, "to close hyperlabel");
            return inner;
        }
        if (ts_.at_ident("guard") && ts_.peek(1).kind == Tok::LParen) {
            ts_.next();
            ts_.next();
            auto t = std::make_shared<RawTerm>();
            t->kind = TermKind::Guard;
            t->pos = pos;
            t->lhs = term();
            ts_.expect(Tok::RParen, "to close guarded hyperlabel");
            ts_.expect_keyword("with");
            if (ts_.accept(Tok::LParen)) {
                t->psi = parse_expression(ts_, {.htl = true});
                ts_.expect(Tok::RParen, "to close guard");
            } else {
                t->psi = parse_expression(ts_, {.htl = true});
            }
            return t;
        }
        if (ts_.accept(Tok::LBracket)) {
            auto t = std::make_shared<RawTerm>();
            t->kind = TermKind::Sequence;
            t->pos = pos;
            t->elems.push_back(bound());
            while (ts_.at(Tok::Arrow)) {
                SourcePos arrow = ts_.next().pos;
                ExprPtr phi;
                if (ts_.accept(Tok::LParen)) {
                    phi = parse_expression(ts_, {.htl = true});
                    ts_.expect(Tok::RParen, "to close path predicate");
                } else {
                    phi = make_bool(true);
                    const_cast<Expr&>(*phi).pos = arrow;
                }
                t->path.push_back(phi);
                t->elems.push_back(bound());
            }
            if (t->elems.size() < 2) ts_.fail("expected '->' in sequence");
            ts_.expect(Tok::RBracket, "to close sequence");
            return t;
        }
        if (ts_.at(Tok::Ident) && !(ts_.at_ident("l") && ts_.peek(1).kind == Tok::LParen)) {
            Token name = ts_.next();
            auto it = defs_.find(name.text);
            if (it == defs_.end()) throw SemanticError(name.pos, "undefined hyperlabel '" + name.text + "'");
            if (!ts_.at(Tok::LBrace)) return it->second;
            if (it->second->kind != TermKind::Label)
                throw SemanticError(name.pos, "bindings can only be attached to an atomic label");
            auto t = std::make_shared<RawTerm>(*it->second);
            t->pos = name.pos;
            t->label.pos = name.pos;
            bindings(t->label.bindings);
            return t;
        }
        auto t = std::make_shared<RawTerm>();
        t->kind = TermKind::Label;
        t->pos = pos;
        t->label = bound();
        return t;
    }

    // An atomic label with optional bindings, or a definition naming one.
    RawLabel bound() {
        RawLabel l;
        l.pos = ts_.peek().pos;
        if (ts_.at_ident("l") && ts_.peek(1).kind == Tok::LParen) {
            ts_.next();
            ts_.next();
            Token where = ts_.expect_ident("as label location");
            auto loc = location_literal(where.text);
            if (!loc) throw SyntaxError(where.pos, "expected a location 'locN', found '" + where.text + "'");
            if (!prog_.has_location(*loc)) throw SemanticError(where.pos, "unknown location " + where.text);
            l.loc = *loc;
            ts_.expect(Tok::Comma, "after label location");
            l.pred = parse_expression(ts_, {.htl = false});
            ts_.expect(Tok::RParen, "to close label");
        } else {
            Token name = ts_.expect_ident("as atomic label");
            auto it = defs_.find(name.text);
            if (it == defs_.end()) throw SemanticError(name.pos, "undefined label '" + name.text + "'");
            if (it->second->kind != TermKind::Label)
                throw SemanticError(name.pos, "'" + name.text + "' is not an atomic label");
            l = it->second->label;
            l.pos = name.pos;
        }
        if (ts_.at(Tok::LBrace)) bindings(l.bindings);
        return l;
    }

    void bindings(std::vector<RawBinding>& out) {
        ts_.expect(Tok::LBrace, "to open bindings");
        while (!ts_.at(Tok::RBrace)) {
            Token name = ts_.expect_ident("as metavariable name");
            if (reserved(name.text)) throw SyntaxError(name.pos, "'" + name.text + "' is reserved");
            ts_.expect(Tok::LArrow, "after metavariable name");
            out.push_back({name.text, parse_expression(ts_, {.htl = false}), name.pos});
            if (!ts_.accept(Tok::Semi)) break;
        }
        ts_.expect(Tok::RBrace, "to close bindings");
    }

    TokenStream ts_;
    const LocatedProgram& prog_;
    std::map<std::string, RawPtr> defs_;
};

// ---------------------------------------------------------------------------
// Resolution of one objective

class Elaborator {
public:
    explicit Elaborator(const LocatedProgram& p) : prog_(p) {}

    TermPtr run(const RawTerm& raw) {
        collect_meta_types(raw);
        return elaborate(raw);
    }

private:
    void note_meta(const RawBinding& b, Type t) {
        auto [it, fresh] = meta_types_.emplace(b.name, t);
        if (!fresh && it->second != t)
            throw SemanticError(b.pos, "metavariable '" + b.name + "' bound to both " + to_string(it->second) +
                                           " and " + to_string(t));
    }

    BoundLabel label(const RawLabel& raw) {
        Resolver r;
        r.program = &prog_;
        r.loc = raw.loc;
        BoundLabel l;
        l.loc = raw.loc;
        l.pred = r.operand(*raw.pred, Type::boolean(), "label predicate");
        for (const RawBinding& b : raw.bindings) {
            ExprPtr e = r.run(*b.expr);
            note_meta(b, e->type);
            l.bindings.push_back({b.name, e});
        }
        return l;
    }

    void collect_meta_types(const RawTerm& t) {
        switch (t.kind) {
        case TermKind::Label:
            label(t.label);
            break;
        case TermKind::Sequence:
            for (const RawLabel& e : t.elems) label(e);
            break;
        case TermKind::Guard:
            collect_meta_types(*t.lhs);
            break;
        case TermKind::Conj:
        case TermKind::Disj:
            collect_meta_types(*t.lhs);
            collect_meta_types(*t.rhs);
            break;
        }
    }

    TermPtr elaborate(const RawTerm& t) {
        switch (t.kind) {
        case TermKind::Label:
            return make_label(label(t.label));
        case TermKind::Sequence: {
            std::vector<BoundLabel> elems;
            std::vector<ExprPtr> path;
            std::map<std::string, Type> bound_so_far;
            for (std::size_t i = 0; i < t.elems.size(); ++i) {
                elems.push_back(label(t.elems[i]));
                for (const Binding& b : elems.back().bindings) bound_so_far[b.name] = b.expr->type;
                if (i + 1 < t.elems.size()) {
                    Resolver r;
                    r.program = &prog_;
                    r.metas = &bound_so_far;
                    r.path = true;
                    path.push_back(r.operand(*t.path[i], Type::boolean(), "path predicate"));
                }
            }
            return make_sequence(std::move(elems), std::move(path));
        }
        case TermKind::Guard: {
            TermPtr body = elaborate(*t.lhs);
            std::map<std::string, Type> visible;
            for (const std::string& n : visible_names(*body)) visible[n] = meta_types_.at(n);
            Resolver r;
            r.program = &prog_;
            r.metas = &visible;
            r.unknown_name = "is not a visible name of the guarded hyperlabel";
            return make_guard(body, r.operand(*t.psi, Type::boolean(), "guard"));
        }
        case TermKind::Conj:
            return make_conj(elaborate(*t.lhs), elaborate(*t.rhs));
        case TermKind::Disj:
            return make_disj(elaborate(*t.lhs), elaborate(*t.rhs));
        }
        return nullptr;
    }

    const LocatedProgram& prog_;
    std::map<std::string, Type> meta_types_;
};

}  // namespace

std::vector<Hyperlabel> parse_htl(std::string_view text, const LocatedProgram& p) {
    std::vector<Hyperlabel> out;
    std::set<std::string> ids;
    for (const RawDecl& d : Parser(text, p).parse()) {
        if (!ids.insert(d.id).second) throw SemanticError(d.pos, "duplicate hyperlabel id '" + d.id + "'");
        TermPtr term = Elaborator(p).run(*d.term);
        std::vector<Violation> bad = check_well_formed(*term);
        if (!bad.empty())
            throw SemanticError(d.pos, "hyperlabel '" + d.id + "' is not well-formed: " + bad.front().message);
        out.push_back({d.id, d.criterion, term});
    }
    return out;
}

std::vector<Hyperlabel> load_htl(const std::string& path, const LocatedProgram& p) {
    std::ifstream in(path);
    if (!in) throw Error("cannot open HTL file '" + path + "'");
    std::ostringstream ss;
    ss << in.rdbuf();
    return parse_htl(ss.str(), p);
}

}  // namespace htolcov::htl
