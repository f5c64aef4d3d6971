#include <algorithm>
#include <fstream>
#include <map>
#include <sstream>

#include "htolcov/lexer.hpp"
#include "htolcov/minilang/program.hpp"

namespace htolcov::mini {

const char* to_string(LocationKind k) {
    switch (k) {
    case LocationKind::Entry: return "entry";
    case LocationKind::Decl: return "decl";
    case LocationKind::Assign: return "assign";
    case LocationKind::Call: return "call";
    case LocationKind::IfCond: return "if";
    case LocationKind::WhileCond: return "while";
    case LocationKind::Return: return "return";
    }
    return "?";
}

const VisibleVar* LocationInfo::find(std::string_view name) const {
    for (const VisibleVar& v : visible)
        if (v.name == name) return &v;
    return nullptr;
}

std::optional<std::size_t> LocatedProgram::find_function(std::string_view name) const {
    for (std::size_t i = 0; i < functions.size(); ++i)
        if (functions[i].name == name) return i;
    return std::nullopt;
}

std::vector<LocationId> LocatedProgram::locations_of(std::size_t function) const {
    std::vector<LocationId> out;
    for (const LocationInfo& info : locations)
        if (info.function == function) out.push_back(info.id);
    return out;
}

namespace {

bool is_keyword(std::string_view s) {
    static const char* const kWords[] = {"int", "bool", "void", "if", "else", "while",
                                         "return", "true", "false", "pc"};
    return std::any_of(std::begin(kWords), std::end(kWords), [&](const char* w) { return s == w; });
}

void check_identifier(const Token& t) {
    if (is_keyword(t.text) || location_literal(t.text) || t.text.rfind("__", 0) == 0)
        throw SemanticError(t.pos, "'" + t.text + "' is a reserved name");
}

// ---------------------------------------------------------------------------
// Syntax

class Parser {
public:
    explicit Parser(std::string_view source) : ts_(lex(source)) {}

    std::vector<FunctionDef> program() {
        std::vector<FunctionDef> fns;
        while (!ts_.at(Tok::End)) fns.push_back(function());
        if (fns.empty()) ts_.fail("expected a function definition");
        return fns;
    }

private:
    Type base_type(bool allow_void) {
        const Token& t = ts_.peek();
        if (t.kind == Tok::Ident) {
            if (t.text == "int") { ts_.next(); return Type::integer(); }
            if (t.text == "bool") { ts_.next(); return Type::boolean(); }
            if (t.text == "void" && allow_void) { ts_.next(); return Type::void_type(); }
        }
        ts_.fail(allow_void ? "expected return type" : "expected type");
    }

    Type array_suffix(Type base) {
        if (!ts_.accept(Tok::LBracket)) return base;
        if (base.kind != TypeKind::Int) ts_.fail("only int arrays are supported");
        Token n = ts_.expect(Tok::Int, "as array length");
        ts_.expect(Tok::RBracket, "after array length");
        long long len = std::stoll(n.text);
        if (len <= 0 || len > 1'000'000) throw SyntaxError(n.pos, "array length must be in 1..1000000");
        return Type::array(static_cast<std::uint32_t>(len));
    }

    FunctionDef function() {
        FunctionDef fn;
        fn.pos = ts_.peek().pos;
        fn.return_type = base_type(true);
        Token name = ts_.expect_ident("as function name");
        check_identifier(name);
        fn.name = name.text;
        ts_.expect(Tok::LParen, "after function name");
        if (!ts_.at(Tok::RParen)) {
            do {
                Variable v;
                Type base = base_type(false);
                Token pname = ts_.expect_ident("as parameter name");
                check_identifier(pname);
                v.name = pname.text;
                v.type = array_suffix(base);
                v.is_param = true;
                v.slot = static_cast<std::int32_t>(fn.variables.size());
                fn.params.push_back(v.slot);
                fn.variables.push_back(v);
            } while (ts_.accept(Tok::Comma));
        }
        ts_.expect(Tok::RParen, "after parameters");
        fn.body = block();
        return fn;
    }

    std::vector<Stmt> block() {
        ts_.expect(Tok::LBrace, "to open block");
        std::vector<Stmt> out;
        while (!ts_.at(Tok::RBrace)) {
            if (ts_.at(Tok::End)) ts_.fail("expected '}'");
            if (ts_.accept(Tok::Semi)) continue;
            out.push_back(statement());
        }
        ts_.next();
        return out;
    }

    std::vector<Stmt> body() {
        if (ts_.at(Tok::LBrace)) return block();
        std::vector<Stmt> out;
        out.push_back(statement());
        return out;
    }

    CallSite call() {
        CallSite c;
        c.callee = ts_.expect_ident("as callee").text;
        ts_.expect(Tok::LParen, "after callee");
        if (!ts_.at(Tok::RParen)) {
            do c.args.push_back(parse_expression(ts_));
            while (ts_.accept(Tok::Comma));
        }
        ts_.expect(Tok::RParen, "after call arguments");
        return c;
    }

    void rhs(Stmt& s) {
        if (ts_.peek().kind == Tok::Ident && ts_.peek(1).kind == Tok::LParen) {
            s.call = call();
        } else {
            s.value = parse_expression(ts_);
        }
    }

    Stmt statement() {
        Stmt s;
        s.pos = ts_.peek().pos;
        if (ts_.at_ident("int") || ts_.at_ident("bool")) {
            s.kind = StmtKind::Decl;
            Type base = base_type(false);
            Token name = ts_.expect_ident("as variable name");
            check_identifier(name);
            s.target = name.text;
            s.decl_type = array_suffix(base);
            if (ts_.accept(Tok::ColonEq) || ts_.accept(Tok::Equals)) {
                if (s.decl_type.kind == TypeKind::IntArray)
                    ts_.fail("arrays cannot be initialised");
                rhs(s);
            }
            ts_.expect(Tok::Semi, "after declaration");
            return s;
        }
        if (ts_.at_ident("if")) {
            ts_.next();
            s.kind = StmtKind::If;
            ts_.expect(Tok::LParen, "after 'if'");
            s.value = parse_expression(ts_);
            ts_.expect(Tok::RParen, "after condition");
            s.body = body();
            if (ts_.at_ident("else")) {
                ts_.next();
                s.has_else = true;
                s.else_body = body();
            }
            return s;
        }
        if (ts_.at_ident("while")) {
            ts_.next();
            s.kind = StmtKind::While;
            ts_.expect(Tok::LParen, "after 'while'");
            s.value = parse_expression(ts_);
            ts_.expect(Tok::RParen, "after condition");
            s.body = body();
            return s;
        }
        if (ts_.at_ident("return")) {
            ts_.next();
            s.kind = StmtKind::Return;
            if (!ts_.at(Tok::Semi)) s.value = parse_expression(ts_);
            ts_.expect(Tok::Semi, "after return");
            return s;
        }
        if (ts_.at(Tok::Ident) && ts_.peek(1).kind == Tok::LParen) {
            s.kind = StmtKind::Call;
            s.call = call();
            ts_.expect(Tok::Semi, "after call");
            return s;
        }
        if (ts_.at(Tok::Ident)) {
            s.kind = StmtKind::Assign;
            s.target = ts_.next().text;
            if (ts_.accept(Tok::LBracket)) {
                s.index = parse_expression(ts_);
                ts_.expect(Tok::RBracket, "after subscript");
            }
            if (!ts_.accept(Tok::ColonEq) && !ts_.accept(Tok::Equals)) ts_.fail("expected ':='");
            rhs(s);
            ts_.expect(Tok::Semi, "after assignment");
            return s;
        }
        ts_.fail("expected statement");
    }

    TokenStream ts_;

public:
};

// ---------------------------------------------------------------------------
// Names, types and locations

class Checker {
public:
    explicit Checker(LocatedProgram& prog) : prog_(prog) {}

    void run() {
        for (std::size_t i = 0; i < prog_.functions.size(); ++i) {
            const FunctionDef& f = prog_.functions[i];
            for (std::size_t j = 0; j < i; ++j)
                if (prog_.functions[j].name == f.name)
                    throw SemanticError(f.pos, "duplicate function name '" + f.name + "'");
        }
        for (std::size_t i = 0; i < prog_.functions.size(); ++i) function(i);
    }

private:
    struct Scope {
        std::map<std::string, std::int32_t, std::less<>> names;
    };

    void function(std::size_t index) {
        FunctionDef& fn = prog_.functions[index];
        fn_ = &fn;
        fn_index_ = index;
        scopes_.clear();
        scopes_.emplace_back();
        for (std::int32_t slot : fn.params) {
            Variable& v = fn.variables[static_cast<std::size_t>(slot)];
            declare(v.name, slot, fn.pos);
        }
        fn.entry = new_location(LocationKind::Entry, fn.pos, nullptr);
        for (std::int32_t slot : fn.params) fn.variables[static_cast<std::size_t>(slot)].decl_loc = fn.entry;
        snapshot(fn.entry, false);
        block(fn.body);
    }

    void declare(const std::string& name, std::int32_t slot, SourcePos pos) {
        for (const Scope& s : scopes_)
            if (s.names.count(name))
                throw SemanticError(pos, "redeclaration of '" + name + "'");
        scopes_.back().names.emplace(name, slot);
    }

    const Variable* lookup(std::string_view name) const {
        for (auto it = scopes_.rbegin(); it != scopes_.rend(); ++it) {
            auto found = it->names.find(name);
            if (found != it->names.end()) return &fn_->variables[static_cast<std::size_t>(found->second)];
        }
        return nullptr;
    }

    LocationId new_location(LocationKind kind, SourcePos pos, const Stmt* stmt) {
        LocationInfo info;
        info.id = static_cast<LocationId>(prog_.locations.size() + 1);
        info.function = fn_index_;
        info.kind = kind;
        info.pos = pos;
        info.stmt = stmt;
        prog_.locations.push_back(std::move(info));
        return prog_.locations.back().id;
    }

    void snapshot(LocationId loc, bool with_result) {
        std::vector<VisibleVar> vis;
        for (const Scope& s : scopes_)
            for (const auto& [name, slot] : s.names)
                vis.push_back({name, slot, fn_->variables[static_cast<std::size_t>(slot)].type});
        std::sort(vis.begin(), vis.end(), [](const VisibleVar& a, const VisibleVar& b) { return a.slot < b.slot; });
        if (with_result)
            vis.push_back({std::string(kResultName), fn_->result_slot(), fn_->return_type});
        prog_.locations[loc - 1].visible = std::move(vis);
    }

    void block(std::vector<Stmt>& stmts) {
        for (Stmt& s : stmts) statement(s);
    }

    void nested(std::vector<Stmt>& stmts) {
        scopes_.emplace_back();
        block(stmts);
        scopes_.pop_back();
    }

    static LocationKind kind_of(const Stmt& s) {
        switch (s.kind) {
        case StmtKind::Decl: return LocationKind::Decl;
        case StmtKind::Assign: return LocationKind::Assign;
        case StmtKind::Call: return LocationKind::Call;
        case StmtKind::If: return LocationKind::IfCond;
        case StmtKind::While: return LocationKind::WhileCond;
        case StmtKind::Return: return LocationKind::Return;
        }
        return LocationKind::Assign;
    }

    void statement(Stmt& s) {
        s.loc = new_location(kind_of(s), s.pos, &s);
        switch (s.kind) {
        case StmtKind::Decl: {
            Type t = s.decl_type;
            if (s.call) check_call(*s.call, s.pos, &t);
            if (s.value) s.value = scalar(s.value, t, "initialiser");
            Variable v;
            v.name = s.target;
            v.type = t;
            v.slot = static_cast<std::int32_t>(fn_->variables.size());
            v.decl_loc = s.loc;
            fn_->variables.push_back(v);
            s.slot = v.slot;
            declare(v.name, v.slot, s.pos);
            snapshot(s.loc, false);
            return;
        }
        case StmtKind::Assign: {
            const Variable* v = lookup(s.target);
            if (!v) throw SemanticError(s.pos, "undeclared variable '" + s.target + "'");
            s.slot = v->slot;
            Type target_type = v->type;
            if (s.index) {
                if (v->type.kind != TypeKind::IntArray)
                    throw SemanticError(s.pos, "'" + s.target + "' is not an array");
                s.index = scalar(s.index, Type::integer(), "subscript");
                target_type = Type::integer();
            } else if (v->type.kind == TypeKind::IntArray) {
                throw SemanticError(s.pos, "cannot assign a whole array");
            }
            if (s.call) check_call(*s.call, s.pos, &target_type);
            if (s.value) s.value = scalar(s.value, target_type, "assignment");
            snapshot(s.loc, false);
            return;
        }
        case StmtKind::Call:
            check_call(*s.call, s.pos, nullptr);
            snapshot(s.loc, false);
            return;
        case StmtKind::If:
            s.value = scalar(s.value, Type::boolean(), "condition");
            snapshot(s.loc, false);
            nested(s.body);
            nested(s.else_body);
            return;
        case StmtKind::While:
            s.value = scalar(s.value, Type::boolean(), "condition");
            snapshot(s.loc, false);
            nested(s.body);
            return;
        case StmtKind::Return:
            if (fn_->return_type.kind == TypeKind::Void) {
                if (s.value) throw SemanticError(s.pos, "void function '" + fn_->name + "' returns a value");
            } else {
                if (!s.value) throw SemanticError(s.pos, "missing return value in '" + fn_->name + "'");
                s.value = scalar(s.value, fn_->return_type, "return value");
            }
            snapshot(s.loc, s.value != nullptr);
            return;
        }
    }

    void check_call(CallSite& c, SourcePos pos, const Type* expected) {
        auto callee = prog_.find_function(c.callee);
        if (!callee) throw SemanticError(pos, "call to undefined function '" + c.callee + "'");
        c.function = *callee;
        const FunctionDef& g = prog_.functions[*callee];
        if (c.args.size() != g.params.size())
            throw SemanticError(pos, "'" + g.name + "' expects " + std::to_string(g.params.size()) +
                                         " arguments, got " + std::to_string(c.args.size()));
        for (std::size_t i = 0; i < c.args.size(); ++i) {
            Type want = g.variables[static_cast<std::size_t>(g.params[i])].type;
            if (want.kind == TypeKind::IntArray) {
                const Expr& a = *c.args[i];
                const Variable* v = a.kind == ExprKind::Var ? lookup(a.name) : nullptr;
                if (!v || v->type != want)
                    throw SemanticError(a.pos, "argument " + std::to_string(i + 1) + " of '" + g.name +
                                                   "' must be an array variable of type " + to_string(want));
                c.args[i] = make_var(v->name, VarRole::Program, v->slot, v->type);
            } else {
                c.args[i] = scalar(c.args[i], want, "argument");
            }
        }
        if (expected) {
            if (g.return_type.kind == TypeKind::Void)
                throw SemanticError(pos, "void function '" + g.name + "' used as a value");
            if (g.return_type != *expected)
                throw SemanticError(pos, "type mismatch: '" + g.name + "' returns " + to_string(g.return_type) +
                                             ", expected " + to_string(*expected));
        }
    }

    ExprPtr scalar(const ExprPtr& e, Type want, const char* what) {
        ExprPtr r = resolve(*e);
        if (r->type != want)
            throw SemanticError(e->pos, std::string("type mismatch in ") + what + ": expected " +
                                            to_string(want) + ", found " + to_string(r->type));
        return r;
    }

    ExprPtr resolve(const Expr& e) {
        auto out = std::make_shared<Expr>(e);
        switch (e.kind) {
        case ExprKind::IntLit:
        case ExprKind::BoolLit:
            return out;
        case ExprKind::LocLit:
        case ExprKind::Pc:
            throw SemanticError(e.pos, "program-counter expressions are not allowed in programs");
        case ExprKind::Var: {
            const Variable* v = lookup(e.name);
            if (!v) throw SemanticError(e.pos, "undeclared variable '" + e.name + "'");
            if (v->type.kind == TypeKind::IntArray)
                throw SemanticError(e.pos, "array '" + e.name + "' used as a scalar");
            out->role = VarRole::Program;
            out->slot = v->slot;
            out->type = v->type;
            return out;
        }
        case ExprKind::Index: {
            const Variable* v = lookup(e.name);
            if (!v) throw SemanticError(e.pos, "undeclared variable '" + e.name + "'");
            if (v->type.kind != TypeKind::IntArray)
                throw SemanticError(e.pos, "'" + e.name + "' is not an array");
            out->role = VarRole::Program;
            out->slot = v->slot;
            out->lhs = scalar(e.lhs, Type::integer(), "subscript");
            out->type = Type::integer();
            return out;
        }
        case ExprKind::Unary: {
            Type want = e.unary == UnaryOp::Not ? Type::boolean() : Type::integer();
            out->lhs = scalar(e.lhs, want, e.unary == UnaryOp::Not ? "operand of '!'" : "operand of '-'");
            out->type = want;
            return out;
        }
        case ExprKind::Binary: {
            if (e.binary == BinaryOp::Implies)
                throw SemanticError(e.pos, "'=>' is not allowed in programs");
            ExprPtr l = resolve(*e.lhs);
            ExprPtr r = resolve(*e.rhs);
            Type operand = Type::integer();
            if (e.binary == BinaryOp::And || e.binary == BinaryOp::Or) operand = Type::boolean();
            if (e.binary == BinaryOp::Eq || e.binary == BinaryOp::Ne) operand = l->type;
            if (l->type != operand || r->type != operand)
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

    LocatedProgram& prog_;
    FunctionDef* fn_ = nullptr;
    std::size_t fn_index_ = 0;
    std::vector<Scope> scopes_;
};

// ---------------------------------------------------------------------------
// Printing

void print_call(const CallSite& c, std::ostringstream& os) {
    os << c.callee << '(';
    for (std::size_t i = 0; i < c.args.size(); ++i) os << (i ? ", " : "") << print_expr(*c.args[i]);
    os << ')';
}

std::string type_prefix(Type t) {
    return t.kind == TypeKind::Bool ? "bool" : t.kind == TypeKind::Void ? "void" : "int";
}

std::string array_part(Type t) {
    return t.kind == TypeKind::IntArray ? "[" + std::to_string(t.length) + "]" : "";
}

void print_block(const std::vector<Stmt>& stmts, int depth, std::ostringstream& os);

void print_stmt(const Stmt& s, int depth, std::ostringstream& os) {
    std::string pad(static_cast<std::size_t>(depth) * 2, ' ');
    os << pad;
    switch (s.kind) {
    case StmtKind::Decl:
        os << type_prefix(s.decl_type) << ' ' << s.target << array_part(s.decl_type);
        if (s.value) os << " := " << print_expr(*s.value);
        if (s.call) {
            os << " := ";
            print_call(*s.call, os);
        }
        os << ";\n";
        return;
    case StmtKind::Assign:
        os << s.target;
        if (s.index) os << '[' << print_expr(*s.index) << ']';
        os << " := ";
        if (s.call)
            print_call(*s.call, os);
        else
            os << print_expr(*s.value);
        os << ";\n";
        return;
    case StmtKind::Call:
        print_call(*s.call, os);
        os << ";\n";
        return;
    case StmtKind::If:
        os << "if (" << print_expr(*s.value) << ") {\n";
        print_block(s.body, depth + 1, os);
        os << pad << '}';
        if (s.has_else) {
            os << " else {\n";
            print_block(s.else_body, depth + 1, os);
            os << pad << '}';
        }
        os << '\n';
        return;
    case StmtKind::While:
        os << "while (" << print_expr(*s.value) << ") {\n";
        print_block(s.body, depth + 1, os);
        os << pad << "}\n";
        return;
    case StmtKind::Return:
        os << "return";
        if (s.value) os << ' ' << print_expr(*s.value);
        os << ";\n";
        return;
    }
}

void print_block(const std::vector<Stmt>& stmts, int depth, std::ostringstream& os) {
    for (const Stmt& s : stmts) print_stmt(s, depth, os);
}

}  // namespace

ProgramPtr parse_program(std::string_view source, std::optional<std::string> entry) {
    auto prog = std::make_shared<LocatedProgram>();
    Parser parser(source);
    prog->functions = parser.program();
    Checker(*prog).run();
    if (entry) {
        auto idx = prog->find_function(*entry);
        if (!idx) throw SemanticError({1, 1}, "entry function '" + *entry + "' is not defined");
        prog->entry_function = *idx;
    } else {
        prog->entry_function = prog->find_function("main").value_or(0);
    }
    return prog;
}

ProgramPtr load_program(const std::string& path, std::optional<std::string> entry) {
    std::ifstream in(path);
    if (!in) throw Error("cannot open program file '" + path + "'");
    std::ostringstream ss;
    ss << in.rdbuf();
    return parse_program(ss.str(), std::move(entry));
}

std::string print_program(const LocatedProgram& p) {
    std::ostringstream os;
    for (std::size_t i = 0; i < p.functions.size(); ++i) {
        const FunctionDef& f = p.functions[i];
        if (i) os << '\n';
        os << type_prefix(f.return_type) << ' ' << f.name << '(';
        for (std::size_t k = 0; k < f.params.size(); ++k) {
            const Variable& v = f.variables[static_cast<std::size_t>(f.params[k])];
            os << (k ? ", " : "") << type_prefix(v.type) << ' ' << v.name << array_part(v.type);
        }
        os << ") {\n";
        print_block(f.body, 1, os);
        os << "}\n";
    }
    return os.str();
}

}  // namespace htolcov::mini
