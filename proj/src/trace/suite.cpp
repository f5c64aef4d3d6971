#include "htolcov/trace/suite.hpp"

#include <charconv>
#include <fstream>
#include <random>
#include <set>
#include <sstream>

namespace htolcov::trace {

namespace {

std::string_view trim(std::string_view s) {
    while (!s.empty() && (s.front() == ' ' || s.front() == '\t' || s.front() == '\r')) s.remove_prefix(1);
    while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r')) s.remove_suffix(1);
    return s;
}

std::int64_t parse_int(std::string_view s, SourcePos pos) {
    s = trim(s);
    std::int64_t v = 0;
    auto [p, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
    if (s.empty() || ec != std::errc{} || p != s.data() + s.size())
        throw SyntaxError(pos, "invalid integer '" + std::string(s) + "'");
    return v;
}

InputValue parse_value(std::string_view s, SourcePos pos) {
    s = trim(s);
    if (s == "true") return Value::boolean(true);
    if (s == "false") return Value::boolean(false);
    if (!s.empty() && s.front() == '{') {
        if (s.back() != '}') throw SyntaxError(pos, "unterminated array literal");
        ArrayValue arr;
        std::string_view body = trim(s.substr(1, s.size() - 2));
        while (!body.empty()) {
            std::size_t comma = body.find(',');
            arr.push_back(parse_int(body.substr(0, comma), pos));
            if (comma == std::string_view::npos) break;
            body = body.substr(comma + 1);
        }
        return arr;
    }
    return Value::integer(parse_int(s, pos));
}

// Splits on commas outside of braces.
std::vector<std::string_view> split_assignments(std::string_view s) {
    std::vector<std::string_view> parts;
    int depth = 0;
    std::size_t start = 0;
    for (std::size_t i = 0; i < s.size(); ++i) {
        if (s[i] == '{') ++depth;
        if (s[i] == '}') --depth;
        if (s[i] == ',' && depth == 0) {
            parts.push_back(s.substr(start, i - start));
            start = i + 1;
        }
    }
    if (!trim(s.substr(start)).empty() || !parts.empty()) parts.push_back(s.substr(start));
    return parts;
}

}  // namespace

void check_datum(const TestDatum& t, const mini::LocatedProgram& p) {
    const mini::FunctionDef& fn = p.entry();
    std::set<std::string> expected;
    for (std::int32_t slot : fn.params) {
        const mini::Variable& v = fn.variables[static_cast<std::size_t>(slot)];
        expected.insert(v.name);
        auto it = t.values.find(v.name);
        if (it == t.values.end())
            throw SemanticError({1, 1}, "test '" + t.id + "' lacks parameter '" + v.name + "'");
        const InputValue& in = it->second;
        bool ok = false;
        if (v.type.kind == TypeKind::IntArray) {
            const auto* arr = std::get_if<ArrayValue>(&in);
            ok = arr && arr->size() == v.type.length;
        } else if (const auto* s = std::get_if<Value>(&in)) {
            ok = s->is_bool() == (v.type.kind == TypeKind::Bool);
        }
        if (!ok)
            throw SemanticError({1, 1}, "test '" + t.id + "': parameter '" + v.name + "' expects " +
                                            htolcov::to_string(v.type) + ", got " + to_string(in));
    }
    for (const auto& [name, _] : t.values)
        if (!expected.count(name))
            throw SemanticError({1, 1}, "test '" + t.id + "': '" + name + "' is not a parameter of '" + fn.name + "'");
}

TestSuite parse_suite(std::string_view text, const mini::LocatedProgram& p) {
    TestSuite suite;
    std::set<std::string> ids;
    int line_no = 0;
    while (!text.empty()) {
        std::size_t nl = text.find('\n');
        std::string_view line = text.substr(0, nl);
        text = nl == std::string_view::npos ? std::string_view{} : text.substr(nl + 1);
        ++line_no;
        SourcePos pos{line_no, 1};
        line = trim(line);
        if (line.empty() || line.front() == '#') continue;
        std::size_t bar = line.find('|');
        if (bar == std::string_view::npos) throw SyntaxError(pos, "expected 'id | assignments'");
        TestDatum t;
        t.id = std::string(trim(line.substr(0, bar)));
        if (t.id.empty()) throw SyntaxError(pos, "empty test id");
        if (!ids.insert(t.id).second) throw SemanticError(pos, "duplicate test id '" + t.id + "'");
        for (std::string_view part : split_assignments(line.substr(bar + 1))) {
            std::size_t eq = part.find('=');
            if (eq == std::string_view::npos) throw SyntaxError(pos, "expected 'name=value'");
            std::string name(trim(part.substr(0, eq)));
            if (!t.values.emplace(name, parse_value(part.substr(eq + 1), pos)).second)
                throw SemanticError(pos, "parameter '" + name + "' given twice");
        }
        try {
            check_datum(t, p);
        } catch (const SemanticError& e) {
            throw SemanticError(pos, e.what());
        }
        suite.tests.push_back(std::move(t));
    }
    return suite;
}

TestSuite load_suite(const std::string& path, const mini::LocatedProgram& p) {
    std::ifstream in(path);
    if (!in) throw Error("cannot open suite file '" + path + "'");
    std::ostringstream ss;
    ss << in.rdbuf();
    return parse_suite(ss.str(), p);
}

std::string print_suite(const TestSuite& suite, const mini::LocatedProgram& p) {
    const mini::FunctionDef& fn = p.entry();
    std::ostringstream os;
    for (const TestDatum& t : suite.tests) {
        os << t.id << " |";
        bool first = true;
        for (std::int32_t slot : fn.params) {
            const std::string& name = fn.variables[static_cast<std::size_t>(slot)].name;
            os << (first ? " " : ", ") << name << '=' << to_string(t.values.at(name));
            first = false;
        }
        os << '\n';
    }
    return os.str();
}

TestSuite random_suite(const mini::LocatedProgram& p, std::size_t count, std::uint64_t seed, IntRange range) {
    const mini::FunctionDef& fn = p.entry();
    std::mt19937_64 rng(seed);
    std::uniform_int_distribution<std::int64_t> ints(range.lo, range.hi);
    std::bernoulli_distribution coin(0.5);
    TestSuite suite;
    suite.tests.reserve(count);
    for (std::size_t i = 0; i < count; ++i) {
        TestDatum t;
        t.id = "t" + std::to_string(i + 1);
        for (std::int32_t slot : fn.params) {
            const mini::Variable& v = fn.variables[static_cast<std::size_t>(slot)];
            if (v.type.kind == TypeKind::IntArray) {
                ArrayValue arr(v.type.length);
                for (auto& cell : arr) cell = ints(rng);
                t.values.emplace(v.name, std::move(arr));
            } else if (v.type.kind == TypeKind::Bool) {
                t.values.emplace(v.name, Value::boolean(coin(rng)));
            } else {
                t.values.emplace(v.name, Value::integer(ints(rng)));
            }
        }
        suite.tests.push_back(std::move(t));
    }
    return suite;
}

}  // namespace htolcov::trace
