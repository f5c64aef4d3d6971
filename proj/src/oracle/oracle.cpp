#include "htolcov/oracle/oracle.hpp"

#include <algorithm>
#include <functional>

namespace htolcov::oracle {

namespace {

using htl::BoundLabel;
using htl::Environment;
using htl::Term;
using htl::TermKind;

/// Whole-expression evaluation, without the conjunction shortcut of `holds`.
template <class Scope>
bool satisfied(const Expr& e, const Scope& scope) {
    EvalResult r = evaluate(e, scope);
    return r.ok() && r.value.is_bool() && r.value.truthy();
}

/// Label rule at one step: the run is at loc, s ⊨ φ and E ⊇ ⟦B⟧s.
bool label_at(const BoundLabel& l, const mini::LocatedProgram& p, const trace::Step& s, const Environment& env) {
    if (s.loc != l.loc) return false;
    trace::FrameScope scope(p, s.loc, s.state);
    if (!satisfied(*l.pred, scope)) return false;
    for (const htl::Binding& b : l.bindings) {
        EvalResult r = evaluate(*b.expr, scope);
        if (!r.ok()) return false;
        auto it = env.find(b.name);
        if (it == env.end() || it->second != r.value) return false;
    }
    return true;
}

bool phi_at(const ExprPtr& phi, const mini::LocatedProgram& p, const trace::Step& s, const Environment& env) {
    htl::EnvScope meta(env);
    trace::FrameScope frame(p, s.loc, s.state);
    return satisfied(*phi, htl::PathScope<htl::EnvScope>(meta, frame));
}

/// Sequence rule: some k₁ < … < kₙ in one run, every step strictly between
/// kᵢ and kᵢ₊₁ satisfying φᵢ.
bool sequence_from(const Term& seq, std::size_t i, std::size_t k, const mini::LocatedProgram& p,
                   const trace::Run& run, const Environment& env) {
    if (i == seq.elems.size()) return true;
    for (std::size_t next = k + 1; next < run.steps.size(); ++next) {
        if (label_at(seq.elems[i], p, run.steps[next], env) && sequence_from(seq, i + 1, next, p, run, env))
            return true;
        // `next` becomes an intermediate step for every later choice.
        if (!phi_at(seq.path[i - 1], p, run.steps[next], env)) return false;
    }
    return false;
}

void observe(const BoundLabel& l, const mini::LocatedProgram& p, const std::vector<trace::Run>& runs,
             std::map<std::string, std::vector<Value>>& out) {
    for (const trace::Run& run : runs)
        for (const trace::Step& s : run.steps) {
            if (s.loc != l.loc) continue;
            trace::FrameScope scope(p, s.loc, s.state);
            for (const htl::Binding& b : l.bindings) {
                EvalResult r = evaluate(*b.expr, scope);
                if (r.ok()) out[b.name].push_back(r.value);
            }
        }
}

void observe_term(const Term& h, const mini::LocatedProgram& p, const std::vector<trace::Run>& runs,
                  std::map<std::string, std::vector<Value>>& out) {
    switch (h.kind) {
    case TermKind::Label: observe(h.label, p, runs, out); break;
    case TermKind::Sequence:
        for (const BoundLabel& l : h.elems) observe(l, p, runs, out);
        break;
    case TermKind::Guard: observe_term(*h.lhs, p, runs, out); break;
    case TermKind::Conj:
    case TermKind::Disj:
        observe_term(*h.lhs, p, runs, out);
        observe_term(*h.rhs, p, runs, out);
        break;
    }
}

}  // namespace

bool covers_with(const Term& h, const mini::LocatedProgram& p, const std::vector<trace::Run>& runs,
                 const Environment& env) {
    switch (h.kind) {
    case TermKind::Label:
        for (const trace::Run& run : runs)
            for (const trace::Step& s : run.steps)
                if (label_at(h.label, p, s, env)) return true;
        return false;
    case TermKind::Sequence:
        for (const trace::Run& run : runs)
            for (std::size_t k = 0; k < run.steps.size(); ++k)
                if (label_at(h.elems[0], p, run.steps[k], env) && sequence_from(h, 1, k, p, run, env)) return true;
        return false;
    case TermKind::Guard:
        return covers_with(*h.lhs, p, runs, env) && satisfied(*h.psi, htl::EnvScope(env));
    case TermKind::Conj:
        return covers_with(*h.lhs, p, runs, env) && covers_with(*h.rhs, p, runs, env);
    case TermKind::Disj:
        return covers_with(*h.lhs, p, runs, env) || covers_with(*h.rhs, p, runs, env);
    }
    return false;
}

bool oracle_covers(const Term& h, const mini::LocatedProgram& p, const trace::TestSuite& ts, const Domains& domains,
                   const Limits& limits) {
    htl::NameSet names = htl::visible_names(h);
    if (names.size() > limits.max_names)
        throw Refused("oracle limited to " + std::to_string(limits.max_names) + " metavariables");

    std::vector<trace::Run> runs;
    for (const trace::TestDatum& t : ts.tests) runs.push_back(trace::execute(p, t, limits.step_limit));

    std::map<std::string, std::vector<Value>> candidates;
    observe_term(h, p, runs, candidates);
    std::vector<std::string> order(names.begin(), names.end());
    std::vector<std::vector<Value>> values;
    std::size_t total = 1;
    for (const std::string& n : order) {
        std::vector<Value> vs = candidates[n];
        if (auto it = domains.find(n); it != domains.end()) vs.insert(vs.end(), it->second.begin(), it->second.end());
        std::sort(vs.begin(), vs.end());
        vs.erase(std::unique(vs.begin(), vs.end()), vs.end());
        if (vs.empty()) return false;  // a visible name that can never be bound
        total *= vs.size();
        if (total > limits.max_environments) throw Refused("too many candidate environments");
        values.push_back(std::move(vs));
    }

    Environment env;
    std::function<bool(std::size_t)> enumerate = [&](std::size_t i) {
        if (i == order.size()) return covers_with(h, p, runs, env);
        for (const Value& v : values[i]) {
            env[order[i]] = v;
            if (enumerate(i + 1)) return true;
        }
        return false;
    };
    return enumerate(0);
}

}  // namespace htolcov::oracle
