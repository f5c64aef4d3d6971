#include <algorithm>
#include <functional>
#include <unordered_map>
#include <unordered_set>

#include <omp.h>

#include "htolcov/coverage/engine.hpp"

namespace htolcov::cov {

namespace {

using Env = std::vector<Value>;

/// Reads metavariables from a (partial) environment by slot.
struct EnvSlots {
    const Env* env;
    const Value* meta(const Expr& v) const { return &(*env)[static_cast<std::size_t>(v.slot)]; }
};

/// Evaluates a path predicate that mentions neither variables nor
/// metavariables: its value depends on the location only.
struct PcOnly {
    LocationId loc;
    const Value* scalar(const Expr&) const { return nullptr; }
    const ArrayValue* array(const Expr&) const { return nullptr; }
    const Value* meta(const Expr&) const { return nullptr; }
    std::optional<LocationId> pc() const { return loc; }
};

bool pc_only(const Expr& e) {
    std::set<std::string> names;
    collect_names(e, names);
    return names.empty();
}

bool mentions_meta(const Expr& e) {
    if (e.kind == ExprKind::Var && e.role == VarRole::Meta) return true;
    return (e.lhs && mentions_meta(*e.lhs)) || (e.rhs && mentions_meta(*e.rhs));
}

/// Label elements of one location with every subexpression that occurs more
/// than once replaced by a metavariable indexing `shared`.
struct SharedSubexprs {
    std::vector<ExprPtr> shared;

    void compile(std::vector<AtomElem*> elems) {
        std::erase_if(elems, [](const AtomElem* e) {
            if (mentions_meta(*e->pred)) return true;
            return std::any_of(e->bindings.begin(), e->bindings.end(),
                               [](const ExprPtr& b) { return mentions_meta(*b); });
        });
        std::unordered_map<std::string, std::size_t> count;
        std::function<void(const Expr&)> visit = [&](const Expr& e) {
            if (e.kind != ExprKind::Unary && e.kind != ExprKind::Binary && e.kind != ExprKind::Index) return;
            ++count[print_expr(e)];
            if (e.lhs) visit(*e.lhs);
            if (e.rhs) visit(*e.rhs);
        };
        for (AtomElem* e : elems) {
            visit(*e->pred);
            for (const ExprPtr& b : e->bindings) visit(*b);
        }

        std::unordered_map<std::string, std::int32_t> slot;
        std::function<ExprPtr(const ExprPtr&, bool)> rewrite = [&](const ExprPtr& e, bool top) -> ExprPtr {
            if (!e) return e;
            if (!top) {
                std::string key = print_expr(*e);
                auto it = count.find(key);
                if (it != count.end() && it->second > 1) {
                    auto [pos, fresh] = slot.emplace(key, static_cast<std::int32_t>(shared.size()));
                    if (fresh) {
                        shared.push_back(nullptr);
                        shared[static_cast<std::size_t>(pos->second)] = rewrite(e, true);
                    }
                    return make_var(key, VarRole::Meta, pos->second, e->type);
                }
            }
            auto copy = std::make_shared<Expr>(*e);
            copy->lhs = rewrite(e->lhs, false);
            copy->rhs = rewrite(e->rhs, false);
            return copy;
        };
        for (AtomElem* e : elems) {
            e->pred = rewrite(e->pred, false);
            for (ExprPtr& b : e->bindings) b = rewrite(b, false);
        }
    }
};

/// Cache entry for one shared subexpression.
struct Memo {
    std::uint64_t step = 0;
    bool ok = false;
    Value value;
};

/// Frame scope whose metavariables are shared subexpressions, each evaluated
/// at most once per step.
class MemoScope {
public:
    MemoScope(const trace::FrameScope& base, const std::vector<ExprPtr>& shared, std::vector<Memo>& memo,
              std::uint64_t step)
        : base_(base), shared_(shared), memo_(memo), step_(step) {}

    const Value* scalar(const Expr& v) const { return base_.scalar(v); }
    const ArrayValue* array(const Expr& v) const { return base_.array(v); }
    std::optional<LocationId> pc() const { return base_.pc(); }
    const Value* meta(const Expr& v) const {
        auto i = static_cast<std::size_t>(v.slot);
        Memo& m = memo_[i];
        if (m.step != step_) {
            EvalResult r = evaluate(*shared_[i], *this);
            m.step = step_;
            m.ok = r.ok();
            m.value = r.value;
        }
        return m.ok ? &m.value : nullptr;
    }

private:
    const trace::FrameScope& base_;
    const std::vector<ExprPtr>& shared_;
    std::vector<Memo>& memo_;
    std::uint64_t step_;
};

template <class Scope>
bool eval_elem(const AtomElem& e, const Scope& scope, Env& env) {
    if (!holds(*e.pred, scope)) return false;
    for (std::size_t i = 0; i < e.bindings.size(); ++i) {
        EvalResult r = evaluate(*e.bindings[i], scope);
        if (!r.ok()) return false;
        env[e.offset + i] = r.value;
    }
    return true;
}

/// Immutable per-location dispatch tables shared by all monitors.
struct Plan {
    struct ElemRef {
        std::size_t atom;
        std::size_t elem;
    };
    struct StageRef {
        std::size_t atom;
        std::size_t stage;
    };

    const mini::LocatedProgram* program;
    const AtomTable* atoms;
    std::vector<std::vector<std::size_t>> labels_at;  // by location
    std::vector<std::vector<ElemRef>> elems_at;       // sequence elements by location
    std::vector<std::vector<StageRef>> kills_at;      // pc-only path predicates false at the location
    std::vector<std::vector<bool>> general;           // per sequence atom, per stage
    std::vector<std::vector<AtomElem>> elems;         // per atom, with shared subexpressions factored out
    std::vector<SharedSubexprs> shared_at;            // by location
    std::size_t memo_size = 0;

    Plan(const mini::LocatedProgram& p, const AtomTable& table) : program(&p), atoms(&table) {
        std::size_t n = p.location_count() + 1;
        labels_at.resize(n);
        elems_at.resize(n);
        kills_at.resize(n);
        general.resize(table.size());
        for (std::size_t a = 0; a < table.size(); ++a) {
            const Atom& atom = table[a];
            if (!atom.sequence) {
                labels_at[atom.elems[0].loc].push_back(a);
                continue;
            }
            for (std::size_t e = 0; e < atom.elems.size(); ++e) elems_at[atom.elems[e].loc].push_back({a, e});
            general[a].assign(atom.path.size(), false);
            for (std::size_t s = 0; s < atom.path.size(); ++s) {
                if (!pc_only(*atom.path[s])) {
                    general[a][s] = true;
                    continue;
                }
                for (LocationId loc = 1; loc < n; ++loc)
                    if (!holds(*atom.path[s], PcOnly{loc})) kills_at[loc].push_back({a, s});
            }
        }

        elems.resize(table.size());
        std::vector<std::vector<AtomElem*>> by_loc(n);
        for (std::size_t a = 0; a < table.size(); ++a) {
            elems[a] = table[a].elems;
            for (AtomElem& e : elems[a]) by_loc[e.loc].push_back(&e);
        }
        shared_at.resize(n);
        for (std::size_t loc = 0; loc < n; ++loc) {
            shared_at[loc].compile(by_loc[loc]);
            memo_size = std::max(memo_size, shared_at[loc].shared.size());
        }
    }
};

/// Occurrences found by one chunk of tests.
struct ChunkLog {
    std::vector<std::vector<Occurrence>> atoms;
    std::vector<std::unordered_set<Env, ValueVectorHash>> seen;
    std::vector<trace::Outcome> outcomes;
};

/// Streams one run at a time, matching labels directly and sequences through
/// partial matches kept per (atom, stage) and deduplicated on environment.
class Monitor : public trace::StepObserver {
public:
    Monitor(const Plan& plan, ChunkLog& log, bool dedup) : plan_(plan), log_(log), dedup_(dedup) {
        std::size_t n = plan.atoms->size();
        log_.atoms.resize(n);
        log_.seen.resize(n);
        saturated_.assign(n, false);
        stages_.resize(n);
        active_flag_.resize(n);
        scratch_.resize(n);
        memo_.resize(plan.memo_size);
        for (std::size_t a = 0; a < n; ++a) {
            const Atom& atom = (*plan.atoms)[a];
            scratch_[a].resize(atom.env_size());
            if (!atom.sequence) continue;
            stages_[a].resize(atom.path.size());
            active_flag_[a].assign(atom.path.size(), false);
        }
    }

    void begin_test(std::size_t test) {
        test_ = test;
        for (auto& per_atom : stages_)
            for (auto& stage : per_atom) stage.clear();
        for (auto& flags : active_flag_) std::fill(flags.begin(), flags.end(), false);
        active_.clear();
    }

    void on_step(std::size_t k, LocationId loc, const trace::Frame& frame) override {
        const AtomTable& atoms = *plan_.atoms;
        trace::FrameScope scope(*plan_.program, loc, frame);
        MemoScope memo(scope, plan_.shared_at[loc].shared, memo_, ++step_);

        for (std::size_t a : plan_.labels_at[loc]) {
            if (saturated_[a]) continue;
            Env& env = scratch_[a];
            if (!eval_elem(plan_.elems[a][0], memo, env)) continue;
            if (dedup_ && log_.seen[a].count(env)) continue;
            record(a, {k}, env);
        }

        if (plan_.elems_at[loc].empty() && plan_.kills_at[loc].empty() && active_.empty()) return;

        // Extensions use only partials that existed before this step.
        pending_.clear();
        for (const Plan::ElemRef& ref : plan_.elems_at[loc]) {
            if (saturated_[ref.atom]) continue;
            const Atom& atom = atoms[ref.atom];
            const AtomElem& elem = plan_.elems[ref.atom][ref.elem];
            if (ref.elem == 0) {
                // Steps are filled in on insertion; most first elements are
                // already present as partials.
                Env& env = scratch_[ref.atom];
                if (eval_elem(elem, memo, env)) pending_.push_back({ref.atom, 0, env, {}});
                continue;
            }
            auto& prev = stages_[ref.atom][ref.elem - 1];
            if (prev.empty()) continue;
            Env fresh(atom.env_size());
            if (!eval_elem(elem, memo, fresh)) continue;
            for (const auto& [env, steps] : prev) {
                Pending p{ref.atom, ref.elem, env, steps};
                std::copy(fresh.begin() + static_cast<std::ptrdiff_t>(elem.offset),
                          fresh.begin() + static_cast<std::ptrdiff_t>(elem.offset + elem.bindings.size()),
                          p.env.begin() + static_cast<std::ptrdiff_t>(elem.offset));
                p.steps.push_back(k);
                pending_.push_back(std::move(p));
            }
        }

        // This step lies strictly inside the interval of every older partial.
        for (const Plan::StageRef& ref : plan_.kills_at[loc]) stages_[ref.atom][ref.stage].clear();
        for (std::size_t i = 0; i < active_.size();) {
            auto [a, s] = active_[i];
            auto& stage = stages_[a][s];
            const Expr& phi = *atoms[a].path[s];
            for (auto it = stage.begin(); it != stage.end();) {
                EnvSlots meta{&it->first};
                if (holds(phi, htl::PathScope<EnvSlots>(meta, scope)))
                    ++it;
                else
                    it = stage.erase(it);
            }
            if (stage.empty()) {
                active_flag_[a][s] = false;
                active_[i] = active_.back();
                active_.pop_back();
            } else {
                ++i;
            }
        }

        for (Pending& p : pending_) {
            if (saturated_[p.atom]) continue;
            const Atom& atom = atoms[p.atom];
            if (p.elem + 1 == atom.elems.size()) {
                if (!dedup_ || !log_.seen[p.atom].count(p.env)) record(p.atom, std::move(p.steps), std::move(p.env));
                continue;
            }
            auto& stage = stages_[p.atom][p.elem];
            if (stage.count(p.env)) continue;
            if (p.elem == 0) p.steps.push_back(k);
            stage.emplace(std::move(p.env), std::move(p.steps));
            if (plan_.general[p.atom][p.elem] && !active_flag_[p.atom][p.elem]) {
                active_flag_[p.atom][p.elem] = true;
                active_.emplace_back(p.atom, p.elem);
            }
        }
    }

private:
    struct Pending {
        std::size_t atom;
        std::size_t elem;
        Env env;
        std::vector<std::size_t> steps;
    };

    /// Stores a new occurrence; with dedup the caller has checked `env` is unseen.
    void record(std::size_t a, std::vector<std::size_t> steps, Env env) {
        if (dedup_) {
            log_.seen[a].insert(env);
            // Without bindings every later occurrence would be a duplicate.
            if (env.empty()) {
                saturated_[a] = true;
                for (auto& stage : stages_[a]) stage.clear();
            }
        }
        log_.atoms[a].push_back({a, test_, std::move(steps), std::move(env)});
    }

    const Plan& plan_;
    ChunkLog& log_;
    bool dedup_;
    std::size_t test_ = 0;
    std::vector<bool> saturated_;
    std::vector<std::vector<std::unordered_map<Env, std::vector<std::size_t>, ValueVectorHash>>> stages_;
    std::vector<std::vector<bool>> active_flag_;
    std::vector<std::pair<std::size_t, std::size_t>> active_;  // general-predicate stages with partials
    std::vector<Pending> pending_;
    std::vector<Env> scratch_;  // per atom, reused across steps
    std::vector<Memo> memo_;
    std::uint64_t step_ = 0;
};

void run_chunk(const Plan& plan, const trace::TestSuite& ts, std::size_t begin, std::size_t end,
               const HarvestOptions& options, ChunkLog& log) {
    Monitor monitor(plan, log, options.dedup);
    for (std::size_t t = begin; t < end; ++t) {
        monitor.begin_test(t);
        log.outcomes.push_back(trace::run_program(*plan.program, ts.tests[t], options.step_limit, &monitor));
    }
}

}  // namespace

OccurrenceLog harvest(const mini::LocatedProgram& p, const AtomTable& atoms, const trace::TestSuite& ts,
                      const HarvestOptions& options) {
    Plan plan(p, atoms);
    std::size_t n = ts.tests.size();
    int threads = options.threads > 0 ? options.threads : omp_get_max_threads();
    std::size_t chunk_count = options.parallel ? std::min<std::size_t>(n, static_cast<std::size_t>(threads) * 4) : 1;
    chunk_count = std::max<std::size_t>(chunk_count, 1);
    std::vector<ChunkLog> chunks(chunk_count);

    auto bounds = [&](std::size_t c) { return std::pair{n * c / chunk_count, n * (c + 1) / chunk_count}; };
    if (chunk_count == 1) {
        run_chunk(plan, ts, 0, n, options, chunks[0]);
    } else {
#pragma omp parallel for schedule(dynamic, 1) num_threads(threads)
        for (std::size_t c = 0; c < chunk_count; ++c) {
            auto [b, e] = bounds(c);
            run_chunk(plan, ts, b, e, options, chunks[c]);
        }
    }

    // Merging in chunk order keeps the first occurrence of every environment,
    // exactly as a single serial pass would.
    OccurrenceLog out;
    out.atoms.resize(atoms.size());
    out.outcomes.reserve(n);
    std::vector<std::unordered_set<Env, ValueVectorHash>> seen(chunk_count > 1 && options.dedup ? atoms.size() : 0);
    for (ChunkLog& c : chunks) {
        for (trace::Outcome& o : c.outcomes) out.outcomes.push_back(std::move(o));
        if (c.atoms.empty()) continue;
        for (std::size_t a = 0; a < atoms.size(); ++a) {
            if (chunk_count == 1 || !options.dedup) {
                auto& dst = out.atoms[a];
                dst.insert(dst.end(), std::make_move_iterator(c.atoms[a].begin()),
                           std::make_move_iterator(c.atoms[a].end()));
                continue;
            }
            for (Occurrence& occ : c.atoms[a])
                if (seen[a].insert(occ.env).second) out.atoms[a].push_back(std::move(occ));
        }
    }
    return out;
}

// ---------------------------------------------------------------------------
// Reference matcher over a recorded run

std::vector<Occurrence> match_atom(const mini::LocatedProgram& p, const Atom& atom, const trace::Run& run,
                                   std::size_t test) {
    // Candidate matches of each element, independent of the others.
    struct Hit {
        std::size_t step;
        Env env;
    };
    std::vector<std::vector<Hit>> hits(atom.elems.size());
    for (const trace::Step& s : run.steps) {
        trace::FrameScope scope(p, s.loc, s.state);
        for (std::size_t e = 0; e < atom.elems.size(); ++e) {
            if (atom.elems[e].loc != s.loc) continue;
            Env env(atom.env_size());
            if (eval_elem(atom.elems[e], scope, env)) hits[e].push_back({s.index, std::move(env)});
        }
    }

    // DP over (element, step, env): extend every partial with every later hit
    // whose open interval satisfies the path predicate.
    struct Partial {
        std::vector<std::size_t> steps;
        Env env;
    };
    std::vector<Partial> frontier;
    for (const Hit& h : hits[0]) frontier.push_back({{h.step}, h.env});
    for (std::size_t e = 1; e < atom.elems.size(); ++e) {
        const AtomElem& elem = atom.elems[e];
        std::map<std::pair<std::size_t, Env>, Partial> next;
        for (const Partial& part : frontier) {
            std::size_t k = part.steps.back();
            EnvSlots meta{&part.env};
            std::size_t j = k + 1;
            for (const Hit& h : hits[e]) {
                if (h.step <= k) continue;
                bool clear = true;
                for (; j < h.step; ++j) {
                    const trace::Step& mid = run.steps[j];
                    trace::FrameScope scope(p, mid.loc, mid.state);
                    if (!holds(*atom.path[e - 1], htl::PathScope<EnvSlots>(meta, scope))) {
                        clear = false;
                        break;
                    }
                }
                if (!clear) break;
                Partial ext = part;
                std::copy(h.env.begin() + static_cast<std::ptrdiff_t>(elem.offset),
                          h.env.begin() + static_cast<std::ptrdiff_t>(elem.offset + elem.bindings.size()),
                          ext.env.begin() + static_cast<std::ptrdiff_t>(elem.offset));
                ext.steps.push_back(h.step);
                auto key = std::pair{h.step, ext.env};
                auto it = next.find(key);
                if (it == next.end() || ext.steps < it->second.steps) next[key] = std::move(ext);
            }
        }
        frontier.clear();
        for (auto& [_, part] : next) frontier.push_back(std::move(part));
    }

    std::map<Env, std::vector<std::size_t>> best;
    for (Partial& part : frontier) {
        auto it = best.find(part.env);
        if (it == best.end() || part.steps < it->second) best[part.env] = part.steps;
    }
    std::vector<Occurrence> out;
    for (auto& [env, steps] : best) out.push_back({0, test, steps, env});
    std::sort(out.begin(), out.end(), [](const Occurrence& a, const Occurrence& b) { return a.steps < b.steps; });
    return out;
}

std::vector<Occurrence> match_sequence(const mini::LocatedProgram& p, const trace::Run& run, const htl::Term& seq,
                                       std::size_t test) {
    return match_atom(p, compile_atom(std::make_shared<htl::Term>(seq)), run, test);
}

}  // namespace htolcov::cov
