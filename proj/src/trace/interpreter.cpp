#include "htolcov/trace/interpreter.hpp"

#include <sstream>

namespace htolcov::trace {

using mini::FunctionDef;
using mini::LocatedProgram;
using mini::Stmt;
using mini::StmtKind;

std::string to_string(const InputValue& v) {
    if (const Value* s = std::get_if<Value>(&v)) return htolcov::to_string(*s);
    const ArrayValue& a = std::get<ArrayValue>(v);
    std::string out = "{";
    for (std::size_t i = 0; i < a.size(); ++i) out += (i ? "," : "") + std::to_string(a[i]);
    return out + "}";
}

std::string to_string(const Outcome& o) {
    switch (o.kind) {
    case OutcomeKind::Returned:
        return o.value ? "returned(" + htolcov::to_string(*o.value) + ")" : "returned";
    case OutcomeKind::Error: return "error(" + o.error + ")";
    case OutcomeKind::StepLimit: return "step-limit";
    }
    return "?";
}

std::vector<std::pair<std::string, InputValue>> visible_variables(const LocatedProgram& p, LocationId loc,
                                                                  const State& state) {
    std::vector<std::pair<std::string, InputValue>> out;
    for (const mini::VisibleVar& v : p.location(loc).visible) {
        auto slot = static_cast<std::size_t>(v.slot);
        if (v.type.kind == TypeKind::IntArray)
            out.emplace_back(v.name, state.arrays[slot]);
        else
            out.emplace_back(v.name, state.scalars[slot]);
    }
    return out;
}

std::int32_t FrameScope::dynamic_slot(const Expr& var, bool want_array) const {
    const mini::VisibleVar* v = program_->location(loc_).find(var.name);
    if (!v) return -1;
    if ((v->type.kind == TypeKind::IntArray) != want_array) return -1;
    return v->slot;
}

namespace {

Value default_value(Type t) {
    return t.kind == TypeKind::Bool ? Value::boolean(false) : Value::integer(0);
}

struct Stop {
    OutcomeKind kind;
    std::string error;
};

class Interpreter {
public:
    Interpreter(const LocatedProgram& p, std::size_t limit, StepObserver* obs)
        : prog_(p), limit_(limit), observer_(obs) {}

    Outcome run(const TestDatum& t) {
        Outcome out;
        const FunctionDef& fn = prog_.entry();
        Frame frame = make_frame(prog_.entry_function);
        for (std::int32_t slot : fn.params) {
            const mini::Variable& v = fn.variables[static_cast<std::size_t>(slot)];
            auto it = t.values.find(v.name);
            if (it == t.values.end()) throw SemanticError({1, 1}, "test '" + t.id + "' lacks parameter '" + v.name + "'");
            store_input(frame, v, it->second);
        }
        try {
            std::optional<Value> result = invoke(fn, frame, 0);
            out.kind = OutcomeKind::Returned;
            out.value = result;
        } catch (const Stop& stop) {
            out.kind = stop.kind;
            out.error = stop.error;
        }
        out.steps = steps_;
        return out;
    }

private:
    Frame make_frame(std::size_t function) const {
        const FunctionDef& fn = prog_.functions[function];
        Frame f;
        f.function = function;
        f.scalars.assign(fn.slot_count(), Value::integer(0));
        f.arrays.resize(fn.slot_count());
        for (const mini::Variable& v : fn.variables) {
            auto slot = static_cast<std::size_t>(v.slot);
            if (v.type.kind == TypeKind::IntArray)
                f.arrays[slot].assign(v.type.length, 0);
            else
                f.scalars[slot] = default_value(v.type);
        }
        return f;
    }

    static void store_input(Frame& f, const mini::Variable& v, const InputValue& in) {
        auto slot = static_cast<std::size_t>(v.slot);
        if (v.type.kind == TypeKind::IntArray)
            f.arrays[slot] = std::get<ArrayValue>(in);
        else
            f.scalars[slot] = std::get<Value>(in);
    }

    void emit(LocationId loc, const Frame& frame) {
        if (steps_ >= limit_) throw Stop{OutcomeKind::StepLimit, ""};
        if (observer_) observer_->on_step(steps_, loc, frame);
        ++steps_;
    }

    Value eval(const Expr& e, LocationId loc, const Frame& frame) const {
        EvalResult r = evaluate(e, FrameScope(prog_, loc, frame));
        if (!r.ok()) throw Stop{OutcomeKind::Error, htolcov::to_string(r.error)};
        return r.value;
    }

    std::optional<Value> invoke(const FunctionDef& fn, Frame& frame, std::size_t depth) {
        if (depth >= kMaxCallDepth) throw Stop{OutcomeKind::Error, "call-depth"};
        emit(fn.entry, frame);
        bool returned = exec_block(fn.body, frame, depth);
        if (fn.return_type.kind == TypeKind::Void) return std::nullopt;
        return returned ? frame.scalars[static_cast<std::size_t>(fn.result_slot())] : default_value(fn.return_type);
    }

    Value call(const mini::CallSite& c, LocationId loc, const Frame& caller, std::size_t depth) {
        const FunctionDef& g = prog_.functions[c.function];
        Frame callee = make_frame(c.function);
        for (std::size_t i = 0; i < c.args.size(); ++i) {
            const mini::Variable& param = g.variables[static_cast<std::size_t>(g.params[i])];
            auto slot = static_cast<std::size_t>(param.slot);
            const Expr& arg = *c.args[i];
            if (param.type.kind == TypeKind::IntArray)
                callee.arrays[slot] = caller.arrays[static_cast<std::size_t>(arg.slot)];
            else
                callee.scalars[slot] = eval(arg, loc, caller);
        }
        std::optional<Value> r = invoke(g, callee, depth + 1);
        return r.value_or(Value::integer(0));
    }

    // Returns true when a return statement was executed.
    bool exec_block(const std::vector<Stmt>& stmts, Frame& frame, std::size_t depth) {
        for (const Stmt& s : stmts)
            if (exec(s, frame, depth)) return true;
        return false;
    }

    bool exec(const Stmt& s, Frame& frame, std::size_t depth) {
        switch (s.kind) {
        case StmtKind::Decl: {
            auto slot = static_cast<std::size_t>(s.slot);
            if (s.decl_type.kind == TypeKind::IntArray) {
                frame.arrays[slot].assign(s.decl_type.length, 0);
            } else if (s.call) {
                frame.scalars[slot] = call(*s.call, s.loc, frame, depth);
            } else if (s.value) {
                frame.scalars[slot] = eval(*s.value, s.loc, frame);
            } else {
                frame.scalars[slot] = default_value(s.decl_type);
            }
            emit(s.loc, frame);
            return false;
        }
        case StmtKind::Assign: {
            auto slot = static_cast<std::size_t>(s.slot);
            std::int64_t index = 0;
            if (s.index) index = eval(*s.index, s.loc, frame).data;
            Value v = s.call ? call(*s.call, s.loc, frame, depth) : eval(*s.value, s.loc, frame);
            if (s.index) {
                ArrayValue& arr = frame.arrays[slot];
                if (index < 0 || static_cast<std::uint64_t>(index) >= arr.size())
                    throw Stop{OutcomeKind::Error, htolcov::to_string(EvalError::OutOfBounds)};
                arr[static_cast<std::size_t>(index)] = v.data;
            } else {
                frame.scalars[slot] = v;
            }
            emit(s.loc, frame);
            return false;
        }
        case StmtKind::Call:
            call(*s.call, s.loc, frame, depth);
            emit(s.loc, frame);
            return false;
        case StmtKind::If: {
            bool cond = eval(*s.value, s.loc, frame).truthy();
            emit(s.loc, frame);
            return exec_block(cond ? s.body : s.else_body, frame, depth);
        }
        case StmtKind::While:
            for (;;) {
                bool cond = eval(*s.value, s.loc, frame).truthy();
                emit(s.loc, frame);
                if (!cond) return false;
                if (exec_block(s.body, frame, depth)) return true;
            }
        case StmtKind::Return: {
            const FunctionDef& fn = prog_.functions[frame.function];
            if (s.value) frame.scalars[static_cast<std::size_t>(fn.result_slot())] = eval(*s.value, s.loc, frame);
            emit(s.loc, frame);
            return true;
        }
        }
        return false;
    }

    const LocatedProgram& prog_;
    std::size_t limit_;
    StepObserver* observer_;
    std::size_t steps_ = 0;
};

class Recorder : public StepObserver {
public:
    explicit Recorder(Run& run) : run_(run) {}
    void on_step(std::size_t index, LocationId loc, const Frame& frame) override {
        run_.steps.push_back({index, loc, frame});
    }

private:
    Run& run_;
};

}  // namespace

Outcome run_program(const LocatedProgram& p, const TestDatum& t, std::size_t step_limit, StepObserver* observer) {
    return Interpreter(p, step_limit, observer).run(t);
}

Run execute(const LocatedProgram& p, const TestDatum& t, std::size_t step_limit) {
    Run run;
    run.test_id = t.id;
    Recorder rec(run);
    run.outcome = run_program(p, t, step_limit, &rec);
    return run;
}

std::vector<Reach> reaches(const Run& run, LocationId loc) {
    std::vector<Reach> out;
    for (const Step& s : run.steps)
        if (s.loc == loc) out.push_back({s.index, &s.state});
    return out;
}

}  // namespace htolcov::trace
