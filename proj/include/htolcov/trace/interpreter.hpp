// Tracing interpreter: runs a LocatedProgram on one test datum and reports
// every (step, location, state) triple.
#pragma once

#include <map>
#include <optional>
#include <string>
#include <variant>
#include <vector>

#include "htolcov/minilang/program.hpp"

namespace htolcov::trace {

inline constexpr std::size_t kDefaultStepLimit = 1'000'000;
inline constexpr std::size_t kMaxCallDepth = 256;

using InputValue = std::variant<Value, ArrayValue>;

std::string to_string(const InputValue& v);

struct TestDatum {
    std::string id;
    std::map<std::string, InputValue> values;  // one entry per entry-function parameter
};

struct TestSuite {
    std::vector<TestDatum> tests;
};

/// Variable storage of one activation. Slots not in scope at the current
/// location hold stale or default values and must not be observed.
struct Frame {
    std::size_t function = 0;
    std::vector<Value> scalars;
    std::vector<ArrayValue> arrays;
};

/// A state is a snapshot of the active frame.
using State = Frame;

/// The in-scope variables of `state` at `loc`, by name.
std::vector<std::pair<std::string, InputValue>> visible_variables(const mini::LocatedProgram& p,
                                                                  LocationId loc, const State& state);

enum class OutcomeKind : std::uint8_t { Returned, Error, StepLimit };

struct Outcome {
    OutcomeKind kind = OutcomeKind::Returned;
    std::optional<Value> value;  // Returned from a non-void entry function
    std::string error;           // Error: kind of the runtime error
    std::size_t steps = 0;       // number of steps emitted
};

std::string to_string(const Outcome& o);

struct Step {
    std::size_t index = 0;
    LocationId loc = 0;
    State state;
};

struct Run {
    std::string test_id;
    std::vector<Step> steps;
    Outcome outcome;
};

/// Receives every step as it happens; `frame` is only valid during the call.
class StepObserver {
public:
    virtual ~StepObserver() = default;
    virtual void on_step(std::size_t index, LocationId loc, const Frame& frame) = 0;
};

/// Streams the execution to `observer` (may be null) without recording it.
Outcome run_program(const mini::LocatedProgram& p, const TestDatum& t, std::size_t step_limit,
                    StepObserver* observer);

/// Executes and records the full run.
Run execute(const mini::LocatedProgram& p, const TestDatum& t, std::size_t step_limit = kDefaultStepLimit);

struct Reach {
    std::size_t index;
    const State* state;
};

/// Every step of `run` at `loc`, in order.
std::vector<Reach> reaches(const Run& run, LocationId loc);

/// Expression scope over a frame at a location. Program variables resolved
/// by slot are read directly; dynamic references are looked up by name in
/// the location's scope. Metavariables are never visible.
class FrameScope {
public:
    FrameScope(const mini::LocatedProgram& p, LocationId loc, const Frame& frame)
        : program_(&p), loc_(loc), frame_(&frame) {}

    const Value* scalar(const Expr& var) const {
        std::int32_t slot = var.role == VarRole::Program ? var.slot : dynamic_slot(var, false);
        if (slot < 0) return nullptr;
        return &frame_->scalars[static_cast<std::size_t>(slot)];
    }
    const ArrayValue* array(const Expr& var) const {
        std::int32_t slot = var.role == VarRole::Program ? var.slot : dynamic_slot(var, true);
        if (slot < 0) return nullptr;
        return &frame_->arrays[static_cast<std::size_t>(slot)];
    }
    const Value* meta(const Expr&) const { return nullptr; }
    std::optional<LocationId> pc() const { return loc_; }

    [[nodiscard]] LocationId location() const { return loc_; }
    [[nodiscard]] const Frame& frame() const { return *frame_; }
    [[nodiscard]] const mini::LocatedProgram& program() const { return *program_; }

private:
    std::int32_t dynamic_slot(const Expr& var, bool want_array) const;

    const mini::LocatedProgram* program_;
    LocationId loc_;
    const Frame* frame_;
};

}  // namespace htolcov::trace
