// Coverage measurement: harvesting label and sequence occurrences from runs,
// then consolidating them against hyperlabels in normal form.
#pragma once

#include <cstddef>
#include <map>
#include <optional>
#include <string>
#include <unordered_map>
#include <vector>

#include "htolcov/htol/dnf.hpp"
#include "htolcov/trace/interpreter.hpp"

namespace htolcov::cov {

inline constexpr std::size_t kDefaultBudget = 1'000'000;

/// One element of an atom: a label at `loc` with bindings stored at
/// env[offset + i].
struct AtomElem {
    LocationId loc = 0;
    ExprPtr pred;
    std::vector<ExprPtr> bindings;
    std::size_t offset = 0;
};

/// An atomic label or a sequence, ready for monitoring. Path predicates have
/// their metavariable slots rewritten to env indices.
struct Atom {
    htl::TermPtr term;
    bool sequence = false;
    std::vector<AtomElem> elems;
    std::vector<ExprPtr> path;
    std::vector<std::string> names;  // env layout

    [[nodiscard]] std::size_t env_size() const { return names.size(); }
};

/// Structurally equal atoms across all hyperlabels share one entry.
class AtomTable {
public:
    std::size_t intern(const htl::TermPtr& atom);
    [[nodiscard]] const Atom& operator[](std::size_t i) const { return atoms_[i]; }
    [[nodiscard]] std::size_t size() const { return atoms_.size(); }
    [[nodiscard]] const std::vector<Atom>& atoms() const { return atoms_; }

private:
    std::vector<Atom> atoms_;
    std::unordered_map<std::string, std::size_t> index_;
};

Atom compile_atom(const htl::TermPtr& atom);

/// A normal-form hyperlabel whose atoms are indices into an AtomTable.
struct PlannedHyperlabel {
    htl::DNFHyperlabel dnf;
    std::vector<std::vector<std::size_t>> atom_ids;  // per disjunct, per atom
};

PlannedHyperlabel plan(htl::DNFHyperlabel dnf, AtomTable& table);

struct Occurrence {
    std::size_t atom = 0;
    std::size_t test = 0;             // index into the suite
    std::vector<std::size_t> steps;   // one step per sequence element
    std::vector<Value> env;           // laid out as Atom::names
};

struct OccurrenceLog {
    std::vector<std::vector<Occurrence>> atoms;  // per atom id
    std::vector<trace::Outcome> outcomes;        // per test
};

struct HarvestOptions {
    std::size_t step_limit = trace::kDefaultStepLimit;
    bool dedup = true;     // store each (atom, env) once
    bool parallel = true;  // OpenMP over contiguous test chunks
    int threads = 0;       // 0: OpenMP default
};

/// Runs every test once and records every occurrence of every atom. The log
/// is identical whatever the thread count.
OccurrenceLog harvest(const mini::LocatedProgram& p, const AtomTable& atoms, const trace::TestSuite& ts,
                      const HarvestOptions& options = {});

/// Reference matcher over a recorded run: every environment-distinct match
/// of the atom, each with its earliest step tuple.
std::vector<Occurrence> match_atom(const mini::LocatedProgram& p, const Atom& atom, const trace::Run& run,
                                   std::size_t test = 0);

/// Same, for a sequence term.
std::vector<Occurrence> match_sequence(const mini::LocatedProgram& p, const trace::Run& run, const htl::Term& seq,
                                       std::size_t test = 0);

enum class Status : std::uint8_t { Covered, Uncovered, UnknownBudget };

const char* to_string(Status s);

struct Witness {
    std::size_t disjunct = 0;
    std::vector<std::size_t> occurrences;  // per atom of the disjunct, index into the atom's log
};

struct Verdict {
    std::string id;
    std::string criterion;
    Status status = Status::Uncovered;
    std::optional<Witness> witness;
    std::size_t combinations = 0;  // candidate choices examined
};

/// Decides one hyperlabel. Disjuncts are tried left to right and the search
/// stops at the first witness.
Verdict consolidate(const PlannedHyperlabel& h, const AtomTable& atoms, const OccurrenceLog& log,
                    std::size_t budget = kDefaultBudget);

/// The environment a witness assigns to the visible names of its disjunct.
htl::Environment witness_env(const PlannedHyperlabel& h, const AtomTable& atoms, const OccurrenceLog& log,
                             const Witness& w);

/// Replays a witness: every chosen occurrence exists and the guard holds.
bool replay_witness(const PlannedHyperlabel& h, const AtomTable& atoms, const OccurrenceLog& log, const Witness& w);

struct Score {
    std::size_t covered = 0;
    std::size_t total = 0;
    std::size_t unknown = 0;  // unknown-budget verdicts, counted as uncovered
    bool empty = false;       // no objectives: score defined as 1

    [[nodiscard]] double value() const {
        return total == 0 ? 1.0 : static_cast<double>(covered) / static_cast<double>(total);
    }
};

Score coverage_score(const std::vector<Verdict>& verdicts);

/// normalize → plan → harvest → consolidate for a set of hyperlabels.
struct Measurement {
    AtomTable atoms;
    std::vector<PlannedHyperlabel> planned;
    OccurrenceLog log;
    std::vector<Verdict> verdicts;
    Score score;
};

struct MeasureOptions {
    HarvestOptions harvest;
    std::size_t budget = kDefaultBudget;
    std::size_t dnf_cap = htl::kDefaultDnfCap;
};

Measurement measure_hyperlabels(const mini::LocatedProgram& p, const std::vector<htl::Hyperlabel>& hs,
                                const trace::TestSuite& ts, const MeasureOptions& options = {});

}  // namespace htolcov::cov
