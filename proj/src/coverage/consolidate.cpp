#include <algorithm>
#include <map>
#include <unordered_map>

#include "htolcov/coverage/engine.hpp"

namespace htolcov::cov {

namespace {

using Env = std::vector<Value>;

struct FlatScope {
    const std::vector<Value>* values;
    const Value* scalar(const Expr&) const { return nullptr; }
    const ArrayValue* array(const Expr&) const { return nullptr; }
    const Value* meta(const Expr& v) const { return &(*values)[static_cast<std::size_t>(v.slot)]; }
    std::optional<LocationId> pc() const { return std::nullopt; }
};

/// Search state for one guarded conjunction. Only atoms whose bindings the
/// guard reads are branched on; the others take their first occurrence.
class DisjunctSearch {
public:
    DisjunctSearch(const htl::GuardedConjunction& c, const std::vector<std::size_t>& ids, const AtomTable& atoms,
                   const OccurrenceLog& log)
        : ids_(ids), log_(log) {
        // Flat layout: every atom's env at a fixed offset.
        std::map<std::string, std::pair<std::size_t, std::size_t>> where;  // name -> (position, slot)
        std::size_t total = 0;
        for (std::size_t pos = 0; pos < ids.size(); ++pos) {
            const Atom& a = atoms[ids[pos]];
            offsets_.push_back(total);
            for (std::size_t s = 0; s < a.names.size(); ++s) where.emplace(a.names[s], std::pair{pos, s});
            total += a.names.size();
        }
        values_.resize(total);

        std::vector<std::vector<std::size_t>> used(ids.size());  // slots read per position
        for (const ExprPtr& g : c.guard) {
            std::size_t last = 0;
            bool any = false;
            ExprPtr compiled = rewrite_vars(g, [&](Expr& v) {
                if (v.role != VarRole::Meta) return;
                auto [pos, slot] = where.at(v.name);
                v.slot = static_cast<std::int32_t>(offsets_[pos] + slot);
                used[pos].push_back(slot);
                last = any ? std::max(last, pos) : pos;
                any = true;
            });
            conjuncts_.push_back({compiled, last, any});
        }

        for (std::size_t pos = 0; pos < ids.size(); ++pos) {
            auto& slots = used[pos];
            std::sort(slots.begin(), slots.end());
            slots.erase(std::unique(slots.begin(), slots.end()), slots.end());
            if (!slots.empty()) branch_.push_back({pos, slots, {}});
        }
        // Candidates: first occurrence of each distinct projection.
        for (Branch& b : branch_) {
            std::unordered_map<Env, std::size_t, ValueVectorHash> seen;
            const auto& occs = log.atoms[ids[b.position]];
            for (std::size_t i = 0; i < occs.size(); ++i) {
                Env key;
                for (std::size_t s : b.slots) key.push_back(occs[i].env[s]);
                if (seen.emplace(std::move(key), i).second) b.candidates.push_back(i);
            }
        }
        // Each conjunct is checked as soon as its last atom is assigned.
        for (Conjunct& cj : conjuncts_) {
            cj.depth = 0;
            if (!cj.reads_env) continue;
            for (std::size_t d = 0; d < branch_.size(); ++d)
                if (branch_[d].position <= cj.last_position) cj.depth = d + 1;
        }
        choice_.assign(ids.size(), 0);
    }

    /// Returns Covered, Uncovered, or UnknownBudget when `budget` runs out.
    Status run(std::size_t& budget, std::size_t& used) {
        for (std::size_t pos = 0; pos < ids_.size(); ++pos)
            if (log_.atoms[ids_[pos]].empty()) return Status::Uncovered;
        if (!check_depth(0)) return Status::Uncovered;
        return search(0, budget, used);
    }

    [[nodiscard]] const std::vector<std::size_t>& choice() const { return choice_; }

private:
    struct Branch {
        std::size_t position;
        std::vector<std::size_t> slots;
        std::vector<std::size_t> candidates;
    };
    struct Conjunct {
        ExprPtr expr;
        std::size_t last_position;
        bool reads_env;
        std::size_t depth = 0;
    };

    bool check_depth(std::size_t depth) const {
        FlatScope scope{&values_};
        for (const Conjunct& c : conjuncts_)
            if (c.depth == depth && !holds(*c.expr, scope)) return false;
        return true;
    }

    Status search(std::size_t d, std::size_t& budget, std::size_t& used) {
        if (d == branch_.size()) return Status::Covered;
        Branch& b = branch_[d];
        const auto& occs = log_.atoms[ids_[b.position]];
        for (std::size_t i : b.candidates) {
            if (budget == 0) return Status::UnknownBudget;
            --budget;
            ++used;
            const Env& env = occs[i].env;
            for (std::size_t s : b.slots) values_[offsets_[b.position] + s] = env[s];
            if (!check_depth(d + 1)) continue;
            Status r = search(d + 1, budget, used);
            if (r != Status::Uncovered) {
                if (r == Status::Covered) choice_[b.position] = i;
                return r;
            }
        }
        return Status::Uncovered;
    }

    const std::vector<std::size_t>& ids_;
    const OccurrenceLog& log_;
    std::vector<std::size_t> offsets_;
    std::vector<Value> values_;
    std::vector<Conjunct> conjuncts_;
    std::vector<Branch> branch_;
    std::vector<std::size_t> choice_;
};

}  // namespace

Verdict consolidate(const PlannedHyperlabel& h, const AtomTable& atoms, const OccurrenceLog& log,
                    std::size_t budget) {
    Verdict v;
    v.id = h.dnf.id;
    v.criterion = h.dnf.criterion;
    bool unknown = false;
    for (std::size_t d = 0; d < h.dnf.disjuncts.size(); ++d) {
        DisjunctSearch search(h.dnf.disjuncts[d], h.atom_ids[d], atoms, log);
        Status s = search.run(budget, v.combinations);
        if (s == Status::Covered) {
            v.status = Status::Covered;
            v.witness = Witness{d, search.choice()};
            return v;
        }
        if (s == Status::UnknownBudget) unknown = true;
    }
    v.status = unknown ? Status::UnknownBudget : Status::Uncovered;
    return v;
}

htl::Environment witness_env(const PlannedHyperlabel& h, const AtomTable& atoms, const OccurrenceLog& log,
                             const Witness& w) {
    htl::Environment env;
    const auto& ids = h.atom_ids.at(w.disjunct);
    for (std::size_t pos = 0; pos < ids.size(); ++pos) {
        const Atom& a = atoms[ids[pos]];
        const Occurrence& occ = log.atoms.at(ids[pos]).at(w.occurrences.at(pos));
        for (std::size_t s = 0; s < a.names.size(); ++s) env[a.names[s]] = occ.env[s];
    }
    return env;
}

bool replay_witness(const PlannedHyperlabel& h, const AtomTable& atoms, const OccurrenceLog& log, const Witness& w) {
    if (w.disjunct >= h.dnf.disjuncts.size()) return false;
    const auto& ids = h.atom_ids[w.disjunct];
    if (w.occurrences.size() != ids.size()) return false;
    for (std::size_t pos = 0; pos < ids.size(); ++pos)
        if (w.occurrences[pos] >= log.atoms[ids[pos]].size()) return false;
    htl::Environment env = witness_env(h, atoms, log, w);
    for (const ExprPtr& g : h.dnf.disjuncts[w.disjunct].guard)
        if (!htl::eval_guard(*g, env)) return false;
    return true;
}

}  // namespace htolcov::cov
