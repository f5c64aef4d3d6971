// Disjunctive normal form of hyperlabels: a sum of guarded conjunctions over
// atomic labels and sequences.
#pragma once

#include <cstddef>
#include <string>
#include <vector>

#include "htolcov/htol/hyperlabel.hpp"

namespace htolcov::htl {

inline constexpr std::size_t kDefaultDnfCap = 4096;

/// ⟨ls₁ · … · ls_p | ψ⟩. Atoms are Label or Sequence terms; ψ is kept as a
/// list of conjuncts, empty meaning `true`.
struct GuardedConjunction {
    std::vector<TermPtr> atoms;
    std::vector<ExprPtr> guard;
};

struct DNFHyperlabel {
    std::string id;
    std::string criterion;
    std::vector<GuardedConjunction> disjuncts;
};

class DnfCapExceeded : public Error {
public:
    using Error::Error;
};

/// Applies the rewriting rules bottom-up. Throws DnfCapExceeded when an
/// intermediate result would exceed `cap` disjuncts.
std::vector<GuardedConjunction> normalize_term(const Term& h, std::size_t cap = kDefaultDnfCap);
DNFHyperlabel normalize_dnf(const Hyperlabel& h, std::size_t cap = kDefaultDnfCap);

/// Top-level `&&` operands of ψ with literal `true` removed.
std::vector<ExprPtr> conjuncts(const ExprPtr& psi);
/// Conjunction of the guard list, `true` when empty.
ExprPtr guard_expr(const std::vector<ExprPtr>& guard);

/// The DNF as an ordinary hyperlabel term.
TermPtr to_term(const std::vector<GuardedConjunction>& dnf);
Hyperlabel to_hyperlabel(const DNFHyperlabel& d);

bool same_dnf(const std::vector<GuardedConjunction>& a, const std::vector<GuardedConjunction>& b);

/// One line in HTL syntax, as printed by `--dump-dnf`.
std::string print_dnf(const DNFHyperlabel& d);

}  // namespace htolcov::htl
