// Brute-force reference semantics of hyperlabel coverage, for testing only.
// Applies the Label/Guard/Conj/Disj/Sequence inference rules directly to
// recorded runs, enumerating total environments over the visible names.
#pragma once

#include <map>
#include <string>
#include <vector>

#include "htolcov/htol/hyperlabel.hpp"
#include "htolcov/trace/interpreter.hpp"

namespace htolcov::oracle {

using Domains = std::map<std::string, std::vector<Value>>;

struct Limits {
    std::size_t max_names = 6;
    std::size_t max_environments = 1u << 16;
    std::size_t step_limit = 200;
};

class Refused : public Error {
public:
    using Error::Error;
};

/// ⟨TS, E⟩ ⊩ h over already recorded runs.
bool covers_with(const htl::Term& h, const mini::LocatedProgram& p, const std::vector<trace::Run>& runs,
                 const htl::Environment& env);

/// TS ⊩ h: some total environment over NM(h), drawn from `domains` plus
/// every value the bindings take in the runs, satisfies the rules. Throws
/// Refused when the instance exceeds `limits`.
bool oracle_covers(const htl::Term& h, const mini::LocatedProgram& p, const trace::TestSuite& ts,
                   const Domains& domains = {}, const Limits& limits = {});

}  // namespace htolcov::oracle
