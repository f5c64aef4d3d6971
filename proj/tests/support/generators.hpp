// Seeded random MiniImp programs, suites and well-formed hyperlabels for
// property tests. Everything is generated as source text and goes through
// the real parsers.
#pragma once

#include <cstdint>
#include <random>
#include <string>
#include <vector>

#include "htolcov/htol/hyperlabel.hpp"
#include "htolcov/trace/suite.hpp"

namespace htolcov::testing {

using Rng = std::mt19937_64;

struct ProgramShape {
    std::size_t max_locations = 12;
    std::size_t max_conditions = 3;  // atomic conditions per decision
    bool loops = true;
    bool helper = true;  // a second function called from the entry
};

/// MiniImp source for `int main(int x, int y, bool b)` and, optionally, a
/// helper `int g(int u)`. Loops are bounded; runs always terminate.
std::string random_program_text(Rng& rng, const ProgramShape& shape = {});

mini::ProgramPtr random_program(Rng& rng, const ProgramShape& shape = {});

/// Small-range suite so that bound values collide across tests.
trace::TestSuite small_suite(const mini::LocatedProgram& p, Rng& rng, std::size_t max_tests = 4);

struct HyperlabelShape {
    std::size_t max_depth = 3;
    std::size_t max_names = 4;
};

/// Text of one well-formed objective `id = term` over `p`.
std::string random_hyperlabel_text(Rng& rng, const mini::LocatedProgram& p, const std::string& id,
                                   const HyperlabelShape& shape = {});

htl::Hyperlabel random_hyperlabel(Rng& rng, const mini::LocatedProgram& p, const std::string& id = "h",
                                  const HyperlabelShape& shape = {});

/// Uniform integer in [lo, hi].
std::int64_t uniform(Rng& rng, std::int64_t lo, std::int64_t hi);
bool chance(Rng& rng, double p);

}  // namespace htolcov::testing
