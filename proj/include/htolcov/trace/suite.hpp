// Line-oriented test-suite files: `id | x=1, flag=true, arr={1,2,3}`.
#pragma once

#include <cstdint>
#include <string>
#include <string_view>

#include "htolcov/trace/interpreter.hpp"

namespace htolcov::trace {

/// Parses a suite and checks every datum against the entry function's
/// parameters (exact cover, matching types and array lengths).
TestSuite parse_suite(std::string_view text, const mini::LocatedProgram& p);
TestSuite load_suite(const std::string& path, const mini::LocatedProgram& p);

std::string print_suite(const TestSuite& suite, const mini::LocatedProgram& p);

/// Throws SemanticError when `t` does not fit the entry function.
void check_datum(const TestDatum& t, const mini::LocatedProgram& p);

struct IntRange {
    std::int64_t lo = -100;
    std::int64_t hi = 100;
};

/// Seeded uniform random suite over the entry function's parameters. Ids are
/// `t1`..`tN`; the first N tests of a larger suite with the same seed are
/// identical.
TestSuite random_suite(const mini::LocatedProgram& p, std::size_t count, std::uint64_t seed,
                       IntRange range = {});

}  // namespace htolcov::trace
