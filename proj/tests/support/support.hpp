#pragma once

// Generators and brute-force oracles shared by the unit tests and the
// acceptance binary.

#include <cstdint>
#include <random>
#include <string>
#include <vector>

#include "leakfix/ir/model.hpp"
#include "leakfix/minijava/ast.hpp"

namespace testsupport {

std::string data_path(const std::string& name);
std::string read_data(const std::string& name);

/// Portable draws: modulo on the raw engine output.
class Rand {
public:
    explicit Rand(std::uint64_t seed) : engine_(seed) {}
    std::size_t below(std::size_t n) { return static_cast<std::size_t>(engine_() % n); }
    bool chance(std::size_t one_in) { return below(one_in) == 0; }

private:
    std::mt19937_64 engine_;
};

struct IrGenOptions {
    std::size_t max_procs = 2;
    std::size_t max_blocks = 6;
    std::size_t max_instrs = 5;
};

/// A well-formed program: unique labels, resolved edges, exit blocks
/// without handlers, temps defined once per block and used only after
/// their definition in the same block.
leakfix::ir::Program random_program(Rand& rng, const IrGenOptions& opts = {});

/// The same program with every temp renamed by a random injective map
/// (per block, preserving block-scoped consistency).
leakfix::ir::Program permute_temps(const leakfix::ir::Program& p, Rand& rng);

/// Any AST the subset grammar can express, for print/parse round trips.
leakfix::minijava::SourceUnit random_unit(Rand& rng);

/// Exponential recursive Levenshtein distance, no memo.
std::size_t brute_edit_distance(const std::vector<std::string>& a, const std::vector<std::string>& b);

/// Rewrites `r.T.m(args)` as `T.m(r, args)` so the two call syntaxes of
/// the reference IR compare equal.
leakfix::ir::ProcDef virtual_to_static(const leakfix::ir::ProcDef& proc);

/// Per-block temp canonicalization and structural comparison under the
/// label bijection forced by walking both procedures from their entries
/// (successors and handlers matched positionally). On mismatch, why is set.
bool equal_up_to_labels(const leakfix::ir::ProcDef& a, const leakfix::ir::ProcDef& b, std::string* why = nullptr);

/// Count of (load &v, v.close()) pairs in a procedure.
std::size_t count_close_pairs(const leakfix::ir::ProcDef& proc, const std::string& close_method = "close");

/// Whether `fixed` equals `original` with only `load &v` + close pairs
/// inserted (per block, as a supersequence).
bool only_close_pairs_inserted(const leakfix::ir::ProcDef& original, const leakfix::ir::ProcDef& fixed,
                               const std::string& close_method = "close");

}  // namespace testsupport
