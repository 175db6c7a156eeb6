#pragma once

#include <set>
#include <string>
#include <vector>

#include "leakfix/analysis/cfg.hpp"

namespace leakfix::analysis {

using VarSet = std::set<std::string>;

/// Backward may-liveness of locals over normal and exceptional edges. Any
/// mention counts as a use: `load &v` and `store &v <- ...` alike, so there
/// is no kill set. Handlers are successors of the whole block.
struct Liveness {
    std::vector<VarSet> live_in;   // per block index
    std::vector<VarSet> live_out;  // per block index
    // after[b][i]: locals mentioned on some path starting right after
    // instruction i of block b.
    std::vector<std::vector<VarSet>> after;

    const VarSet& live_after(std::size_t block, std::size_t instr) const { return after[block][instr]; }
};

Liveness compute_liveness(const Cfg& cfg, const ir::ProcDef& proc);

}  // namespace leakfix::analysis
