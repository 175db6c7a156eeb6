#pragma once

#include <string>
#include <unordered_map>
#include <vector>

#include "leakfix/ir/model.hpp"

namespace leakfix::analysis {

/// Control-flow graph over block indices. Normal edges come from successor
/// lists, exceptional edges from handler lists; predecessors are kept per
/// edge kind. Every block is a node, reachable or not.
struct Cfg {
    struct Node {
        std::string label;
        std::vector<std::size_t> successors;
        std::vector<std::size_t> handlers;
        std::vector<std::size_t> normal_preds;
        std::vector<std::size_t> exceptional_preds;
    };

    std::vector<Node> nodes;
    std::size_t entry = 0;
    std::vector<std::size_t> exits;
    std::unordered_map<std::string, std::size_t> index;

    std::size_t at(const std::string& label) const { return index.at(label); }
    bool is_exit(std::size_t n) const { return nodes[n].successors.empty(); }

    /// Blocks reachable from the entry over both edge kinds, in reverse
    /// postorder (successors before handlers, in list order).
    std::vector<std::size_t> reverse_postorder() const;
};

Cfg build_cfg(const ir::ProcDef& proc);

}  // namespace leakfix::analysis
