#include "leakfix/analysis/cfg.hpp"

#include <algorithm>

namespace leakfix::analysis {

Cfg build_cfg(const ir::ProcDef& proc) {
    Cfg g;
    g.nodes.resize(proc.blocks.size());
    for (std::size_t i = 0; i < proc.blocks.size(); ++i) {
        g.nodes[i].label = proc.blocks[i].label;
        g.index.emplace(proc.blocks[i].label, i);
    }
    auto resolve = [&](const std::string& label) {
        auto it = g.index.find(label);
        if (it == g.index.end())
            throw ir::IrError(ir::IrError::Kind::UnresolvedLabel, proc.name.str() + ": unknown label " + label);
        return it->second;
    };
    for (std::size_t i = 0; i < proc.blocks.size(); ++i) {
        const auto& b = proc.blocks[i];
        for (const auto& s : b.successors) {
            std::size_t t = resolve(s);
            g.nodes[i].successors.push_back(t);
            g.nodes[t].normal_preds.push_back(i);
        }
        for (const auto& h : b.handlers) {
            std::size_t t = resolve(h);
            g.nodes[i].handlers.push_back(t);
            g.nodes[t].exceptional_preds.push_back(i);
        }
        if (b.is_exit()) g.exits.push_back(i);
    }
    return g;
}

std::vector<std::size_t> Cfg::reverse_postorder() const {
    std::vector<std::size_t> post;
    if (nodes.empty()) return post;
    std::vector<char> seen(nodes.size(), 0);
    // iterative DFS: (node, next child position)
    std::vector<std::pair<std::size_t, std::size_t>> stack{{entry, 0}};
    seen[entry] = 1;
    while (!stack.empty()) {
        auto& [n, k] = stack.back();
        const auto& node = nodes[n];
        std::size_t total = node.successors.size() + node.handlers.size();
        if (k < total) {
            std::size_t child = k < node.successors.size() ? node.successors[k] : node.handlers[k - node.successors.size()];
            ++k;
            if (!seen[child]) {
                seen[child] = 1;
                stack.push_back({child, 0});
            }
        } else {
            post.push_back(n);
            stack.pop_back();
        }
    }
    std::reverse(post.begin(), post.end());
    return post;
}

}  // namespace leakfix::analysis
