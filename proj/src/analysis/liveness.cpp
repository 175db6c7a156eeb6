#include "leakfix/analysis/liveness.hpp"

namespace leakfix::analysis {

Liveness compute_liveness(const Cfg& cfg, const ir::ProcDef& proc) {
    const std::size_t n = proc.blocks.size();
    std::vector<VarSet> mentions(n);
    for (std::size_t b = 0; b < n; ++b)
        for (const auto& instr : proc.blocks[b].instrs)
            if (auto v = ir::mentioned_local(instr)) mentions[b].insert(*v);

    Liveness lv;
    lv.live_in.assign(n, {});
    lv.live_out.assign(n, {});
    bool changed = true;
    while (changed) {
        changed = false;
        for (std::size_t k = n; k-- > 0;) {
            VarSet out;
            for (auto s : cfg.nodes[k].successors) out.insert(lv.live_in[s].begin(), lv.live_in[s].end());
            for (auto h : cfg.nodes[k].handlers) out.insert(lv.live_in[h].begin(), lv.live_in[h].end());
            VarSet in = out;
            in.insert(mentions[k].begin(), mentions[k].end());
            if (out != lv.live_out[k] || in != lv.live_in[k]) {
                lv.live_out[k] = std::move(out);
                lv.live_in[k] = std::move(in);
                changed = true;
            }
        }
    }

    lv.after.resize(n);
    for (std::size_t b = 0; b < n; ++b) {
        const auto& instrs = proc.blocks[b].instrs;
        lv.after[b].resize(instrs.size());
        VarSet running = lv.live_out[b];
        for (std::size_t i = instrs.size(); i-- > 0;) {
            lv.after[b][i] = running;
            if (auto v = ir::mentioned_local(instrs[i])) running.insert(*v);
        }
    }
    return lv;
}

}  // namespace leakfix::analysis
