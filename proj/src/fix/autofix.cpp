#include "leakfix/fix/autofix.hpp"

#include <algorithm>
#include <map>

#include "leakfix/ir/canonical.hpp"

namespace leakfix::fix {

namespace {

struct Insertion {
    std::size_t site_order;  // report position in allocation order
    std::string var;
    ir::TypeName cls;
};

}  // namespace

FixPlan plan_fix(const ir::ProcDef& proc, const analysis::LeakReport& report) {
    const std::string where = proc.name.str();
    if (report.proc != where) throw FixError("report for " + report.proc + " applied to " + where);
    if (report.var_is_temp || report.var.empty())
        throw FixError(where + ": resource at " + report.site.str() + " has no local variable to load from");
    const ir::Block* site_block = proc.find_block(report.site.block);
    if (!site_block || report.site.index >= site_block->instrs.size() ||
        !std::holds_alternative<ir::Alloc>(site_block->instrs[report.site.index]))
        throw FixError(where + ": stale report, no allocation at " + report.site.str());
    const ir::Block* use_block = proc.find_block(report.last_use.block);
    if (!use_block || report.last_use.index >= use_block->instrs.size())
        throw FixError(where + ": stale report, no instruction at " + report.last_use.str());
    std::optional<std::string> expected_handler;
    if (!use_block->handlers.empty()) expected_handler = use_block->handlers.front();
    if (report.handler_of_last_use != expected_handler)
        throw FixError(where + ": stale report, handler of #" + use_block->label + " changed");

    FixPlan plan;
    plan.report = report;
    plan.normal_insertion = {report.last_use.block, report.last_use.index + 1};
    plan.handler_insertion = expected_handler;
    for (const auto& h : report.dead_handlers) {
        if (!proc.find_block(h)) throw FixError(where + ": stale report, no block #" + h);
        plan.extra_insertions.push_back(h);
    }
    return plan;
}

ir::ProcDef fix_procedure(const ir::ProcDef& proc, const std::vector<analysis::LeakReport>& reports,
                          const std::string& close_method) {
    if (reports.empty()) return proc;

    std::vector<FixPlan> plans;
    for (const auto& r : reports) plans.push_back(plan_fix(proc, r));

    // allocation order of the reported sites
    std::vector<std::size_t> order(plans.size());
    for (std::size_t k = 0; k < order.size(); ++k) order[k] = k;
    auto site_key = [&](std::size_t k) {
        return std::pair(*proc.block_index(plans[k].report.site.block), plans[k].report.site.index);
    };
    std::stable_sort(order.begin(), order.end(), [&](auto a, auto b) { return site_key(a) < site_key(b); });

    std::map<std::pair<std::string, std::size_t>, std::vector<Insertion>> at;
    for (std::size_t rank = 0; rank < order.size(); ++rank) {
        const FixPlan& p = plans[order[rank]];
        const auto& alloc =
            std::get<ir::Alloc>(proc.find_block(p.report.site.block)->instrs[p.report.site.index]);
        Insertion ins{rank, p.report.var, alloc.cls};
        at[{p.normal_insertion.block, p.normal_insertion.index}].push_back(ins);
        if (p.handler_insertion) at[{*p.handler_insertion, 0}].push_back(ins);
        for (const auto& h : p.extra_insertions) at[{h, 0}].push_back(ins);
    }

    const auto highest = ir::max_temp_number(proc);
    std::uint64_t next = highest ? *highest + 1 : 0;

    ir::ProcDef out = proc;
    // Process insertion points from the highest index down so earlier
    // indices in the same block stay valid.
    for (auto it = at.rbegin(); it != at.rend(); ++it) {
        auto& [key, list] = *it;
        ir::Block* block = out.find_block(key.first);
        std::sort(list.begin(), list.end(),
                  [](const Insertion& a, const Insertion& b) { return a.site_order > b.site_order; });
        std::vector<ir::Instr> seq;
        for (const auto& ins : list) {
            ir::Temp loaded{"n" + std::to_string(next++)};
            ir::Temp result{"n" + std::to_string(next++)};
            ir::TypeName ptr = ins.cls;
            ptr.pointer_depth = std::max(ptr.pointer_depth, 1);
            seq.push_back(ir::Load{loaded, ptr, ir::VarRef{ins.var}});
            seq.push_back(ir::VirtualCall{result, loaded, ir::QualifiedName{ins.cls.segments, close_method}, {}});
        }
        block->instrs.insert(block->instrs.begin() + static_cast<std::ptrdiff_t>(key.second), seq.begin(), seq.end());
    }
    return out;
}

FixedProgram fix_program(const ir::Program& program, const analysis::ResourceConfig& config) {
    FixedProgram result;
    for (const auto& proc : program.procedures) {
        auto reports = analysis::detect_leaks(proc, analysis::build_cfg(proc), config);
        result.program.procedures.push_back(fix_procedure(proc, reports, config.close_method));
        result.reports.insert(result.reports.end(), reports.begin(), reports.end());
    }
    return result;
}

}  // namespace leakfix::fix
