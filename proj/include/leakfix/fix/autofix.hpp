#pragma once

#include <optional>
#include <vector>

#include "leakfix/analysis/leaks.hpp"

namespace leakfix::fix {

/// Where the close pairs for one report go. The normal insertion sits right
/// after the last-use instruction; the handler insertion, present iff the
/// last-use block has a handler, sits at the head of that handler block.
struct FixPlan {
    analysis::LeakReport report;
    ir::InstrPos normal_insertion;                  // insert before this index
    std::optional<std::string> handler_insertion;   // block label, index 0
    std::vector<std::string> extra_insertions;      // report.dead_handlers, index 0

    bool operator==(const FixPlan&) const = default;
};

class FixError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Validates a report against the procedure and derives its plan. Throws
/// FixError for stale positions or a variable with no local home.
FixPlan plan_fix(const ir::ProcDef& proc, const analysis::LeakReport& report);

/// Inserts `tA:*C = load &var` / `tB = tA.C.close()` after each report's
/// last use, at the head of the last-use block's handler, and at the head
/// of each of the report's dead handlers. Fresh temps
/// continue after the largest temp number in the procedure. Blocks sharing
/// insertions receive them in reverse allocation order. Nothing else moves.
ir::ProcDef fix_procedure(const ir::ProcDef& proc, const std::vector<analysis::LeakReport>& reports,
                          const std::string& close_method = "close");

struct FixedProgram {
    ir::Program program;
    std::vector<analysis::LeakReport> reports;
};

FixedProgram fix_program(const ir::Program& program, const analysis::ResourceConfig& config);

}  // namespace leakfix::fix
