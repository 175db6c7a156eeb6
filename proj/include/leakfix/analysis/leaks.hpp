#pragma once

#include <optional>
#include <set>
#include <string>
#include <vector>

#include "leakfix/analysis/cfg.hpp"
#include "leakfix/analysis/liveness.hpp"
#include "leakfix/analysis/resource_config.hpp"

namespace leakfix::analysis {

enum class OpenStatus { Unopened, Open, Closed, MaybeOpen };

const char* to_string(OpenStatus s);

/// Summary of one allocation site at a program point.
struct ResourceState {
    OpenStatus status = OpenStatus::Unopened;
    std::set<std::string> referencing_locals;
    std::optional<std::size_t> wraps;  // site index of an adopted resource

    bool operator==(const ResourceState&) const = default;
};

struct LeakReport {
    std::string proc;
    ir::InstrPos site;        // the Alloc
    std::string resource_class;
    std::string var;          // local holding the reference after last_use
    bool var_is_temp = false; // no local home; the fixer rejects these
    ir::InstrPos last_use;
    std::optional<std::string> handler_of_last_use;
    // Other handler blocks that a throw may enter with the resource still
    // open and var dead; the fixer closes there too.
    std::vector<std::string> dead_handlers;

    bool operator==(const LeakReport&) const = default;
};

/// One line per report, used by the CLI and test diagnostics:
/// `LEAK Main.foo site=node_6:0 class=... var=fos last_use=node_5:2 handler=node_4`,
/// followed by ` also=<labels>` when dead_handlers is nonempty.
std::string format_report(const LeakReport& report);

struct SiteInfo {
    ir::InstrPos pos;
    std::string cls;
    std::optional<std::size_t> owner;  // wrapper site that adopts this one
};

struct AnalysisResult {
    std::vector<SiteInfo> sites;
    std::vector<ResourceState> at_exit;  // joined over every exit, per site
    std::vector<LeakReport> reports;     // allocation-site program order
    std::vector<std::string> diagnostics;
};

/// Forward may-analysis of resource status over normal and exceptional
/// edges. A site leaks when it may be open at an exit (normal exit block
/// or a throw with no handler). Sites adopted by a wrapper are reported
/// through the wrapper. Each report anchors at the last instruction after
/// which no local or temp referencing the resource is mentioned again.
AnalysisResult analyze_procedure(const ir::ProcDef& proc, const Cfg& cfg, const ResourceConfig& config);

std::vector<LeakReport> detect_leaks(const ir::ProcDef& proc, const Cfg& cfg, const ResourceConfig& config);

/// detect_leaks over every procedure, in program order.
std::vector<LeakReport> detect_leaks(const ir::Program& program, const ResourceConfig& config);

}  // namespace leakfix::analysis
