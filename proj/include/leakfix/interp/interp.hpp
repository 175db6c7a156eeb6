#pragma once

#include <functional>
#include <optional>
#include <set>
#include <string>
#include <string_view>
#include <vector>

#include "leakfix/analysis/resource_config.hpp"
#include "leakfix/ir/model.hpp"

namespace leakfix::interp {

/// Explicit control decisions for one run. The k-th dynamic execution of a
/// throwing call throws iff throws[k]; the j-th multi-successor jump takes
/// successor branches[j] (mod the successor count). Missing entries mean
/// "no throw" and "first successor".
struct ExceptionSchedule {
    std::vector<bool> throws;
    std::vector<std::size_t> branches;

    bool throws_at(std::size_t k) const { return k < throws.size() && throws[k]; }
    std::size_t branch_at(std::size_t j) const { return j < branches.size() ? branches[j] : 0; }

    /// `"0100"` for throws; branch choices as a digit string.
    static ExceptionSchedule parse(std::string_view throw_bits, std::string_view branch_digits = "");
    std::string str() const;

    bool operator==(const ExceptionSchedule&) const = default;
};

enum class EventKind { Open, Close, Call, Throw, Fault };

struct Event {
    EventKind kind = EventKind::Call;
    ir::InstrPos pos;   // Open/Close: allocation site. Call/Throw: the call.
    std::string name;   // Open/Close: class. Call/Throw: callee. Fault: message.
    bool noop = false;  // Close on null or on a resource that is not open

    bool operator==(const Event&) const = default;
};

enum class ExitKind { Normal, Exceptional, StepLimit, Fault };

const char* to_string(ExitKind kind);

struct TraceResult {
    std::vector<Event> events;
    ExitKind exit_kind = ExitKind::Normal;
    std::set<ir::InstrPos> leaked;  // sites with an object still open at exit
    std::size_t throwing_calls = 0;
    std::size_t branch_points = 0;

    bool operator==(const TraceResult&) const = default;
};

constexpr std::size_t kDefaultStepLimit = 10'000;
constexpr std::size_t kDefaultMaxCalls = 8;
constexpr std::size_t kDefaultMaxBranches = 8;

/// Executes from the entry block. Locals start null. A resource `<init>`
/// opens the allocated object unless scheduled to throw; close_method
/// closes (null and already-closed receivers are no-ops; closing a wrapper
/// closes what it adopted). A throw reroutes to the block's first handler,
/// or exits exceptionally when there is none. `__unwrap_exception()`
/// clears the in-flight exception. Reaching an exit block ends the run,
/// Exceptional iff an exception is still in flight.
TraceResult run_schedule(const ir::ProcDef& proc, const analysis::ResourceConfig& config,
                         const ExceptionSchedule& schedule, std::size_t step_limit = kDefaultStepLimit);

/// Calls visit for every distinct execution whose throws fall within the
/// first max_calls throwing calls and whose branch choices fall within the
/// first max_branches branch points, depth first, all-zero first. Stops
/// early when visit returns false.
void enumerate_schedules(const ir::ProcDef& proc, const analysis::ResourceConfig& config,
                         const std::function<bool(const ExceptionSchedule&, const TraceResult&)>& visit,
                         std::size_t max_calls = kDefaultMaxCalls, std::size_t max_branches = kDefaultMaxBranches,
                         std::size_t step_limit = kDefaultStepLimit);

struct LeakWitness {
    ExceptionSchedule schedule;
    ir::InstrPos site;
};

/// First schedule (in enumeration order) whose trace leaks. StepLimit runs
/// are skipped.
std::optional<LeakWitness> find_leak_witness(const ir::ProcDef& proc, const analysis::ResourceConfig& config,
                                             std::size_t max_calls = kDefaultMaxCalls);

/// `OPEN <proc>:<block>:<idx>`, `CLOSE ...`, `CALL <name>`,
/// `THROW <block>:<idx>`, then `EXIT <kind> LEAKED <n>`.
std::string dump_trace(const ir::ProcDef& proc, const TraceResult& trace);

enum class Compare {
    SameProgram,   // kind, block label and name; tolerates index shifts from inserted instructions
    AcrossBuilds,  // kind and name only
};

/// Trace events with Close records dropped, projected for comparison.
std::vector<std::string> non_close_events(const TraceResult& trace, Compare mode);

/// Same exit kind and same non-close events.
bool equivalent_modulo_close(const TraceResult& a, const TraceResult& b, Compare mode);

}  // namespace leakfix::interp
