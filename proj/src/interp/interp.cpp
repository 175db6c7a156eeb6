#include "leakfix/interp/interp.hpp"

#include <map>
#include <sstream>
#include <unordered_map>

namespace leakfix::interp {

namespace {

using analysis::ResourceConfig;

struct Decider {
    virtual ~Decider() = default;
    virtual bool should_throw(std::size_t k) = 0;
    virtual std::size_t branch(std::size_t j, std::size_t arity) = 0;
};

struct ScheduleDecider final : Decider {
    const ExceptionSchedule& schedule;
    explicit ScheduleDecider(const ExceptionSchedule& s) : schedule(s) {}
    bool should_throw(std::size_t k) override { return schedule.throws_at(k); }
    std::size_t branch(std::size_t j, std::size_t arity) override { return schedule.branch_at(j) % arity; }
};

struct Value {
    enum class Kind { Null, Object, Opaque } kind = Kind::Null;
    std::size_t object = 0;
};

struct Object {
    ir::InstrPos site;
    std::string cls;
    enum class Status { Unopened, Open, Closed } status = Status::Unopened;
    std::vector<std::size_t> adopted;
};

class Machine {
public:
    Machine(const ir::ProcDef& proc, const ResourceConfig& config, Decider& decider, std::size_t step_limit)
        : proc_(proc), config_(config), decider_(decider), step_limit_(step_limit) {
        for (std::size_t i = 0; i < proc.blocks.size(); ++i) index_.emplace(proc.blocks[i].label, i);
    }

    TraceResult run() {
        std::size_t b = 0;
        for (;;) {
            const ir::Block& block = proc_.blocks[b];
            temps_.clear();
            bool threw = false;
            for (std::size_t i = 0; i < block.instrs.size() && !threw; ++i) {
                if (++steps_ > step_limit_) return finish(ExitKind::StepLimit);
                switch (exec(block, i)) {
                    case Outcome::Next: break;
                    case Outcome::Thrown: threw = true; break;
                    case Outcome::Faulted: return finish(ExitKind::Fault);
                }
            }
            if (++steps_ > step_limit_) return finish(ExitKind::StepLimit);
            if (threw) {
                if (block.handlers.empty()) return finish(ExitKind::Exceptional);
                b = index_.at(block.handlers.front());
                continue;
            }
            if (block.is_exit()) return finish(in_flight_ ? ExitKind::Exceptional : ExitKind::Normal);
            std::size_t pick = 0;
            if (block.successors.size() > 1) pick = decider_.branch(trace_.branch_points++, block.successors.size());
            b = index_.at(block.successors[pick]);
        }
    }

private:
    enum class Outcome { Next, Thrown, Faulted };

    const ir::ProcDef& proc_;
    const ResourceConfig& config_;
    Decider& decider_;
    std::size_t step_limit_;
    std::unordered_map<std::string, std::size_t> index_;
    std::map<std::string, Value> locals_;
    std::map<std::string, Value> temps_;
    std::vector<Object> objects_;
    bool in_flight_ = false;
    std::size_t steps_ = 0;
    TraceResult trace_;
    std::string fault_;

    TraceResult finish(ExitKind kind) {
        if (kind == ExitKind::Fault) trace_.events.push_back({EventKind::Fault, {}, fault_, false});
        trace_.exit_kind = kind;
        for (const auto& o : objects_)
            if (o.status == Object::Status::Open) trace_.leaked.insert(o.site);
        return std::move(trace_);
    }

    bool read(const ir::Operand& op, Value& out) {
        if (auto* t = std::get_if<ir::Temp>(&op)) return read_temp(t->name, out);
        if (auto* v = std::get_if<ir::VarRef>(&op)) {
            auto it = locals_.find(v->name);
            out = it == locals_.end() ? Value{} : it->second;
            return true;
        }
        out = Value{Value::Kind::Opaque};
        return true;
    }

    bool read_temp(const std::string& name, Value& out) {
        auto it = temps_.find(name);
        if (it == temps_.end()) {
            fault_ = "temp " + name + " is undefined";
            return false;
        }
        out = it->second;
        return true;
    }

    void close_object(std::size_t id, const ir::InstrPos& at) {
        Object& o = objects_[id];
        bool was_open = o.status == Object::Status::Open;
        trace_.events.push_back({EventKind::Close, o.site, o.cls, !was_open});
        if (!was_open) return;
        o.status = Object::Status::Closed;
        for (auto inner : std::vector<std::size_t>(o.adopted)) close_object(inner, at);
    }

    Outcome exec(const ir::Block& block, std::size_t i) {
        const ir::Instr& instr = block.instrs[i];
        const ir::InstrPos here{block.label, i};
        if (auto* a = std::get_if<ir::Alloc>(&instr)) {
            if (config_.is_resource(a->cls.class_name())) {
                objects_.push_back({here, a->cls.class_name(), Object::Status::Unopened, {}});
                temps_[a->dest.name] = Value{Value::Kind::Object, objects_.size() - 1};
            } else {
                temps_[a->dest.name] = Value{Value::Kind::Opaque};
            }
            return Outcome::Next;
        }
        if (auto* s = std::get_if<ir::Store>(&instr)) {
            Value v;
            if (!read(s->src, v)) return Outcome::Faulted;
            locals_[s->var] = v;
            return Outcome::Next;
        }
        if (auto* l = std::get_if<ir::Load>(&instr)) {
            Value v;
            if (auto* var = std::get_if<ir::VarRef>(&l->src)) {
                auto it = locals_.find(var->name);
                v = it == locals_.end() ? Value{} : it->second;
            } else if (!read_temp(std::get<ir::Temp>(l->src).name, v)) {
                return Outcome::Faulted;
            }
            temps_[l->dest.name] = v;
            return Outcome::Next;
        }

        // calls
        const ir::Temp* dest = ir::defined_temp(instr);
        std::vector<Value> args;
        const std::vector<ir::Operand>* raw_args = nullptr;
        std::optional<Value> receiver;
        std::string name;
        if (auto* sc = std::get_if<ir::StaticCall>(&instr)) {
            raw_args = &sc->args;
            name = sc->callee.str();
        } else {
            const auto& vc = std::get<ir::VirtualCall>(instr);
            raw_args = &vc.args;
            name = vc.method.str();
            Value r;
            if (!read_temp(vc.recv.name, r)) return Outcome::Faulted;
            receiver = r;
        }
        for (const auto& op : *raw_args) {
            Value v;
            if (!read(op, v)) return Outcome::Faulted;
            args.push_back(v);
        }

        if (analysis::is_close_call(instr, config_)) {
            if (!receiver) {
                if (args.empty()) {
                    fault_ = name + " called without a receiver";
                    return Outcome::Faulted;
                }
                receiver = args.front();
            }
            if (receiver->kind == Value::Kind::Object)
                close_object(receiver->object, here);
            else
                trace_.events.push_back({EventKind::Close, here, "null", true});
            temps_[dest->name] = Value{Value::Kind::Opaque};
            return Outcome::Next;
        }

        trace_.events.push_back({EventKind::Call, here, name, false});
        if (analysis::may_throw(instr, config_) && decider_.should_throw(trace_.throwing_calls++)) {
            trace_.events.push_back({EventKind::Throw, here, name, false});
            in_flight_ = true;
            return Outcome::Thrown;
        }
        if (auto* sc = std::get_if<ir::StaticCall>(&instr)) {
            const std::string cls = sc->callee.class_name();
            if (sc->callee.method == "<init>" && config_.is_resource(cls)) {
                if (args.empty()) {
                    fault_ = name + " called without the allocated object";
                    return Outcome::Faulted;
                }
                if (args.front().kind == Value::Kind::Object) {
                    Object& o = objects_[args.front().object];
                    if (o.status == Object::Status::Unopened) {
                        o.status = Object::Status::Open;
                        trace_.events.push_back({EventKind::Open, o.site, o.cls, false});
                    }
                    if (config_.is_wrapper(cls)) {
                        std::size_t self = args.front().object;
                        for (std::size_t k = 1; k < args.size(); ++k)
                            if (args[k].kind == Value::Kind::Object && args[k].object != self)
                                objects_[self].adopted.push_back(args[k].object);
                    }
                }
            } else if (sc->callee.class_path.empty() && sc->callee.method == "__unwrap_exception") {
                in_flight_ = false;
            }
        }
        temps_[dest->name] = Value{Value::Kind::Opaque};
        return Outcome::Next;
    }
};

// Replays a decision prefix, then chooses 0, recording every decision.
struct RecordingDecider final : Decider {
    struct Decision {
        bool is_branch;
        std::size_t value;
        std::size_t arity;
    };
    std::vector<Decision> decisions;
    std::size_t cursor = 0;
    std::size_t max_calls, max_branches;

    RecordingDecider(std::size_t calls, std::size_t branches) : max_calls(calls), max_branches(branches) {}

    std::size_t take(bool is_branch, std::size_t arity) {
        if (cursor < decisions.size()) {
            decisions[cursor].arity = arity;
            return decisions[cursor++].value;
        }
        decisions.push_back({is_branch, 0, arity});
        ++cursor;
        return 0;
    }
    bool should_throw(std::size_t k) override { return take(false, k < max_calls ? 2 : 1) != 0; }
    std::size_t branch(std::size_t j, std::size_t arity) override {
        return take(true, j < max_branches ? arity : 1) % arity;
    }

    ExceptionSchedule schedule() const {
        ExceptionSchedule s;
        for (const auto& d : decisions) {
            if (d.is_branch)
                s.branches.push_back(d.value);
            else
                s.throws.push_back(d.value != 0);
        }
        return s;
    }

    // Advances to the next unexplored decision sequence; false when done.
    bool advance() {
        decisions.resize(cursor);
        while (!decisions.empty()) {
            auto& last = decisions.back();
            if (last.value + 1 < last.arity) {
                ++last.value;
                cursor = 0;
                return true;
            }
            decisions.pop_back();
        }
        return false;
    }
};

}  // namespace

ExceptionSchedule ExceptionSchedule::parse(std::string_view throw_bits, std::string_view branch_digits) {
    ExceptionSchedule s;
    for (char c : throw_bits) {
        if (c != '0' && c != '1') throw std::invalid_argument("schedule bits must be 0 or 1");
        s.throws.push_back(c == '1');
    }
    for (char c : branch_digits) {
        if (c < '0' || c > '9') throw std::invalid_argument("branch choices must be digits");
        s.branches.push_back(static_cast<std::size_t>(c - '0'));
    }
    return s;
}

std::string ExceptionSchedule::str() const {
    std::string out;
    for (bool b : throws) out += b ? '1' : '0';
    if (!branches.empty()) {
        out += '/';
        for (auto b : branches) out += std::to_string(b);
    }
    return out;
}

const char* to_string(ExitKind kind) {
    switch (kind) {
        case ExitKind::Normal: return "Normal";
        case ExitKind::Exceptional: return "Exceptional";
        case ExitKind::StepLimit: return "StepLimit";
        case ExitKind::Fault: return "Fault";
    }
    return "?";
}

TraceResult run_schedule(const ir::ProcDef& proc, const ResourceConfig& config, const ExceptionSchedule& schedule,
                         std::size_t step_limit) {
    if (proc.blocks.empty()) return {};
    ScheduleDecider d(schedule);
    return Machine(proc, config, d, step_limit).run();
}

void enumerate_schedules(const ir::ProcDef& proc, const ResourceConfig& config,
                         const std::function<bool(const ExceptionSchedule&, const TraceResult&)>& visit,
                         std::size_t max_calls, std::size_t max_branches, std::size_t step_limit) {
    if (proc.blocks.empty()) return;
    RecordingDecider d(max_calls, max_branches);
    do {
        TraceResult t = Machine(proc, config, d, step_limit).run();
        if (!visit(d.schedule(), t)) return;
    } while (d.advance());
}

std::optional<LeakWitness> find_leak_witness(const ir::ProcDef& proc, const ResourceConfig& config,
                                             std::size_t max_calls) {
    std::optional<LeakWitness> found;
    enumerate_schedules(
        proc, config,
        [&](const ExceptionSchedule& s, const TraceResult& t) {
            if (t.exit_kind == ExitKind::StepLimit || t.leaked.empty()) return true;
            found = LeakWitness{s, *t.leaked.begin()};
            return false;
        },
        max_calls);
    return found;
}

std::string dump_trace(const ir::ProcDef& proc, const TraceResult& trace) {
    std::ostringstream os;
    const std::string p = proc.name.str();
    for (const auto& e : trace.events) {
        switch (e.kind) {
            case EventKind::Open: os << "OPEN " << p << ":" << e.pos.str() << "\n"; break;
            case EventKind::Close:
                if (e.name == "null")
                    os << "CLOSE null\n";
                else
                    os << "CLOSE " << p << ":" << e.pos.str() << (e.noop ? " NOOP" : "") << "\n";
                break;
            case EventKind::Call: os << "CALL " << e.name << "\n"; break;
            case EventKind::Throw: os << "THROW " << e.pos.str() << "\n"; break;
            case EventKind::Fault: os << "FAULT " << e.name << "\n"; break;
        }
    }
    os << "EXIT " << to_string(trace.exit_kind) << " LEAKED " << trace.leaked.size() << "\n";
    return os.str();
}

std::vector<std::string> non_close_events(const TraceResult& trace, Compare mode) {
    std::vector<std::string> out;
    for (const auto& e : trace.events) {
        if (e.kind == EventKind::Close) continue;
        std::string key;
        switch (e.kind) {
            case EventKind::Open: key = "OPEN "; break;
            case EventKind::Call: key = "CALL "; break;
            case EventKind::Throw: key = "THROW "; break;
            case EventKind::Fault: key = "FAULT "; break;
            case EventKind::Close: break;
        }
        if (mode == Compare::SameProgram) key += e.pos.block + " ";
        out.push_back(key + e.name);
    }
    return out;
}

bool equivalent_modulo_close(const TraceResult& a, const TraceResult& b, Compare mode) {
    return a.exit_kind == b.exit_kind && non_close_events(a, mode) == non_close_events(b, mode);
}

}  // namespace leakfix::interp
