#include "leakfix/ir/model.hpp"

#include <charconv>
#include <set>
#include <unordered_set>

namespace leakfix::ir {

namespace {

std::string join(const std::vector<std::string>& parts, const char* sep) {
    std::string out;
    for (std::size_t i = 0; i < parts.size(); ++i) {
        if (i) out += sep;
        out += parts[i];
    }
    return out;
}

std::string describe(const std::string& message, int line, int column) {
    if (line <= 0) return message;
    return std::to_string(line) + ":" + std::to_string(column) + ": " + message;
}

}  // namespace

std::string TypeName::class_name() const { return join(segments, "::"); }

std::string QualifiedName::class_name() const { return join(class_path, "::"); }

std::string QualifiedName::str() const {
    if (class_path.empty()) return method;
    return class_name() + "." + method;
}

const Block* ProcDef::find_block(const std::string& label) const {
    for (const auto& b : blocks)
        if (b.label == label) return &b;
    return nullptr;
}

Block* ProcDef::find_block(const std::string& label) {
    for (auto& b : blocks)
        if (b.label == label) return &b;
    return nullptr;
}

std::optional<std::size_t> ProcDef::block_index(const std::string& label) const {
    for (std::size_t i = 0; i < blocks.size(); ++i)
        if (blocks[i].label == label) return i;
    return std::nullopt;
}

const ProcDef* Program::find_proc(const std::string& name) const {
    for (const auto& p : procedures)
        if (p.name.str() == name) return &p;
    return nullptr;
}

const Temp* defined_temp(const Instr& instr) {
    return std::visit(
        [](const auto& i) -> const Temp* {
            using T = std::decay_t<decltype(i)>;
            if constexpr (std::is_same_v<T, Store>)
                return nullptr;
            else
                return &i.dest;
        },
        instr);
}

std::vector<std::string> used_temps(const Instr& instr) {
    std::vector<std::string> out;
    auto operand = [&](const Operand& op) {
        if (auto* t = std::get_if<Temp>(&op)) out.push_back(t->name);
    };
    std::visit(
        [&](const auto& i) {
            using T = std::decay_t<decltype(i)>;
            if constexpr (std::is_same_v<T, StaticCall>) {
                for (const auto& a : i.args) operand(a);
            } else if constexpr (std::is_same_v<T, VirtualCall>) {
                out.push_back(i.recv.name);
                for (const auto& a : i.args) operand(a);
            } else if constexpr (std::is_same_v<T, Store>) {
                operand(i.src);
            } else if constexpr (std::is_same_v<T, Load>) {
                if (auto* t = std::get_if<Temp>(&i.src)) out.push_back(t->name);
            }
        },
        instr);
    return out;
}

std::optional<std::string> mentioned_local(const Instr& instr) {
    if (auto* s = std::get_if<Store>(&instr)) return s->var;
    if (auto* l = std::get_if<Load>(&instr))
        if (auto* v = std::get_if<VarRef>(&l->src)) return v->name;
    return std::nullopt;
}

std::optional<std::uint64_t> temp_number(const std::string& name) {
    if (name.size() < 2 || name[0] != 'n') return std::nullopt;
    std::uint64_t value = 0;
    auto [ptr, ec] = std::from_chars(name.data() + 1, name.data() + name.size(), value);
    if (ec != std::errc{} || ptr != name.data() + name.size()) return std::nullopt;
    return value;
}

IrError::IrError(Kind kind, const std::string& message, int line, int column)
    : std::runtime_error(describe(message, line, column)), kind_(kind), line_(line), column_(column) {}

void check_well_formed(const ProcDef& proc) {
    const std::string where = proc.name.str();
    if (proc.blocks.empty())
        throw IrError(IrError::Kind::Malformed, where + ": procedure has no blocks");
    std::unordered_set<std::string> labels;
    for (const auto& b : proc.blocks)
        if (!labels.insert(b.label).second)
            throw IrError(IrError::Kind::DuplicateLabel, where + ": duplicate label #" + b.label);

    auto check_type = [&](const TypeName& t) {
        if (t.segments.empty())
            throw IrError(IrError::Kind::Malformed, where + ": empty type name");
        if (t.pointer_depth > 0 && t.segments.size() == 1 && t.segments[0] == "void")
            throw IrError(IrError::Kind::Malformed, where + ": pointer to void");
    };
    check_type(proc.return_type);
    for (const auto& p : proc.params) check_type(p.type);

    for (const auto& b : proc.blocks) {
        for (const auto& s : b.successors)
            if (!labels.count(s))
                throw IrError(IrError::Kind::UnresolvedLabel, where + ": #" + b.label + " jumps to unknown " + s);
        for (const auto& h : b.handlers)
            if (!labels.count(h))
                throw IrError(IrError::Kind::UnresolvedLabel, where + ": #" + b.label + " has unknown handler " + h);
        if (b.is_exit() && !b.handlers.empty())
            throw IrError(IrError::Kind::HandlerOnExit, where + ": exit block #" + b.label + " has handlers");

        std::set<std::string> defined;
        for (const auto& instr : b.instrs) {
            if (auto* a = std::get_if<Alloc>(&instr)) check_type(a->cls);
            if (auto* l = std::get_if<Load>(&instr)) check_type(l->type);
            if (auto* s = std::get_if<Store>(&instr)) check_type(s->type);
            if (const Temp* t = defined_temp(instr))
                if (!defined.insert(t->name).second)
                    throw IrError(IrError::Kind::TempRedefined,
                                  where + ": temp " + t->name + " assigned twice in #" + b.label);
        }
    }
}

void check_well_formed(const Program& program) {
    std::unordered_set<std::string> names;
    for (const auto& p : program.procedures) {
        if (!names.insert(p.name.str()).second)
            throw IrError(IrError::Kind::DuplicateProcedure, "duplicate procedure " + p.name.str());
        check_well_formed(p);
    }
}

}  // namespace leakfix::ir
