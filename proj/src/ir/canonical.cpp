#include "leakfix/ir/canonical.hpp"

#include <map>

namespace leakfix::ir {

namespace {

struct Renamer {
    std::map<std::string, std::string> in_block;
    std::uint64_t next = 0;
    const std::string* block_label = nullptr;

    void use(Temp& t) {
        auto it = in_block.find(t.name);
        if (it == in_block.end())
            throw IrError(IrError::Kind::UndefinedTemp, "temp " + t.name + " used before definition in #" + *block_label);
        t.name = it->second;
    }
    void use(Operand& op) {
        if (auto* t = std::get_if<Temp>(&op)) use(*t);
    }
    void def(Temp& t) {
        std::string fresh = "n" + std::to_string(next++);
        in_block[t.name] = fresh;
        t.name = fresh;
    }
};

}  // namespace

ProcDef renumber_temps(const ProcDef& proc) {
    ProcDef out = proc;
    Renamer r;
    for (auto& block : out.blocks) {
        r.in_block.clear();
        r.block_label = &block.label;
        for (auto& instr : block.instrs) {
            std::visit(
                [&](auto& i) {
                    using T = std::decay_t<decltype(i)>;
                    if constexpr (std::is_same_v<T, Alloc>) {
                        r.def(i.dest);
                    } else if constexpr (std::is_same_v<T, StaticCall>) {
                        for (auto& a : i.args) r.use(a);
                        r.def(i.dest);
                    } else if constexpr (std::is_same_v<T, VirtualCall>) {
                        r.use(i.recv);
                        for (auto& a : i.args) r.use(a);
                        r.def(i.dest);
                    } else if constexpr (std::is_same_v<T, Store>) {
                        r.use(i.src);
                    } else {
                        if (auto* t = std::get_if<Temp>(&i.src)) r.use(*t);
                        r.def(i.dest);
                    }
                },
                instr);
        }
    }
    return out;
}

Program renumber_temps(const Program& program) {
    Program out;
    out.procedures.reserve(program.procedures.size());
    for (const auto& p : program.procedures) out.procedures.push_back(renumber_temps(p));
    return out;
}

std::optional<std::uint64_t> max_temp_number(const ProcDef& proc) {
    std::optional<std::uint64_t> best;
    auto see = [&](const std::string& name) {
        if (auto n = temp_number(name); n && (!best || *n > *best)) best = n;
    };
    for (const auto& b : proc.blocks)
        for (const auto& instr : b.instrs) {
            if (const Temp* t = defined_temp(instr)) see(t->name);
            for (const auto& u : used_temps(instr)) see(u);
        }
    return best;
}

}  // namespace leakfix::ir
