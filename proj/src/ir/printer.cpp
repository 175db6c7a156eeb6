#include "leakfix/ir/printer.hpp"

#include <sstream>

namespace leakfix::ir {

namespace {

std::string join_labels(const std::vector<std::string>& labels) {
    std::string out;
    for (std::size_t i = 0; i < labels.size(); ++i) {
        if (i) out += ", ";
        out += labels[i];
    }
    return out;
}

std::string print_args(const std::vector<Operand>& args) {
    std::string out = "(";
    for (std::size_t i = 0; i < args.size(); ++i) {
        if (i) out += ", ";
        out += print_operand(args[i]);
    }
    return out + ")";
}

}  // namespace

std::string quote_string(const std::string& raw) {
    std::string out = "\"";
    for (char c : raw) {
        if (c == '"' || c == '\\') out += '\\';
        out += c;
    }
    return out + "\"";
}

std::string print_type(const TypeName& type) {
    return std::string(static_cast<std::size_t>(type.pointer_depth), '*') + type.class_name();
}

std::string print_operand(const Operand& op) {
    return std::visit(
        [](const auto& o) -> std::string {
            using T = std::decay_t<decltype(o)>;
            if constexpr (std::is_same_v<T, Temp>)
                return o.name;
            else if constexpr (std::is_same_v<T, VarRef>)
                return "&" + o.name;
            else if constexpr (std::is_same_v<T, IntLit>)
                return std::to_string(o.value);
            else
                return quote_string(o.value);
        },
        op);
}

std::string print_instr(const Instr& instr) {
    return std::visit(
        [](const auto& i) -> std::string {
            using T = std::decay_t<decltype(i)>;
            if constexpr (std::is_same_v<T, Alloc>) {
                return i.dest.name + " = __sil_allocate(<" + print_type(i.cls) + ">)";
            } else if constexpr (std::is_same_v<T, StaticCall>) {
                return i.dest.name + " = " + i.callee.str() + print_args(i.args);
            } else if constexpr (std::is_same_v<T, VirtualCall>) {
                return i.dest.name + " = " + i.recv.name + "." + i.method.str() + print_args(i.args);
            } else if constexpr (std::is_same_v<T, Store>) {
                return "store &" + i.var + " <- " + print_operand(i.src) + ":" + print_type(i.type);
            } else {
                std::string src = std::holds_alternative<VarRef>(i.src) ? "&" + std::get<VarRef>(i.src).name
                                                                        : std::get<Temp>(i.src).name;
                return i.dest.name + ":" + print_type(i.type) + " = load " + src;
            }
        },
        instr);
}

std::string print_block(const Block& block) {
    std::ostringstream os;
    os << "#" << block.label << ":\n";
    for (const auto& instr : block.instrs) os << "  " << print_instr(instr) << "\n";
    os << "  jmp";
    if (!block.successors.empty()) os << " " << join_labels(block.successors);
    os << "\n";
    if (!block.handlers.empty()) os << "  .handlers " << join_labels(block.handlers) << "\n";
    return os.str();
}

std::string print_proc(const ProcDef& proc) {
    std::ostringstream os;
    os << "define " << proc.name.str() << "(";
    for (std::size_t i = 0; i < proc.params.size(); ++i) {
        if (i) os << ", ";
        os << proc.params[i].name << ": " << print_type(proc.params[i].type);
    }
    os << ") : " << print_type(proc.return_type) << " {\n";
    for (std::size_t i = 0; i < proc.blocks.size(); ++i) {
        if (i) os << "\n";
        os << print_block(proc.blocks[i]);
    }
    os << "}\n";
    return os.str();
}

std::string print_program(const Program& program) {
    std::string out;
    for (std::size_t i = 0; i < program.procedures.size(); ++i) {
        if (i) out += "\n";
        out += print_proc(program.procedures[i]);
    }
    return out;
}

}  // namespace leakfix::ir
