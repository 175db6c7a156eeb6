#pragma once

#include <string>

#include "leakfix/ir/model.hpp"

namespace leakfix::ir {

/// Canonical layout: block headers at column 0, instructions and the
/// terminator indented by two spaces, a blank line between blocks and
/// between procedures, one trailing newline. Empty program prints as "".
std::string print_program(const Program& program);
std::string print_proc(const ProcDef& proc);
std::string print_block(const Block& block);

std::string print_instr(const Instr& instr);
std::string print_type(const TypeName& type);
std::string print_operand(const Operand& op);

/// Quotes and escapes `"` and `\`.
std::string quote_string(const std::string& raw);

}  // namespace leakfix::ir
