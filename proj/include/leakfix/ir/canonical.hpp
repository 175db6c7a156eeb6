#pragma once

#include "leakfix/ir/model.hpp"

namespace leakfix::ir {

/// Renames temps to n0, n1, ... in definition order (blocks in list order,
/// instructions in order), per procedure. Temps are block scoped, so every
/// definition receives a fresh number and uses map to the definition made
/// earlier in the same block. Throws IrError(UndefinedTemp) for a use with
/// no such definition. Idempotent.
ProcDef renumber_temps(const ProcDef& proc);
Program renumber_temps(const Program& program);

/// Largest n<k> temp number mentioned in the procedure, if any.
std::optional<std::uint64_t> max_temp_number(const ProcDef& proc);

}  // namespace leakfix::ir
