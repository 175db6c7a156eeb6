#pragma once

#include <string_view>

#include "leakfix/ir/model.hpp"

namespace leakfix::ir {

/// Parses a sequence of `define` procedure definitions. Both call forms,
/// `T.m(args)` and `recv.T.m(args)`, are accepted and kept distinct.
/// Throws IrError carrying the line/column of the offending token.
Program parse_program(std::string_view text);

TypeName parse_type(std::string_view text);

}  // namespace leakfix::ir
