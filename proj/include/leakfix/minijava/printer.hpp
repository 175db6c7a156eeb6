#pragma once

#include <string>

#include "leakfix/minijava/ast.hpp"

namespace leakfix::minijava {

/// Canonical formatting, two-space indentation; parse_source inverts it.
std::string print_source(const SourceUnit& unit);
std::string print_expr(const Expr& e);
std::string print_stmts(const StmtList& stmts, int indent);

}  // namespace leakfix::minijava
