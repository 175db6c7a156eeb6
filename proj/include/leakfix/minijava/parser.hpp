#pragma once

#include <string_view>

#include "leakfix/minijava/ast.hpp"

namespace leakfix::minijava {

/// Parses one `class ID { method* }`. Throws SourceError with a position
/// for syntax errors and constructs outside the subset.
SourceUnit parse_source(std::string_view text);

}  // namespace leakfix::minijava
