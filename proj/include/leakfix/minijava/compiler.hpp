#pragma once

#include "leakfix/analysis/resource_config.hpp"
#include "leakfix/ir/model.hpp"
#include "leakfix/minijava/ast.hpp"

namespace leakfix::minijava {

/// Lowers every method to one procedure `<Class>.<method>`.
///
/// Block layout per procedure: node_0 is the entry, node_1 the exit, node_2
/// the method-level exception block (present iff the body is nonempty), and
/// the rest follow in creation order. Each simple statement gets its own
/// block, and so does each nested `new`. A finally body is lowered twice:
/// on the normal path, and behind an empty handler block whose copy ends by
/// jumping to the enclosing handler. Simple class names resolve against
/// the resource classes in config plus a few java.lang/java.io builtins.
/// Throws SourceError for unknown classes, undeclared locals and other
/// static errors.
ir::Program compile_to_ir(const SourceUnit& unit,
                          const analysis::ResourceConfig& config = analysis::ResourceConfig::defaults());

}  // namespace leakfix::minijava
