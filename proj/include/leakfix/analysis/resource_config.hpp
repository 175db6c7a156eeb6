#pragma once

#include <set>
#include <string>
#include <string_view>

#include "leakfix/ir/model.hpp"

namespace leakfix::analysis {

/// Which classes are resources, which of those adopt a resource passed to
/// their constructor, and the name of the releasing method.
struct ResourceConfig {
    std::set<std::string> resource_classes;  // `java::io::FileOutputStream`
    std::set<std::string> wrapper_classes;   // subset of resource_classes
    std::string close_method = "close";

    static ResourceConfig defaults();

    bool is_resource(const std::string& cls) const { return resource_classes.count(cls) > 0; }
    bool is_wrapper(const std::string& cls) const { return wrapper_classes.count(cls) > 0; }
    bool operator==(const ResourceConfig&) const = default;
};

class ConfigError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// One directive per line: `resource <class>`, `wrapper <class>` (implies
/// resource), `close_method <name>`. Blank lines and `#` comment lines are
/// skipped. Starts from an empty configuration.
ResourceConfig parse_resource_config(std::string_view text);
std::string print_resource_config(const ResourceConfig& config);

// Call classification shared by the static analysis and the interpreter.

bool is_builtin_call(const ir::QualifiedName& callee);
bool is_close_call(const ir::Instr& instr, const ResourceConfig& config);
bool is_constructor_call(const ir::Instr& instr);

/// Whether executing the instruction may raise an exception. Close calls,
/// wrapper constructors and builtins never do; every other call may.
bool may_throw(const ir::Instr& instr, const ResourceConfig& config);

}  // namespace leakfix::analysis
