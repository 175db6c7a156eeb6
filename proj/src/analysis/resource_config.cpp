#include "leakfix/analysis/resource_config.hpp"

#include <sstream>

namespace leakfix::analysis {

ResourceConfig ResourceConfig::defaults() {
    ResourceConfig c;
    c.resource_classes = {
        "java::io::FileOutputStream", "java::io::FileInputStream",    "java::io::ObjectInputStream",
        "java::io::BufferedInputStream", "java::util::zip::ZipOutputStream",
    };
    c.wrapper_classes = {"java::io::BufferedInputStream"};
    return c;
}

ResourceConfig parse_resource_config(std::string_view text) {
    ResourceConfig c;
    c.close_method.clear();
    std::istringstream in{std::string(text)};
    std::string line;
    int lineno = 0;
    bool close_set = false;
    while (std::getline(in, line)) {
        ++lineno;
        std::istringstream words(line);
        std::string directive, arg, extra;
        if (!(words >> directive) || directive[0] == '#') continue;
        if (!(words >> arg) || (words >> extra))
            throw ConfigError("line " + std::to_string(lineno) + ": expected `" + directive + " <name>`");
        if (directive == "resource") {
            c.resource_classes.insert(arg);
        } else if (directive == "wrapper") {
            c.resource_classes.insert(arg);
            c.wrapper_classes.insert(arg);
        } else if (directive == "close_method") {
            c.close_method = arg;
            close_set = true;
        } else {
            throw ConfigError("line " + std::to_string(lineno) + ": unknown directive `" + directive + "`");
        }
    }
    if (!close_set) c.close_method = "close";
    return c;
}

std::string print_resource_config(const ResourceConfig& config) {
    std::ostringstream os;
    for (const auto& r : config.resource_classes)
        os << (config.is_wrapper(r) ? "wrapper " : "resource ") << r << "\n";
    os << "close_method " << config.close_method << "\n";
    return os.str();
}

bool is_builtin_call(const ir::QualifiedName& callee) {
    return callee.class_path.empty() && callee.method.rfind("__", 0) == 0;
}

bool is_close_call(const ir::Instr& instr, const ResourceConfig& config) {
    if (auto* v = std::get_if<ir::VirtualCall>(&instr)) return v->method.method == config.close_method;
    if (auto* s = std::get_if<ir::StaticCall>(&instr))
        return !s->callee.class_path.empty() && s->callee.method == config.close_method;
    return false;
}

bool is_constructor_call(const ir::Instr& instr) {
    auto* s = std::get_if<ir::StaticCall>(&instr);
    return s && s->callee.method == "<init>";
}

bool may_throw(const ir::Instr& instr, const ResourceConfig& config) {
    if (auto* s = std::get_if<ir::StaticCall>(&instr)) {
        if (is_builtin_call(s->callee)) return false;
        if (s->callee.method == "<init>" && config.is_wrapper(s->callee.class_name())) return false;
        return !is_close_call(instr, config);
    }
    if (std::holds_alternative<ir::VirtualCall>(instr)) return !is_close_call(instr, config);
    return false;
}

}  // namespace leakfix::analysis
