#include "leakfix/minijava/printer.hpp"

#include <sstream>

namespace leakfix::minijava {

namespace {

std::string quote(const std::string& raw) {
    std::string out = "\"";
    for (char c : raw) {
        if (c == '"' || c == '\\') out += '\\';
        out += c;
    }
    return out + "\"";
}

std::string print_args(const std::vector<Expr>& args) {
    std::string out = "(";
    for (std::size_t i = 0; i < args.size(); ++i) {
        if (i) out += ", ";
        out += print_expr(args[i]);
    }
    return out + ")";
}

std::string print_call(const CallExpr& c) {
    return (c.target.empty() ? "" : c.target + ".") + c.method + print_args(c.args);
}

std::string print_decl(const LocalDecl& d) { return d.type + " " + d.name + " = " + print_expr(d.init); }

void emit(std::ostringstream& os, const StmtList& stmts, int indent);

void emit_catches_finally(std::ostringstream& os, const std::vector<CatchClause>& catches,
                          const std::optional<StmtList>& fin, const std::string& pad, int indent) {
    for (const auto& c : catches) {
        os << pad << "} catch (" << c.type << " " << c.name << ") {\n";
        emit(os, c.body, indent + 1);
    }
    if (fin) {
        os << pad << "} finally {\n";
        emit(os, *fin, indent + 1);
    }
    os << pad << "}\n";
}

void emit(std::ostringstream& os, const StmtList& stmts, int indent) {
    const std::string pad(static_cast<std::size_t>(indent) * 2, ' ');
    for (const auto& s : stmts) {
        std::visit(
            [&](const auto& n) {
                using T = std::decay_t<decltype(n)>;
                if constexpr (std::is_same_v<T, LocalDecl>) {
                    os << pad << print_decl(n) << ";\n";
                } else if constexpr (std::is_same_v<T, ExprStmt>) {
                    os << pad << print_call(n.call) << ";\n";
                } else if constexpr (std::is_same_v<T, TryFinally>) {
                    os << pad << "try {\n";
                    emit(os, n.body, indent + 1);
                    emit_catches_finally(os, {}, n.finally_body, pad, indent);
                } else if constexpr (std::is_same_v<T, TryCatchFinally>) {
                    os << pad << "try {\n";
                    emit(os, n.body, indent + 1);
                    emit_catches_finally(os, n.catches, n.finally_body, pad, indent);
                } else if constexpr (std::is_same_v<T, TryWithResources>) {
                    os << pad << "try (";
                    for (std::size_t i = 0; i < n.resources.size(); ++i) {
                        if (i) os << "; ";
                        os << print_decl(n.resources[i]);
                    }
                    os << ") {\n";
                    emit(os, n.body, indent + 1);
                    emit_catches_finally(os, n.catches, n.finally_body, pad, indent);
                } else if constexpr (std::is_same_v<T, Return>) {
                    os << pad << "return" << (n.value ? " " + print_expr(*n.value) : std::string()) << ";\n";
                } else if constexpr (std::is_same_v<T, If>) {
                    os << pad << "if (" << print_call(n.cond) << ") {\n";
                    emit(os, n.then_body, indent + 1);
                    if (n.else_body) {
                        os << pad << "} else {\n";
                        emit(os, *n.else_body, indent + 1);
                    }
                    os << pad << "}\n";
                } else {
                    os << pad << "{\n";
                    emit(os, n.body, indent + 1);
                    os << pad << "}\n";
                }
            },
            s.node);
    }
}

}  // namespace

std::string print_expr(const Expr& e) {
    return std::visit(
        [](const auto& n) -> std::string {
            using T = std::decay_t<decltype(n)>;
            if constexpr (std::is_same_v<T, IntExpr>)
                return std::to_string(n.value);
            else if constexpr (std::is_same_v<T, StrExpr>)
                return quote(n.value);
            else if constexpr (std::is_same_v<T, NameExpr>)
                return n.name;
            else if constexpr (std::is_same_v<T, NewExpr>)
                return "new " + n.cls + print_args(n.args);
            else
                return print_call(n);
        },
        e.node);
}

std::string print_stmts(const StmtList& stmts, int indent) {
    std::ostringstream os;
    emit(os, stmts, indent);
    return os.str();
}

std::string print_source(const SourceUnit& unit) {
    std::ostringstream os;
    os << "class " << unit.class_name << " {\n";
    for (std::size_t i = 0; i < unit.methods.size(); ++i) {
        const auto& m = unit.methods[i];
        if (i) os << "\n";
        os << "  " << (m.is_public ? "public " : "") << (m.is_static ? "static " : "") << m.return_type << " "
           << m.name << "(";
        for (std::size_t k = 0; k < m.params.size(); ++k) {
            if (k) os << ", ";
            os << m.params[k].type << " " << m.params[k].name;
        }
        os << ")";
        if (!m.throws.empty()) {
            os << " throws ";
            for (std::size_t k = 0; k < m.throws.size(); ++k) os << (k ? ", " : "") << m.throws[k];
        }
        os << " {\n";
        emit(os, m.body, 2);
        os << "  }\n";
    }
    os << "}\n";
    return os.str();
}

}  // namespace leakfix::minijava
