#include "leakfix/minijava/ast.hpp"

namespace leakfix::minijava {

bool NewExpr::operator==(const NewExpr&) const = default;
bool CallExpr::operator==(const CallExpr&) const = default;
bool CatchClause::operator==(const CatchClause&) const = default;
bool TryFinally::operator==(const TryFinally&) const = default;
bool TryCatchFinally::operator==(const TryCatchFinally&) const = default;
bool TryWithResources::operator==(const TryWithResources&) const = default;
bool If::operator==(const If&) const = default;
bool BlockStmt::operator==(const BlockStmt&) const = default;

const MethodDecl* SourceUnit::find_method(const std::string& name) const {
    for (const auto& m : methods)
        if (m.name == name) return &m;
    return nullptr;
}

MethodDecl* SourceUnit::find_method(const std::string& name) {
    for (auto& m : methods)
        if (m.name == name) return &m;
    return nullptr;
}

Expr new_expr(std::string cls, std::vector<Expr> args) { return Expr{NewExpr{std::move(cls), std::move(args)}}; }

CallExpr call(std::string target, std::string method, std::vector<Expr> args) {
    return CallExpr{std::move(target), std::move(method), std::move(args)};
}

Stmt local(std::string type, std::string name, Expr init) {
    return Stmt{LocalDecl{std::move(type), std::move(name), std::move(init)}};
}

Stmt expr_stmt(CallExpr c) { return Stmt{ExprStmt{std::move(c)}}; }

Stmt close_stmt(const std::string& var) { return expr_stmt(call(var, "close")); }

namespace {
std::string at(const std::string& message, int line, int column) {
    if (line <= 0) return message;
    return std::to_string(line) + ":" + std::to_string(column) + ": " + message;
}
}  // namespace

SourceError::SourceError(const std::string& message, int line, int column)
    : std::runtime_error(at(message, line, column)), line_(line), column_(column) {}

}  // namespace leakfix::minijava
