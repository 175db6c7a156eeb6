#pragma once

// AST for the Java subset the frontend accepts. Types are kept as written
// (`FileOutputStream`, `java.io.File`); resolution to IR class names
// happens in the compiler.

#include <cstdint>
#include <memory>
#include <optional>
#include <string>
#include <variant>
#include <vector>

namespace leakfix::minijava {

struct Expr;

struct IntExpr {
    std::int64_t value = 0;
    bool operator==(const IntExpr&) const = default;
};
struct StrExpr {
    std::string value;
    bool operator==(const StrExpr&) const = default;
};
struct NameExpr {
    std::string name;
    bool operator==(const NameExpr&) const = default;
};
struct NewExpr {
    std::string cls;
    std::vector<Expr> args;
    bool operator==(const NewExpr&) const;
};
/// `target.method(args)`, or `method(args)` when target is empty.
struct CallExpr {
    std::string target;
    std::string method;
    std::vector<Expr> args;
    bool operator==(const CallExpr&) const;
};

struct Expr {
    std::variant<IntExpr, StrExpr, NameExpr, NewExpr, CallExpr> node;
    bool operator==(const Expr&) const = default;
};

struct Stmt;
using StmtList = std::vector<Stmt>;

struct LocalDecl {
    std::string type;
    std::string name;
    Expr init;
    bool operator==(const LocalDecl&) const = default;
};
struct ExprStmt {
    CallExpr call;
    bool operator==(const ExprStmt&) const = default;
};
struct CatchClause {
    std::string type;
    std::string name;
    StmtList body;
    bool operator==(const CatchClause&) const;
};
struct TryFinally {
    StmtList body;
    StmtList finally_body;
    bool operator==(const TryFinally&) const;
};
struct TryCatchFinally {
    StmtList body;
    std::vector<CatchClause> catches;  // nonempty
    std::optional<StmtList> finally_body;
    bool operator==(const TryCatchFinally&) const;
};
struct TryWithResources {
    std::vector<LocalDecl> resources;  // nonempty
    StmtList body;
    std::vector<CatchClause> catches;
    std::optional<StmtList> finally_body;
    bool operator==(const TryWithResources&) const;
};
struct Return {
    std::optional<Expr> value;
    bool operator==(const Return&) const = default;
};
struct If {
    CallExpr cond;
    StmtList then_body;
    std::optional<StmtList> else_body;
    bool operator==(const If&) const;
};
struct BlockStmt {
    StmtList body;
    bool operator==(const BlockStmt&) const;
};

struct Stmt {
    std::variant<LocalDecl, ExprStmt, TryFinally, TryCatchFinally, TryWithResources, Return, If, BlockStmt> node;
    bool operator==(const Stmt&) const = default;
};

struct Param {
    std::string type;
    std::string name;
    bool operator==(const Param&) const = default;
};

struct MethodDecl {
    bool is_public = false;
    bool is_static = false;
    std::string return_type;
    std::string name;
    std::vector<Param> params;
    std::vector<std::string> throws;
    StmtList body;
    bool operator==(const MethodDecl&) const = default;
};

struct SourceUnit {
    std::string class_name;
    std::vector<MethodDecl> methods;

    const MethodDecl* find_method(const std::string& name) const;
    MethodDecl* find_method(const std::string& name);
    bool operator==(const SourceUnit&) const = default;
};

// construction helpers, mostly for generators and tests
inline Expr int_expr(std::int64_t v) { return Expr{IntExpr{v}}; }
inline Expr str_expr(std::string v) { return Expr{StrExpr{std::move(v)}}; }
inline Expr name_expr(std::string v) { return Expr{NameExpr{std::move(v)}}; }
Expr new_expr(std::string cls, std::vector<Expr> args = {});
CallExpr call(std::string target, std::string method, std::vector<Expr> args = {});
Stmt local(std::string type, std::string name, Expr init);
Stmt expr_stmt(CallExpr c);
/// `v.close();`
Stmt close_stmt(const std::string& var);

class SourceError : public std::runtime_error {
public:
    SourceError(const std::string& message, int line = 0, int column = 0);
    int line() const { return line_; }
    int column() const { return column_; }

private:
    int line_, column_;
};

}  // namespace leakfix::minijava
