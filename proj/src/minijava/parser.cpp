#include "leakfix/minijava/parser.hpp"

#include <cctype>
#include <charconv>
#include <set>

namespace leakfix::minijava {

namespace {

enum class Tok { Ident, Int, String, Punct, End };

struct Token {
    Tok kind = Tok::End;
    std::string text;
    int line = 1, column = 1;
};

std::vector<Token> lex(std::string_view src) {
    std::vector<Token> out;
    int line = 1, col = 1;
    std::size_t i = 0;
    auto advance = [&](std::size_t n) {
        while (n-- > 0 && i < src.size()) {
            if (src[i] == '\n') {
                ++line;
                col = 1;
            } else {
                ++col;
            }
            ++i;
        }
    };
    while (i < src.size()) {
        char c = src[i];
        if (std::isspace(static_cast<unsigned char>(c))) {
            advance(1);
            continue;
        }
        if (c == '/' && i + 1 < src.size() && src[i + 1] == '/') {
            while (i < src.size() && src[i] != '\n') advance(1);
            continue;
        }
        if (c == '/' && i + 1 < src.size() && src[i + 1] == '*') {
            int l = line, k = col;
            advance(2);
            while (i + 1 < src.size() && !(src[i] == '*' && src[i + 1] == '/')) advance(1);
            if (i + 1 >= src.size()) throw SourceError("unterminated comment", l, k);
            advance(2);
            continue;
        }
        Token t;
        t.line = line;
        t.column = col;
        if (std::isalpha(static_cast<unsigned char>(c)) || c == '_' || c == '$') {
            std::size_t j = i;
            while (j < src.size() &&
                   (std::isalnum(static_cast<unsigned char>(src[j])) || src[j] == '_' || src[j] == '$'))
                ++j;
            t.kind = Tok::Ident;
            t.text = std::string(src.substr(i, j - i));
            advance(j - i);
        } else if (std::isdigit(static_cast<unsigned char>(c))) {
            std::size_t j = i;
            while (j < src.size() && std::isdigit(static_cast<unsigned char>(src[j]))) ++j;
            t.kind = Tok::Int;
            t.text = std::string(src.substr(i, j - i));
            advance(j - i);
        } else if (c == '"') {
            std::string value;
            std::size_t j = i + 1;
            bool closed = false;
            while (j < src.size()) {
                if (src[j] == '\\') {
                    if (j + 1 >= src.size() || (src[j + 1] != '"' && src[j + 1] != '\\'))
                        throw SourceError("unsupported escape in string literal", line, col);
                    value += src[j + 1];
                    j += 2;
                } else if (src[j] == '"') {
                    closed = true;
                    ++j;
                    break;
                } else if (src[j] == '\n') {
                    break;
                } else {
                    value += src[j++];
                }
            }
            if (!closed) throw SourceError("unterminated string literal", line, col);
            t.kind = Tok::String;
            t.text = std::move(value);
            advance(j - i);
        } else if (std::string_view("{}();,.=-").find(c) != std::string_view::npos) {
            t.kind = Tok::Punct;
            t.text = std::string(1, c);
            advance(1);
        } else {
            throw SourceError(std::string("unexpected character '") + c + "'", line, col);
        }
        out.push_back(std::move(t));
    }
    Token end;
    end.line = line;
    end.column = col;
    out.push_back(end);
    return out;
}

const std::set<std::string>& reserved() {
    static const std::set<std::string> words = {"class", "public", "static", "throws", "try", "catch", "finally",
                                                "return", "if", "else", "new", "while", "for", "do", "switch",
                                                "break", "continue", "throw", "private", "protected", "final"};
    return words;
}

class Parser {
public:
    explicit Parser(std::vector<Token> toks) : toks_(std::move(toks)) {}

    SourceUnit unit() {
        SourceUnit u;
        expect_word("class");
        u.class_name = name("class name");
        expect("{");
        std::set<std::string> seen;
        while (!is("}")) {
            if (at_end()) fail("unterminated class body");
            const Token start = peek();
            MethodDecl m = method();
            if (!seen.insert(m.name).second)
                throw SourceError("duplicate method " + m.name, start.line, start.column);
            u.methods.push_back(std::move(m));
        }
        expect("}");
        if (!at_end()) fail("unexpected input after class");
        return u;
    }

private:
    std::vector<Token> toks_;
    std::size_t pos_ = 0;

    const Token& peek(std::size_t k = 0) const { return toks_[std::min(pos_ + k, toks_.size() - 1)]; }
    bool at_end() const { return peek().kind == Tok::End; }
    Token next() {
        Token t = peek();
        if (pos_ + 1 < toks_.size()) ++pos_;
        return t;
    }
    [[noreturn]] void fail(const std::string& msg) const {
        const Token& t = peek();
        throw SourceError(msg + (t.kind == Tok::End ? " (at end of input)" : " (got '" + t.text + "')"), t.line,
                          t.column);
    }
    bool is(const char* p, std::size_t k = 0) const { return peek(k).kind == Tok::Punct && peek(k).text == p; }
    bool is_word(const char* w, std::size_t k = 0) const {
        return peek(k).kind == Tok::Ident && peek(k).text == w;
    }
    void expect(const char* p) {
        if (!is(p)) fail(std::string("expected '") + p + "'");
        next();
    }
    void expect_word(const char* w) {
        if (!is_word(w)) fail(std::string("expected '") + w + "'");
        next();
    }
    std::string name(const char* what) {
        if (peek().kind != Tok::Ident) fail(std::string("expected ") + what);
        if (reserved().count(peek().text)) {
            const std::string& w = peek().text;
            if (w == "while" || w == "for" || w == "do" || w == "switch" || w == "throw" || w == "break" ||
                w == "continue")
                fail("construct outside the supported subset");
            fail(std::string("expected ") + what);
        }
        return next().text;
    }
    std::string qualified(const char* what) {
        std::string q = name(what);
        while (is(".") && peek(1).kind == Tok::Ident) {
            next();
            q += "." + name(what);
        }
        return q;
    }

    MethodDecl method() {
        MethodDecl m;
        if (is_word("public")) {
            next();
            m.is_public = true;
        }
        if (is_word("static")) {
            next();
            m.is_static = true;
        }
        if (is_word("private") || is_word("protected") || is_word("final")) fail("modifier outside the subset");
        m.return_type = qualified("return type");
        m.name = name("method name");
        expect("(");
        if (!is(")")) {
            for (;;) {
                Param p;
                p.type = qualified("parameter type");
                p.name = name("parameter name");
                m.params.push_back(std::move(p));
                if (!is(",")) break;
                next();
            }
        }
        expect(")");
        if (is_word("throws")) {
            next();
            for (;;) {
                m.throws.push_back(qualified("exception type"));
                if (!is(",")) break;
                next();
            }
        }
        m.body = block();
        return m;
    }

    StmtList block() {
        expect("{");
        StmtList out;
        while (!is("}")) {
            if (at_end()) fail("unterminated block");
            out.push_back(statement());
        }
        expect("}");
        return out;
    }

    std::vector<CatchClause> catches() {
        std::vector<CatchClause> out;
        while (is_word("catch")) {
            next();
            expect("(");
            CatchClause c;
            c.type = qualified("exception type");
            c.name = name("exception variable");
            expect(")");
            c.body = block();
            out.push_back(std::move(c));
        }
        return out;
    }

    Stmt try_statement() {
        const Token start = next();  // try
        std::vector<LocalDecl> resources;
        bool with_resources = false;
        if (is("(")) {
            with_resources = true;
            next();
            for (;;) {
                LocalDecl d;
                d.type = qualified("resource type");
                d.name = name("resource name");
                expect("=");
                d.init = expr();
                resources.push_back(std::move(d));
                if (is(";")) {
                    next();
                    if (is(")")) break;
                    continue;
                }
                break;
            }
            expect(")");
            if (resources.empty()) fail("empty resource list");
        }
        StmtList body = block();
        std::vector<CatchClause> cs = catches();
        std::optional<StmtList> fin;
        if (is_word("finally")) {
            next();
            fin = block();
        }
        if (with_resources) return Stmt{TryWithResources{std::move(resources), std::move(body), std::move(cs), std::move(fin)}};
        if (cs.empty()) {
            if (!fin) throw SourceError("try without catch or finally", start.line, start.column);
            return Stmt{TryFinally{std::move(body), std::move(*fin)}};
        }
        return Stmt{TryCatchFinally{std::move(body), std::move(cs), std::move(fin)}};
    }

    Stmt statement() {
        if (is_word("try")) return try_statement();
        if (is_word("return")) {
            next();
            Return r;
            if (!is(";")) r.value = expr();
            expect(";");
            return Stmt{std::move(r)};
        }
        if (is_word("if")) {
            next();
            expect("(");
            Expr cond = expr();
            auto* c = std::get_if<CallExpr>(&cond.node);
            if (!c) fail("if condition must be a call");
            CallExpr cc = std::move(*c);
            expect(")");
            If s{std::move(cc), block(), std::nullopt};
            if (is_word("else")) {
                next();
                s.else_body = block();
            }
            return Stmt{std::move(s)};
        }
        if (is("{")) return Stmt{BlockStmt{block()}};
        if (peek().kind != Tok::Ident) fail("expected statement");

        std::string head = qualified("statement");
        if (is("(")) {
            CallExpr c = call_tail(head);
            expect(";");
            return Stmt{ExprStmt{std::move(c)}};
        }
        LocalDecl d;
        d.type = std::move(head);
        d.name = name("local name");
        expect("=");
        d.init = expr();
        expect(";");
        return Stmt{std::move(d)};
    }

    CallExpr call_tail(const std::string& head) {
        CallExpr c;
        auto dot = head.find('.');
        if (dot == std::string::npos) {
            c.method = head;
        } else {
            if (head.find('.', dot + 1) != std::string::npos) fail("qualified static calls are outside the subset");
            c.target = head.substr(0, dot);
            c.method = head.substr(dot + 1);
        }
        c.args = args();
        return c;
    }

    std::vector<Expr> args() {
        expect("(");
        std::vector<Expr> out;
        if (!is(")")) {
            for (;;) {
                out.push_back(expr());
                if (!is(",")) break;
                next();
            }
        }
        expect(")");
        return out;
    }

    Expr expr() {
        if (is_word("new")) {
            next();
            NewExpr n;
            n.cls = qualified("class name");
            n.args = args();
            return Expr{std::move(n)};
        }
        if (is("-") && peek(1).kind == Tok::Int) {
            next();
            return Expr{IntExpr{parse_int("-" + next().text)}};
        }
        if (peek().kind == Tok::Int) return Expr{IntExpr{parse_int(next().text)}};
        if (peek().kind == Tok::String) return Expr{StrExpr{next().text}};
        std::string head = qualified("expression");
        if (is("(")) return Expr{call_tail(head)};
        if (head.find('.') != std::string::npos) fail("field access is outside the subset");
        return Expr{NameExpr{head}};
    }

    std::int64_t parse_int(const std::string& text) {
        std::int64_t v = 0;
        auto [p, ec] = std::from_chars(text.data(), text.data() + text.size(), v);
        if (ec != std::errc{} || p != text.data() + text.size()) fail("integer literal out of range");
        return v;
    }
};

}  // namespace

SourceUnit parse_source(std::string_view text) { return Parser(lex(text)).unit(); }

}  // namespace leakfix::minijava
