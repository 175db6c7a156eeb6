#include "leakfix/ir/parser.hpp"

#include <cctype>
#include <charconv>
#include <map>
#include <set>

namespace leakfix::ir {

namespace {

enum class Tok { Ident, Int, String, Punct, End };

struct Token {
    Tok kind = Tok::End;
    std::string text;
    int line = 1;
    int column = 1;
};

bool ident_start(char c) { return std::isalpha(static_cast<unsigned char>(c)) || c == '_' || c == '$'; }
bool ident_char(char c) { return std::isalnum(static_cast<unsigned char>(c)) || c == '_' || c == '$'; }

std::vector<Token> lex(std::string_view src) {
    std::vector<Token> out;
    int line = 1, col = 1;
    std::size_t i = 0;
    auto advance = [&](std::size_t n) {
        for (std::size_t k = 0; k < n; ++k) {
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
        Token t;
        t.line = line;
        t.column = col;
        if (ident_start(c)) {
            std::size_t j = i;
            while (j < src.size() && ident_char(src[j])) ++j;
            t.kind = Tok::Ident;
            t.text = std::string(src.substr(i, j - i));
            advance(j - i);
        } else if (std::isdigit(static_cast<unsigned char>(c)) ||
                   (c == '-' && i + 1 < src.size() && std::isdigit(static_cast<unsigned char>(src[i + 1])))) {
            std::size_t j = i + 1;
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
                        throw IrError(IrError::Kind::Syntax, "invalid escape in string literal", line, col);
                    value += src[j + 1];
                    j += 2;
                } else if (src[j] == '"') {
                    closed = true;
                    ++j;
                    break;
                } else {
                    value += src[j++];
                }
            }
            if (!closed) throw IrError(IrError::Kind::Syntax, "unterminated string literal", line, col);
            t.kind = Tok::String;
            t.text = std::move(value);
            advance(j - i);
        } else {
            std::size_t len = 1;
            if (c == ':' && i + 1 < src.size() && src[i + 1] == ':') len = 2;
            if (c == '<' && i + 1 < src.size() && src[i + 1] == '-') len = 2;
            static const std::string_view single = "#:.,()<>=&*{}";
            if (len == 1 && single.find(c) == std::string_view::npos)
                throw IrError(IrError::Kind::Syntax, std::string("unexpected character '") + c + "'", line, col);
            t.kind = Tok::Punct;
            t.text = std::string(src.substr(i, len));
            advance(len);
        }
        out.push_back(std::move(t));
    }
    Token end;
    end.kind = Tok::End;
    end.line = line;
    end.column = col;
    out.push_back(end);
    return out;
}

bool is_temp_name(const std::string& s) { return temp_number(s).has_value(); }

class Parser {
public:
    explicit Parser(std::vector<Token> toks) : toks_(std::move(toks)) {}

    Program program() {
        Program p;
        std::set<std::string> names;
        while (!at_end()) {
            const Token& start = peek();
            ProcDef proc = procedure();
            if (!names.insert(proc.name.str()).second)
                throw IrError(IrError::Kind::DuplicateProcedure, "duplicate procedure " + proc.name.str(),
                              start.line, start.column);
            p.procedures.push_back(std::move(proc));
        }
        return p;
    }

    TypeName lone_type() {
        TypeName t = type();
        if (!at_end()) fail("trailing input after type");
        return t;
    }

private:
    std::vector<Token> toks_;
    std::size_t pos_ = 0;

    const Token& peek(std::size_t ahead = 0) const {
        return toks_[std::min(pos_ + ahead, toks_.size() - 1)];
    }
    bool at_end() const { return peek().kind == Tok::End; }
    Token next() {
        Token t = peek();
        if (pos_ < toks_.size() - 1) ++pos_;
        return t;
    }
    [[noreturn]] void fail(const std::string& msg, IrError::Kind kind = IrError::Kind::Syntax) const {
        const Token& t = peek();
        std::string got = t.kind == Tok::End ? "end of input" : "'" + t.text + "'";
        throw IrError(kind, msg + " (got " + got + ")", t.line, t.column);
    }
    bool is_punct(const char* p, std::size_t ahead = 0) const {
        const Token& t = peek(ahead);
        return t.kind == Tok::Punct && t.text == p;
    }
    bool is_ident(const char* word, std::size_t ahead = 0) const {
        const Token& t = peek(ahead);
        return t.kind == Tok::Ident && t.text == word;
    }
    void expect_punct(const char* p) {
        if (!is_punct(p)) fail(std::string("expected '") + p + "'");
        next();
    }
    void expect_word(const char* w) {
        if (!is_ident(w)) fail(std::string("expected '") + w + "'");
        next();
    }
    std::string ident(const char* what) {
        if (peek().kind != Tok::Ident) fail(std::string("expected ") + what);
        return next().text;
    }

    ProcDef procedure() {
        expect_word("define");
        ProcDef proc;
        proc.name = qualified_name(true);
        if (proc.name.class_path.empty() && proc.name.method.empty()) fail("expected procedure name");
        expect_punct("(");
        if (!is_punct(")")) {
            for (;;) {
                Param p;
                p.name = ident("parameter name");
                expect_punct(":");
                p.type = type();
                proc.params.push_back(std::move(p));
                if (!is_punct(",")) break;
                next();
            }
        }
        expect_punct(")");
        expect_punct(":");
        proc.return_type = type();
        expect_punct("{");

        struct Ref {
            std::string label;
            int line, column;
            bool handler;
        };
        std::vector<Ref> refs;
        std::map<std::string, std::pair<int, int>> defined;

        while (!is_punct("}")) {
            if (at_end()) fail("unterminated procedure body");
            const Token& hdr = peek();
            Block b = block(refs);
            if (defined.count(b.label))
                throw IrError(IrError::Kind::DuplicateLabel, "duplicate label #" + b.label, hdr.line, hdr.column);
            defined[b.label] = {hdr.line, hdr.column};
            if (b.is_exit() && !b.handlers.empty())
                throw IrError(IrError::Kind::HandlerOnExit, "exit block #" + b.label + " has handlers", hdr.line,
                              hdr.column);
            proc.blocks.push_back(std::move(b));
        }
        expect_punct("}");
        for (const auto& r : refs)
            if (!defined.count(r.label))
                throw IrError(IrError::Kind::UnresolvedLabel,
                              std::string(r.handler ? "handler" : "successor") + " label " + r.label + " is not defined",
                              r.line, r.column);
        if (proc.blocks.empty()) fail("procedure has no blocks", IrError::Kind::Malformed);
        return proc;
    }

    template <class Refs>
    Block block(Refs& refs) {
        expect_punct("#");
        Block b;
        b.label = ident("block label");
        expect_punct(":");
        std::set<std::string> defined_temps;
        while (!is_ident("jmp")) {
            if (at_end() || is_punct("}") || is_punct("#")) fail("block #" + b.label + " has no jmp terminator");
            const Token& start = peek();
            Instr instr = instruction();
            if (const Temp* t = defined_temp(instr))
                if (!defined_temps.insert(t->name).second)
                    throw IrError(IrError::Kind::TempRedefined, "temp " + t->name + " assigned twice in #" + b.label,
                                  start.line, start.column);
            b.instrs.push_back(std::move(instr));
        }
        next();  // jmp
        auto label_list = [&](std::vector<std::string>& into, bool handler) {
            for (;;) {
                const Token& t = peek();
                into.push_back(ident("label"));
                refs.push_back({into.back(), t.line, t.column, handler});
                if (!is_punct(",")) break;
                next();
            }
        };
        if (peek().kind == Tok::Ident) label_list(b.successors, false);
        if (is_punct(".") && is_ident("handlers", 1)) {
            next();
            next();
            label_list(b.handlers, true);
        }
        if (!(is_punct("#") || is_punct("}"))) fail("expected next block or '}' after terminator");
        return b;
    }

    // IDENT {:: IDENT} [. method]; without a dot the last segment is the
    // method and the class path is empty (builtins).
    QualifiedName qualified_name(bool allow_builtin) {
        QualifiedName q;
        std::vector<std::string> segs;
        segs.push_back(ident("name"));
        while (is_punct("::")) {
            next();
            segs.push_back(ident("name segment"));
        }
        if (is_punct(".") && !is_ident("handlers", 1)) {
            next();
            q.class_path = std::move(segs);
            q.method = method_name();
            return q;
        }
        if (!allow_builtin || segs.size() != 1) fail("expected '.' and method name");
        q.method = segs[0];
        return q;
    }

    std::string method_name() {
        if (is_punct("<")) {
            next();
            std::string inner = ident("method name");
            expect_punct(">");
            return "<" + inner + ">";
        }
        return ident("method name");
    }

    TypeName type() {
        TypeName t;
        while (is_punct("*")) {
            next();
            ++t.pointer_depth;
        }
        t.segments.push_back(ident("type name"));
        while (is_punct("::")) {
            next();
            t.segments.push_back(ident("type name segment"));
        }
        if (t.pointer_depth > 0 && t.segments.size() == 1 && t.segments[0] == "void")
            fail("pointer to void");
        return t;
    }

    Temp temp() {
        const Token& t = peek();
        if (t.kind != Tok::Ident || !is_temp_name(t.text)) fail("expected temp (n<digits>)");
        return Temp{next().text};
    }

    Operand operand() {
        const Token& t = peek();
        if (t.kind == Tok::Int) {
            std::int64_t v = 0;
            auto [p, ec] = std::from_chars(t.text.data(), t.text.data() + t.text.size(), v);
            if (ec != std::errc{} || p != t.text.data() + t.text.size()) fail("integer literal out of range");
            next();
            return IntLit{v};
        }
        if (t.kind == Tok::String) return StrLit{next().text};
        if (is_punct("&")) {
            next();
            return VarRef{ident("variable name")};
        }
        return temp();
    }

    std::vector<Operand> args() {
        std::vector<Operand> out;
        expect_punct("(");
        if (!is_punct(")")) {
            for (;;) {
                out.push_back(operand());
                if (!is_punct(",")) break;
                next();
            }
        }
        expect_punct(")");
        return out;
    }

    Instr instruction() {
        if (is_ident("store")) {
            next();
            Store s;
            expect_punct("&");
            s.var = ident("variable name");
            expect_punct("<-");
            s.src = operand();
            expect_punct(":");
            s.type = type();
            return s;
        }
        Temp dest = temp();
        if (is_punct(":")) {
            next();
            Load l;
            l.dest = std::move(dest);
            l.type = type();
            expect_punct("=");
            expect_word("load");
            if (is_punct("&")) {
                next();
                l.src = VarRef{ident("variable name")};
            } else {
                l.src = temp();
            }
            return l;
        }
        expect_punct("=");
        if (is_ident("__sil_allocate") && is_punct("(", 1)) {
            next();
            expect_punct("(");
            expect_punct("<");
            Alloc a;
            a.dest = std::move(dest);
            a.cls = type();
            expect_punct(">");
            expect_punct(")");
            return a;
        }
        if (peek().kind == Tok::Ident && is_temp_name(peek().text) && is_punct(".", 1)) {
            VirtualCall v;
            v.dest = std::move(dest);
            v.recv = temp();
            expect_punct(".");
            v.method = qualified_name(false);
            v.args = args();
            return v;
        }
        StaticCall s;
        s.dest = std::move(dest);
        s.callee = qualified_name(true);
        s.args = args();
        return s;
    }
};

}  // namespace

Program parse_program(std::string_view text) { return Parser(lex(text)).program(); }

TypeName parse_type(std::string_view text) { return Parser(lex(text)).lone_type(); }

}  // namespace leakfix::ir
