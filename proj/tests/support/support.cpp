#include "support.hpp"

#include <algorithm>
#include <deque>
#include <fstream>
#include <map>
#include <set>
#include <sstream>
#include <stdexcept>

#include "leakfix/ir/canonical.hpp"

#ifndef LEAKFIX_TEST_DATA
#error "LEAKFIX_TEST_DATA must point at tests/data"
#endif

namespace testsupport {

using namespace leakfix;

std::string data_path(const std::string& name) { return std::string(LEAKFIX_TEST_DATA) + "/" + name; }

std::string read_data(const std::string& name) {
    std::ifstream in(data_path(name), std::ios::binary);
    if (!in) throw std::runtime_error("missing test data " + name);
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

namespace {

template <class T>
const T& pick(Rand& rng, const std::vector<T>& v) {
    return v[rng.below(v.size())];
}

const std::vector<std::string> kSegments = {"java", "io", "File", "Main", "util", "zip", "T1", "Foo$Bar", "_x"};
const std::vector<std::string> kMethods = {"write", "close", "<init>", "read", "m1", "run", "flush"};
const std::vector<std::string> kVars = {"fos", "x", "$irvar0", "$irvar3", "return", "bis", "v_1", "e"};
const std::vector<std::string> kBuiltins = {"__unwrap_exception", "__set_flag", "__new_array"};

std::vector<std::string> class_path(Rand& rng) {
    std::vector<std::string> segs;
    std::size_t k = 1 + rng.below(3);
    for (std::size_t i = 0; i < k; ++i) segs.push_back(pick(rng, kSegments));
    return segs;
}

ir::TypeName random_type(Rand& rng, bool allow_void) {
    if (allow_void && rng.chance(4)) return ir::TypeName::void_type();
    if (rng.chance(5)) return ir::TypeName{0, {rng.chance(2) ? "int" : "boolean"}};
    return ir::TypeName{static_cast<int>(rng.below(3)), class_path(rng)};
}

std::string random_string(Rand& rng) {
    static const std::string alphabet = "ab /.:_\"\\xyz09#{}";
    std::string s;
    std::size_t k = rng.below(8);
    for (std::size_t i = 0; i < k; ++i) s += alphabet[rng.below(alphabet.size())];
    return s;
}

std::int64_t random_int(Rand& rng) {
    switch (rng.below(4)) {
        case 0: return static_cast<std::int64_t>(rng.below(10));
        case 1: return -static_cast<std::int64_t>(rng.below(1000));
        case 2: return std::numeric_limits<std::int64_t>::min();
        default: return static_cast<std::int64_t>(rng.below(1u << 30));
    }
}

}  // namespace

ir::Program random_program(Rand& rng, const IrGenOptions& opts) {
    ir::Program prog;
    const std::size_t nprocs = 1 + rng.below(opts.max_procs);
    for (std::size_t p = 0; p < nprocs; ++p) {
        ir::ProcDef proc;
        proc.name = ir::QualifiedName{class_path(rng), "m" + std::to_string(p)};
        const std::size_t nparams = rng.below(3);
        for (std::size_t k = 0; k < nparams; ++k) proc.params.push_back({"a" + std::to_string(k), random_type(rng, false)});
        proc.return_type = random_type(rng, true);

        const std::size_t nblocks = 1 + rng.below(opts.max_blocks);
        std::vector<std::string> labels;
        for (std::size_t b = 0; b < nblocks; ++b)
            labels.push_back(rng.chance(3) ? "L" + std::to_string(b) : "node_" + std::to_string(b));
        for (std::size_t b = 0; b < nblocks; ++b) {
            ir::Block block;
            block.label = labels[b];
            const bool exit = rng.chance(3);
            if (!exit) {
                std::size_t ns = 1 + rng.below(2);
                for (std::size_t k = 0; k < ns; ++k) block.successors.push_back(pick(rng, labels));
                std::size_t nh = rng.below(3) == 0 ? 0 : 1 + rng.below(2) / 2;
                for (std::size_t k = 0; k < nh; ++k) block.handlers.push_back(pick(rng, labels));
            }
            std::vector<std::string> defined;
            std::set<std::string> used_names;
            auto fresh = [&] {
                std::string name;
                do name = "n" + std::to_string(rng.below(40));
                while (!used_names.insert(name).second);
                return ir::Temp{name};
            };
            auto operand = [&]() -> ir::Operand {
                switch (rng.below(4)) {
                    case 0:
                        if (!defined.empty()) return ir::Temp{pick(rng, defined)};
                        [[fallthrough]];
                    case 1: return ir::IntLit{random_int(rng)};
                    case 2: return ir::StrLit{random_string(rng)};
                    default: return ir::VarRef{pick(rng, kVars)};
                }
            };
            const std::size_t ninstrs = rng.below(opts.max_instrs + 1);
            for (std::size_t i = 0; i < ninstrs; ++i) {
                std::size_t kind = rng.below(5);
                if (kind == 2 && defined.empty()) kind = 0;
                switch (kind) {
                    case 0: {
                        ir::Temp t = fresh();
                        block.instrs.push_back(ir::Alloc{t, ir::TypeName{0, class_path(rng)}});
                        defined.push_back(t.name);
                        break;
                    }
                    case 1: {
                        ir::StaticCall c;
                        c.callee = rng.chance(4) ? ir::QualifiedName{{}, pick(rng, kBuiltins)}
                                                 : ir::QualifiedName{class_path(rng), pick(rng, kMethods)};
                        std::size_t na = rng.below(4);
                        for (std::size_t k = 0; k < na; ++k) c.args.push_back(operand());
                        c.dest = fresh();
                        block.instrs.push_back(c);
                        defined.push_back(c.dest.name);
                        break;
                    }
                    case 2: {
                        ir::VirtualCall c;
                        c.recv = ir::Temp{pick(rng, defined)};
                        c.method = ir::QualifiedName{class_path(rng), pick(rng, kMethods)};
                        std::size_t na = rng.below(3);
                        for (std::size_t k = 0; k < na; ++k) c.args.push_back(operand());
                        c.dest = fresh();
                        block.instrs.push_back(c);
                        defined.push_back(c.dest.name);
                        break;
                    }
                    case 3:
                        block.instrs.push_back(ir::Store{pick(rng, kVars), operand(), random_type(rng, false)});
                        break;
                    default: {
                        ir::Load l;
                        l.type = random_type(rng, false);
                        if (!defined.empty() && rng.chance(3))
                            l.src = ir::Temp{pick(rng, defined)};
                        else
                            l.src = ir::VarRef{pick(rng, kVars)};
                        l.dest = fresh();
                        block.instrs.push_back(l);
                        defined.push_back(l.dest.name);
                    }
                }
            }
            proc.blocks.push_back(std::move(block));
        }
        prog.procedures.push_back(std::move(proc));
    }
    return prog;
}

ir::Program permute_temps(const ir::Program& p, Rand& rng) {
    ir::Program out = p;
    for (auto& proc : out.procedures)
        for (auto& block : proc.blocks) {
            std::map<std::string, std::string> m;
            std::set<std::string> taken;
            auto rename = [&](ir::Temp& t, bool def) {
                if (def) {
                    std::string name;
                    do name = "n" + std::to_string(100 + rng.below(900));
                    while (!taken.insert(name).second);
                    m[t.name] = name;
                }
                t.name = m.at(t.name);
            };
            auto use_op = [&](ir::Operand& op) {
                if (auto* t = std::get_if<ir::Temp>(&op)) rename(*t, false);
            };
            for (auto& instr : block.instrs)
                std::visit(
                    [&](auto& i) {
                        using T = std::decay_t<decltype(i)>;
                        if constexpr (std::is_same_v<T, ir::Alloc>) {
                            rename(i.dest, true);
                        } else if constexpr (std::is_same_v<T, ir::StaticCall>) {
                            for (auto& a : i.args) use_op(a);
                            rename(i.dest, true);
                        } else if constexpr (std::is_same_v<T, ir::VirtualCall>) {
                            rename(i.recv, false);
                            for (auto& a : i.args) use_op(a);
                            rename(i.dest, true);
                        } else if constexpr (std::is_same_v<T, ir::Store>) {
                            use_op(i.src);
                        } else {
                            if (auto* t = std::get_if<ir::Temp>(&i.src)) rename(*t, false);
                            rename(i.dest, true);
                        }
                    },
                    instr);
        }
    return out;
}

// ---- mini-Java ASTs ---------------------------------------------------

namespace {

using namespace minijava;

const std::vector<std::string> kNames = {"a", "b", "x1", "fos", "$t", "_u", "bis"};
const std::vector<std::string> kCalls = {"write", "run", "f", "g_2", "close", "read"};
const std::vector<std::string> kTypes = {"int", "String", "FileOutputStream", "java.io.File", "a.b.C", "boolean"};

Expr random_expr(Rand& rng, int depth);

std::vector<Expr> random_args(Rand& rng, int depth) {
    std::vector<Expr> out;
    std::size_t k = depth > 0 ? rng.below(3) : 0;
    for (std::size_t i = 0; i < k; ++i) out.push_back(random_expr(rng, depth - 1));
    return out;
}

CallExpr random_call(Rand& rng, int depth) {
    return call(rng.chance(3) ? "" : pick(rng, kNames), pick(rng, kCalls), random_args(rng, depth));
}

Expr random_expr(Rand& rng, int depth) {
    switch (rng.below(depth > 0 ? 5 : 3)) {
        case 0: return int_expr(random_int(rng));
        case 1: {
            std::string s = random_string(rng);
            std::replace(s.begin(), s.end(), '#', '\t');
            return str_expr(s);
        }
        case 2: return name_expr(pick(rng, kNames));
        case 3: return new_expr(pick(rng, kTypes), random_args(rng, depth));
        default: return Expr{random_call(rng, depth)};
    }
}

StmtList random_stmts(Rand& rng, int depth, std::size_t max_len);

std::vector<CatchClause> random_catches(Rand& rng, int depth, std::size_t lo) {
    std::vector<CatchClause> out;
    std::size_t k = lo + rng.below(2);
    for (std::size_t i = 0; i < k; ++i)
        out.push_back({rng.chance(2) ? "IOException" : "java.lang.Exception", pick(rng, kNames),
                       random_stmts(rng, depth - 1, 2)});
    return out;
}

Stmt random_stmt(Rand& rng, int depth) {
    switch (rng.below(depth > 0 ? 8 : 3)) {
        case 0: return local(pick(rng, kTypes), pick(rng, kNames), random_expr(rng, 2));
        case 1: return expr_stmt(random_call(rng, 2));
        case 2: return Stmt{Return{rng.chance(2) ? std::nullopt : std::optional<Expr>(random_expr(rng, 1))}};
        case 3: return Stmt{TryFinally{random_stmts(rng, depth - 1, 3), random_stmts(rng, depth - 1, 2)}};
        case 4: {
            std::optional<StmtList> fin;
            if (rng.chance(2)) fin = random_stmts(rng, depth - 1, 2);
            return Stmt{TryCatchFinally{random_stmts(rng, depth - 1, 3), random_catches(rng, depth, 1), fin}};
        }
        case 5: {
            TryWithResources t;
            std::size_t k = 1 + rng.below(2);
            for (std::size_t i = 0; i < k; ++i)
                t.resources.push_back(LocalDecl{pick(rng, kTypes), pick(rng, kNames), random_expr(rng, 2)});
            t.body = random_stmts(rng, depth - 1, 3);
            t.catches = random_catches(rng, depth, 0);
            if (rng.chance(2)) t.finally_body = random_stmts(rng, depth - 1, 2);
            return Stmt{t};
        }
        case 6: {
            std::optional<StmtList> other;
            if (rng.chance(2)) other = random_stmts(rng, depth - 1, 2);
            return Stmt{If{random_call(rng, 1), random_stmts(rng, depth - 1, 2), other}};
        }
        default: return Stmt{BlockStmt{random_stmts(rng, depth - 1, 3)}};
    }
}

StmtList random_stmts(Rand& rng, int depth, std::size_t max_len) {
    StmtList out;
    std::size_t k = rng.below(max_len + 1);
    for (std::size_t i = 0; i < k; ++i) out.push_back(random_stmt(rng, depth));
    return out;
}

}  // namespace

SourceUnit random_unit(Rand& rng) {
    SourceUnit u;
    static const std::vector<std::string> classes = {"Main", "C", "Worker$1"};
    u.class_name = pick(rng, classes);
    std::size_t k = rng.below(4);
    for (std::size_t i = 0; i < k; ++i) {
        MethodDecl m;
        m.is_public = rng.chance(2);
        m.is_static = rng.chance(2);
        m.return_type = rng.chance(2) ? "void" : pick(rng, kTypes);
        m.name = "m" + std::to_string(i);
        std::size_t np = rng.below(3);
        for (std::size_t p = 0; p < np; ++p) m.params.push_back({pick(rng, kTypes), "p" + std::to_string(p)});
        std::size_t nt = rng.below(3);
        for (std::size_t t = 0; t < nt; ++t) m.throws.push_back(t % 2 ? "java.io.IOException" : "Exception");
        m.body = random_stmts(rng, 3, 4);
        u.methods.push_back(std::move(m));
    }
    return u;
}

// ---- oracles and comparisons ------------------------------------------

std::size_t brute_edit_distance(const std::vector<std::string>& a, const std::vector<std::string>& b) {
    std::function<std::size_t(std::size_t, std::size_t)> d = [&](std::size_t i, std::size_t j) -> std::size_t {
        if (i == 0) return j;
        if (j == 0) return i;
        // a matching last pair can always be aligned (standard exchange argument)
        if (a[i - 1] == b[j - 1]) return d(i - 1, j - 1);
        return 1 + std::min({d(i - 1, j), d(i, j - 1), d(i - 1, j - 1)});
    };
    return d(a.size(), b.size());
}

ir::ProcDef virtual_to_static(const ir::ProcDef& proc) {
    ir::ProcDef out = proc;
    for (auto& b : out.blocks)
        for (auto& instr : b.instrs)
            if (auto* v = std::get_if<ir::VirtualCall>(&instr)) {
                ir::StaticCall s;
                s.dest = v->dest;
                s.callee = v->method;
                s.args.push_back(v->recv);
                s.args.insert(s.args.end(), v->args.begin(), v->args.end());
                instr = s;
            }
    return out;
}

bool equal_up_to_labels(const ir::ProcDef& a, const ir::ProcDef& b, std::string* why) {
    auto fail = [&](const std::string& msg) {
        if (why) *why = msg;
        return false;
    };
    if (a.name != b.name || a.params != b.params || a.return_type != b.return_type)
        return fail("signatures differ");
    if (a.blocks.size() != b.blocks.size()) return fail("block counts differ");
    if (a.blocks.empty()) return true;

    std::map<std::string, std::string> fwd, back;
    std::deque<std::pair<std::string, std::string>> work{{a.blocks.front().label, b.blocks.front().label}};
    fwd[a.blocks.front().label] = b.blocks.front().label;
    back[b.blocks.front().label] = a.blocks.front().label;
    auto bind = [&](const std::string& x, const std::string& y) {
        auto f = fwd.find(x);
        auto r = back.find(y);
        if (f != fwd.end() || r != back.end()) return f != fwd.end() && f->second == y && r != back.end() && r->second == x;
        fwd[x] = y;
        back[y] = x;
        work.push_back({x, y});
        return true;
    };
    while (!work.empty()) {
        auto [x, y] = work.front();
        work.pop_front();
        const ir::Block* bx = a.find_block(x);
        const ir::Block* by = b.find_block(y);
        if (bx->successors.size() != by->successors.size() || bx->handlers.size() != by->handlers.size())
            return fail("edge shape of #" + x + " vs #" + y);
        for (std::size_t k = 0; k < bx->successors.size(); ++k)
            if (!bind(bx->successors[k], by->successors[k])) return fail("successor of #" + x + " vs #" + y);
        for (std::size_t k = 0; k < bx->handlers.size(); ++k)
            if (!bind(bx->handlers[k], by->handlers[k])) return fail("handler of #" + x + " vs #" + y);
    }
    if (fwd.size() != a.blocks.size()) return fail("unreachable blocks left unmatched");

    for (const auto& [x, y] : fwd) {
        ir::ProcDef pa, pb;
        pa.blocks = {*a.find_block(x)};
        pb.blocks = {*b.find_block(y)};
        pa = ir::renumber_temps(pa);
        pb = ir::renumber_temps(pb);
        if (pa.blocks[0].instrs != pb.blocks[0].instrs) return fail("instructions of #" + x + " vs #" + y);
    }
    return true;
}

namespace {

bool is_close_pair(const std::vector<ir::Instr>& instrs, std::size_t i, const std::string& close_method) {
    if (i + 1 >= instrs.size()) return false;
    auto* l = std::get_if<ir::Load>(&instrs[i]);
    auto* c = std::get_if<ir::VirtualCall>(&instrs[i + 1]);
    return l && c && std::holds_alternative<ir::VarRef>(l->src) && c->recv == l->dest && c->args.empty() &&
           c->method.method == close_method;
}

}  // namespace

std::size_t count_close_pairs(const ir::ProcDef& proc, const std::string& close_method) {
    std::size_t n = 0;
    for (const auto& b : proc.blocks)
        for (std::size_t i = 0; i + 1 < b.instrs.size(); ++i)
            if (is_close_pair(b.instrs, i, close_method)) ++n;
    return n;
}

bool only_close_pairs_inserted(const ir::ProcDef& original, const ir::ProcDef& fixed,
                               const std::string& close_method) {
    if (original.blocks.size() != fixed.blocks.size()) return false;
    for (std::size_t b = 0; b < original.blocks.size(); ++b) {
        const auto& o = original.blocks[b];
        const auto& f = fixed.blocks[b];
        if (o.label != f.label || o.successors != f.successors || o.handlers != f.handlers) return false;
        std::size_t i = 0, j = 0;
        while (j < f.instrs.size()) {
            if (i < o.instrs.size() && o.instrs[i] == f.instrs[j]) {
                ++i;
                ++j;
            } else if (is_close_pair(f.instrs, j, close_method)) {
                j += 2;
            } else {
                return false;
            }
        }
        if (i != o.instrs.size()) return false;
    }
    return true;
}

}  // namespace testsupport
