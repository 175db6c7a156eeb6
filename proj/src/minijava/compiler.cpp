#include "leakfix/minijava/compiler.hpp"

#include <algorithm>
#include <map>
#include <set>

namespace leakfix::minijava {

namespace {

using ir::TypeName;

std::vector<std::string> split_dotted(const std::string& name) {
    std::vector<std::string> out;
    std::size_t start = 0;
    for (;;) {
        auto dot = name.find('.', start);
        out.push_back(name.substr(start, dot - start));
        if (dot == std::string::npos) return out;
        start = dot + 1;
    }
}

std::vector<std::string> split_colons(const std::string& name) {
    std::vector<std::string> out;
    std::size_t start = 0;
    for (;;) {
        auto sep = name.find("::", start);
        out.push_back(name.substr(start, sep - start));
        if (sep == std::string::npos) return out;
        start = sep + 2;
    }
}

class TypeResolver {
public:
    TypeResolver(const std::string& own_class, const analysis::ResourceConfig& config) {
        add(own_class);
        for (const char* b : {"java::io::File", "java::lang::String", "java::lang::Exception",
                              "java::io::IOException", "java::lang::Object"})
            add(b);
        // resource classes win over the builtin table on a simple-name clash
        for (const auto& r : config.resource_classes) simple_[split_colons(r).back()] = {r};
    }

    /// `int`, `boolean` and `void` stay primitive; others become pointers.
    TypeName resolve(const std::string& source_type) const {
        if (source_type == "void") return TypeName::void_type();
        if (source_type == "int" || source_type == "boolean") return TypeName{0, {source_type}};
        return TypeName::pointer_to(class_path(source_type));
    }

    std::vector<std::string> class_path(const std::string& source_type) const {
        if (source_type.find('.') != std::string::npos) return split_dotted(source_type);
        auto it = simple_.find(source_type);
        if (it == simple_.end()) throw SourceError("unknown class " + source_type);
        return split_colons(it->second);
    }

private:
    std::map<std::string, std::string> simple_;

    void add(const std::string& qualified) { simple_.emplace(split_colons(qualified).back(), qualified); }
};

struct BuildBlock {
    std::vector<ir::Instr> instrs;
    std::vector<std::size_t> successors;
    std::vector<std::size_t> handlers;
};

constexpr std::size_t kEntry = 0, kExit = 1;

struct FinallyFrame {
    const StmtList* body;
    std::size_t outer_handler;
};

struct Context {
    std::size_t handler;
    std::vector<FinallyFrame> frames;
};

class MethodCompiler {
public:
    MethodCompiler(const SourceUnit& unit, const MethodDecl& m, const analysis::ResourceConfig& config,
                   const TypeResolver& types)
        : unit_(unit), method_(m), config_(config), types_(types) {}

    ir::ProcDef compile() {
        ir::ProcDef proc;
        proc.name = ir::QualifiedName{{unit_.class_name}, method_.name};
        proc.return_type = types_.resolve(method_.return_type);
        scopes_.emplace_back();
        for (const auto& p : method_.params) {
            TypeName t = types_.resolve(p.type);
            if (t.is_void()) throw SourceError("parameter " + p.name + " of type void");
            declare(p.name, t);
            proc.params.push_back({p.name, t});
        }

        blocks_.resize(2);
        blocks_[kEntry].handlers = {kExit};
        if (method_.body.empty()) {
            blocks_[kEntry].successors = {kExit};
        } else {
            std::size_t e = new_block({kExit});
            blocks_[e].successors = {kExit};
            Dangling d{kEntry};
            d = lower_list(method_.body, Context{e, {}}, d);
            if (!d.empty()) {
                std::size_t end = new_block({e});
                patch(d, end);
                blocks_[end].successors = {kExit};
            }
        }

        for (std::size_t i = 0; i < blocks_.size(); ++i) {
            ir::Block b;
            b.label = label(i);
            b.instrs = std::move(blocks_[i].instrs);
            for (auto s : blocks_[i].successors) b.successors.push_back(label(s));
            for (auto h : blocks_[i].handlers) b.handlers.push_back(label(h));
            proc.blocks.push_back(std::move(b));
        }
        return proc;
    }

private:
    using Dangling = std::vector<std::size_t>;

    const SourceUnit& unit_;
    const MethodDecl& method_;
    const analysis::ResourceConfig& config_;
    const TypeResolver& types_;
    std::vector<BuildBlock> blocks_;
    std::vector<std::map<std::string, TypeName>> scopes_;
    std::uint64_t next_temp_ = 0;
    std::uint64_t next_irvar_ = 0;

    static std::string label(std::size_t i) { return "node_" + std::to_string(i); }

    std::size_t new_block(std::vector<std::size_t> handlers) {
        blocks_.push_back(BuildBlock{{}, {}, std::move(handlers)});
        return blocks_.size() - 1;
    }

    void patch(const Dangling& d, std::size_t target) {
        for (auto b : d) {
            auto& s = blocks_[b].successors;
            if (std::find(s.begin(), s.end(), target) == s.end()) s.push_back(target);
        }
    }

    /// A fresh block fed by every dangling edge; the dangling set becomes it.
    std::size_t open_block(Dangling& d, const Context& ctx) {
        std::size_t b = new_block({ctx.handler});
        patch(d, b);
        d = {b};
        return b;
    }

    ir::Temp fresh() { return ir::Temp{"n" + std::to_string(next_temp_++)}; }

    const TypeName* lookup(const std::string& name) const {
        for (auto it = scopes_.rbegin(); it != scopes_.rend(); ++it) {
            auto f = it->find(name);
            if (f != it->end()) return &f->second;
        }
        return nullptr;
    }

    void declare(const std::string& name, const TypeName& t) {
        if (lookup(name)) throw SourceError("local " + name + " is already declared");
        scopes_.back().emplace(name, t);
    }

    // ---- expressions -------------------------------------------------

    struct Value {
        ir::Operand op;
        TypeName type;
    };

    /// Hoists every `new` nested inside e's arguments into its own block,
    /// innermost first, recording the temporary local that replaces it.
    void hoist_expr(const Expr& e, Dangling& d, const Context& ctx, std::map<const NewExpr*, std::string>& hoisted) {
        if (auto* n = std::get_if<NewExpr>(&e.node)) {
            hoist_args(n->args, d, ctx, hoisted);
            std::size_t b = open_block(d, ctx);
            std::string var = "$irvar" + std::to_string(next_irvar_++);
            ir::Temp obj = emit_new(b, *n, hoisted);
            blocks_[b].instrs.push_back(ir::Store{var, obj, types_.resolve(n->cls)});
            hoisted[n] = var;
            scopes_.front().emplace(var, types_.resolve(n->cls));
        } else if (auto* c = std::get_if<CallExpr>(&e.node)) {
            hoist_args(c->args, d, ctx, hoisted);
        }
    }

    void hoist_args(const std::vector<Expr>& args, Dangling& d, const Context& ctx,
                    std::map<const NewExpr*, std::string>& hoisted) {
        for (const auto& a : args) hoist_expr(a, d, ctx, hoisted);
    }

    ir::Temp emit_new(std::size_t b, const NewExpr& n, const std::map<const NewExpr*, std::string>& hoisted) {
        TypeName t = types_.resolve(n.cls);
        if (t.pointer_depth == 0) throw SourceError("cannot instantiate " + n.cls);
        ir::Temp obj = fresh();
        blocks_[b].instrs.push_back(ir::Alloc{obj, TypeName{0, t.segments}});
        std::vector<ir::Operand> args{obj};
        for (const auto& a : n.args) args.push_back(eval(b, a, hoisted).op);
        blocks_[b].instrs.push_back(ir::StaticCall{fresh(), ir::QualifiedName{t.segments, "<init>"}, std::move(args)});
        return obj;
    }

    Value load_local(std::size_t b, const std::string& name) {
        const TypeName* t = lookup(name);
        if (!t) throw SourceError("use of undeclared local " + name);
        ir::Temp v = fresh();
        blocks_[b].instrs.push_back(ir::Load{v, *t, ir::VarRef{name}});
        return {v, *t};
    }

    Value eval(std::size_t b, const Expr& e, const std::map<const NewExpr*, std::string>& hoisted) {
        return std::visit(
            [&](const auto& n) -> Value {
                using T = std::decay_t<decltype(n)>;
                if constexpr (std::is_same_v<T, IntExpr>) {
                    return {ir::IntLit{n.value}, TypeName{0, {"int"}}};
                } else if constexpr (std::is_same_v<T, StrExpr>) {
                    return {ir::StrLit{n.value}, TypeName::pointer_to({"java", "lang", "String"})};
                } else if constexpr (std::is_same_v<T, NameExpr>) {
                    return load_local(b, n.name);
                } else if constexpr (std::is_same_v<T, NewExpr>) {
                    auto it = hoisted.find(&n);
                    if (it == hoisted.end()) throw SourceError("internal: unhoisted allocation");
                    return load_local(b, it->second);
                } else {
                    return emit_call(b, n, hoisted);
                }
            },
            e.node);
    }

    Value emit_call(std::size_t b, const CallExpr& c, const std::map<const NewExpr*, std::string>& hoisted) {
        if (c.target.empty()) {
            std::vector<ir::Operand> args;
            for (const auto& a : c.args) args.push_back(eval(b, a, hoisted).op);
            ir::Temp r = fresh();
            blocks_[b].instrs.push_back(ir::StaticCall{r, ir::QualifiedName{{unit_.class_name}, c.method}, std::move(args)});
            return {r, TypeName{0, {"int"}}};
        }
        const TypeName* t = lookup(c.target);
        if (!t) throw SourceError("call on undeclared local " + c.target);
        if (t->pointer_depth == 0) throw SourceError("call on non-object local " + c.target);
        TypeName recv_type = *t;
        ir::Temp recv = std::get<ir::Temp>(load_local(b, c.target).op);
        blocks_[b].instrs.push_back(ir::Load{fresh(), recv_type, recv});
        std::vector<ir::Operand> args;
        for (const auto& a : c.args) args.push_back(eval(b, a, hoisted).op);
        ir::Temp r = fresh();
        blocks_[b].instrs.push_back(
            ir::VirtualCall{r, recv, ir::QualifiedName{recv_type.segments, c.method}, std::move(args)});
        return {r, TypeName{0, {"int"}}};
    }

    // ---- statements --------------------------------------------------

    Dangling lower_list(const StmtList& list, const Context& ctx, Dangling d) {
        scopes_.emplace_back();
        for (std::size_t i = 0; i < list.size(); ++i) {
            if (d.empty()) throw SourceError("unreachable statement in " + method_.name);
            d = lower(list[i], ctx, std::move(d));
        }
        scopes_.pop_back();
        return d;
    }

    Dangling lower(const Stmt& s, const Context& ctx, Dangling d) {
        return std::visit(
            [&](const auto& n) -> Dangling {
                using T = std::decay_t<decltype(n)>;
                if constexpr (std::is_same_v<T, LocalDecl>) {
                    lower_decl(n, ctx, d);
                    return d;
                } else if constexpr (std::is_same_v<T, ExprStmt>) {
                    std::map<const NewExpr*, std::string> hoisted;
                    hoist_args(n.call.args, d, ctx, hoisted);
                    std::size_t b = open_block(d, ctx);
                    emit_call(b, n.call, hoisted);
                    return d;
                } else if constexpr (std::is_same_v<T, TryFinally>) {
                    return lower_try(n.body, {}, &n.finally_body, ctx, std::move(d));
                } else if constexpr (std::is_same_v<T, TryCatchFinally>) {
                    return lower_try(n.body, n.catches, n.finally_body ? &*n.finally_body : nullptr, ctx, std::move(d));
                } else if constexpr (std::is_same_v<T, TryWithResources>) {
                    return lower_twr(n, ctx, std::move(d));
                } else if constexpr (std::is_same_v<T, Return>) {
                    return lower_return(n, ctx, std::move(d));
                } else if constexpr (std::is_same_v<T, If>) {
                    std::map<const NewExpr*, std::string> hoisted;
                    hoist_args(n.cond.args, d, ctx, hoisted);
                    std::size_t b = open_block(d, ctx);
                    emit_call(b, n.cond, hoisted);
                    Dangling out = lower_list(n.then_body, ctx, {b});
                    Dangling other = n.else_body ? lower_list(*n.else_body, ctx, {b}) : Dangling{b};
                    for (auto x : other)
                        if (std::find(out.begin(), out.end(), x) == out.end()) out.push_back(x);
                    return out;
                } else {
                    return lower_list(n.body, ctx, std::move(d));
                }
            },
            s.node);
    }

    void lower_decl(const LocalDecl& decl, const Context& ctx, Dangling& d) {
        TypeName t = types_.resolve(decl.type);
        if (t.is_void()) throw SourceError("local " + decl.name + " of type void");
        std::map<const NewExpr*, std::string> hoisted;
        if (auto* n = std::get_if<NewExpr>(&decl.init.node)) {
            hoist_args(n->args, d, ctx, hoisted);
            std::size_t b = open_block(d, ctx);
            ir::Temp obj = emit_new(b, *n, hoisted);
            declare(decl.name, t);
            blocks_[b].instrs.push_back(ir::Store{decl.name, obj, t});
            return;
        }
        hoist_expr(decl.init, d, ctx, hoisted);
        std::size_t b = open_block(d, ctx);
        Value v = eval(b, decl.init, hoisted);
        declare(decl.name, t);
        blocks_[b].instrs.push_back(ir::Store{decl.name, v.op, t});
    }

    Dangling lower_try(const StmtList& body, const std::vector<CatchClause>& catches, const StmtList* fin,
                       const Context& ctx, Dangling d) {
        std::optional<std::size_t> hf, hc;
        if (fin) hf = new_block({ctx.handler});
        std::size_t inner_handler = hf ? *hf : ctx.handler;
        if (!catches.empty()) hc = new_block({inner_handler});

        Context body_ctx{hc ? *hc : inner_handler, ctx.frames};
        if (fin) body_ctx.frames.push_back({fin, ctx.handler});
        Dangling normal = lower_list(body, body_ctx, std::move(d));

        if (hc) {
            const CatchClause& c = catches.front();
            for (const auto& other : catches) types_.resolve(other.type);
            TypeName et = types_.resolve(c.type);
            ir::Temp ex = fresh();
            blocks_[*hc].instrs.push_back(ir::StaticCall{ex, ir::QualifiedName{{}, "__unwrap_exception"}, {}});
            scopes_.emplace_back();
            declare(c.name, et);
            blocks_[*hc].instrs.push_back(ir::Store{c.name, ex, et});
            Context catch_ctx{inner_handler, ctx.frames};
            if (fin) catch_ctx.frames.push_back({fin, ctx.handler});
            Dangling after = lower_list(c.body, catch_ctx, {*hc});
            scopes_.pop_back();
            for (auto x : after)
                if (std::find(normal.begin(), normal.end(), x) == normal.end()) normal.push_back(x);
        }
        if (!fin) return normal;

        if (!normal.empty()) normal = lower_list(*fin, ctx, std::move(normal));
        Dangling rethrow = lower_list(*fin, ctx, {*hf});
        patch(rethrow, ctx.handler);
        return normal;
    }

    Dangling lower_twr(const TryWithResources& t, const Context& ctx, Dangling d) {
        for (const auto& r : t.resources) {
            TypeName rt = types_.resolve(r.type);
            if (!config_.is_resource(rt.class_name()))
                throw SourceError(r.type + " in try-with-resources is not a resource class");
        }
        // try (A a = x; B b = y) S  ==>  A a = x; try { B b = y; try { S } finally { b.close(); } } finally { a.close(); }
        StmtList inner = t.body;
        for (auto it = t.resources.rbegin(); it != t.resources.rend(); ++it) {
            StmtList wrapped;
            wrapped.push_back(Stmt{*it});
            wrapped.push_back(Stmt{TryFinally{std::move(inner), {close_stmt(it->name)}}});
            inner = std::move(wrapped);
        }
        if (t.catches.empty() && !t.finally_body) return lower_list(inner, ctx, std::move(d));
        return lower_try(inner, t.catches, t.finally_body ? &*t.finally_body : nullptr, ctx, std::move(d));
    }

    Dangling lower_return(const Return& r, const Context& ctx, Dangling d) {
        std::map<const NewExpr*, std::string> hoisted;
        if (r.value) hoist_expr(*r.value, d, ctx, hoisted);
        std::size_t b = open_block(d, ctx);
        if (r.value) {
            Value v = eval(b, *r.value, hoisted);
            TypeName rt = types_.resolve(method_.return_type);
            if (rt.is_void()) throw SourceError("return with a value in void method " + method_.name);
            blocks_[b].instrs.push_back(ir::Store{"return", v.op, rt});
        }
        // pending finally bodies run innermost first, each guarded by what
        // surrounds its own try
        for (auto it = ctx.frames.rbegin(); it != ctx.frames.rend() && !d.empty(); ++it) {
            Context fctx{it->outer_handler, std::vector<FinallyFrame>(ctx.frames.begin(), ctx.frames.begin() + (ctx.frames.rend() - it - 1))};
            d = lower_list(*it->body, fctx, std::move(d));
        }
        patch(d, kExit);
        return {};
    }
};

}  // namespace

ir::Program compile_to_ir(const SourceUnit& unit, const analysis::ResourceConfig& config) {
    TypeResolver types(unit.class_name, config);
    ir::Program p;
    std::set<std::string> seen;
    for (const auto& m : unit.methods) {
        if (!seen.insert(m.name).second) throw SourceError("duplicate method " + m.name);
        p.procedures.push_back(MethodCompiler(unit, m, config, types).compile());
    }
    return p;
}

}  // namespace leakfix::minijava
