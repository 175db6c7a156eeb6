#include "leakfix/repair/pipeline.hpp"

#include <cstdio>
#include <functional>
#include <set>
#include <sstream>

#include "leakfix/fix/autofix.hpp"
#include "leakfix/ir/canonical.hpp"
#include "leakfix/ir/printer.hpp"
#include "leakfix/ir/tokens.hpp"
#include "leakfix/minijava/compiler.hpp"
#include "leakfix/minijava/parser.hpp"
#include "leakfix/minijava/printer.hpp"

namespace leakfix::repair {

using namespace minijava;

const char* to_string(CandidateStatus s) {
    switch (s) {
        case CandidateStatus::Unchecked: return "Unchecked";
        case CandidateStatus::CompileFail: return "CompileFail";
        case CandidateStatus::WarningRaised: return "WarningRaised";
        case CandidateStatus::Passed: return "Passed";
    }
    return "?";
}

namespace {

bool mentions(const Expr& e, const std::string& v);

bool mentions_args(const std::vector<Expr>& args, const std::string& v) {
    for (const auto& a : args)
        if (mentions(a, v)) return true;
    return false;
}

bool mentions_call(const CallExpr& c, const std::string& v) { return c.target == v || mentions_args(c.args, v); }

bool mentions(const Expr& e, const std::string& v) {
    if (auto* n = std::get_if<NameExpr>(&e.node)) return n->name == v;
    if (auto* n = std::get_if<NewExpr>(&e.node)) return mentions_args(n->args, v);
    if (auto* c = std::get_if<CallExpr>(&e.node)) return mentions_call(*c, v);
    return false;
}

// Every nested statement list of s, in source order.
std::vector<StmtList*> children(Stmt& s) {
    std::vector<StmtList*> out;
    std::visit(
        [&](auto& n) {
            using T = std::decay_t<decltype(n)>;
            if constexpr (std::is_same_v<T, TryFinally>) {
                out = {&n.body, &n.finally_body};
            } else if constexpr (std::is_same_v<T, TryCatchFinally> || std::is_same_v<T, TryWithResources>) {
                out.push_back(&n.body);
                for (auto& c : n.catches) out.push_back(&c.body);
                if (n.finally_body) out.push_back(&*n.finally_body);
            } else if constexpr (std::is_same_v<T, If>) {
                out.push_back(&n.then_body);
                if (n.else_body) out.push_back(&*n.else_body);
            } else if constexpr (std::is_same_v<T, BlockStmt>) {
                out.push_back(&n.body);
            }
        },
        s.node);
    return out;
}

// Mentions made by s itself, not counting nested statement lists.
bool mentions_directly(const Stmt& s, const std::string& v) {
    return std::visit(
        [&](const auto& n) -> bool {
            using T = std::decay_t<decltype(n)>;
            if constexpr (std::is_same_v<T, LocalDecl>) return mentions(n.init, v);
            else if constexpr (std::is_same_v<T, ExprStmt>) return mentions_call(n.call, v);
            else if constexpr (std::is_same_v<T, Return>) return n.value && mentions(*n.value, v);
            else if constexpr (std::is_same_v<T, If>) return mentions_call(n.cond, v);
            else if constexpr (std::is_same_v<T, TryWithResources>) {
                for (const auto& r : n.resources)
                    if (mentions(r.init, v)) return true;
                return false;
            } else return false;
        },
        s.node);
}

struct DeclSite {
    StmtList* list = nullptr;
    std::size_t index = 0;
};

std::optional<DeclSite> find_decl(StmtList& list, const std::string& v) {
    for (std::size_t i = 0; i < list.size(); ++i) {
        if (auto* d = std::get_if<LocalDecl>(&list[i].node); d && d->name == v) return DeclSite{&list, i};
        for (auto* l : children(list[i]))
            if (auto r = find_decl(*l, v)) return r;
    }
    return std::nullopt;
}

bool is_try(const Stmt& s) {
    return std::holds_alternative<TryFinally>(s.node) || std::holds_alternative<TryCatchFinally>(s.node) ||
           std::holds_alternative<TryWithResources>(s.node);
}

StmtList* finally_of(Stmt& s) {
    if (auto* t = std::get_if<TryFinally>(&s.node)) return &t->finally_body;
    if (auto* t = std::get_if<TryCatchFinally>(&s.node)) return t->finally_body ? &*t->finally_body : nullptr;
    if (auto* t = std::get_if<TryWithResources>(&s.node)) return t->finally_body ? &*t->finally_body : nullptr;
    return nullptr;
}

// Records the chain of try statements around the last mention of v.
void last_mention(StmtList& list, std::size_t from, const std::string& v, std::vector<Stmt*>& tries,
                  std::optional<std::vector<Stmt*>>& found) {
    for (std::size_t i = from; i < list.size(); ++i) {
        Stmt& s = list[i];
        const bool t = is_try(s);
        if (t) tries.push_back(&s);
        if (mentions_directly(s, v)) found = tries;
        for (auto* l : children(s)) last_mention(*l, 0, v, tries, found);
        if (t) tries.pop_back();
    }
}

struct Option {
    int rule;           // 1..4
    std::size_t j = 0;  // rule 4: statements left outside the wrapped suffix
};

StmtList* method_body(SourceUnit& unit, const std::string& method) {
    MethodDecl* m = unit.find_method(method);
    return m ? &m->body : nullptr;
}

StmtList* rule1_target(StmtList& body, const std::string& v) {
    auto decl = find_decl(body, v);
    if (!decl) return nullptr;
    std::vector<Stmt*> tries;
    std::optional<std::vector<Stmt*>> found;
    last_mention(*decl->list, decl->index + 1, v, tries, found);
    if (!found) return nullptr;
    for (auto it = found->rbegin(); it != found->rend(); ++it)
        if (StmtList* f = finally_of(**it)) return f;
    return nullptr;
}

bool apply(SourceUnit& unit, const std::string& method, const std::string& v, const Option& opt) {
    StmtList* body = method_body(unit, method);
    if (!body) return false;
    if (opt.rule == 1) {
        StmtList* f = rule1_target(*body, v);
        if (!f) return false;
        f->push_back(close_stmt(v));
        return true;
    }
    auto decl = find_decl(*body, v);
    if (!decl) return false;
    StmtList& list = *decl->list;
    if (opt.rule == 3) {
        std::size_t at = list.size();
        if (auto* r = std::get_if<Return>(&list.back().node)) {
            if (r->value && mentions(*r->value, v)) return false;
            --at;
        }
        if (at <= decl->index) return false;
        list.insert(list.begin() + static_cast<std::ptrdiff_t>(at), close_stmt(v));
        return true;
    }
    const std::size_t start = decl->index + 1 + (opt.rule == 4 ? opt.j : 0);
    if (opt.rule == 4 && start >= list.size()) return false;
    StmtList wrapped(std::make_move_iterator(list.begin() + static_cast<std::ptrdiff_t>(start)),
                     std::make_move_iterator(list.end()));
    list.resize(start);
    list.push_back(Stmt{TryFinally{std::move(wrapped), {close_stmt(v)}}});
    return true;
}

std::vector<Option> options_for(const SourceUnit& original, const std::string& method, const std::string& v) {
    SourceUnit unit = original;
    StmtList* body = method_body(unit, method);
    if (!body) return {};
    auto decl = find_decl(*body, v);
    if (!decl) return {};
    std::vector<Option> out;
    for (Option o : {Option{1}, Option{2}, Option{3}}) {
        SourceUnit probe = original;
        if (apply(probe, method, v, o)) out.push_back(o);
    }
    const std::size_t suffix = decl->list->size() - decl->index - 1;
    for (std::size_t j = 1; j < suffix; ++j) out.push_back(Option{4, j});
    return out;
}

std::string method_of(const std::string& proc) {
    auto dot = proc.rfind('.');
    return dot == std::string::npos ? proc : proc.substr(dot + 1);
}

}  // namespace

std::vector<std::string> RuleBasedGenerator::generate(const SourceUnit& unit,
                                                      const std::vector<analysis::LeakReport>& reports,
                                                      std::size_t n) const {
    struct Target {
        std::string method, var;
        std::vector<Option> options;
    };
    std::vector<Target> targets;
    std::set<std::pair<std::string, std::string>> seen;
    for (const auto& r : reports) {
        if (r.var_is_temp) continue;
        std::string m = method_of(r.proc);
        if (!seen.insert({m, r.var}).second) continue;
        auto opts = options_for(unit, m, r.var);
        if (!opts.empty()) targets.push_back({m, r.var, std::move(opts)});
    }
    std::vector<std::string> out;
    if (targets.empty() || n == 0) return out;

    std::size_t max_sum = 0;
    for (const auto& t : targets) max_sum += t.options.size() - 1;
    std::set<std::string> texts;
    std::vector<std::size_t> choice(targets.size());

    // lexicographic tuples with a fixed index sum
    std::function<bool(std::size_t, std::size_t)> walk = [&](std::size_t pos, std::size_t remaining) -> bool {
        if (pos == targets.size()) {
            if (remaining != 0) return true;
            SourceUnit u = unit;
            for (std::size_t k = 0; k < targets.size(); ++k)
                if (!apply(u, targets[k].method, targets[k].var, targets[k].options[choice[k]])) return true;
            std::string text = print_source(u);
            if (texts.insert(text).second) out.push_back(std::move(text));
            return out.size() < n;
        }
        const std::size_t top = std::min(remaining, targets[pos].options.size() - 1);
        for (std::size_t c = 0; c <= top; ++c) {
            choice[pos] = c;
            if (!walk(pos + 1, remaining - c)) return false;
        }
        return true;
    };
    for (std::size_t s = 0; s <= max_sum; ++s)
        if (!walk(0, s)) break;
    return out;
}

std::vector<Candidate> generate_candidates(const SourceUnit& unit, const std::vector<analysis::LeakReport>& reports,
                                           std::size_t n, const CandidateGenerator& generator) {
    if (n == 0) throw std::invalid_argument("candidate budget must be positive");
    std::vector<Candidate> out;
    for (auto& text : generator.generate(unit, reports, n)) {
        if (out.size() == n) break;
        Candidate c;
        c.index = out.size();
        c.source_text = std::move(text);
        out.push_back(std::move(c));
    }
    return out;
}

void filter_candidates(std::vector<Candidate>& candidates, const analysis::ResourceConfig& config) {
    for (auto& c : candidates) {
        c.ir.reset();
        c.ned_to_fixed.reset();
        try {
            c.ir = compile_to_ir(parse_source(c.source_text), config);
            ir::check_well_formed(*c.ir);
        } catch (const std::exception&) {
            c.ir.reset();
            c.status = CandidateStatus::CompileFail;
            continue;
        }
        c.status = analysis::detect_leaks(*c.ir, config).empty() ? CandidateStatus::Passed
                                                                  : CandidateStatus::WarningRaised;
    }
}

double ir_ned(const ir::Program& candidate, const ir::Program& reference) {
    auto hyp = ir::tokenize_ir(ir::print_program(ir::renumber_temps(candidate)));
    auto ref = ir::tokenize_ir(ir::print_program(ir::renumber_temps(reference)));
    return ir::normalized_edit_distance(hyp, ref);
}

void score_candidates(std::vector<Candidate>& candidates, const ir::Program& fixed_ir) {
    for (auto& c : candidates)
        if (c.status == CandidateStatus::Passed && c.ir) c.ned_to_fixed = ir_ned(*c.ir, fixed_ir);
}

std::size_t select_fix(const std::vector<Candidate>& passed, const ir::Program& fixed_ir) {
    if (passed.empty()) throw std::invalid_argument("no passed candidate to select from");
    std::optional<std::size_t> best;
    double best_ned = 0;
    for (const auto& c : passed) {
        if (c.status != CandidateStatus::Passed || !c.ir)
            throw std::invalid_argument("candidate " + std::to_string(c.index) + " has not passed the filter");
        double d = ir_ned(*c.ir, fixed_ir);
        if (!best || d < best_ned || (d == best_ned && c.index < *best)) {
            best = c.index;
            best_ned = d;
        }
    }
    return *best;
}

const Candidate* RepairResult::chosen_candidate() const {
    if (!chosen) return nullptr;
    for (const auto& c : candidates)
        if (c.index == *chosen) return &c;
    return nullptr;
}

RepairResult repair(const std::string& source, const analysis::ResourceConfig& config, std::size_t n,
                    const CandidateGenerator& generator) {
    if (n == 0) throw std::invalid_argument("candidate budget must be positive");
    RepairResult r;
    r.original_source = source;
    SourceUnit unit = parse_source(source);
    r.original_ir = compile_to_ir(unit, config);
    r.reports = analysis::detect_leaks(r.original_ir, config);
    if (r.reports.empty()) {
        r.fixed_ir = r.original_ir;
        return r;
    }
    r.fixed_ir = fix::fix_program(r.original_ir, config).program;
    r.candidates = generate_candidates(unit, r.reports, n, generator);
    filter_candidates(r.candidates, config);
    score_candidates(r.candidates, r.fixed_ir);
    std::vector<Candidate> passed;
    for (const auto& c : r.candidates)
        if (c.status == CandidateStatus::Passed) passed.push_back(c);
    if (!passed.empty()) r.chosen = select_fix(passed, r.fixed_ir);
    return r;
}

std::string format_result(const RepairResult& result) {
    std::ostringstream os;
    for (const auto& c : result.candidates) {
        os << c.index << " " << to_string(c.status);
        if (c.ned_to_fixed) {
            char buf[32];
            std::snprintf(buf, sizeof buf, " %.4f", *c.ned_to_fixed);
            os << buf;
        }
        os << "\n";
    }
    if (result.chosen)
        os << "CHOSEN " << *result.chosen << "\n";
    else
        os << "NO_FIX\n";
    return os.str();
}

}  // namespace leakfix::repair
