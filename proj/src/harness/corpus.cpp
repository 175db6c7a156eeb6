#include "leakfix/harness/corpus.hpp"

#include <cstdio>
#include <fstream>
#include <random>
#include <sstream>

#include "json.hpp"

#include "leakfix/minijava/printer.hpp"

namespace leakfix::harness {

using namespace minijava;

namespace {

struct PatternName {
    Pattern p;
    const char* name;
    bool leaky;
};

const PatternName kPatterns[] = {
    {Pattern::PlainLeak, "plain_leak", true},
    {Pattern::WrapperLeak, "wrapper_leak", true},
    {Pattern::PrefixedFinally, "prefixed_finally", true},
    {Pattern::CloseWithoutFinally, "close_without_finally", true},
    {Pattern::NestedTryLeak, "nested_try_leak", true},
    {Pattern::BranchLeak, "branch_leak", true},
    {Pattern::CorrectTryFinally, "correct_try_finally", false},
    {Pattern::TryWithResources, "try_with_resources", false},
    {Pattern::NestedTryCorrect, "nested_try_correct", false},
    {Pattern::BranchCorrect, "branch_correct", false},
    {Pattern::WrapperCorrect, "wrapper_correct", false},
};

// std distributions differ between standard libraries; plain modulo on the
// engine output keeps corpora identical everywhere.
class Rng {
public:
    explicit Rng(std::uint64_t seed) : engine_(seed) {}
    std::size_t below(std::size_t n) { return static_cast<std::size_t>(engine_() % n); }
    bool coin() { return below(2) == 1; }
    template <class T>
    const T& pick(const std::vector<T>& v) {
        return v[below(v.size())];
    }

private:
    std::mt19937_64 engine_;
};

struct Resource {
    std::string type;
    Expr init;
    std::vector<std::string> ops;
};

class Builder {
public:
    explicit Builder(Rng& rng) : rng_(rng) {}

    std::string path() {
        static const std::vector<std::string> words = {"data", "log", "out", "cache", "report", "dump"};
        return "/tmp/" + rng_.pick(words) + std::to_string(rng_.below(100)) + ".txt";
    }

    /// Two throwing calls at most (the nested File constructor and the
    /// resource constructor).
    Resource resource() {
        switch (rng_.below(3)) {
            case 0:
                return {"FileOutputStream", new_expr("FileOutputStream", {new_expr("File", {str_expr(path())})}),
                        {"write", "flush"}};
            case 1: return {"FileOutputStream", new_expr("FileOutputStream", {str_expr(path())}), {"write", "flush"}};
            default: return {"FileInputStream", new_expr("FileInputStream", {str_expr(path())}), {"read", "skip"}};
        }
    }

    std::string var() {
        static const std::vector<std::string> names = {"res", "stream", "fos", "in", "out", "handle"};
        return rng_.pick(names);
    }

    Stmt op(const Resource& r, const std::string& v) {
        const std::string& m = rng_.pick(r.ops);
        std::vector<Expr> args;
        if (m == "write" || m == "skip") args.push_back(int_expr(static_cast<std::int64_t>(rng_.below(256))));
        return expr_stmt(call(v, m, std::move(args)));
    }

    StmtList ops(const Resource& r, const std::string& v, std::size_t lo, std::size_t hi) {
        StmtList out;
        std::size_t k = lo + rng_.below(hi - lo + 1);
        for (std::size_t i = 0; i < k; ++i) out.push_back(op(r, v));
        return out;
    }

    Stmt side() {
        static const std::vector<std::string> names = {"log", "step", "check", "tick"};
        return expr_stmt(call("", rng_.pick(names), {int_expr(static_cast<std::int64_t>(rng_.below(10)))}));
    }

    CallExpr cond() { return call("", rng_.coin() ? "ready" : "enabled"); }

    Rng& rng() { return rng_; }

private:
    Rng& rng_;
};

Stmt try_finally(StmtList body, StmtList fin) { return Stmt{TryFinally{std::move(body), std::move(fin)}}; }

StmtList concat(StmtList a, const StmtList& b) {
    a.insert(a.end(), b.begin(), b.end());
    return a;
}

SourceUnit unit_with(StmtList body, Rng& rng) {
    SourceUnit u;
    u.class_name = "Main";
    MethodDecl m;
    m.is_public = rng.coin();
    m.is_static = true;
    m.return_type = "void";
    m.name = "run";
    m.throws = {"IOException"};
    m.body = std::move(body);
    u.methods.push_back(std::move(m));
    return u;
}

// Builds (source, reference) bodies for one pattern.
std::pair<StmtList, StmtList> build(Pattern p, Builder& b) {
    Resource r = b.resource();
    std::string v = b.var();
    Stmt decl = local(r.type, v, r.init);
    switch (p) {
        case Pattern::PlainLeak: {
            StmtList rest;
            if (b.rng().coin()) rest.push_back(b.side());
            rest = concat(rest, b.ops(r, v, 1, 3));
            return {concat({decl}, rest), {decl, try_finally(rest, {close_stmt(v)})}};
        }
        case Pattern::WrapperLeak:
        case Pattern::WrapperCorrect: {
            const std::string inner = "fis";
            Stmt fis = local("FileInputStream", inner, new_expr("FileInputStream", {str_expr(b.path())}));
            Stmt bis = local("BufferedInputStream", "bis", new_expr("BufferedInputStream", {name_expr(inner)}));
            Resource wr{"BufferedInputStream", {}, {"read", "skip"}};
            StmtList body = b.ops(wr, "bis", 1, 3);
            StmtList fixed = {fis, bis, try_finally(body, {close_stmt("bis")})};
            if (p == Pattern::WrapperCorrect) return {fixed, fixed};
            return {{fis, bis, try_finally(body, {})}, fixed};
        }
        case Pattern::PrefixedFinally: {
            Stmt s = b.side();
            StmtList body = b.ops(r, v, 1, 2);
            return {{decl, s, try_finally(body, {})}, {decl, try_finally({s, try_finally(body, {})}, {close_stmt(v)})}};
        }
        case Pattern::CloseWithoutFinally: {
            StmtList body = b.ops(r, v, 1, 3);
            return {concat(concat({decl}, body), {close_stmt(v)}), {decl, try_finally(body, {close_stmt(v)})}};
        }
        case Pattern::NestedTryLeak: {
            StmtList inner_try = {try_finally({b.side()}, {b.side()})};
            StmtList tbody = concat(b.ops(r, v, 1, 2), inner_try);
            CatchClause c{"IOException", "e", {b.side()}};
            Stmt t{TryCatchFinally{tbody, {c}, std::nullopt}};
            return {{decl, t}, {decl, try_finally({t}, {close_stmt(v)})}};
        }
        case Pattern::BranchLeak: {
            Stmt branch{If{b.cond(), {b.side()}, b.rng().coin() ? std::optional<StmtList>(StmtList{b.side()}) : std::nullopt}};
            StmtList rest = concat({branch}, b.ops(r, v, 1, 2));
            return {concat({decl}, rest), {decl, try_finally(rest, {close_stmt(v)})}};
        }
        case Pattern::CorrectTryFinally: {
            StmtList pre;
            if (b.rng().coin()) pre.push_back(b.side());
            StmtList body = b.ops(r, v, 1, 3);
            if (b.rng().coin()) body.push_back(b.side());
            StmtList prog = concat(pre, {decl, try_finally(body, {close_stmt(v)})});
            return {prog, prog};
        }
        case Pattern::TryWithResources: {
            TryWithResources t;
            t.resources = {LocalDecl{r.type, v, r.init}};
            t.body = b.ops(r, v, 1, 3);
            if (b.rng().coin()) t.catches.push_back(CatchClause{"IOException", "e", {b.side()}});
            StmtList prog = {Stmt{t}};
            return {prog, prog};
        }
        case Pattern::NestedTryCorrect: {
            StmtList inner = {try_finally(b.ops(r, v, 1, 2), {b.side()})};
            StmtList prog = {decl, try_finally(inner, {close_stmt(v)})};
            return {prog, prog};
        }
        case Pattern::BranchCorrect: {
            Stmt branch{If{b.cond(), b.ops(r, v, 1, 2), StmtList{b.side()}}};
            StmtList prog = {decl, try_finally({branch}, {close_stmt(v)})};
            return {prog, prog};
        }
    }
    return {};
}

}  // namespace

const char* to_string(Pattern p) {
    for (const auto& e : kPatterns)
        if (e.p == p) return e.name;
    return "?";
}

std::optional<Pattern> pattern_from_string(const std::string& name) {
    for (const auto& e : kPatterns)
        if (name == e.name) return e.p;
    return std::nullopt;
}

bool is_leaky(Pattern p) {
    for (const auto& e : kPatterns)
        if (e.p == p) return e.leaky;
    return false;
}

const std::vector<Pattern>& all_patterns() {
    static const std::vector<Pattern> all = [] {
        std::vector<Pattern> v;
        for (const auto& e : kPatterns) v.push_back(e.p);
        return v;
    }();
    return all;
}

std::vector<CorpusEntry> generate_corpus(std::uint64_t seed, std::size_t size, const CorpusParams& params) {
    Rng rng(seed);
    std::vector<Pattern> pool;
    for (auto p : all_patterns())
        if (params.mix == Mix::Any || (params.mix == Mix::LeakyOnly) == is_leaky(p)) pool.push_back(p);

    std::vector<CorpusEntry> out;
    for (std::size_t i = 0; i < size; ++i) {
        Pattern p = params.forced ? *params.forced : rng.pick(pool);
        Builder b(rng);
        auto [src, ref] = build(p, b);
        SourceUnit u = unit_with(std::move(src), rng);
        SourceUnit fixed = u;
        fixed.methods.front().body = std::move(ref);

        CorpusEntry e;
        char id[48];
        std::snprintf(id, sizeof id, "s%llu_%04zu", static_cast<unsigned long long>(seed), i);
        e.id = id;
        e.pattern = p;
        e.leaky = is_leaky(p);
        e.expected_reports = e.leaky ? 1 : 0;
        e.source = print_source(u);
        e.reference = print_source(fixed);
        out.push_back(std::move(e));
    }
    return out;
}

void save_corpus(const std::vector<CorpusEntry>& corpus, const std::filesystem::path& dir) {
    std::filesystem::create_directories(dir);
    nlohmann::json manifest;
    manifest["entries"] = nlohmann::json::array();
    for (const auto& e : corpus) {
        std::ofstream(dir / (e.id + ".mj")) << e.source;
        std::ofstream(dir / (e.id + ".fixed.mj")) << e.reference;
        manifest["entries"].push_back({{"id", e.id},
                                       {"pattern", to_string(e.pattern)},
                                       {"leaky", e.leaky},
                                       {"expected_reports", e.expected_reports},
                                       {"source", e.id + ".mj"},
                                       {"reference", e.id + ".fixed.mj"}});
    }
    std::ofstream(dir / "manifest.json") << manifest.dump(2) << "\n";
}

namespace {

std::string slurp(const std::filesystem::path& p) {
    std::ifstream in(p, std::ios::binary);
    if (!in) throw std::runtime_error("cannot read " + p.string());
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

}  // namespace

std::vector<CorpusEntry> load_corpus(const std::filesystem::path& dir) {
    nlohmann::json manifest;
    try {
        manifest = nlohmann::json::parse(slurp(dir / "manifest.json"));
    } catch (const nlohmann::json::exception& ex) {
        throw std::runtime_error("malformed manifest in " + dir.string() + ": " + ex.what());
    }
    std::vector<CorpusEntry> out;
    try {
        for (const auto& j : manifest.at("entries")) {
            CorpusEntry e;
            e.id = j.at("id").get<std::string>();
            auto p = pattern_from_string(j.at("pattern").get<std::string>());
            if (!p) throw std::runtime_error("unknown pattern for " + e.id);
            e.pattern = *p;
            e.leaky = j.at("leaky").get<bool>();
            e.expected_reports = j.at("expected_reports").get<std::size_t>();
            e.source = slurp(dir / j.at("source").get<std::string>());
            e.reference = slurp(dir / j.at("reference").get<std::string>());
            out.push_back(std::move(e));
        }
    } catch (const nlohmann::json::exception& ex) {
        throw std::runtime_error("malformed manifest in " + dir.string() + ": " + ex.what());
    }
    return out;
}

}  // namespace leakfix::harness
