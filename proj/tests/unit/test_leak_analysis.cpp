#include <gtest/gtest.h>

#include <algorithm>
#include <functional>

#include "leakfix/analysis/cfg.hpp"
#include "leakfix/analysis/leaks.hpp"
#include "leakfix/analysis/liveness.hpp"
#include "leakfix/analysis/resource_config.hpp"
#include "leakfix/ir/parser.hpp"
#include "leakfix/minijava/compiler.hpp"
#include "leakfix/minijava/parser.hpp"
#include "support.hpp"

using namespace leakfix;
using analysis::ResourceConfig;

namespace {

ir::ProcDef reference(const char* file) {
    return ir::parse_program(testsupport::read_data(file)).procedures.at(0);
}

std::vector<std::string> labels_of(const analysis::Cfg& cfg, const std::vector<std::size_t>& ids) {
    std::vector<std::string> out;
    for (auto i : ids) out.push_back(cfg.nodes[i].label);
    return out;
}

// Locals mentioned along any simple path that starts at one of `from`.
analysis::VarSet mentioned_on_paths(const ir::ProcDef& proc, const analysis::Cfg& cfg,
                                    const std::vector<std::size_t>& from) {
    analysis::VarSet seen;
    std::vector<bool> on_path(cfg.nodes.size(), false);
    std::function<void(std::size_t)> walk = [&](std::size_t b) {
        if (on_path[b]) return;
        on_path[b] = true;
        for (const auto& instr : proc.blocks[b].instrs)
            if (auto v = ir::mentioned_local(instr)) seen.insert(*v);
        for (auto s : cfg.nodes[b].successors) walk(s);
        for (auto h : cfg.nodes[b].handlers) walk(h);
        on_path[b] = false;
    };
    for (auto b : from) walk(b);
    return seen;
}

}  // namespace

TEST(Cfg, ReferenceFoo) {
    auto foo = reference("foo_buggy.sil.txt");
    auto cfg = analysis::build_cfg(foo);
    auto n5 = cfg.at("node_5");
    EXPECT_EQ(labels_of(cfg, cfg.nodes[n5].successors), std::vector<std::string>{"node_3"});
    EXPECT_EQ(labels_of(cfg, cfg.nodes[n5].handlers), std::vector<std::string>{"node_4"});
    EXPECT_EQ(labels_of(cfg, cfg.exits), std::vector<std::string>{"node_1"});
    EXPECT_EQ(cfg.entry, cfg.at("node_0"));
    auto n4 = cfg.at("node_4");
    EXPECT_EQ(cfg.nodes[n4].exceptional_preds.size(), 4u);  // node_2, node_6, node_5, node_3
}

TEST(Cfg, SingleExitBlock) {
    auto proc = ir::parse_program("define M.f() : void { #node_0: jmp }").procedures[0];
    auto cfg = analysis::build_cfg(proc);
    ASSERT_EQ(cfg.nodes.size(), 1u);
    EXPECT_TRUE(cfg.nodes[0].successors.empty());
    EXPECT_TRUE(cfg.nodes[0].handlers.empty());
    EXPECT_EQ(cfg.exits, std::vector<std::size_t>{cfg.entry});
}

TEST(Cfg, PredecessorsInvertEdges) {
    testsupport::Rand rng(8);
    for (int i = 0; i < 200; ++i) {
        auto prog = testsupport::random_program(rng);
        for (const auto& proc : prog.procedures) {
            auto cfg = analysis::build_cfg(proc);
            auto has = [](const std::vector<std::size_t>& v, std::size_t x) {
                return std::find(v.begin(), v.end(), x) != v.end();
            };
            for (std::size_t u = 0; u < cfg.nodes.size(); ++u) {
                for (auto v : cfg.nodes[u].successors) EXPECT_TRUE(has(cfg.nodes[v].normal_preds, u));
                for (auto v : cfg.nodes[u].handlers) EXPECT_TRUE(has(cfg.nodes[v].exceptional_preds, u));
                for (auto p : cfg.nodes[u].normal_preds) EXPECT_TRUE(has(cfg.nodes[p].successors, u));
                for (auto p : cfg.nodes[u].exceptional_preds) EXPECT_TRUE(has(cfg.nodes[p].handlers, u));
            }
        }
    }
}

TEST(Liveness, FosDeadAfterWrite) {
    auto foo = reference("foo_buggy.sil.txt");
    auto cfg = analysis::build_cfg(foo);
    auto lv = analysis::compute_liveness(cfg, foo);
    auto n5 = cfg.at("node_5");
    EXPECT_EQ(lv.live_after(n5, 2).count("fos"), 0u);
    EXPECT_EQ(lv.live_after(n5, 0).count("fos"), 0u);
    EXPECT_EQ(lv.live_in[n5].count("fos"), 1u);
    for (const auto& s : lv.live_in) EXPECT_EQ(s.count("never_used"), 0u);
}

TEST(Liveness, MatchesPathEnumeration) {
    testsupport::Rand rng(13);
    testsupport::IrGenOptions opts;
    opts.max_blocks = 8;
    for (int i = 0; i < 200; ++i) {
        auto prog = testsupport::random_program(rng, opts);
        for (const auto& proc : prog.procedures) {
            auto cfg = analysis::build_cfg(proc);
            auto lv = analysis::compute_liveness(cfg, proc);
            for (std::size_t b = 0; b < cfg.nodes.size(); ++b) {
                std::vector<std::size_t> next = cfg.nodes[b].successors;
                next.insert(next.end(), cfg.nodes[b].handlers.begin(), cfg.nodes[b].handlers.end());
                ASSERT_EQ(lv.live_out[b], mentioned_on_paths(proc, cfg, next)) << proc.blocks[b].label;
                ASSERT_EQ(lv.live_in[b], mentioned_on_paths(proc, cfg, {b}));
            }
        }
    }
}

TEST(Leaks, ReferenceBuggyFoo) {
    auto foo = reference("foo_buggy.sil.txt");
    auto reports = analysis::detect_leaks(foo, analysis::build_cfg(foo), ResourceConfig::defaults());
    ASSERT_EQ(reports.size(), 1u);
    const auto& r = reports[0];
    EXPECT_EQ(r.site.str(), "node_6:0");
    EXPECT_EQ(r.resource_class, "java::io::FileOutputStream");
    EXPECT_EQ(r.var, "fos");
    EXPECT_FALSE(r.var_is_temp);
    EXPECT_EQ(r.last_use.str(), "node_5:2");
    EXPECT_EQ(r.handler_of_last_use, std::optional<std::string>("node_4"));
    EXPECT_TRUE(r.dead_handlers.empty());
    EXPECT_EQ(analysis::format_report(r),
              "LEAK Main.foo site=node_6:0 class=java::io::FileOutputStream var=fos last_use=node_5:2 handler=node_4");
}

TEST(Leaks, ReferenceFixedFoo) {
    auto foo = reference("foo_fixed.sil.txt");
    EXPECT_TRUE(analysis::detect_leaks(foo, analysis::build_cfg(foo), ResourceConfig::defaults()).empty());
}

TEST(Leaks, ReaderReportsWrapperOnly) {
    auto prog = minijava::compile_to_ir(minijava::parse_source(testsupport::read_data("reader_buggy.mj")));
    auto reports = analysis::detect_leaks(prog, ResourceConfig::defaults());
    ASSERT_EQ(reports.size(), 1u);
    EXPECT_EQ(reports[0].var, "bis");
    EXPECT_EQ(reports[0].resource_class, "java::io::BufferedInputStream");

    auto fixed = minijava::compile_to_ir(minijava::parse_source(testsupport::read_data("reader_fixed.mj")));
    EXPECT_TRUE(analysis::detect_leaks(fixed, ResourceConfig::defaults()).empty());
}

TEST(Leaks, NonResourceClassIgnored) {
    auto foo = reference("foo_buggy.sil.txt");
    ResourceConfig cfg;
    cfg.resource_classes = {"java::io::FileInputStream"};
    EXPECT_TRUE(analysis::detect_leaks(foo, analysis::build_cfg(foo), cfg).empty());
}

TEST(Leaks, ExceptionalExitWithoutHandler) {
    // the write may throw straight out of the procedure with fos open
    auto prog = ir::parse_program(R"(define M.f() : void {
#a:
  n0 = __sil_allocate(<java::io::FileOutputStream>)
  n1 = java::io::FileOutputStream.<init>(n0, "x")
  store &fos <- n0:*java::io::FileOutputStream
  jmp b
#b:
  n2:*java::io::FileOutputStream = load &fos
  n3 = n2.java::io::FileOutputStream.write(1)
  n4:*java::io::FileOutputStream = load &fos
  n5 = n4.java::io::FileOutputStream.close()
  jmp c
#c:
  jmp
})");
    auto reports = analysis::detect_leaks(prog, ResourceConfig::defaults());
    ASSERT_EQ(reports.size(), 1u);
    EXPECT_EQ(reports[0].var, "fos");
}

TEST(Leaks, UnreachableBlockDiagnostic) {
    auto proc = ir::parse_program("define M.f() : void { #a: jmp #z: jmp a }").procedures[0];
    auto res = analysis::analyze_procedure(proc, analysis::build_cfg(proc), ResourceConfig::defaults());
    EXPECT_TRUE(res.reports.empty());
    EXPECT_FALSE(res.diagnostics.empty());
}

TEST(Config, ParsePrintDefaults) {
    auto parsed = analysis::parse_resource_config(testsupport::read_data("default.cfg"));
    EXPECT_EQ(parsed, ResourceConfig::defaults());
    EXPECT_EQ(analysis::parse_resource_config(analysis::print_resource_config(parsed)), parsed);
    EXPECT_THROW(analysis::parse_resource_config("frobnicate x\n"), analysis::ConfigError);
    for (const auto& w : parsed.wrapper_classes) EXPECT_TRUE(parsed.is_resource(w));
}
