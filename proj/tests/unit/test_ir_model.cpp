#include <gtest/gtest.h>

#include "leakfix/ir/canonical.hpp"
#include "leakfix/ir/parser.hpp"
#include "leakfix/ir/printer.hpp"
#include "leakfix/ir/tokens.hpp"
#include "support.hpp"

using namespace leakfix;
using testsupport::Rand;

namespace {

ir::IrError::Kind parse_error_kind(const std::string& text) {
    try {
        ir::parse_program(text);
    } catch (const ir::IrError& e) {
        return e.kind();
    }
    ADD_FAILURE() << "expected a parse error for:\n" << text;
    return ir::IrError::Kind::Malformed;
}

}  // namespace

TEST(IrParse, ReferenceBuggyFoo) {
    auto prog = ir::parse_program(testsupport::read_data("foo_buggy.sil.txt"));
    ASSERT_EQ(prog.procedures.size(), 1u);
    const auto& foo = prog.procedures[0];
    EXPECT_EQ(foo.name.str(), "Main.foo");
    ASSERT_EQ(foo.blocks.size(), 7u);
    const auto* exit = foo.find_block("node_1");
    ASSERT_NE(exit, nullptr);
    EXPECT_TRUE(exit->is_exit());
    EXPECT_TRUE(exit->handlers.empty());
    const auto* b5 = foo.find_block("node_5");
    ASSERT_NE(b5, nullptr);
    EXPECT_EQ(b5->handlers, std::vector<std::string>{"node_4"});
    EXPECT_EQ(b5->successors, std::vector<std::string>{"node_3"});
    // both call syntaxes kept apart
    EXPECT_TRUE(std::holds_alternative<ir::VirtualCall>(b5->instrs[2]));
    EXPECT_TRUE(std::holds_alternative<ir::StaticCall>(foo.find_block("node_2")->instrs[1]));
    int exits = 0;
    for (const auto& b : foo.blocks) exits += b.is_exit();
    EXPECT_EQ(exits, 1);
}

TEST(IrParse, MinimalProgram) {
    auto prog = ir::parse_program("define M.f() : void { #node_0: jmp }");
    ASSERT_EQ(prog.procedures.size(), 1u);
    ASSERT_EQ(prog.procedures[0].blocks.size(), 1u);
    EXPECT_TRUE(prog.procedures[0].blocks[0].is_exit());
    EXPECT_TRUE(prog.procedures[0].blocks[0].instrs.empty());
}

TEST(IrParse, Errors) {
    EXPECT_EQ(parse_error_kind("define M.f() : void { #node_0: jmp node_9 }"), ir::IrError::Kind::UnresolvedLabel);
    EXPECT_EQ(parse_error_kind("define M.f() : void { #a: jmp a\n #a: jmp }"), ir::IrError::Kind::DuplicateLabel);
    EXPECT_EQ(parse_error_kind("define M.f() : void { #a: jmp b\n #b: jmp .handlers a }"),
              ir::IrError::Kind::HandlerOnExit);
    EXPECT_EQ(parse_error_kind("define M.f() : void { #a: jmp }\ndefine M.f() : void { #a: jmp }"),
              ir::IrError::Kind::DuplicateProcedure);
    EXPECT_EQ(parse_error_kind("define M.f() : void { #a: n0 = M.g() n0 = M.g() jmp }"),
              ir::IrError::Kind::TempRedefined);
    EXPECT_EQ(parse_error_kind("define M.f() : *void { #a: jmp }"), ir::IrError::Kind::Syntax);
}

TEST(IrParse, SyntaxErrorCarriesPosition) {
    try {
        ir::parse_program("define M.f() : void {\n  #node_0:\n    jmp ?\n}");
        FAIL();
    } catch (const ir::IrError& e) {
        EXPECT_EQ(e.kind(), ir::IrError::Kind::Syntax);
        EXPECT_EQ(e.line(), 3);
        EXPECT_EQ(e.column(), 9);
    }
}

TEST(IrPrint, ReferenceRoundTrip) {
    auto prog = ir::parse_program(testsupport::read_data("foo_buggy.sil.txt"));
    auto text = ir::print_program(prog);
    EXPECT_EQ(ir::parse_program(text), prog);
    EXPECT_EQ(ir::print_program(ir::parse_program(text)), text);
    auto fixed = ir::parse_program(testsupport::read_data("foo_fixed.sil.txt"));
    EXPECT_EQ(ir::parse_program(ir::print_program(fixed)), fixed);
}

TEST(IrPrint, EmptyProgram) { EXPECT_EQ(ir::print_program(ir::Program{}), ""); }

TEST(IrPrint, Layout) {
    auto prog = ir::parse_program("define M.f(x: int) : void { #a: store &x <- 1:int jmp b .handlers b #b: jmp }");
    EXPECT_EQ(ir::print_program(prog),
              "define M.f(x: int) : void {\n"
              "#a:\n"
              "  store &x <- 1:int\n"
              "  jmp b\n"
              "  .handlers b\n"
              "\n"
              "#b:\n"
              "  jmp\n"
              "}\n");
}

TEST(IrPrint, StringEscapes) {
    EXPECT_EQ(ir::quote_string("a\"b\\c"), "\"a\\\"b\\\\c\"");
    auto prog = ir::parse_program(R"(define M.f() : void { #a: n0 = M.g("q\"x\\ y") jmp })");
    auto call = std::get<ir::StaticCall>(prog.procedures[0].blocks[0].instrs[0]);
    EXPECT_EQ(std::get<ir::StrLit>(call.args[0]).value, "q\"x\\ y");
}

TEST(IrRoundTrip, RandomPrograms) {
    Rand rng(11);
    for (int i = 0; i < 300; ++i) {
        auto p = testsupport::random_program(rng);
        ASSERT_NO_THROW(ir::check_well_formed(p));
        auto text = ir::print_program(p);
        ASSERT_EQ(ir::parse_program(text), p) << text;
    }
}

TEST(Tokenize, Examples) {
    using V = std::vector<std::string>;
    EXPECT_EQ(ir::tokenize_ir("jmp node_2\n.handlers node_1"), (V{"jmp", "node_2", ".handlers", "node_1"}));
    EXPECT_EQ(ir::tokenize_ir(""), V{});
    EXPECT_EQ(ir::tokenize_ir("a  b\t\nc"), (V{"a", "b", "c"}));
    EXPECT_EQ(ir::tokenize_ir("M.g(\"a b\", 1)"), (V{"M.g(\"a b\",", "1)"}));
}

TEST(Tokenize, RejoiningIsStable) {
    Rand rng(5);
    for (int i = 0; i < 100; ++i) {
        auto toks = ir::tokenize_ir(ir::print_program(testsupport::random_program(rng)));
        std::string joined;
        for (const auto& t : toks) joined += t + " ";
        EXPECT_EQ(ir::tokenize_ir(joined), toks);
    }
}

TEST(Ned, Examples) {
    std::vector<std::string> ref;
    for (int i = 0; i < 20; ++i) ref.push_back("t" + std::to_string(i));
    EXPECT_EQ(ir::normalized_edit_distance(ref, ref), 0.0);
    auto hyp = ref;
    hyp[7] = "other";
    EXPECT_DOUBLE_EQ(ir::normalized_edit_distance(hyp, ref), 0.05);
    EXPECT_THROW(ir::normalized_edit_distance(hyp, {}), std::invalid_argument);
    EXPECT_EQ(ir::edit_distance({}, {"a", "b"}), 2u);
    EXPECT_EQ(ir::edit_distance({"k", "i", "t"}, {"s", "i", "t", "s"}), 2u);
}

TEST(Ned, MatchesBruteForceOracle) {
    Rand rng(3);
    for (int i = 0; i < 300; ++i) {
        std::vector<std::string> a(rng.below(8)), b(1 + rng.below(7));
        for (auto& t : a) t = std::string(1, static_cast<char>('a' + rng.below(3)));
        for (auto& t : b) t = std::string(1, static_cast<char>('a' + rng.below(3)));
        auto d = testsupport::brute_edit_distance(a, b);
        ASSERT_EQ(ir::edit_distance(a, b), d);
        EXPECT_DOUBLE_EQ(ir::normalized_edit_distance(a, b), static_cast<double>(d) / b.size());
        EXPECT_EQ(ir::normalized_edit_distance(a, b) == 0.0, a == b);
    }
}

TEST(Renumber, DefinitionOrder) {
    auto p = ir::parse_program("define M.f() : void { #a: n7 = M.g() n3 = M.h(n7) jmp }");
    auto q = ir::parse_program("define M.f() : void { #a: n0 = M.g() n1 = M.h(n0) jmp }");
    EXPECT_EQ(ir::renumber_temps(p), q);
    EXPECT_EQ(ir::renumber_temps(q), q);
}

TEST(Renumber, NumbersContinueAcrossBlocks) {
    auto p = ir::parse_program("define M.f() : void { #a: n4 = M.g() jmp b #b: n4 = M.g() jmp }");
    auto r = ir::renumber_temps(p);
    EXPECT_EQ(std::get<ir::StaticCall>(r.procedures[0].blocks[1].instrs[0]).dest.name, "n1");
}

TEST(Renumber, UndefinedUseThrows) {
    ir::ProcDef proc;
    proc.name = {{"M"}, "f"};
    ir::Block b;
    b.label = "a";
    b.instrs.push_back(ir::StaticCall{ir::Temp{"n1"}, {{"M"}, "g"}, {ir::Temp{"n0"}}});
    proc.blocks.push_back(b);
    try {
        ir::renumber_temps(proc);
        FAIL();
    } catch (const ir::IrError& e) {
        EXPECT_EQ(e.kind(), ir::IrError::Kind::UndefinedTemp);
    }
}

TEST(Renumber, AlphaEquivalentProgramsCoincide) {
    Rand rng(21);
    for (int i = 0; i < 200; ++i) {
        auto p = testsupport::random_program(rng);
        auto q = testsupport::permute_temps(p, rng);
        auto cp = ir::renumber_temps(p);
        EXPECT_EQ(cp, ir::renumber_temps(q));
        EXPECT_EQ(ir::renumber_temps(cp), cp);
    }
}

TEST(Types, ParseAndPrint) {
    auto t = ir::parse_type("*java::io::File");
    EXPECT_EQ(t.pointer_depth, 1);
    EXPECT_EQ(t.class_name(), "java::io::File");
    EXPECT_EQ(ir::print_type(t), "*java::io::File");
    EXPECT_TRUE(ir::parse_type("void").is_void());
    EXPECT_THROW(ir::parse_type("*void"), ir::IrError);
}
