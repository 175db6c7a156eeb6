#pragma once

// Data model for the textual block IR: procedures made of labeled blocks,
// each block a straight-line instruction list ending in a `jmp` plus an
// optional `.handlers` list naming where a thrown exception is rerouted.

#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <variant>
#include <vector>

namespace leakfix::ir {

/// `*java::io::File` is pointer_depth 1 with segments {java, io, File}.
/// `void` is the single segment "void" with depth 0.
struct TypeName {
    int pointer_depth = 0;
    std::vector<std::string> segments;

    static TypeName void_type() { return {0, {"void"}}; }
    static TypeName pointer_to(std::vector<std::string> segs) { return {1, std::move(segs)}; }

    bool is_void() const { return pointer_depth == 0 && segments.size() == 1 && segments[0] == "void"; }
    /// `java::io::File`, ignoring the pointer depth.
    std::string class_name() const;
    bool operator==(const TypeName&) const = default;
};

/// A class path plus a method name: `java::io::File.<init>`, `Main.foo`.
/// Builtins such as `__unwrap_exception` have an empty class path.
struct QualifiedName {
    std::vector<std::string> class_path;
    std::string method;

    std::string class_name() const;
    std::string str() const;
    bool operator==(const QualifiedName&) const = default;
};

struct Temp {
    std::string name;
    bool operator==(const Temp&) const = default;
};
struct VarRef {
    std::string name;
    bool operator==(const VarRef&) const = default;
};
struct IntLit {
    std::int64_t value = 0;
    bool operator==(const IntLit&) const = default;
};
struct StrLit {
    std::string value;
    bool operator==(const StrLit&) const = default;
};

using Operand = std::variant<Temp, VarRef, IntLit, StrLit>;

/// `n0 = __sil_allocate(<T>)`
struct Alloc {
    Temp dest;
    TypeName cls;
    bool operator==(const Alloc&) const = default;
};

/// `n1 = java::io::File.<init>(n0, "...")`
struct StaticCall {
    Temp dest;
    QualifiedName callee;
    std::vector<Operand> args;
    bool operator==(const StaticCall&) const = default;
};

/// `n7 = n5.java::io::FileOutputStream.write(7)`
struct VirtualCall {
    Temp dest;
    Temp recv;
    QualifiedName method;
    std::vector<Operand> args;
    bool operator==(const VirtualCall&) const = default;
};

/// `store &fos <- n2:*java::io::FileOutputStream`
struct Store {
    std::string var;
    Operand src;
    TypeName type;
    bool operator==(const Store&) const = default;
};

/// `n3:*java::io::File = load &$irvar0` or `n6:*T = load n5`
struct Load {
    Temp dest;
    TypeName type;
    std::variant<VarRef, Temp> src;
    bool operator==(const Load&) const = default;
};

using Instr = std::variant<Alloc, StaticCall, VirtualCall, Store, Load>;

struct Block {
    std::string label;
    std::vector<Instr> instrs;
    std::vector<std::string> successors;  // empty: exit block
    std::vector<std::string> handlers;

    bool is_exit() const { return successors.empty(); }
    bool operator==(const Block&) const = default;
};

struct Param {
    std::string name;
    TypeName type;
    bool operator==(const Param&) const = default;
};

struct ProcDef {
    QualifiedName name;
    std::vector<Param> params;
    TypeName return_type = TypeName::void_type();
    std::vector<Block> blocks;  // blocks.front() is the entry

    const Block* find_block(const std::string& label) const;
    Block* find_block(const std::string& label);
    std::optional<std::size_t> block_index(const std::string& label) const;
    bool operator==(const ProcDef&) const = default;
};

struct Program {
    std::vector<ProcDef> procedures;

    const ProcDef* find_proc(const std::string& name) const;
    bool operator==(const Program&) const = default;
};

/// Position of an instruction: (block label, index into instrs).
struct InstrPos {
    std::string block;
    std::size_t index = 0;

    auto operator<=>(const InstrPos&) const = default;
    std::string str() const { return block + ":" + std::to_string(index); }
};

// --- instruction helpers -------------------------------------------------

/// Temp defined by the instruction, if any (Store defines none).
const Temp* defined_temp(const Instr& instr);

/// Temps read by the instruction, in operand order.
std::vector<std::string> used_temps(const Instr& instr);

/// Locals mentioned through `&v` (load source or store target).
std::optional<std::string> mentioned_local(const Instr& instr);

/// `n<digits>` is the temp spelling; returns the number.
std::optional<std::uint64_t> temp_number(const std::string& name);

class IrError : public std::runtime_error {
public:
    enum class Kind {
        Syntax,
        DuplicateLabel,
        UnresolvedLabel,
        HandlerOnExit,
        DuplicateProcedure,
        TempRedefined,
        UndefinedTemp,
        Malformed,
    };

    IrError(Kind kind, const std::string& message, int line = 0, int column = 0);

    Kind kind() const { return kind_; }
    int line() const { return line_; }
    int column() const { return column_; }

private:
    Kind kind_;
    int line_;
    int column_;
};

/// Throws IrError when a structural invariant does not hold: unique
/// procedure names and labels, resolved successor/handler labels, no
/// handlers on exit blocks, at most one definition per temp per block,
/// `void` never behind a pointer.
void check_well_formed(const Program& program);
void check_well_formed(const ProcDef& proc);

}  // namespace leakfix::ir
