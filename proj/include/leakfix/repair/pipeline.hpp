#pragma once

#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "leakfix/analysis/leaks.hpp"
#include "leakfix/minijava/ast.hpp"

namespace leakfix::repair {

enum class CandidateStatus { Unchecked, CompileFail, WarningRaised, Passed };

const char* to_string(CandidateStatus s);

struct Candidate {
    std::size_t index = 0;  // generation order
    std::string source_text;
    CandidateStatus status = CandidateStatus::Unchecked;
    std::optional<ir::Program> ir;         // WarningRaised or Passed
    std::optional<double> ned_to_fixed;    // Passed, once scored
};

/// Produces candidate source texts for a leaky unit. Implementations must
/// be deterministic and nested: the first m texts for budget n equal the
/// full list for budget m.
class CandidateGenerator {
public:
    virtual ~CandidateGenerator() = default;
    virtual std::vector<std::string> generate(const minijava::SourceUnit& unit,
                                              const std::vector<analysis::LeakReport>& reports,
                                              std::size_t n) const = 0;
};

/// Source rewrites per reported local v, in priority order:
///   1. append `v.close();` to the finally of the innermost try around v's
///      last mention (when v is declared outside that try),
///   2. wrap everything after v's declaration to the end of its scope in
///      `try { ... } finally { v.close(); }`,
///   3. add `v.close();` as the last statement of the scope (before a
///      trailing return),
///   4. rule 2 over successively shorter suffixes.
/// Several reports compose as tuples of per-report choices ordered by the
/// sum of choice indices, then lexicographically. Duplicate texts drop out.
class RuleBasedGenerator final : public CandidateGenerator {
public:
    std::vector<std::string> generate(const minijava::SourceUnit& unit,
                                      const std::vector<analysis::LeakReport>& reports,
                                      std::size_t n) const override;
};

/// Throws std::invalid_argument for n == 0.
std::vector<Candidate> generate_candidates(const minijava::SourceUnit& unit,
                                           const std::vector<analysis::LeakReport>& reports, std::size_t n,
                                           const CandidateGenerator& generator = RuleBasedGenerator{});

/// Parse + compile (CompileFail), then detect_leaks (WarningRaised if any
/// report), else Passed.
void filter_candidates(std::vector<Candidate>& candidates, const analysis::ResourceConfig& config);

/// NED between canonical printed IRs: renumber_temps, print, tokenize.
double ir_ned(const ir::Program& candidate, const ir::Program& reference);

/// Fills ned_to_fixed for every Passed candidate.
void score_candidates(std::vector<Candidate>& candidates, const ir::Program& fixed_ir);

/// Candidate.index of the Passed candidate with minimal NED to fixed_ir,
/// lowest index on ties. Throws std::invalid_argument on an empty list or
/// a candidate that did not pass.
std::size_t select_fix(const std::vector<Candidate>& passed, const ir::Program& fixed_ir);

struct RepairResult {
    std::string original_source;
    std::vector<analysis::LeakReport> reports;
    ir::Program original_ir;
    ir::Program fixed_ir;
    std::vector<Candidate> candidates;
    std::optional<std::size_t> chosen;

    bool nothing_to_fix() const { return reports.empty(); }
    const Candidate* chosen_candidate() const;
};

/// Compile, detect, fix in IR space, generate, filter, select. Throws
/// minijava::SourceError when the input itself does not compile.
RepairResult repair(const std::string& source, const analysis::ResourceConfig& config, std::size_t n,
                    const CandidateGenerator& generator = RuleBasedGenerator{});

/// `idx status [ned]` per candidate, then `CHOSEN <idx>` or `NO_FIX`.
std::string format_result(const RepairResult& result);

}  // namespace leakfix::repair
