#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

namespace leakfix::harness {

enum class Pattern {
    // leaky by construction, one unclosed resource each
    PlainLeak,
    WrapperLeak,
    PrefixedFinally,
    CloseWithoutFinally,
    NestedTryLeak,
    BranchLeak,
    // closed on every path
    CorrectTryFinally,
    TryWithResources,
    NestedTryCorrect,
    BranchCorrect,
    WrapperCorrect,
};

const char* to_string(Pattern p);
std::optional<Pattern> pattern_from_string(const std::string& name);
bool is_leaky(Pattern p);
const std::vector<Pattern>& all_patterns();

struct CorpusEntry {
    std::string id;
    Pattern pattern = Pattern::PlainLeak;
    bool leaky = false;
    std::size_t expected_reports = 0;
    std::string source;
    std::string reference;  // a closed version known to the generator

    bool operator==(const CorpusEntry&) const = default;
};

enum class Mix { Any, LeakyOnly, LeakFreeOnly };

struct CorpusParams {
    Mix mix = Mix::Any;
    std::optional<Pattern> forced;  // overrides mix
};

/// Deterministic in (seed, size, params). Every program stays within 8
/// throwing calls on any path.
std::vector<CorpusEntry> generate_corpus(std::uint64_t seed, std::size_t size, const CorpusParams& params = {});

/// `<id>.mj`, `<id>.fixed.mj` and `manifest.json` under dir (created).
void save_corpus(const std::vector<CorpusEntry>& corpus, const std::filesystem::path& dir);
/// Reads manifest.json and the source files it names. Throws
/// std::runtime_error on a missing or malformed directory.
std::vector<CorpusEntry> load_corpus(const std::filesystem::path& dir);

}  // namespace leakfix::harness
