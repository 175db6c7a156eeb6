#pragma once

#include <optional>
#include <string>

#include "leakfix/analysis/resource_config.hpp"
#include "leakfix/harness/corpus.hpp"
#include "leakfix/ir/model.hpp"
#include "leakfix/repair/pipeline.hpp"

namespace leakfix::harness {

/// Percentages in [0, 100]. A rate whose denominator is empty is nullopt,
/// serialized as JSON null.
struct MetricsRecord {
    std::optional<double> mean_ned;
    std::optional<double> compilation_rate;
    std::optional<double> ir_exact_match_rate;
    std::optional<double> fix_proposed;
    std::optional<double> fix_precision;  // oracle-based: interpreter, not unit tests
    std::optional<double> fix_recall;
    std::size_t n = 0;
    std::size_t corpus_size = 0;
    std::size_t leaky_entries = 0;

    bool operator==(const MetricsRecord&) const = default;
};

/// Byte equality of canonical printed forms.
bool ir_exact_match(const ir::Program& candidate, const ir::Program& reference);

/// No leak witness in any procedure of the chosen IR, and every
/// procedure's no-throw trace matches the original's modulo close events.
bool fix_is_precise(const ir::Program& chosen_ir, const ir::Program& original_ir,
                    const analysis::ResourceConfig& config);

struct EntryOutcome {
    std::string id;
    std::size_t reports = 0;
    std::size_t candidates = 0;
    std::size_t compiled = 0;
    double ned_sum = 0;
    bool proposed = false;
    bool precise = false;
    bool exact = false;
};

/// Repairs one leaky entry with budget n.
EntryOutcome evaluate_entry(const CorpusEntry& entry, std::size_t n, const analysis::ResourceConfig& config);

/// Runs repair on each entry labelled leaky. Aggregation is
/// by entry order, so results are reproducible.
MetricsRecord evaluate_corpus(const std::vector<CorpusEntry>& corpus, std::size_t n,
                              const analysis::ResourceConfig& config);

/// JSON object with the six metrics (two decimals), n and corpus_size.
std::string metrics_to_json(const MetricsRecord& m);

}  // namespace leakfix::harness
