#include "leakfix/harness/metrics.hpp"

#include <cmath>

#include "json.hpp"
#include "leakfix/interp/interp.hpp"
#include "leakfix/ir/canonical.hpp"
#include "leakfix/ir/printer.hpp"

namespace leakfix::harness {

bool ir_exact_match(const ir::Program& candidate, const ir::Program& reference) {
    return ir::print_program(ir::renumber_temps(candidate)) == ir::print_program(ir::renumber_temps(reference));
}

bool fix_is_precise(const ir::Program& chosen_ir, const ir::Program& original_ir,
                    const analysis::ResourceConfig& config) {
    if (chosen_ir.procedures.size() != original_ir.procedures.size()) return false;
    for (const auto& proc : chosen_ir.procedures) {
        const ir::ProcDef* orig = original_ir.find_proc(proc.name.str());
        if (!orig) return false;
        if (interp::find_leak_witness(proc, config)) return false;
        auto a = interp::run_schedule(proc, config, {});
        auto b = interp::run_schedule(*orig, config, {});
        if (!interp::equivalent_modulo_close(a, b, interp::Compare::AcrossBuilds)) return false;
    }
    return true;
}

EntryOutcome evaluate_entry(const CorpusEntry& entry, std::size_t n, const analysis::ResourceConfig& config) {
    EntryOutcome out;
    out.id = entry.id;
    repair::RepairResult r = repair::repair(entry.source, config, n);
    out.reports = r.reports.size();
    out.candidates = r.candidates.size();
    for (const auto& c : r.candidates) {
        if (!c.ir) continue;
        ++out.compiled;
        out.ned_sum += repair::ir_ned(*c.ir, r.fixed_ir);
    }
    if (const repair::Candidate* chosen = r.chosen_candidate()) {
        out.proposed = true;
        // the filter verdict is re-derived here rather than trusted
        out.precise = analysis::detect_leaks(*chosen->ir, config).empty() &&
                      fix_is_precise(*chosen->ir, r.original_ir, config);
        out.exact = ir_exact_match(*chosen->ir, r.fixed_ir);
    }
    return out;
}

namespace {

std::optional<double> percent(std::size_t num, std::size_t den) {
    if (den == 0) return std::nullopt;
    return 100.0 * static_cast<double>(num) / static_cast<double>(den);
}

nlohmann::json rounded(const std::optional<double>& v) {
    if (!v) return nullptr;
    return std::round(*v * 100.0) / 100.0;
}

}  // namespace

MetricsRecord evaluate_corpus(const std::vector<CorpusEntry>& corpus, std::size_t n,
                              const analysis::ResourceConfig& config) {
    MetricsRecord m;
    m.n = n;
    m.corpus_size = corpus.size();
    std::size_t candidates = 0, compiled = 0, proposed = 0, precise = 0, exact = 0;
    double ned_sum = 0;
    for (const auto& e : corpus) {
        if (!e.leaky) continue;
        ++m.leaky_entries;
        EntryOutcome o = evaluate_entry(e, n, config);
        candidates += o.candidates;
        compiled += o.compiled;
        ned_sum += o.ned_sum;
        proposed += o.proposed;
        precise += o.proposed && o.precise;
        exact += o.proposed && o.exact;
    }
    if (compiled > 0) m.mean_ned = ned_sum / static_cast<double>(compiled);
    m.compilation_rate = percent(compiled, candidates);
    m.fix_proposed = percent(proposed, m.leaky_entries);
    m.fix_precision = percent(precise, proposed);
    m.fix_recall = percent(precise, m.leaky_entries);
    m.ir_exact_match_rate = percent(exact, proposed);
    return m;
}

std::string metrics_to_json(const MetricsRecord& m) {
    nlohmann::json j;
    j["mean_ned"] = rounded(m.mean_ned);
    j["compilation_rate"] = rounded(m.compilation_rate);
    j["ir_exact_match_rate"] = rounded(m.ir_exact_match_rate);
    j["fix_proposed"] = rounded(m.fix_proposed);
    j["fix_precision"] = rounded(m.fix_precision);
    j["fix_recall"] = rounded(m.fix_recall);
    j["n"] = m.n;
    j["corpus_size"] = m.corpus_size;
    j["leaky_entries"] = m.leaky_entries;
    j["precision_basis"] = "oracle";
    return j.dump(2);
}

}  // namespace leakfix::harness
