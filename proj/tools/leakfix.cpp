// Command-line front end. Exit codes: 0 success, 1 findings or no fix,
// 2 input error.

#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>

#include "CLI11.hpp"
#include "leakfix/analysis/leaks.hpp"
#include "leakfix/fix/autofix.hpp"
#include "leakfix/harness/corpus.hpp"
#include "leakfix/harness/metrics.hpp"
#include "leakfix/interp/interp.hpp"
#include "leakfix/ir/parser.hpp"
#include "leakfix/ir/printer.hpp"
#include "leakfix/minijava/compiler.hpp"
#include "leakfix/minijava/parser.hpp"
#include "leakfix/repair/pipeline.hpp"

namespace {

using namespace leakfix;

constexpr int kOk = 0, kFindings = 1, kInputError = 2;

struct InputError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

std::string read_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw InputError("cannot read " + path);
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

void write_output(const std::string& path, const std::string& text) {
    if (path.empty() || path == "-") {
        std::cout << text;
        return;
    }
    std::ofstream out(path, std::ios::binary);
    if (!out || !(out << text)) throw InputError("cannot write " + path);
}

analysis::ResourceConfig load_config(const std::string& path) {
    if (path.empty()) return analysis::ResourceConfig::defaults();
    return analysis::parse_resource_config(read_file(path));
}

ir::Program load_ir(const std::string& path) {
    ir::Program p = ir::parse_program(read_file(path));
    ir::check_well_formed(p);
    return p;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Resource-leak detection and repair over a block IR and a small Java subset"};
    app.require_subcommand(1);

    std::string input, output, config_path, report_path, json_path, schedule, branches, proc_name, mix = "any",
                                                                                                    pattern;
    std::size_t n = 5, size = 500;
    std::uint64_t seed = 0;
    bool trace = false;

    auto* analyze = app.add_subcommand("analyze", "Report resource leaks in an IR file");
    analyze->add_option("file", input, "IR file (.sil.txt)")->required();
    analyze->add_option("--config", config_path, "Resource configuration file");

    auto* fix_ir = app.add_subcommand("fix-ir", "Insert close calls at each leak's last use and handlers");
    fix_ir->add_option("file", input, "IR file")->required();
    fix_ir->add_option("-o,--output", output, "Output file (default stdout)");
    fix_ir->add_option("--config", config_path, "Resource configuration file");

    auto* compile = app.add_subcommand("compile", "Compile a .mj source to IR");
    compile->add_option("file", input, "Source file (.mj)")->required();
    compile->add_option("-o,--output", output, "Output file (default stdout)");
    compile->add_option("--config", config_path, "Resource configuration file");

    auto* repair_cmd = app.add_subcommand("repair", "Propose a fixed source for a leaky .mj file");
    repair_cmd->add_option("file", input, "Source file (.mj)")->required();
    repair_cmd->add_option("-n", n, "Candidate budget")->check(CLI::PositiveNumber);
    repair_cmd->add_option("--report", report_path, "Write the per-candidate report here");
    repair_cmd->add_option("-o,--output", output, "Write the chosen source here (default stdout)");
    repair_cmd->add_option("--config", config_path, "Resource configuration file");

    auto* interp_cmd = app.add_subcommand("interp", "Run an IR file under an exception schedule");
    interp_cmd->add_option("file", input, "IR file")->required();
    interp_cmd->add_option("--schedule", schedule, "Throw decisions, e.g. 0010");
    interp_cmd->add_option("--branches", branches, "Branch choices as digits");
    interp_cmd->add_option("--proc", proc_name, "Only this procedure");
    interp_cmd->add_flag("--trace", trace, "Print every event");
    interp_cmd->add_option("--config", config_path, "Resource configuration file");

    auto* gen = app.add_subcommand("gen-corpus", "Write a generated corpus directory");
    gen->add_option("--seed", seed, "Random seed")->required();
    gen->add_option("--size", size, "Number of programs")->required()->check(CLI::PositiveNumber);
    gen->add_option("-o,--output", output, "Output directory")->required();
    gen->add_option("--mix", mix, "any, leaky or leak-free")->check(CLI::IsMember({"any", "leaky", "leak-free"}));
    gen->add_option("--pattern", pattern, "Force one pattern for every entry");

    auto* eval = app.add_subcommand("eval", "Repair every leaky corpus entry and report metrics");
    eval->add_option("dir", input, "Corpus directory")->required();
    eval->add_option("-n", n, "Candidate budget")->check(CLI::PositiveNumber);
    eval->add_option("--json", json_path, "Write the metrics JSON here");
    eval->add_option("--config", config_path, "Resource configuration file");

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return kInputError;
    }

    try {
        const analysis::ResourceConfig config = load_config(config_path);

        if (*analyze) {
            ir::Program p = load_ir(input);
            std::size_t count = 0;
            for (const auto& proc : p.procedures) {
                auto result = analysis::analyze_procedure(proc, analysis::build_cfg(proc), config);
                for (const auto& d : result.diagnostics) std::cerr << "warning: " << d << "\n";
                for (const auto& r : result.reports) std::cout << analysis::format_report(r) << "\n";
                count += result.reports.size();
            }
            return count ? kFindings : kOk;
        }
        if (*fix_ir) {
            auto fixed = fix::fix_program(load_ir(input), config);
            for (const auto& r : fixed.reports) std::cerr << analysis::format_report(r) << "\n";
            write_output(output, ir::print_program(fixed.program));
            return kOk;
        }
        if (*compile) {
            auto p = minijava::compile_to_ir(minijava::parse_source(read_file(input)), config);
            write_output(output, ir::print_program(p));
            return kOk;
        }
        if (*repair_cmd) {
            auto result = repair::repair(read_file(input), config, n);
            if (!report_path.empty()) write_output(report_path, repair::format_result(result));
            if (result.nothing_to_fix()) {
                std::cerr << "nothing to fix\n";
                return kOk;
            }
            if (const auto* c = result.chosen_candidate()) {
                write_output(output, c->source_text);
                return kOk;
            }
            std::cout << "NO_FIX\n";
            return kFindings;
        }
        if (*interp_cmd) {
            ir::Program p = load_ir(input);
            interp::ExceptionSchedule s;
            try {
                s = interp::ExceptionSchedule::parse(schedule, branches);
            } catch (const std::invalid_argument& e) {
                throw InputError(e.what());
            }
            bool leaked = false, ran = false;
            for (const auto& proc : p.procedures) {
                if (!proc_name.empty() && proc.name.str() != proc_name && proc.name.method != proc_name) continue;
                ran = true;
                auto t = interp::run_schedule(proc, config, s);
                std::cout << proc.name.str() << "\n";
                if (trace) {
                    std::cout << interp::dump_trace(proc, t);
                } else {
                    std::cout << "EXIT " << interp::to_string(t.exit_kind) << " LEAKED " << t.leaked.size() << "\n";
                }
                leaked |= !t.leaked.empty();
            }
            if (!ran) throw InputError("no procedure named " + proc_name);
            return leaked ? kFindings : kOk;
        }
        if (*gen) {
            harness::CorpusParams params;
            params.mix = mix == "leaky" ? harness::Mix::LeakyOnly
                         : mix == "leak-free" ? harness::Mix::LeakFreeOnly
                                              : harness::Mix::Any;
            if (!pattern.empty()) {
                params.forced = harness::pattern_from_string(pattern);
                if (!params.forced) throw InputError("unknown pattern " + pattern);
            }
            harness::save_corpus(harness::generate_corpus(seed, size, params), output);
            return kOk;
        }
        if (*eval) {
            std::vector<harness::CorpusEntry> corpus;
            try {
                corpus = harness::load_corpus(input);
            } catch (const std::runtime_error& e) {
                throw InputError(e.what());
            }
            if (corpus.empty()) throw InputError("corpus " + input + " is empty");
            auto m = harness::evaluate_corpus(corpus, n, config);
            const std::string json = harness::metrics_to_json(m) + "\n";
            if (!json_path.empty()) write_output(json_path, json);
            std::cout << json;
            return kOk;
        }
    } catch (const ir::IrError& e) {
        std::cerr << "error: " << input << ":" << e.what() << "\n";
        return kInputError;
    } catch (const minijava::SourceError& e) {
        std::cerr << "error: " << input << ":" << e.what() << "\n";
        return kInputError;
    } catch (const analysis::ConfigError& e) {
        std::cerr << "error: config: " << e.what() << "\n";
        return kInputError;
    } catch (const fix::FixError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kInputError;
    } catch (const InputError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kInputError;
    }
    return kInputError;
}
