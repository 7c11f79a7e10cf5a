// stagecheck: run trigger suites against block programs.
#include <iostream>
#include <thread>

#include "CLI11.hpp"
#include "stagecheck/dsl.hpp"
#include "stagecheck/errors.hpp"
#include "stagecheck/program.hpp"
#include "stagecheck/runner.hpp"

using namespace stagecheck;

namespace {

constexpr int kExitConfig = 2;

void print_summary(const MatrixReport& m, std::ostream& out) {
    for (const auto& p : m.programs) {
        out << p.program << "\n";
        for (const auto& item : p.items) {
            out << "  " << item.test_id << ": " << verdict_name(item.verdict);
            if (item.best_run) {
                const auto& run = p.runs[*item.best_run];
                const auto& t = run.find(item.test_id)->tally;
                out << " (" << t.succ << "/" << t.total() << " in " << run.label() << ")";
            }
            out << "\n";
        }
        std::size_t faults = 0;
        for (const auto& r : p.runs) faults += r.faults.size();
        if (faults) out << "  runtime faults: " << faults << "\n";
    }
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Behavioral trigger tests for stepped sprite programs"};
    app.require_subcommand(1);

    RunConfig cfg;
    std::vector<std::string> program_paths, input_specs, required;
    std::string suite_path;
    std::optional<std::string> csv, json;
    bool quiet = false;

    auto* run = app.add_subcommand("run", "Run the matrix of programs x seeds x input series");
    run->add_option("--program", program_paths, "Program file")->required();
    run->add_option("--suite", suite_path, "Trigger suite file")->required();
    run->add_option("--inputs", input_specs, "name=path or name=triggers:id,id")->required();
    run->add_option("--seeds", cfg.seeds, "Comma separated seeds")->delimiter(',')->default_str("1,2,3");
    run->add_option("--max-steps", cfg.max_steps, "Steps per run")->check(CLI::NonNegativeNumber)->default_val(kDefaultMaxSteps);
    run->add_option("--threshold", cfg.threshold, "Minimum success rate")->check(CLI::Range(0.0, 1.0))->default_val(kDefaultThreshold);
    run->add_option("--report-csv", csv, "Tabular report path");
    run->add_option("--report-json", json, "Structured report path");
    run->add_option("--require", required, "Test ids that decide the exit code (default: all)")->delimiter(',');
    run->add_option("--jobs", cfg.jobs, "Worker threads, 0 = hardware")->default_val(1u);
    run->add_flag("-q,--quiet", quiet, "No summary on stdout");

    std::vector<std::string> check_programs;
    std::string check_suite;
    auto* check = app.add_subcommand("check", "Validate a suite against programs");
    check->add_option("--suite", check_suite, "Trigger suite file")->required();
    check->add_option("--program", check_programs, "Program file")->required();

    std::string fmt_suite;
    auto* fmt = app.add_subcommand("fmt", "Print a suite in canonical form");
    fmt->add_option("--suite", fmt_suite, "Trigger suite file")->required();

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : kExitConfig;
    }

    try {
        if (*run) {
            if (cfg.seeds.empty()) cfg.seeds = {1, 2, 3};
            for (const auto& p : program_paths) cfg.programs.emplace_back(p);
            cfg.suite = suite_path;
            for (const auto& s : input_specs) cfg.inputs.push_back(parse_input_spec(s));
            if (csv) cfg.report_csv = *csv;
            if (json) cfg.report_json = *json;
            if (cfg.jobs == 0) cfg.jobs = std::max(1u, std::thread::hardware_concurrency());

            const auto matrix = run_matrix(cfg);
            emit_reports(matrix, cfg.report_csv, cfg.report_json);
            if (!quiet) print_summary(matrix, std::cout);
            return exit_status(matrix, required);
        }
        if (*check) {
            const auto suite = dsl::parse_suite_file(check_suite);
            bool ok = true;
            for (const auto& path : check_programs) {
                const auto program = load_program_file(path);
                for (const auto& d : dsl::validate_suite(suite, program)) {
                    std::cerr << program.name << ": " << d.to_string() << "\n";
                    if (d.severity == dsl::Severity::Error) ok = false;
                }
            }
            if (ok) std::cout << suite.size() << " triggers ok\n";
            return ok ? 0 : 1;
        }
        if (*fmt) {
            std::cout << dsl::pretty_print(dsl::parse_suite_file(fmt_suite));
            return 0;
        }
    } catch (const Error& e) {
        std::cerr << "stagecheck: " << e.what() << "\n";
        return *check ? 1 : kExitConfig;
    } catch (const std::exception& e) {
        std::cerr << "stagecheck: " << e.what() << "\n";
        return kExitConfig;
    }
    return 0;
}
