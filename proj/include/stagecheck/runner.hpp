#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "stagecheck/dsl.hpp"
#include "stagecheck/harness.hpp"
#include "stagecheck/program.hpp"
#include "stagecheck/vm.hpp"

namespace stagecheck {

inline constexpr std::int64_t kDefaultMaxSteps = 3000;
inline constexpr double kDefaultThreshold = 0.1;
inline constexpr std::string_view kInputFormat = "stagecheck-inputs/1";

struct TimedEvent {
    std::int64_t step = 0;
    Key key = Key::Space;
    bool down = true;
    friend bool operator==(const TimedEvent&, const TimedEvent&) = default;
};

struct TimedInputScript {
    std::vector<TimedEvent> events;  // non-decreasing steps

    /// Keys held during `step` given every event up to and including it.
    KeySet held_at(std::int64_t step) const;
};

TimedInputScript load_input_script(std::string_view document);
TimedInputScript load_input_script_file(const std::filesystem::path& path);

// One input series: either a timed script or a list of suite triggers that
// generate input while the run executes.
struct InputSeries {
    std::string name;
    std::optional<TimedInputScript> script;
    std::vector<std::string> triggers;
};

/// Parses "name=path" or "name=triggers:id,id".
struct InputSpec {
    std::string name;
    std::optional<std::filesystem::path> path;
    std::vector<std::string> triggers;
};
InputSpec parse_input_spec(std::string_view text);

struct RunConfig {
    std::vector<std::filesystem::path> programs;
    std::filesystem::path suite;
    std::vector<InputSpec> inputs;
    std::vector<std::uint64_t> seeds;
    std::int64_t max_steps = kDefaultMaxSteps;
    double threshold = kDefaultThreshold;
    std::optional<std::filesystem::path> report_csv;
    std::optional<std::filesystem::path> report_json;
    unsigned jobs = 1;
};

struct Experiment {
    std::vector<Program> programs;
    dsl::Suite suite;
    std::vector<InputSeries> series;
    std::vector<std::uint64_t> seeds;
    std::int64_t max_steps = kDefaultMaxSteps;
    double threshold = kDefaultThreshold;
    unsigned jobs = 1;
};

/// Loads every file named by the config and checks the experiment. Throws
/// ConfigError (or ParseError for malformed files).
Experiment load_experiment(const RunConfig& config);
void check_experiment(const Experiment& experiment);

struct TestOutcome {
    std::string test_id;
    Tally tally;
    Verdict verdict = Verdict::NotDemonstrated;
    friend bool operator==(const TestOutcome&, const TestOutcome&) = default;
};

struct RunReport {
    std::string program;
    std::uint64_t seed = 0;
    std::string series;
    std::vector<TestOutcome> tests;  // suite order of first Report
    std::vector<RuntimeFault> faults;
    std::int64_t steps = 0;

    std::string label() const;  // "<series>:<seed>"
    const TestOutcome* find(std::string_view test_id) const;
    friend bool operator==(const RunReport&, const RunReport&) = default;
};

/// Triggers that act as input generators for some series of the experiment;
/// those not selected by the current series are disabled for the run.
std::set<std::string> input_triggers(const dsl::Suite& suite, const std::vector<InputSeries>& series);

RunReport run_single(const Program& program, const dsl::Suite& suite, const InputSeries& series,
                     const std::set<std::string>& input_trigger_ids, std::uint64_t seed,
                     std::int64_t max_steps, double threshold);

struct ItemSummary {
    std::string test_id;
    Verdict verdict = Verdict::NotDemonstrated;
    std::optional<std::size_t> best_run;  // index into ProgramSummary::runs
    friend bool operator==(const ItemSummary&, const ItemSummary&) = default;
};

struct ProgramSummary {
    std::string program;
    std::vector<ItemSummary> items;
    std::vector<RunReport> runs;  // series order, then seed order

    const ItemSummary* find(std::string_view test_id) const;
    friend bool operator==(const ProgramSummary&, const ProgramSummary&) = default;
};

struct MatrixReport {
    double threshold = kDefaultThreshold;
    std::int64_t max_steps = kDefaultMaxSteps;
    std::vector<ProgramSummary> programs;

    std::size_t run_count() const noexcept;
    friend bool operator==(const MatrixReport&, const MatrixReport&) = default;
};

/// Across-run aggregation: satisfied iff any run satisfies the item.
ItemSummary aggregate_item(const std::vector<RunReport>& runs, const std::string& test_id);

MatrixReport run_matrix(const Experiment& experiment);
MatrixReport run_matrix(const RunConfig& config);

std::string to_csv(const MatrixReport& matrix);
std::string to_json(const MatrixReport& matrix);
void emit_reports(const MatrixReport& matrix, const std::optional<std::filesystem::path>& csv,
                  const std::optional<std::filesystem::path>& json);

/// 0 when every required item is satisfied for every program, 1 otherwise.
/// An empty `required` list means every test id in the report.
int exit_status(const MatrixReport& matrix, const std::vector<std::string>& required = {});

}  // namespace stagecheck
