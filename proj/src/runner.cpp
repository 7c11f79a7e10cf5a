#include "stagecheck/runner.hpp"

#include <algorithm>
#include <atomic>
#include <cstdio>
#include <fstream>
#include <sstream>
#include <thread>

#include "json.hpp"
#include "stagecheck/errors.hpp"

namespace stagecheck {

using nlohmann::json;

KeySet TimedInputScript::held_at(std::int64_t step) const {
    KeySet held;
    for (const auto& e : events) {
        if (e.step > step) break;
        if (e.down) held.insert(e.key);
        else held.erase(e.key);
    }
    return held;
}

TimedInputScript load_input_script(std::string_view document) {
    json doc;
    try {
        doc = json::parse(document.begin(), document.end());
    } catch (const json::parse_error& e) {
        throw ParseError({}, std::string("input script: ") + e.what());
    }
    auto bad = [](const std::string& what) { throw ParseError({}, "input script: " + what); };
    if (!doc.is_object() || !doc.contains("events") || !doc["events"].is_array())
        bad("expected an object with an 'events' list");
    if (doc.contains("format") && doc["format"] != kInputFormat)
        bad("unsupported format (expected " + std::string(kInputFormat) + ")");

    TimedInputScript script;
    for (std::size_t i = 0; i < doc["events"].size(); ++i) {
        const auto& e = doc["events"][i];
        const std::string where = "/events/" + std::to_string(i);
        if (!e.is_object() || !e.contains("step") || !e.contains("key") || !e.contains("action"))
            bad(where + ": expected {step, key, action}");
        if (!e["step"].is_number_integer() || e["step"].get<std::int64_t>() < 0)
            bad(where + "/step: expected a non-negative integer");
        if (!e["key"].is_string()) bad(where + "/key: expected a key name");
        auto key = parse_key(e["key"].get<std::string>());
        if (!key) bad(where + "/key: unknown key '" + e["key"].get<std::string>() + "'");
        const auto action = e["action"].is_string() ? e["action"].get<std::string>() : "";
        if (action != "down" && action != "up") bad(where + "/action: expected 'down' or 'up'");
        TimedEvent ev{e["step"].get<std::int64_t>(), *key, action == "down"};
        if (!script.events.empty() && ev.step < script.events.back().step)
            bad(where + ": steps must be non-decreasing");
        script.events.push_back(ev);
    }
    return script;
}

TimedInputScript load_input_script_file(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw ConfigError("cannot open input script '" + path.string() + "'");
    std::ostringstream buf;
    buf << in.rdbuf();
    try {
        return load_input_script(buf.str());
    } catch (const ParseError& e) {
        throw ParseError(e.pos(), path.string() + ": " + e.message());
    }
}

InputSpec parse_input_spec(std::string_view text) {
    const auto eq = text.find('=');
    if (eq == std::string_view::npos || eq == 0 || eq + 1 == text.size())
        throw ConfigError("input series '" + std::string(text) + "' must look like name=path or name=triggers:id,id");
    InputSpec spec;
    spec.name = std::string(text.substr(0, eq));
    const auto rest = text.substr(eq + 1);
    constexpr std::string_view prefix = "triggers:";
    if (rest.substr(0, prefix.size()) == prefix) {
        std::string ids(rest.substr(prefix.size()));
        std::stringstream ss(ids);
        std::string id;
        while (std::getline(ss, id, ','))
            if (!id.empty()) spec.triggers.push_back(id);
        if (spec.triggers.empty()) throw ConfigError("input series '" + spec.name + "' lists no triggers");
    } else {
        spec.path = std::filesystem::path(std::string(rest));
    }
    return spec;
}

void check_experiment(const Experiment& ex) {
    if (ex.programs.empty()) throw ConfigError("no programs given");
    if (ex.seeds.empty()) throw ConfigError("at least one seed is required");
    if (ex.series.empty()) throw ConfigError("at least one input series is required");
    if (ex.max_steps < 0) throw ConfigError("max_steps must not be negative");
    if (!(ex.threshold >= 0.0 && ex.threshold <= 1.0)) throw ConfigError("threshold must lie in [0, 1]");

    std::set<std::string> names;
    for (const auto& p : ex.programs)
        if (!names.insert(p.name).second) throw ConfigError("duplicate program id '" + p.name + "'");
    std::set<std::string> series;
    for (const auto& s : ex.series) {
        if (!series.insert(s.name).second) throw ConfigError("duplicate input series '" + s.name + "'");
        for (const auto& id : s.triggers)
            if (std::none_of(ex.suite.begin(), ex.suite.end(), [&](const auto& d) { return d.id == id; }))
                throw ConfigError("input series '" + s.name + "' names unknown trigger '" + id + "'");
    }
    for (const auto& p : ex.programs) {
        const auto diagnostics = dsl::validate_suite(ex.suite, p);
        if (dsl::has_errors(diagnostics)) {
            std::string msg = "suite does not validate against program '" + p.name + "':";
            for (const auto& d : diagnostics) msg += "\n  " + d.to_string();
            throw ConfigError(msg);
        }
    }
}

Experiment load_experiment(const RunConfig& config) {
    Experiment ex;
    for (const auto& path : config.programs) ex.programs.push_back(load_program_file(path));
    ex.suite = dsl::parse_suite_file(config.suite);
    for (const auto& spec : config.inputs) {
        InputSeries s{spec.name, std::nullopt, spec.triggers};
        if (spec.path) s.script = load_input_script_file(*spec.path);
        ex.series.push_back(std::move(s));
    }
    ex.seeds = config.seeds;
    ex.max_steps = config.max_steps;
    ex.threshold = config.threshold;
    ex.jobs = config.jobs;
    check_experiment(ex);
    return ex;
}

std::string RunReport::label() const { return series + ":" + std::to_string(seed); }

const TestOutcome* RunReport::find(std::string_view test_id) const {
    for (const auto& t : tests)
        if (t.test_id == test_id) return &t;
    return nullptr;
}

const ItemSummary* ProgramSummary::find(std::string_view test_id) const {
    for (const auto& i : items)
        if (i.test_id == test_id) return &i;
    return nullptr;
}

std::size_t MatrixReport::run_count() const noexcept {
    std::size_t n = 0;
    for (const auto& p : programs) n += p.runs.size();
    return n;
}

std::set<std::string> input_triggers(const dsl::Suite& suite, const std::vector<InputSeries>& series) {
    std::set<std::string> out;
    for (const auto& def : suite)
        if (dsl::has_input_action(def)) out.insert(def.id);
    for (const auto& s : series) out.insert(s.triggers.begin(), s.triggers.end());
    return out;
}

RunReport run_single(const Program& program, const dsl::Suite& suite, const InputSeries& series,
                     const std::set<std::string>& input_trigger_ids, std::uint64_t seed,
                     std::int64_t max_steps, double threshold) {
    HarnessOptions options;
    options.seed = seed;
    for (const auto& id : input_trigger_ids)
        if (std::find(series.triggers.begin(), series.triggers.end(), id) == series.triggers.end())
            options.disabled.insert(id);

    VmState vm = green_flag(program, seed);
    HarnessState h = init_harness(suite, options, &vm.stage);
    for (std::int64_t step = 0; step < max_steps; ++step) {
        const KeySet scripted = series.script ? series.script->held_at(step) : KeySet{};
        vm.stage.keys_down = scripted | take_injected_keys(h);
        vm_step(program, vm);
        harness_step(suite, h, vm.stage);
    }

    RunReport report;
    report.program = program.name;
    report.seed = seed;
    report.series = series.name;
    report.steps = max_steps;
    report.faults = vm.faults;
    for (const auto& id : dsl::report_test_ids(suite)) {
        const Tally t = h.tally[id];
        report.tests.push_back(TestOutcome{id, t, verdict_for(t, threshold)});
    }
    return report;
}

ItemSummary aggregate_item(const std::vector<RunReport>& runs, const std::string& test_id) {
    ItemSummary item{test_id, Verdict::NotDemonstrated, std::nullopt};
    double best = -1.0;
    for (std::size_t i = 0; i < runs.size(); ++i) {
        const auto* t = runs[i].find(test_id);
        if (!t || t->tally.total() == 0) continue;
        const double rate = *t->tally.rate();
        if (rate > best) {
            best = rate;
            item.best_run = i;
        }
        if (t->verdict == Verdict::Satisfied) item.verdict = Verdict::Satisfied;
        else if (item.verdict == Verdict::NotDemonstrated) item.verdict = Verdict::Failed;
    }
    return item;
}

MatrixReport run_matrix(const Experiment& ex) {
    check_experiment(ex);
    const auto inputs = input_triggers(ex.suite, ex.series);

    struct Job {
        std::size_t program, series, seed;
    };
    std::vector<Job> jobs;
    for (std::size_t p = 0; p < ex.programs.size(); ++p)
        for (std::size_t s = 0; s < ex.series.size(); ++s)
            for (std::size_t k = 0; k < ex.seeds.size(); ++k) jobs.push_back({p, s, k});

    std::vector<RunReport> results(jobs.size());
    auto work = [&](std::size_t i) {
        const Job& j = jobs[i];
        results[i] = run_single(ex.programs[j.program], ex.suite, ex.series[j.series], inputs,
                                ex.seeds[j.seed], ex.max_steps, ex.threshold);
    };

    const unsigned workers = std::max(1u, std::min<unsigned>(ex.jobs, static_cast<unsigned>(jobs.size())));
    if (workers == 1) {
        for (std::size_t i = 0; i < jobs.size(); ++i) work(i);
    } else {
        std::atomic<std::size_t> next{0};
        std::vector<std::thread> pool;
        for (unsigned w = 0; w < workers; ++w)
            pool.emplace_back([&] {
                for (std::size_t i = next++; i < jobs.size(); i = next++) work(i);
            });
        for (auto& t : pool) t.join();
    }

    MatrixReport matrix;
    matrix.threshold = ex.threshold;
    matrix.max_steps = ex.max_steps;
    const auto ids = dsl::report_test_ids(ex.suite);
    const std::size_t per_program = ex.series.size() * ex.seeds.size();
    for (std::size_t p = 0; p < ex.programs.size(); ++p) {
        ProgramSummary summary;
        summary.program = ex.programs[p].name;
        summary.runs.assign(std::make_move_iterator(results.begin() + static_cast<std::ptrdiff_t>(p * per_program)),
                            std::make_move_iterator(results.begin() + static_cast<std::ptrdiff_t>((p + 1) * per_program)));
        for (const auto& id : ids) summary.items.push_back(aggregate_item(summary.runs, id));
        matrix.programs.push_back(std::move(summary));
    }
    return matrix;
}

MatrixReport run_matrix(const RunConfig& config) { return run_matrix(load_experiment(config)); }

namespace {

std::string csv_field(const std::string& s) {
    if (s.find_first_of(",\"\n") == std::string::npos) return s;
    std::string out = "\"";
    for (char c : s) {
        if (c == '"') out += '"';
        out += c;
    }
    return out + "\"";
}

std::string fixed_rate(double r) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.6f", r);
    return buf;
}

json tally_json(const Tally& t, Verdict v) {
    json j;
    j["succ"] = t.succ;
    j["fail"] = t.fail;
    j["rate"] = t.rate() ? json(*t.rate()) : json(nullptr);
    j["verdict"] = std::string(verdict_name(v));
    return j;
}

void write_file(const std::filesystem::path& path, const std::string& content) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw Error("cannot open '" + path.string() + "' for writing");
    out << content;
    out.close();
    if (!out) throw Error("failed writing '" + path.string() + "'");
}

}  // namespace

std::string to_csv(const MatrixReport& matrix) {
    std::string out = "program,test_id,succ,fail,rate,verdict,best_run\n";
    for (const auto& p : matrix.programs) {
        for (const auto& item : p.items) {
            std::string succ = "0", fail = "0", rate, best;
            if (item.best_run) {
                const auto& run = p.runs[*item.best_run];
                const auto& t = run.find(item.test_id)->tally;
                succ = std::to_string(t.succ);
                fail = std::to_string(t.fail);
                rate = fixed_rate(*t.rate());
                best = run.label();
            }
            out += csv_field(p.program) + "," + csv_field(item.test_id) + "," + succ + "," + fail +
                   "," + rate + "," + std::string(verdict_name(item.verdict)) + "," + csv_field(best) + "\n";
        }
    }
    return out;
}

std::string to_json(const MatrixReport& matrix) {
    json root;
    root["format"] = "stagecheck-report/1";
    root["threshold"] = matrix.threshold;
    root["max_steps"] = matrix.max_steps;
    root["programs"] = json::array();
    for (const auto& p : matrix.programs) {
        json pj;
        pj["program"] = p.program;
        pj["items"] = json::array();
        for (const auto& item : p.items) {
            json ij;
            ij["test_id"] = item.test_id;
            ij["verdict"] = std::string(verdict_name(item.verdict));
            ij["best_run"] = item.best_run ? json(p.runs[*item.best_run].label()) : json(nullptr);
            pj["items"].push_back(std::move(ij));
        }
        pj["runs"] = json::array();
        for (const auto& run : p.runs) {
            json rj;
            rj["series"] = run.series;
            rj["seed"] = run.seed;
            rj["steps"] = run.steps;
            rj["tests"] = json::array();
            for (const auto& t : run.tests) {
                json tj = tally_json(t.tally, t.verdict);
                tj["test_id"] = t.test_id;
                rj["tests"].push_back(std::move(tj));
            }
            rj["faults"] = json::array();
            for (const auto& f : run.faults)
                rj["faults"].push_back(
                    {{"step", f.step}, {"sprite", f.sprite}, {"script", f.script}, {"message", f.message}});
            pj["runs"].push_back(std::move(rj));
        }
        root["programs"].push_back(std::move(pj));
    }
    return root.dump(2) + "\n";
}

void emit_reports(const MatrixReport& matrix, const std::optional<std::filesystem::path>& csv,
                  const std::optional<std::filesystem::path>& json_path) {
    if (csv) write_file(*csv, to_csv(matrix));
    if (json_path) write_file(*json_path, to_json(matrix));
}

int exit_status(const MatrixReport& matrix, const std::vector<std::string>& required) {
    for (const auto& p : matrix.programs)
        for (const auto& item : p.items) {
            const bool listed = required.empty() ||
                                std::find(required.begin(), required.end(), item.test_id) != required.end();
            if (listed && item.verdict != Verdict::Satisfied) return 1;
        }
    return 0;
}

}  // namespace stagecheck
