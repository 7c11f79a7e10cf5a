#include "stagecheck/corpus.hpp"

#include <algorithm>
#include <cstdlib>
#include <fstream>
#include <set>
#include <sstream>

#include "json.hpp"
#include "stagecheck/errors.hpp"

#ifndef STAGECHECK_CORPUS_DIR
#define STAGECHECK_CORPUS_DIR "corpus/pong-v1"
#endif

namespace stagecheck::corpus {

using json = nlohmann::ordered_json;

std::string_view kind_name(EntryKind k) {
    switch (k) {
        case EntryKind::Reference: return "reference";
        case EntryKind::Variant: return "variant";
        case EntryKind::Mutant: return "mutant";
    }
    return "?";
}

std::string_view expect_name(Expect e) { return e == Expect::Satisfied ? "satisfied" : "not-satisfied"; }

bool matches(Expect e, Verdict v) noexcept {
    return (e == Expect::Satisfied) == (v == Verdict::Satisfied);
}

const CorpusEntry* Manifest::find(std::string_view id) const {
    for (const auto& e : entries)
        if (e.id == id) return &e;
    return nullptr;
}

std::vector<const CorpusEntry*> Manifest::of_kind(EntryKind k) const {
    std::vector<const CorpusEntry*> out;
    for (const auto& e : entries)
        if (e.kind == k) out.push_back(&e);
    return out;
}

namespace {

[[noreturn]] void fail(const std::string& msg) { throw ConfigError("corpus manifest: " + msg); }

Expect parse_expect(const json& j, const std::string& where) {
    if (j == "satisfied") return Expect::Satisfied;
    if (j == "not-satisfied") return Expect::NotSatisfied;
    fail(where + ": expected 'satisfied' or 'not-satisfied'");
}

std::map<std::string, Expect> parse_expect_map(const json& j, const std::string& where) {
    if (!j.is_object()) fail(where + ": expected an object");
    std::map<std::string, Expect> out;
    for (const auto& [k, v] : j.items()) out[k] = parse_expect(v, where + "/" + k);
    return out;
}

}  // namespace

Manifest load_manifest(const std::filesystem::path& dir) {
    const auto file = dir / "manifest.json";
    std::ifstream in(file, std::ios::binary);
    if (!in) throw ConfigError("cannot open '" + file.string() + "'");
    json doc;
    try {
        doc = json::parse(in);
    } catch (const json::exception& e) {
        fail(file.string() + ": " + e.what());
    }
    try {
        if (doc.value("format", "") != kManifestFormat) fail("unsupported format");
        Manifest m;
        m.root = dir;
        m.version = doc.value("version", "");

        const auto& p = doc.at("protocol");
        m.protocol.suite = dir / p.at("suite").get<std::string>();
        for (const auto& [name, value] : p.at("series").items()) {
            InputSpec spec;
            spec.name = name;
            if (value.is_string()) spec.path = dir / value.get<std::string>();
            else spec.triggers = value.at("triggers").get<std::vector<std::string>>();
            m.protocol.inputs.push_back(std::move(spec));
        }
        m.protocol.seeds = p.at("seeds").get<std::vector<std::uint64_t>>();
        m.protocol.max_steps = p.value("max_steps", kDefaultMaxSteps);
        m.protocol.threshold = p.value("threshold", kDefaultThreshold);
        m.rubric = doc.at("rubric").get<std::vector<std::string>>();

        const auto& entries = doc.at("entries");
        for (std::size_t i = 0; i < entries.size(); ++i) {
            const auto& e = entries[i];
            const std::string where = "entries/" + std::to_string(i);
            CorpusEntry c;
            c.id = e.at("id").get<std::string>();
            c.program = dir / e.at("program").get<std::string>();
            const auto kind = e.at("kind").get<std::string>();
            if (kind == "reference") c.kind = EntryKind::Reference;
            else if (kind == "variant") c.kind = EntryKind::Variant;
            else if (kind == "mutant") c.kind = EntryKind::Mutant;
            else fail(where + "/kind: unknown kind '" + kind + "'");
            if (e.contains("breaks")) c.breaks = e["breaks"].get<std::string>();
            c.strategy = e.value("strategy", "");
            if (e.contains("coupled")) c.coupled = e["coupled"].get<std::map<std::string, std::string>>();
            if (e.contains("expect")) c.expect = parse_expect_map(e["expect"], where + "/expect");
            if (e.contains("expect_per_series"))
                for (const auto& [series, map] : e["expect_per_series"].items())
                    c.expect_per_series[series] = parse_expect_map(map, where + "/expect_per_series/" + series);
            m.entries.push_back(std::move(c));
        }
        return m;
    } catch (const json::exception& e) {
        fail(file.string() + ": " + e.what());
    }
}

std::vector<std::string> check_manifest(const Manifest& m) {
    std::vector<std::string> problems;
    const std::set<std::string> rubric(m.rubric.begin(), m.rubric.end());
    if (rubric.size() != m.rubric.size()) problems.push_back("rubric lists an item twice");
    std::set<std::string> ids;
    std::set<std::string> series;
    for (const auto& s : m.protocol.inputs) series.insert(s.name);
    for (const auto& e : m.entries) {
        if (!ids.insert(e.id).second) problems.push_back("duplicate entry id '" + e.id + "'");
        if (e.kind == EntryKind::Mutant) {
            if (!e.breaks) problems.push_back(e.id + ": mutant names no broken item");
            else if (!rubric.count(*e.breaks)) problems.push_back(e.id + ": breaks unknown item '" + *e.breaks + "'");
        } else if (e.breaks) {
            problems.push_back(e.id + ": only mutants may name a broken item");
        }
        if (e.expect.empty()) problems.push_back(e.id + ": no expectations");
        for (const auto& [id, _] : e.expect)
            if (!rubric.count(id)) problems.push_back(e.id + ": expectation for unknown item '" + id + "'");
        for (const auto& [s, map] : e.expect_per_series) {
            if (!series.count(s)) problems.push_back(e.id + ": expectation for unknown series '" + s + "'");
            for (const auto& [id, _] : map)
                if (!rubric.count(id)) problems.push_back(e.id + ": expectation for unknown item '" + id + "'");
        }
        if (!std::filesystem::exists(e.program)) problems.push_back(e.id + ": missing " + e.program.string());
    }
    return problems;
}

RunConfig protocol_config(const Manifest& m, const std::vector<const CorpusEntry*>& entries) {
    RunConfig c;
    for (const auto* e : entries) c.programs.push_back(e->program);
    c.suite = m.protocol.suite;
    c.inputs = m.protocol.inputs;
    c.seeds = m.protocol.seeds;
    c.max_steps = m.protocol.max_steps;
    c.threshold = m.protocol.threshold;
    return c;
}

std::filesystem::path default_corpus_dir() {
    if (const char* env = std::getenv("STAGECHECK_CORPUS_DIR"); env && *env) return env;
    return STAGECHECK_CORPUS_DIR;
}

}  // namespace stagecheck::corpus
