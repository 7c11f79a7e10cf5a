#pragma once

#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "stagecheck/runner.hpp"

namespace stagecheck::corpus {

inline constexpr std::string_view kManifestFormat = "stagecheck-corpus/1";

enum class EntryKind { Reference, Variant, Mutant };
std::string_view kind_name(EntryKind k);

// "not-satisfied" accepts failed or not-demonstrated.
enum class Expect { Satisfied, NotSatisfied };
std::string_view expect_name(Expect e);
bool matches(Expect e, Verdict v) noexcept;

struct CorpusEntry {
    std::string id;
    std::filesystem::path program;  // absolute once loaded
    EntryKind kind = EntryKind::Reference;
    std::optional<std::string> breaks;  // mutants only
    std::string strategy;               // variants only
    std::map<std::string, std::string> coupled;  // other items a mutant loses, with the reason
    std::map<std::string, Expect> expect;
    // series name -> test id -> expected verdict of that series' runs
    std::map<std::string, std::map<std::string, Expect>> expect_per_series;
};

struct Protocol {
    std::filesystem::path suite;
    std::vector<InputSpec> inputs;  // paths absolute once loaded
    std::vector<std::uint64_t> seeds;
    std::int64_t max_steps = kDefaultMaxSteps;
    double threshold = kDefaultThreshold;
};

struct Manifest {
    std::filesystem::path root;
    std::string version;
    Protocol protocol;
    std::vector<std::string> rubric;  // the ten item ids, in order
    std::vector<CorpusEntry> entries;

    const CorpusEntry* find(std::string_view id) const;
    std::vector<const CorpusEntry*> of_kind(EntryKind k) const;
};

/// Reads <dir>/manifest.json. Relative paths resolve against `dir`.
Manifest load_manifest(const std::filesystem::path& dir);

/// Structural checks: ids unique, every mutant breaks exactly one rubric item,
/// every expectation names a rubric item. Returns a list of problems.
std::vector<std::string> check_manifest(const Manifest& m);

/// RunConfig for the given entries under the manifest protocol.
RunConfig protocol_config(const Manifest& m, const std::vector<const CorpusEntry*>& entries);

/// Default corpus directory baked in at build time, overridable by
/// STAGECHECK_CORPUS_DIR in the environment.
std::filesystem::path default_corpus_dir();

}  // namespace stagecheck::corpus
