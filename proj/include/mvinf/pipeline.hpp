#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "mvinf/config.hpp"

namespace mvinf {

std::uint64_t fnv1a64(const std::string& bytes);
std::string hex64(std::uint64_t value);

/// Writes stage outputs as "<name>.partial" and renames them into place on
/// commit, so an interrupted stage leaves only .partial files behind.
class OutputStager {
public:
    explicit OutputStager(std::string out_dir);

    void write_text(const std::string& name, const std::string& content);
    void commit();

    struct Entry {
        std::string name;
        std::uint64_t bytes = 0;
        std::uint64_t hash = 0;
    };
    const std::vector<Entry>& entries() const { return entries_; }
    const std::string& out_dir() const { return out_dir_; }

private:
    std::string out_dir_;
    std::vector<Entry> pending_;
    std::vector<Entry> entries_;
};

enum class Stage { stats, factorize, scree, rank, subgraph, baseline, regress };

const char* to_string(Stage s);

struct PipelineOutcome {
    std::vector<std::string> stages_run;
    std::vector<OutputStager::Entry> outputs;
    std::string manifest_path;
    std::vector<std::string> messages; // human-readable progress lines
};

/// Run the requested stages (prerequisites are added automatically: rank and
/// subgraph need factorize, which needs stats). Every run that reaches the
/// output directory writes exactly one manifest.json; a stage failure leaves
/// that stage's outputs as .partial files, records the failure in the
/// manifest, and rethrows.
PipelineOutcome run_pipeline(const RunConfig& config, std::vector<Stage> stages);

} // namespace mvinf
