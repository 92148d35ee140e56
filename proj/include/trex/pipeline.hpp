#pragma once

#include <map>
#include <string>
#include <vector>

#include "trex/config.hpp"
#include "trex/report.hpp"

namespace trex {

// One record per completed stage: content digests of everything it wrote and
// of every upstream file it read.
struct StageRecord {
    std::string status;  // "ok" or "failed"
    std::map<std::string, std::string> inputs;
    std::map<std::string, std::string> outputs;
};

struct RunManifest {
    std::string config_digest;
    std::uint64_t master_seed = 0;
    std::map<std::string, StageRecord> stages;
};

std::string file_digest(const std::string& path);
void save_manifest(const RunManifest& manifest, const std::string& out_dir);
RunManifest load_manifest(const std::string& out_dir);

// Directory of one preference's artifacts under out_dir, e.g. "pref_0.5_0.5".
std::string preference_dir(const PreferenceVector& pref);

// Derived per-stage seeds for one preference (index p in the preference set).
SeedManifest derive_seeds(const PipelineConfig& config, std::size_t pref_index,
                          std::size_t cluster_count = 0);

// Pipeline stages. Each reads the previous stage's files from out_dir,
// verifies their digests against the manifest (StaleInput on mismatch), and
// records its own outputs. Stage names: sample, cluster, train, report.
void stage_sample(const PipelineConfig& config, const std::string& out_dir);
void stage_cluster(const PipelineConfig& config, const std::string& out_dir);
void stage_train(const PipelineConfig& config, const std::string& out_dir);
void stage_report(const PipelineConfig& config, const std::string& out_dir);

// All stages in order; equivalent to running them one by one.
void run_all(const PipelineConfig& config, const std::string& out_dir);

PreferenceReport load_report(const std::string& path);

// Attribution over externally supplied returns (no environment involved).
struct ExternalBlock {
    PreferenceVector preference;
    VectorReturn expert;  // optional context; empty when absent
    VectorReturn original;
    std::vector<VectorReturn> clusters;  // indexed by cluster id
};

std::vector<ExternalBlock> load_external_returns(const std::string& path);

// Builds a minimal report fragment (attribution + table) for one block.
PreferenceReport attribute_external(const ExternalBlock& block);

}  // namespace trex
