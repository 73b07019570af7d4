#pragma once

// End-to-end run: hypotheses, torsion, both lattices, spectra, comparison and
// the obstruction certificate.

#include <filesystem>
#include <optional>
#include <string>

#include "isospec/config.hpp"

namespace isospec {

/// Cache directory by precedence: explicit flag, config file, ISOSPEC_CACHE.
std::optional<std::filesystem::path> resolve_cache_dir(const std::optional<std::string>& flag,
                                                       const RunConfig& config);

/// Slice for (level, x, B), read from or written to `cache_dir` when given.
/// `key` must identify the level and conjugator.
LatticeSlice cached_slice(const GlobalLevel& level, const Conjugator& x, std::int64_t height_bound, unsigned threads,
                          const std::optional<std::filesystem::path>& cache_dir, const std::string& key,
                          bool* cache_hit = nullptr);

struct PipelineOptions {
    std::optional<std::filesystem::path> cache_dir;
    bool timing = false;
};

struct RunReport {
    Json report;
    bool spectra_agree = false;
    Verdict verdict = Verdict::Inconclusive;
    bool verdict_as_expected = false;
    int exit_code = 1;  // 0 success, 1 scientific mismatch
};

/// Throws ConfigError when a hypothesis fails or the configuration is invalid.
RunReport run_pipeline(const RunConfig& config, const PipelineOptions& options = {});

}  // namespace isospec
