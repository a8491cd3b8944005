#pragma once

#include <filesystem>

#include "json.hpp"

#include "incode/cli/run_config.hpp"
#include "incode/training/model.hpp"

namespace incode::cli {

/// Runs one task and writes its artifacts (reconstruction, checkpoint,
/// log.csv, metrics.json) under config.out. Returns the metrics.
/// Divergence writes the last good checkpoint and the partial log before
/// rethrowing.
nlohmann::json run_task(const RunConfig& config);

/// Composer/harmonizer/extractor settings for a run.
train::BundleConfig bundle_config(const RunConfig& config, int input_dim, int output_dim,
                                  train::LatentSource latent = train::LatentSource::conv);

/// Directory of the bundled fixtures.
std::filesystem::path data_dir();

/// Applies INCODE_THREADS (positive integer) as the OpenMP thread cap.
void apply_thread_limit();

/// Keeps freed per-epoch buffers in the heap instead of returning them to the
/// OS, which otherwise costs a page fault storm every epoch.
void tune_allocator();

/// Process exit code for an exception raised by run_task.
int exit_code_for(const std::exception& e);

}  // namespace incode::cli
