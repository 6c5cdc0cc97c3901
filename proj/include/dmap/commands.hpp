#pragma once

#include <filesystem>

#include "dmap/data_matrix.hpp"
#include "dmap/experiment_config.hpp"
#include "dmap/graph.hpp"
#include "dmap/spectral.hpp"

namespace dmap {

struct RunOptions {
  std::filesystem::path out_dir;
  int threads = 1;
};

/// Graph plus spectrum for a dataset, honoring allow_disconnected (with a
/// warning on stderr) and the configured eigensolver.
struct FittedModel {
  GraphMatrices graph;
  DiffusionModel model;
};
FittedModel fit_diffusion(const ExperimentConfig& config, const DataMatrix& data, Index k_max);

// Each command writes config.echo.json next to its outputs.
void cmd_generate(const ExperimentConfig& config, const RunOptions& run);
void cmd_embed(const ExperimentConfig& config, const RunOptions& run);
void cmd_pca(const ExperimentConfig& config, const RunOptions& run);
void cmd_nre(const ExperimentConfig& config, const RunOptions& run);
void cmd_search(const ExperimentConfig& config, const RunOptions& run);
void cmd_distance_check(const ExperimentConfig& config, const RunOptions& run);
void cmd_spectrum(const ExperimentConfig& config, const RunOptions& run);

/// Parses arguments, runs one subcommand and returns the process exit code
/// (0 ok, 2 parameter, 3 disconnected graph, 4 training divergence, 5 I/O).
int run_cli(int argc, char** argv);

}  // namespace dmap
