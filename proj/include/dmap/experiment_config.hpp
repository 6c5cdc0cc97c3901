#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "dmap/data_matrix.hpp"
#include "dmap/datasets.hpp"
#include "dmap/decoder.hpp"
#include "dmap/graph.hpp"

namespace dmap {

/// One preprocessing step. `op` is standardize, minmax, scale_column,
/// duplicate_column or discretize_column; unused fields are ignored.
struct TransformStep {
  std::string op;
  Index column = 0;
  double factor = 1.0;
  Index copies = 1;
  double noise_sigma = 0.0;
  std::optional<std::uint64_t> seed;
  std::vector<double> levels;
};

struct DatasetSpec {
  std::string generator = "swiss_roll";  ///< swiss_roll, curve or csv
  SwissRollParams swiss_roll;
  CurveKind curve_kind = CurveKind::line;
  Index curve_n = 300;
  double curve_noise_sigma = 0.0;
  std::uint64_t curve_seed = 1;
  std::string csv_path;
  std::vector<TransformStep> transforms;
};

struct EmbeddingSpec {
  int t = 1;
  Index k_max = 10;
  std::vector<Index> components;  ///< empty: 1..k_max
  std::string solver = "auto";    ///< auto, dense or lanczos
  std::uint64_t solver_seed = 1;
};

struct NreSpec {
  std::string source = "diffusion";  ///< diffusion or pca
  Index k_max = 7;
  Index t_max = 7;
  bool include_baseline = true;
};

struct DistanceCheckSpec {
  Index sample_pairs = 50;
  std::vector<int> t_values{1, 2, 3};
  std::optional<Index> k;  ///< empty: every nontrivial component
  std::uint64_t seed = 0;
};

struct SpectrumSpec {
  std::vector<int> t_values{1, 2, 4, 8, 16, 32, 64};
  double delta = 0.1;
};

/// Everything a command needs. Runtime-only settings (output directory and
/// thread count) are kept out of the serialized form so an echoed config
/// reproduces the same files wherever it runs.
struct ExperimentConfig {
  std::uint64_t seed = 42;
  DatasetSpec dataset;
  KernelParams kernel;
  EmbeddingSpec embedding;
  std::optional<Index> pca_k;  ///< empty: all columns
  DecoderConfig decoder;
  NreSpec nre;
  DistanceCheckSpec distance_check;
  SpectrumSpec spectrum;
  bool allow_disconnected = false;
  std::string dump_matrices = "none";  ///< none, csv or binary
};

/// Missing keys take defaults; component seeds default to the top-level seed.
/// Unknown keys or malformed values raise ParameterError.
ExperimentConfig config_from_json(const nlohmann::json& j);
nlohmann::json config_to_json(const ExperimentConfig& config);

ExperimentConfig load_config(const std::string& path);

/// Applies `dotted.path=value` (value parsed as JSON, else taken as a string)
/// to a JSON config document.
void apply_override(nlohmann::json& doc, const std::string& assignment);

DataMatrix build_dataset(const DatasetSpec& spec);
DataMatrix apply_transforms(DataMatrix data, const std::vector<TransformStep>& steps, std::uint64_t base_seed);

}  // namespace dmap
