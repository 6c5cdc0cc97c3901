#pragma once

#include <optional>
#include <string>
#include <vector>

#include "dmap/data_matrix.hpp"
#include "dmap/decoder.hpp"
#include "dmap/pca.hpp"
#include "dmap/spectral.hpp"

namespace dmap {

struct NreEntry {
  std::vector<Index> components;
  double nre = 0.0;
  TrainReport report;
};

struct NreCurve {
  std::vector<NreEntry> entries;
};

/// Training seed for a component set: derived from the base seed and the
/// sorted set, so results do not depend on evaluation order.
std::uint64_t component_set_seed(std::uint64_t base_seed, std::vector<Index> components);

/// Trains a decoder from the selected embedding columns (each standardized)
/// back to the data and returns the report; `epsilon_k_normalized` is the
/// neural reconstruction error.
TrainReport nre(const Embedding& embedding, const DataMatrix& data, const std::vector<Index>& components,
                const DecoderConfig& config);

/// Sets {}, {1}, {1,2}, ..., {1..k_max}; the empty set is skipped when
/// `include_baseline` is false. Up to `threads` trainings run at once.
NreCurve nre_curve_consecutive(const Embedding& embedding, const DataMatrix& data, Index k_max,
                               const DecoderConfig& config, bool include_baseline = true, int threads = 1);

struct GreedyCandidate {
  Index candidate = 0;
  std::vector<Index> components;
  std::optional<double> nre;  ///< empty when training failed
  std::string error;
};

struct GreedyResult {
  std::vector<Index> selected;
  NreCurve curve;  ///< NRE of every selected prefix
  std::vector<std::vector<GreedyCandidate>> rounds;
  std::vector<std::string> warnings;
};

/// At round T trains one decoder per unused candidate in 1..k_max and keeps
/// the argmin (ties to the lower index). Candidates whose training fails are
/// skipped with a warning.
GreedyResult greedy_search(const Embedding& embedding, const DataMatrix& data, Index k_max, Index t_max,
                           const DecoderConfig& config, int threads = 1);

/// NRE with the first k principal components as decoder input.
TrainReport nre_for_pca(const PcaModel& model, const DataMatrix& data, Index k, const DecoderConfig& config);

}  // namespace dmap
