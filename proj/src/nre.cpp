#include "dmap/nre.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <exception>
#include <functional>
#include <mutex>
#include <thread>

#include "dmap/errors.hpp"
#include "dmap/seeding.hpp"

namespace dmap {

namespace {

/// Runs job(0..count-1) on up to `threads` workers. Each job writes only its
/// own slot, so the outcome does not depend on scheduling.
void run_jobs(std::size_t count, int threads, const std::function<void(std::size_t)>& job) {
  const std::size_t workers = std::min<std::size_t>(count, static_cast<std::size_t>(std::max(threads, 1)));
  if (workers <= 1) {
    for (std::size_t i = 0; i < count; ++i) job(i);
    return;
  }
  std::atomic<std::size_t> next{0};
  std::exception_ptr failure;
  std::mutex failure_mutex;
  std::vector<std::thread> pool;
  for (std::size_t w = 0; w < workers; ++w) {
    pool.emplace_back([&] {
      for (std::size_t i = next++; i < count; i = next++) {
        try {
          job(i);
        } catch (...) {
          std::lock_guard lock(failure_mutex);
          if (!failure) failure = std::current_exception();
        }
      }
    });
  }
  for (auto& t : pool) t.join();
  if (failure) std::rethrow_exception(failure);
}

Eigen::MatrixXd decoder_inputs(const Embedding& embedding, const std::vector<Index>& components) {
  Eigen::MatrixXd inputs(embedding.coords.rows(), static_cast<Index>(components.size()));
  for (std::size_t j = 0; j < components.size(); ++j) {
    auto col = inputs.col(static_cast<Index>(j));
    col = embedding.coords.col(embedding.column_of(components[j]));
    col.array() -= col.mean();
    const double sd = std::sqrt(col.squaredNorm() / static_cast<double>(col.size()));
    if (sd > 0.0) col /= sd;
  }
  return inputs;
}

std::string describe(const std::vector<Index>& components) {
  std::string out = "{";
  for (std::size_t i = 0; i < components.size(); ++i) {
    if (i) out += ",";
    out += std::to_string(components[i]);
  }
  return out + "}";
}

}  // namespace

std::uint64_t component_set_seed(std::uint64_t base_seed, std::vector<Index> components) {
  std::sort(components.begin(), components.end());
  std::vector<std::int64_t> parts(components.begin(), components.end());
  return derive_seed(base_seed, parts);
}

TrainReport nre(const Embedding& embedding, const DataMatrix& data, const std::vector<Index>& components,
                const DecoderConfig& config) {
  if (embedding.coords.rows() != data.rows())
    throw ParameterError("embedding and data have different numbers of rows");
  std::vector<Index> sorted = components;
  std::sort(sorted.begin(), sorted.end());
  if (std::adjacent_find(sorted.begin(), sorted.end()) != sorted.end())
    throw ParameterError("component set " + describe(components) + " contains duplicates");

  const Eigen::MatrixXd inputs = decoder_inputs(embedding, components);
  Decoder decoder(inputs.cols(), data.cols(), config.hidden_layers, component_set_seed(config.seed, components));
  return decoder_train(decoder, inputs, data.values, config);
}

NreCurve nre_curve_consecutive(const Embedding& embedding, const DataMatrix& data, Index k_max,
                               const DecoderConfig& config, bool include_baseline, int threads) {
  if (k_max < 0) throw ParameterError("k_max must be >= 0");
  std::vector<std::vector<Index>> sets;
  if (include_baseline) sets.emplace_back();
  for (Index k = 1; k <= k_max; ++k) sets.push_back(leading_components(k));
  for (Index k = 1; k <= k_max; ++k) embedding.column_of(k);

  NreCurve curve;
  curve.entries.resize(sets.size());
  run_jobs(sets.size(), threads, [&](std::size_t i) {
    TrainReport report = nre(embedding, data, sets[i], config);
    curve.entries[i] = NreEntry{sets[i], report.epsilon_k_normalized, std::move(report)};
  });
  return curve;
}

GreedyResult greedy_search(const Embedding& embedding, const DataMatrix& data, Index k_max, Index t_max,
                           const DecoderConfig& config, int threads) {
  if (t_max < 0 || t_max > k_max) throw ParameterError("greedy search needs 0 <= T_max <= k_max");
  for (Index k = 1; k <= k_max; ++k) embedding.column_of(k);

  GreedyResult result;
  std::vector<bool> used(static_cast<std::size_t>(k_max + 1), false);
  for (Index round = 0; round < t_max; ++round) {
    std::vector<GreedyCandidate> candidates;
    for (Index j = 1; j <= k_max; ++j) {
      if (used[static_cast<std::size_t>(j)]) continue;
      GreedyCandidate c;
      c.candidate = j;
      c.components = result.selected;
      c.components.push_back(j);
      candidates.push_back(std::move(c));
    }

    std::vector<TrainReport> reports(candidates.size());
    run_jobs(candidates.size(), threads, [&](std::size_t i) {
      try {
        reports[i] = nre(embedding, data, candidates[i].components, config);
        candidates[i].nre = reports[i].epsilon_k_normalized;
      } catch (const std::exception& e) {
        candidates[i].error = e.what();
      }
    });

    std::optional<std::size_t> best;
    for (std::size_t i = 0; i < candidates.size(); ++i) {
      if (!candidates[i].nre) {
        result.warnings.push_back("round " + std::to_string(round + 1) + ": candidate " +
                                  std::to_string(candidates[i].candidate) + " skipped: " + candidates[i].error);
        continue;
      }
      if (!best || *candidates[i].nre < *candidates[*best].nre) best = i;
    }
    if (!best)
      throw TrainingDivergenceError("greedy search round " + std::to_string(round + 1) + ": every candidate failed",
                                    -1);

    const GreedyCandidate& winner = candidates[*best];
    used[static_cast<std::size_t>(winner.candidate)] = true;
    result.selected.push_back(winner.candidate);
    result.curve.entries.push_back(NreEntry{winner.components, *winner.nre, reports[*best]});
    result.rounds.push_back(std::move(candidates));
  }
  return result;
}

TrainReport nre_for_pca(const PcaModel& model, const DataMatrix& data, Index k, const DecoderConfig& config) {
  if (k < 0 || k > model.k()) throw ParameterError("k must lie in [0, number of fitted components]");
  return nre(pca_transform(model, data), data, leading_components(k), config);
}

}  // namespace dmap
