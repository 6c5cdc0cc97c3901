#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <algorithm>
#include <cmath>

#include "dmap/datasets.hpp"
#include "dmap/errors.hpp"
#include "dmap/graph.hpp"
#include "dmap/nre.hpp"
#include "dmap/pca.hpp"
#include "dmap/spectral.hpp"
#include "oracles.hpp"

using namespace dmap;

namespace {

DataMatrix anisotropic_gaussian(Index n, std::uint64_t seed) {
  Eigen::MatrixXd x = oracle::gaussian_matrix(n, 3, seed);
  x.col(0) *= 2.0;
  return make_data_matrix(x);
}

Embedding diffusion_embedding(const DataMatrix& data, double epsilon, double alpha, Index k) {
  KernelParams p;
  p.epsilon = epsilon;
  p.alpha = alpha;
  const GraphMatrices g = build_graph(data, p);
  return embed(decompose(g.Ms, g.d_tilde, k), 1, leading_components(k));
}

DecoderConfig small_config() {
  DecoderConfig c;
  c.hidden_layers = {30, 30};
  c.epochs = 60;
  c.train_fraction = 0.8;
  c.seed = 5;
  return c;
}

}  // namespace

TEST_CASE("component set seeds ignore order") {
  CHECK(component_set_seed(1, {1, 5}) == component_set_seed(1, {5, 1}));
  CHECK(component_set_seed(1, {1, 5}) != component_set_seed(1, {1, 4}));
  CHECK(component_set_seed(1, {1, 5}) != component_set_seed(2, {1, 5}));
  CHECK(component_set_seed(1, {}) != component_set_seed(1, {1}));
}

TEST_CASE("empty component set gives the baseline") {
  const DataMatrix data = anisotropic_gaussian(1500, 1);
  const PcaModel model = pca_fit(data, 3);
  const TrainReport r = nre(pca_transform(model, data), data, {}, DecoderConfig{});
  CHECK(r.epsilon_k_normalized == doctest::Approx(1.0).epsilon(0.02));
}

TEST_CASE("pca inputs reproduce the residual variance") {
  const DataMatrix data = anisotropic_gaussian(3000, 2);
  const PcaModel model = pca_fit(data, 3);
  const DecoderConfig config;
  CHECK(nre_for_pca(model, data, 0, config).epsilon_k_normalized == doctest::Approx(1.0).epsilon(0.02));
  CHECK(std::abs(nre_for_pca(model, data, 1, config).epsilon_k_normalized - 2.0 / 6.0) < 0.03);
  CHECK(nre_for_pca(model, data, 3, config).epsilon_k_normalized < 0.02);
  CHECK_THROWS_AS(nre_for_pca(model, data, 4, config), ParameterError);
}

TEST_CASE("first component parameterizes a line") {
  const DataMatrix line = make_curve_1d(CurveKind::line, 300, 0.0, 1);
  const Embedding e = diffusion_embedding(line, 0.01, 1.0, 3);
  const NreCurve curve = nre_curve_consecutive(e, line, 1, DecoderConfig{}, false);
  REQUIRE(curve.entries.size() == 1);
  CHECK(curve.entries[0].components == std::vector<Index>{1});
  CHECK(curve.entries[0].nre < 0.05);
}

TEST_CASE("consecutive curve structure and determinism") {
  const DataMatrix roll = make_swiss_roll({500, 0.2, 21.0, 4});
  const Embedding e = diffusion_embedding(roll, 5.0, 0.5, 4);
  const DecoderConfig c = small_config();
  const NreCurve serial = nre_curve_consecutive(e, roll, 4, c, true, 1);
  const NreCurve parallel = nre_curve_consecutive(e, roll, 4, c, true, 3);
  REQUIRE(serial.entries.size() == 5);
  for (std::size_t i = 0; i < serial.entries.size(); ++i) {
    CHECK(serial.entries[i].components.size() == i);
    CHECK(serial.entries[i].nre == parallel.entries[i].nre);
    CHECK(serial.entries[i].report.loss_history == parallel.entries[i].report.loss_history);
    CHECK(serial.entries[i].nre <= 1.1);
    CHECK(serial.entries[i].nre >= 0.0);
  }
  CHECK(serial.entries[2].nre == nre(e, roll, {1, 2}, c).epsilon_k_normalized);
  CHECK(serial.entries[0].nre == doctest::Approx(1.0).epsilon(0.05));
  CHECK_THROWS_AS(nre_curve_consecutive(e, roll, 5, c), ParameterError);
}

TEST_CASE("adding a component does not hurt beyond training noise") {
  const DataMatrix roll = make_swiss_roll({600, 0.2, 21.0, 6});
  const Embedding e = diffusion_embedding(roll, 5.0, 0.5, 6);
  DecoderConfig c = small_config();
  std::mt19937_64 rng(11);
  for (int trial = 0; trial < 20; ++trial) {
    std::vector<Index> pool{1, 2, 3, 4, 5, 6};
    std::shuffle(pool.begin(), pool.end(), rng);
    const auto size = static_cast<std::size_t>(1 + trial % 4);
    std::vector<Index> subset(pool.begin(), pool.begin() + static_cast<std::ptrdiff_t>(size));
    std::vector<Index> superset = subset;
    superset.push_back(pool[size]);
    const double small = nre(e, roll, subset, c).epsilon_k_normalized;
    const double big = nre(e, roll, superset, c).epsilon_k_normalized;
    CHECK(big <= small + 0.02);
  }
}

TEST_CASE("invalid component sets") {
  const DataMatrix roll = make_swiss_roll({100, 0.2, 21.0, 1});
  const Embedding e = diffusion_embedding(roll, 5.0, 0.5, 3);
  CHECK_THROWS_AS(nre(e, roll, {1, 1}, small_config()), ParameterError);
  CHECK_THROWS_AS(nre(e, roll, {4}, small_config()), ParameterError);
  const DataMatrix other = make_swiss_roll({50, 0.2, 21.0, 1});
  CHECK_THROWS_AS(nre(e, other, {1}, small_config()), ParameterError);
}

TEST_CASE("greedy search with no rounds") {
  const DataMatrix roll = make_swiss_roll({100, 0.2, 21.0, 1});
  const Embedding e = diffusion_embedding(roll, 5.0, 0.5, 3);
  const GreedyResult r = greedy_search(e, roll, 3, 0, small_config());
  CHECK(r.selected.empty());
  CHECK(r.curve.entries.empty());
  CHECK(r.rounds.empty());
  CHECK_THROWS_AS(greedy_search(e, roll, 3, 4, small_config()), ParameterError);
}

TEST_CASE("greedy pair matches the best pair found by brute force") {
  // Isotropic 2-D Gaussian placed in a random plane of R^5.
  const Eigen::MatrixXd z = oracle::gaussian_matrix(800, 2, 3);
  Eigen::HouseholderQR<Eigen::MatrixXd> qr(oracle::gaussian_matrix(5, 5, 4));
  const Eigen::MatrixXd basis = Eigen::MatrixXd(qr.householderQ()).leftCols(2);
  const DataMatrix data = make_data_matrix(z * basis.transpose());
  const Index k_max = 5;
  const Embedding e = diffusion_embedding(data, 2.0, 0.5, k_max);
  const DecoderConfig c = small_config();

  const GreedyResult greedy = greedy_search(e, data, k_max, 2, c, 2);
  REQUIRE(greedy.selected.size() == 2);
  CHECK(greedy.rounds[0].size() == 5);
  CHECK(greedy.rounds[1].size() == 4);
  CHECK(greedy.curve.entries[1].components == greedy.selected);
  CHECK(greedy.warnings.empty());

  double best = 1e9;
  for (Index a = 1; a <= k_max; ++a)
    for (Index b = a + 1; b <= k_max; ++b) best = std::min(best, nre(e, data, {a, b}, c).epsilon_k_normalized);
  CHECK(greedy.curve.entries[1].nre <= best + 0.02);

  // Each round keeps the argmin of its candidate table.
  for (std::size_t r = 0; r < greedy.rounds.size(); ++r) {
    double lowest = 1e9;
    for (const auto& cand : greedy.rounds[r]) lowest = std::min(lowest, *cand.nre);
    CHECK(greedy.curve.entries[r].nre == lowest);
  }
}

TEST_CASE("greedy search fails when every candidate fails") {
  const DataMatrix roll = make_swiss_roll({100, 0.2, 21.0, 1});
  const Embedding e = diffusion_embedding(roll, 5.0, 0.5, 3);
  DataMatrix huge = roll;
  huge.values *= 1e150;
  DecoderConfig c = small_config();
  c.initial_lr = 1e200;
  CHECK_THROWS_AS(greedy_search(e, huge, 3, 1, c), TrainingDivergenceError);
}
