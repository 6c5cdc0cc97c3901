#include "dmap/commands.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <random>

#include <CLI11.hpp>

#include "dmap/csv.hpp"
#include "dmap/errors.hpp"
#include "dmap/nre.hpp"
#include "dmap/pca.hpp"
#include "dmap/stats.hpp"

namespace dmap {

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

void prepare_out_dir(const RunOptions& run) {
  if (run.out_dir.empty()) throw ParameterError("an output directory is required");
  std::error_code ec;
  fs::create_directories(run.out_dir, ec);
  if (ec || !fs::is_directory(run.out_dir))
    throw IoError("cannot create output directory '" + run.out_dir.string() + "'");
}

void write_json(const json& doc, const fs::path& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot write '" + path.string() + "'");
  out << doc.dump(2) << '\n';
  if (!out) throw IoError("write failed for '" + path.string() + "'");
}

void write_echo(const ExperimentConfig& config, const RunOptions& run) {
  prepare_out_dir(run);
  write_json(config_to_json(config), run.out_dir / "config.echo.json");
}

std::string join_components(const std::vector<Index>& components) {
  std::string out;
  for (std::size_t i = 0; i < components.size(); ++i) {
    if (i) out += ';';
    out += std::to_string(components[i]);
  }
  return out;
}

/// Coordinates under `prefix<index>` headers followed by intrinsic columns.
void write_embedding_csv(const Embedding& embedding, const DataMatrix& data, const std::string& prefix,
                         const fs::path& path) {
  CsvWriter csv(path);
  std::vector<std::string> header;
  for (Index c : embedding.component_indices) header.push_back(prefix + std::to_string(c));
  if (data.intrinsic)
    for (const auto& name : data.intrinsic_names) header.push_back("intrinsic_" + name);
  csv.write_row(header);

  const Index q = data.intrinsic ? data.intrinsic->cols() : 0;
  std::vector<double> row(static_cast<std::size_t>(embedding.coords.cols() + q));
  for (Index i = 0; i < embedding.coords.rows(); ++i) {
    for (Index j = 0; j < embedding.coords.cols(); ++j) row[static_cast<std::size_t>(j)] = embedding.coords(i, j);
    for (Index j = 0; j < q; ++j) row[static_cast<std::size_t>(embedding.coords.cols() + j)] = (*data.intrinsic)(i, j);
    csv.write_row(row);
  }
}

void write_spectrum_csv(const SpectrumTable& table, const fs::path& path) {
  CsvWriter csv(path);
  std::vector<std::string> header{"index", "eigenvalue"};
  for (int t : table.t_values) header.push_back("lambda_t" + std::to_string(t));
  csv.write_row(header);
  for (std::size_t r = 0; r < table.index.size(); ++r) {
    std::vector<std::string> row{std::to_string(table.index[r]), format_double(table.eigenvalue[r])};
    for (double v : table.powered[r]) row.push_back(format_double(v));
    csv.write_row(row);
  }
}

void dump_matrix(const KernelMatrix& m, const std::string& name, const std::string& format, const fs::path& dir) {
  if (format == "csv") {
    CsvWriter csv(dir / (name + ".csv"));
    csv.write_row(std::vector<std::string>{"row", "col", "value"});
    m.for_each_entry([&](Index i, Index j, double v) {
      if (v != 0.0) csv.write_row(std::vector<std::string>{std::to_string(i), std::to_string(j), format_double(v)});
    });
    return;
  }
  // Binary: int64 n, int64 count, then count records of (int64 row, int64 col, float64 value).
  const fs::path path = dir / (name + ".bin");
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot write '" + path.string() + "'");
  std::int64_t count = 0;
  m.for_each_entry([&](Index, Index, double v) { count += v != 0.0; });
  const std::int64_t n = m.size();
  out.write(reinterpret_cast<const char*>(&n), sizeof n);
  out.write(reinterpret_cast<const char*>(&count), sizeof count);
  m.for_each_entry([&](Index i, Index j, double v) {
    if (v == 0.0) return;
    const std::int64_t r = i, c = j;
    out.write(reinterpret_cast<const char*>(&r), sizeof r);
    out.write(reinterpret_cast<const char*>(&c), sizeof c);
    out.write(reinterpret_cast<const char*>(&v), sizeof v);
  });
  if (!out) throw IoError("write failed for '" + path.string() + "'");
}

std::vector<Index> embedding_components(const ExperimentConfig& config) {
  return config.embedding.components.empty() ? leading_components(config.embedding.k_max)
                                             : config.embedding.components;
}

json eigenvalue_list(const DiffusionModel& model) {
  json list = json::array();
  for (Index i = 0; i < model.size(); ++i) list.push_back(model.eigenvalues(i));
  return list;
}

json report_to_json(const TrainReport& r) {
  json history = json::array();
  for (const auto& [train, test] : r.loss_history) history.push_back({train, test});
  return {{"final_train_loss", r.final_train_loss},
          {"final_test_loss", r.final_test_loss},
          {"epsilon_0", r.epsilon_0},
          {"nre_test", r.epsilon_k_normalized},
          {"nre_train", r.epsilon_k_train_normalized},
          {"train_size", r.train_size},
          {"test_size", r.test_size},
          {"loss_history", history},
          {"lr_history", r.lr_history}};
}

json curve_to_json(const NreCurve& curve) {
  json entries = json::array();
  for (const auto& e : curve.entries)
    entries.push_back({{"components", e.components}, {"nre", e.nre}, {"report", report_to_json(e.report)}});
  return entries;
}

/// Embedding that feeds the decoder for nre/search: diffusion components
/// 1..k_max at the configured t, or the leading principal components.
Embedding nre_embedding(const ExperimentConfig& config, const DataMatrix& data, Index k_max) {
  if (config.nre.source == "pca") {
    if (k_max > data.cols()) throw ParameterError("nre.k_max exceeds the number of data columns for PCA input");
    return pca_transform(pca_fit(data, data.cols()), data);
  }
  const FittedModel fitted = fit_diffusion(config, data, k_max);
  return embed(fitted.model, config.embedding.t, leading_components(k_max));
}

}  // namespace

FittedModel fit_diffusion(const ExperimentConfig& config, const DataMatrix& data, Index k_max) {
  if (k_max < 1 || k_max > data.rows() - 1)
    throw ParameterError("requested " + std::to_string(k_max) + " components but at most n-1 = " +
                         std::to_string(data.rows() - 1) + " exist");
  DecomposeOptions options;
  options.seed = config.embedding.solver_seed;
  if (config.embedding.solver == "dense")
    options.solver = EigenSolverKind::dense;
  else if (config.embedding.solver == "lanczos")
    options.solver = EigenSolverKind::lanczos;

  FittedModel fitted;
  fitted.graph = build_graph(data, config.kernel, config.allow_disconnected);
  if (fitted.graph.components > 1) {
    std::cerr << "warning: graph has " << fitted.graph.components
              << " connected components; decomposing each separately\n";
    fitted.model = decompose_by_component(fitted.graph, k_max, options);
  } else {
    fitted.model = decompose(fitted.graph.Ms, fitted.graph.d_tilde, k_max, options);
  }
  fitted.model.params = config.kernel;
  return fitted;
}

void cmd_generate(const ExperimentConfig& config, const RunOptions& run) {
  write_echo(config, run);
  write_data_matrix_csv(build_dataset(config.dataset), run.out_dir / "dataset.csv");
}

void cmd_embed(const ExperimentConfig& config, const RunOptions& run) {
  write_echo(config, run);
  const DataMatrix data = build_dataset(config.dataset);
  const std::vector<Index> components = embedding_components(config);
  const Index k_max = std::max(config.embedding.k_max, *std::max_element(components.begin(), components.end()));
  const FittedModel fitted = fit_diffusion(config, data, k_max);
  const Embedding embedding = embed(fitted.model, config.embedding.t, components);

  write_embedding_csv(embedding, data, "psi_", run.out_dir / "embedding.csv");
  write_spectrum_csv(export_spectrum(fitted.model, config.spectrum.t_values), run.out_dir / "spectrum.csv");

  // Similarity to PCA: the largest |corr| between psi_1 and any principal component.
  const PcaModel pca = pca_fit(data, data.cols());
  const Eigen::MatrixXd scores = pca_transform(pca, data.values);
  json per_pc = json::array();
  double best = 0.0;
  for (Index j = 0; j < scores.cols(); ++j) {
    const double r = std::abs(stats::pearson(fitted.model.psi.col(1), scores.col(j)));
    per_pc.push_back(std::isfinite(r) ? json(r) : json(nullptr));
    if (std::isfinite(r)) best = std::max(best, r);
  }

  const std::vector<Index> negative = fitted.model.negative_components();
  json summary{{"n", data.rows()},
               {"p", data.cols()},
               {"t", config.embedding.t},
               {"components", components},
               {"retained_components", fitted.model.k_max()},
               {"eigenvalues", eigenvalue_list(fitted.model)},
               {"max_residual", fitted.model.residuals.size() ? fitted.model.residuals.maxCoeff() : 0.0},
               {"connectivity",
                {{"components", fitted.graph.components}, {"connected", fitted.graph.components == 1}}},
               {"kernel_storage", fitted.graph.K.is_sparse() ? "sparse" : "dense"},
               {"kernel_nonzeros", fitted.graph.K.nonzeros()},
               {"negative_eigenvalue_components", negative},
               {"pca_similarity", best},
               {"pca_similarity_per_component", per_pc}};
  write_json(summary, run.out_dir / "summary.json");

  if (config.dump_matrices != "none") {
    dump_matrix(fitted.graph.K, "K", config.dump_matrices, run.out_dir);
    dump_matrix(fitted.graph.M, "M", config.dump_matrices, run.out_dir);
    dump_matrix(fitted.graph.Ms, "Ms", config.dump_matrices, run.out_dir);
  }
}

void cmd_pca(const ExperimentConfig& config, const RunOptions& run) {
  write_echo(config, run);
  const DataMatrix data = build_dataset(config.dataset);
  const PcaModel model = pca_fit(data, config.pca_k.value_or(data.cols()));
  write_embedding_csv(pca_transform(model, data), data, "pc_", run.out_dir / "pca_embedding.csv");

  json errors = json::array();
  for (Index k = 0; k <= data.cols(); ++k) errors.push_back(pca_reconstruction_error(model, k));
  json loadings = json::array();
  for (Index c = 0; c < model.k(); ++c) {
    json col = json::array();
    for (Index r = 0; r < model.components.rows(); ++r) col.push_back(model.components(r, c));
    loadings.push_back(col);
  }
  std::vector<double> mean(model.mean.data(), model.mean.data() + model.mean.size());
  std::vector<double> explained(model.explained_variance.data(),
                                model.explained_variance.data() + model.explained_variance.size());
  write_json({{"k", model.k()},
              {"mean", mean},
              {"explained_variance", explained},
              {"total_variance", model.total_variance},
              {"reconstruction_error", errors},
              {"components", loadings}},
             run.out_dir / "pca_summary.json");
}

void cmd_nre(const ExperimentConfig& config, const RunOptions& run) {
  write_echo(config, run);
  const DataMatrix data = build_dataset(config.dataset);
  const Embedding embedding = nre_embedding(config, data, config.nre.k_max);
  const NreCurve curve =
      nre_curve_consecutive(embedding, data, config.nre.k_max, config.decoder, config.nre.include_baseline, run.threads);

  CsvWriter csv(run.out_dir / "nre_curve.csv");
  csv.write_row(std::vector<std::string>{"set_size", "components", "nre"});
  for (const auto& e : curve.entries)
    csv.write_row(std::vector<std::string>{std::to_string(e.components.size()), join_components(e.components),
                                           format_double(e.nre)});
  write_json({{"config", config_to_json(config)}, {"source", config.nre.source}, {"entries", curve_to_json(curve)}},
             run.out_dir / "nre_report.json");
}

void cmd_search(const ExperimentConfig& config, const RunOptions& run) {
  write_echo(config, run);
  const DataMatrix data = build_dataset(config.dataset);
  const Embedding embedding = nre_embedding(config, data, config.nre.k_max);
  const GreedyResult result =
      greedy_search(embedding, data, config.nre.k_max, config.nre.t_max, config.decoder, run.threads);
  for (const auto& w : result.warnings) std::cerr << "warning: " << w << '\n';

  CsvWriter picks(run.out_dir / "search_result.csv");
  picks.write_row(std::vector<std::string>{"step", "component", "components", "nre"});
  for (std::size_t s = 0; s < result.selected.size(); ++s)
    picks.write_row(std::vector<std::string>{std::to_string(s + 1), std::to_string(result.selected[s]),
                                             join_components(result.curve.entries[s].components),
                                             format_double(result.curve.entries[s].nre)});

  CsvWriter rounds(run.out_dir / "search_rounds.csv");
  rounds.write_row(std::vector<std::string>{"round", "candidate", "components", "nre", "error"});
  json rounds_json = json::array();
  for (std::size_t r = 0; r < result.rounds.size(); ++r) {
    json table = json::array();
    for (const auto& c : result.rounds[r]) {
      rounds.write_row(std::vector<std::string>{std::to_string(r + 1), std::to_string(c.candidate),
                                                join_components(c.components), c.nre ? format_double(*c.nre) : "",
                                                c.error});
      table.push_back({{"candidate", c.candidate},
                       {"components", c.components},
                       {"nre", c.nre ? json(*c.nre) : json(nullptr)},
                       {"error", c.error}});
    }
    rounds_json.push_back(table);
  }
  write_json({{"config", config_to_json(config)},
              {"selected", result.selected},
              {"curve", curve_to_json(result.curve)},
              {"rounds", rounds_json},
              {"warnings", result.warnings}},
             run.out_dir / "search_report.json");
}

void cmd_distance_check(const ExperimentConfig& config, const RunOptions& run) {
  write_echo(config, run);
  const DataMatrix data = build_dataset(config.dataset);
  const Index n = data.rows();
  const FittedModel fitted = fit_diffusion(config, data, n - 1);
  const DiffusionModel& model = fitted.model;
  const Index k = config.distance_check.k.value_or(n - 1);
  if (k < 1 || k > n - 1) throw ParameterError("distance_check.k must lie in [1, n-1]");
  if (config.distance_check.sample_pairs < 1) throw ParameterError("distance_check.sample_pairs must be >= 1");
  for (int t : config.distance_check.t_values)
    if (t < 1) throw ParameterError("distance_check.t values must be >= 1");

  std::mt19937_64 rng(config.distance_check.seed);
  std::uniform_int_distribution<Index> pick(0, n - 1);
  std::vector<std::pair<Index, Index>> pairs;
  while (static_cast<Index>(pairs.size()) < config.distance_check.sample_pairs) {
    const Index i = pick(rng), j = pick(rng);
    if (i != j) pairs.emplace_back(i, j);
  }

  const Eigen::VectorXd phi0 = model.phi.col(0);
  json per_t = json::array();
  double overall_full = 0.0, overall_tail = 0.0;
  for (int t : config.distance_check.t_values) {
    double max_full = 0.0, max_tail = 0.0, max_truncated = 0.0;
    json rows = json::array();
    for (const auto& [i, j] : pairs) {
      const double oracle = diffusion_distance_sq(fitted.graph.M, t, i, j, phi0);
      const double full = embedding_distance_sq(model, t, i, j, n - 1);
      const double truncated = embedding_distance_sq(model, t, i, j, k);
      const double tail = full - truncated;
      const double rel_full = std::abs(oracle - full) / oracle;
      const double rel_truncated = (oracle - truncated) / oracle;
      // The truncation error should be exactly the dropped tail sum.
      const double rel_tail = std::abs((oracle - truncated) - tail) / oracle;
      max_full = std::max(max_full, rel_full);
      max_truncated = std::max(max_truncated, rel_truncated);
      max_tail = std::max(max_tail, rel_tail);
      rows.push_back({{"i", i}, {"j", j}, {"diffusion_distance_sq", oracle}, {"embedding_distance_sq_full", full},
                      {"embedding_distance_sq_truncated", truncated}, {"tail_sum", tail}});
    }
    overall_full = std::max(overall_full, max_full);
    overall_tail = std::max(overall_tail, max_tail);
    per_t.push_back({{"t", t},
                     {"max_relative_error_full", max_full},
                     {"max_relative_truncation_error", max_truncated},
                     {"max_relative_tail_mismatch", max_tail},
                     {"pairs", rows}});
  }

  const Index self = pairs.front().first;
  const double self_oracle = diffusion_distance_sq(fitted.graph.M, 1, self, self, phi0);
  const double self_embedded = embedding_distance_sq(model, 1, self, self, n - 1);
  write_json({{"n", n},
              {"k", k},
              {"components_total", n - 1},
              {"sample_pairs", pairs.size()},
              {"max_relative_error_full", overall_full},
              {"max_relative_tail_mismatch", overall_tail},
              {"self_pair", {{"index", self}, {"diffusion_distance_sq", self_oracle}, {"embedding_distance_sq", self_embedded}}},
              {"per_t", per_t}},
             run.out_dir / "distance_check.json");
}

void cmd_spectrum(const ExperimentConfig& config, const RunOptions& run) {
  write_echo(config, run);
  const DataMatrix data = build_dataset(config.dataset);
  const FittedModel fitted = fit_diffusion(config, data, config.embedding.k_max);
  write_spectrum_csv(export_spectrum(fitted.model, config.spectrum.t_values), run.out_dir / "spectrum.csv");
  json thresholds = json::array();
  for (int t : config.spectrum.t_values)
    thresholds.push_back({{"t", t}, {"count", spectrum_threshold(fitted.model, config.spectrum.delta, t)}});
  write_json({{"delta", config.spectrum.delta},
              {"retained_components", fitted.model.k_max()},
              {"eigenvalues", eigenvalue_list(fitted.model)},
              {"thresholds", thresholds}},
             run.out_dir / "spectrum_report.json");
}

int run_cli(int argc, char** argv) {
  CLI::App app{"Diffusion maps and neural reconstruction error experiments"};
  app.require_subcommand(1);

  std::string config_path, out_dir, dump;
  int threads = 1;
  std::vector<std::string> overrides;
  std::optional<std::uint64_t> seed;
  std::optional<double> epsilon, alpha;
  std::optional<std::string> neighbors;
  std::optional<int> t;
  std::optional<Index> k_max;
  bool allow_disconnected = false;

  app.add_option("-c,--config", config_path, "JSON experiment config (defaults apply when omitted)");
  app.add_option("-o,--out", out_dir, "Output directory")->required();
  app.add_option("--threads", threads, "Concurrent decoder trainings")->check(CLI::PositiveNumber);
  app.add_option("--set", overrides, "Config override, e.g. kernel.epsilon=5 (repeatable)");
  app.add_option("--seed", seed, "Top-level seed");
  app.add_option("--epsilon", epsilon, "Kernel width epsilon (kernel exp(-d^2/epsilon))");
  app.add_option("--n-neighbors", neighbors, "Neighbors kept per point, or 'all'");
  app.add_option("--alpha", alpha, "Anisotropic normalization exponent");
  app.add_option("--t", t, "Diffusion time");
  app.add_option("--k-max", k_max, "Number of diffusion components");
  app.add_flag("--allow-disconnected", allow_disconnected, "Decompose each connected component separately");
  app.add_option("--dump-matrices", dump, "Write K, M and Ms (none, csv or binary)");

  using Command = void (*)(const ExperimentConfig&, const RunOptions&);
  struct Entry {
    std::string name;
    std::string help;
    Command fn;
  };
  const std::vector<Entry> commands{
      {"generate", "Write the dataset after transforms", cmd_generate},
      {"embed", "Diffusion map embedding, spectrum and summary", cmd_embed},
      {"pca", "PCA embedding and reconstruction errors", cmd_pca},
      {"nre", "NRE curve over consecutive leading components", cmd_nre},
      {"search", "Greedy component search by NRE", cmd_search},
      {"distance-check", "Diffusion distance vs embedding distance", cmd_distance_check},
      {"spectrum", "Eigenvalue powers and threshold counts", cmd_spectrum}};
  std::vector<CLI::App*> subs;
  for (const auto& c : commands) subs.push_back(app.add_subcommand(c.name, c.help)->fallthrough());

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return 2;
  }

  try {
    json doc = json::object();
    if (!config_path.empty()) {
      std::ifstream in(config_path);
      if (!in) throw IoError("cannot open config file '" + config_path + "'");
      try {
        doc = json::parse(in);
      } catch (const json::parse_error& e) {
        throw ParameterError("config '" + config_path + "' is not valid JSON: " + e.what());
      }
    }
    if (seed) doc["seed"] = *seed;
    if (epsilon) doc["kernel"]["epsilon"] = *epsilon;
    if (alpha) doc["kernel"]["alpha"] = *alpha;
    if (neighbors) {
      if (*neighbors == "all" || *neighbors == "ALL")
        doc["kernel"]["n_neighbors"] = "all";
      else
        try {
          doc["kernel"]["n_neighbors"] = std::stoll(*neighbors);
        } catch (const std::exception&) {
          throw ParameterError("--n-neighbors expects an integer or 'all'");
        }
    }
    if (t) doc["embedding"]["t"] = *t;
    if (k_max) doc["embedding"]["k_max"] = *k_max;
    if (allow_disconnected) doc["allow_disconnected"] = true;
    if (!dump.empty()) doc["dump_matrices"] = dump;
    for (const auto& o : overrides) apply_override(doc, o);

    const ExperimentConfig config = config_from_json(doc);
    const RunOptions run{out_dir, threads};
    for (std::size_t i = 0; i < subs.size(); ++i)
      if (subs[i]->parsed()) commands[i].fn(config, run);
    return 0;
  } catch (const Error& e) {
    std::cerr << "error: " << e.what() << '\n';
    return e.exit_code();
  } catch (const fs::filesystem_error& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 5;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
}

}  // namespace dmap
