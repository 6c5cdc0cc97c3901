#include "dmap/experiment_config.hpp"

#include <fstream>
#include <set>

#include "dmap/csv.hpp"
#include "dmap/errors.hpp"
#include "dmap/seeding.hpp"

namespace dmap {

using nlohmann::json;

namespace {

/// Reads keys out of one JSON object, remembering which were consumed so
/// leftovers (typos) can be reported.
class ObjectReader {
 public:
  ObjectReader(const json& obj, std::string path) : obj_(obj), path_(std::move(path)) {
    if (!obj_.is_object()) throw ParameterError("config: '" + path_ + "' must be an object");
  }

  bool has(const std::string& key) {
    seen_.insert(key);
    return obj_.contains(key) && !obj_.at(key).is_null();
  }

  template <class T>
  void read(const std::string& key, T& out) {
    if (!has(key)) return;
    try {
      out = obj_.at(key).get<T>();
    } catch (const json::exception& e) {
      throw ParameterError("config: bad value for '" + where(key) + "': " + e.what());
    }
  }

  const json& at(const std::string& key) {
    seen_.insert(key);
    return obj_.at(key);
  }

  std::string where(const std::string& key) const { return path_.empty() ? key : path_ + "." + key; }

  void finish() const {
    for (const auto& [key, value] : obj_.items())
      if (!seen_.count(key)) throw ParameterError("config: unknown key '" + where(key) + "'");
  }

 private:
  const json& obj_;
  std::string path_;
  std::set<std::string> seen_;
};

TransformStep read_transform(const json& j, std::size_t position, std::uint64_t base_seed) {
  ObjectReader r(j, "dataset.transforms[" + std::to_string(position) + "]");
  TransformStep step;
  r.read("op", step.op);
  r.read("column", step.column);
  r.read("factor", step.factor);
  r.read("copies", step.copies);
  r.read("noise_sigma", step.noise_sigma);
  r.read("levels", step.levels);
  std::uint64_t seed = derive_seed(base_seed, {static_cast<std::int64_t>(position)});
  r.read("seed", seed);
  step.seed = seed;
  r.finish();
  static const std::set<std::string> ops{"standardize", "minmax", "scale_column", "duplicate_column",
                                         "discretize_column"};
  if (!ops.count(step.op)) throw ParameterError("config: unknown transform op '" + step.op + "'");
  return step;
}

json transform_to_json(const TransformStep& step) {
  json j{{"op", step.op}};
  if (step.op == "scale_column") {
    j["column"] = step.column;
    j["factor"] = step.factor;
  } else if (step.op == "duplicate_column") {
    j["column"] = step.column;
    j["copies"] = step.copies;
    j["noise_sigma"] = step.noise_sigma;
    j["seed"] = step.seed.value_or(0);
  } else if (step.op == "discretize_column") {
    j["column"] = step.column;
    j["levels"] = step.levels;
  }
  return j;
}

void read_decoder(const json& j, DecoderConfig& d) {
  ObjectReader r(j, "decoder");
  r.read("hidden_layers", d.hidden_layers);
  r.read("epochs", d.epochs);
  r.read("batch_size", d.batch_size);
  r.read("l2_beta", d.l2_beta);
  r.read("initial_lr", d.initial_lr);
  r.read("train_fraction", d.train_fraction);
  r.read("seed", d.seed);
  if (r.has("schedule")) {
    ObjectReader s(r.at("schedule"), "decoder.schedule");
    std::string type = "reduce_on_plateau";
    s.read("type", type);
    if (type == "reduce_on_plateau") {
      PlateauSchedule p;
      s.read("threshold", p.threshold);
      s.read("factor", p.factor);
      s.read("patience", p.patience);
      d.schedule = p;
    } else if (type == "step") {
      StepSchedule p;
      s.read("step_size", p.step_size);
      s.read("factor", p.factor);
      d.schedule = p;
    } else {
      throw ParameterError("config: unknown schedule type '" + type + "'");
    }
    s.finish();
  }
  r.finish();
  d.validate();
}

json decoder_to_json(const DecoderConfig& d) {
  json schedule;
  if (const auto* p = std::get_if<PlateauSchedule>(&d.schedule))
    schedule = {{"type", "reduce_on_plateau"}, {"threshold", p->threshold}, {"factor", p->factor},
                {"patience", p->patience}};
  else {
    const auto& s = std::get<StepSchedule>(d.schedule);
    schedule = {{"type", "step"}, {"step_size", s.step_size}, {"factor", s.factor}};
  }
  return {{"hidden_layers", d.hidden_layers}, {"epochs", d.epochs},         {"batch_size", d.batch_size},
          {"l2_beta", d.l2_beta},             {"initial_lr", d.initial_lr}, {"schedule", schedule},
          {"train_fraction", d.train_fraction}, {"seed", d.seed}};
}

}  // namespace

ExperimentConfig config_from_json(const json& j) {
  ExperimentConfig c;
  ObjectReader top(j, "");
  top.read("seed", c.seed);
  c.dataset.swiss_roll.seed = c.seed;
  c.dataset.curve_seed = c.seed;
  c.decoder.seed = c.seed;
  c.embedding.solver_seed = c.seed;
  c.distance_check.seed = c.seed;

  if (top.has("dataset")) {
    ObjectReader r(top.at("dataset"), "dataset");
    r.read("generator", c.dataset.generator);
    if (r.has("swiss_roll")) {
      ObjectReader s(r.at("swiss_roll"), "dataset.swiss_roll");
      s.read("n", c.dataset.swiss_roll.n);
      s.read("noise_sigma", c.dataset.swiss_roll.noise_sigma);
      s.read("width", c.dataset.swiss_roll.width);
      s.read("seed", c.dataset.swiss_roll.seed);
      s.finish();
    }
    if (r.has("curve")) {
      ObjectReader s(r.at("curve"), "dataset.curve");
      std::string kind{to_string(c.dataset.curve_kind)};
      s.read("kind", kind);
      c.dataset.curve_kind = parse_curve_kind(kind);
      s.read("n", c.dataset.curve_n);
      s.read("noise_sigma", c.dataset.curve_noise_sigma);
      s.read("seed", c.dataset.curve_seed);
      s.finish();
    }
    if (r.has("csv")) {
      ObjectReader s(r.at("csv"), "dataset.csv");
      s.read("path", c.dataset.csv_path);
      s.finish();
    }
    if (r.has("transforms")) {
      const json& list = r.at("transforms");
      if (!list.is_array()) throw ParameterError("config: 'dataset.transforms' must be a list");
      for (std::size_t i = 0; i < list.size(); ++i) c.dataset.transforms.push_back(read_transform(list[i], i, c.seed));
    }
    r.finish();
    if (c.dataset.generator != "swiss_roll" && c.dataset.generator != "curve" && c.dataset.generator != "csv")
      throw ParameterError("config: unknown dataset generator '" + c.dataset.generator + "'");
  }

  if (top.has("kernel")) {
    ObjectReader r(top.at("kernel"), "kernel");
    r.read("epsilon", c.kernel.epsilon);
    r.read("alpha", c.kernel.alpha);
    if (r.has("n_neighbors")) {
      const json& n = r.at("n_neighbors");
      if (n.is_string() && (n.get<std::string>() == "all" || n.get<std::string>() == "ALL"))
        c.kernel.n_neighbors.reset();
      else if (n.is_number_integer())
        c.kernel.n_neighbors = n.get<Index>();
      else
        throw ParameterError("config: 'kernel.n_neighbors' must be an integer or \"all\"");
    }
    r.finish();
  }

  if (top.has("embedding")) {
    ObjectReader r(top.at("embedding"), "embedding");
    r.read("t", c.embedding.t);
    r.read("k_max", c.embedding.k_max);
    r.read("components", c.embedding.components);
    r.read("solver", c.embedding.solver);
    r.read("solver_seed", c.embedding.solver_seed);
    r.finish();
    if (c.embedding.t < 0) throw ParameterError("config: 'embedding.t' must be >= 0");
    if (c.embedding.k_max < 1) throw ParameterError("config: 'embedding.k_max' must be >= 1");
    if (c.embedding.solver != "auto" && c.embedding.solver != "dense" && c.embedding.solver != "lanczos")
      throw ParameterError("config: 'embedding.solver' must be auto, dense or lanczos");
  }

  if (top.has("pca")) {
    ObjectReader r(top.at("pca"), "pca");
    if (r.has("k")) {
      Index k = 0;
      r.read("k", k);
      c.pca_k = k;
    }
    r.finish();
  }

  if (top.has("decoder")) read_decoder(top.at("decoder"), c.decoder);

  if (top.has("nre")) {
    ObjectReader r(top.at("nre"), "nre");
    r.read("source", c.nre.source);
    r.read("k_max", c.nre.k_max);
    r.read("t_max", c.nre.t_max);
    r.read("include_baseline", c.nre.include_baseline);
    r.finish();
    if (c.nre.source != "diffusion" && c.nre.source != "pca")
      throw ParameterError("config: 'nre.source' must be diffusion or pca");
  }

  if (top.has("distance_check")) {
    ObjectReader r(top.at("distance_check"), "distance_check");
    r.read("sample_pairs", c.distance_check.sample_pairs);
    r.read("t", c.distance_check.t_values);
    if (r.has("k")) {
      Index k = 0;
      r.read("k", k);
      c.distance_check.k = k;
    }
    r.read("seed", c.distance_check.seed);
    r.finish();
  }

  if (top.has("spectrum")) {
    ObjectReader r(top.at("spectrum"), "spectrum");
    r.read("t", c.spectrum.t_values);
    r.read("delta", c.spectrum.delta);
    r.finish();
  }

  top.read("allow_disconnected", c.allow_disconnected);
  top.read("dump_matrices", c.dump_matrices);
  if (c.dump_matrices != "none" && c.dump_matrices != "csv" && c.dump_matrices != "binary")
    throw ParameterError("config: 'dump_matrices' must be none, csv or binary");
  top.finish();
  return c;
}

json config_to_json(const ExperimentConfig& c) {
  json dataset{{"generator", c.dataset.generator}};
  if (c.dataset.generator == "swiss_roll")
    dataset["swiss_roll"] = {{"n", c.dataset.swiss_roll.n},
                             {"noise_sigma", c.dataset.swiss_roll.noise_sigma},
                             {"width", c.dataset.swiss_roll.width},
                             {"seed", c.dataset.swiss_roll.seed}};
  else if (c.dataset.generator == "curve")
    dataset["curve"] = {{"kind", std::string(to_string(c.dataset.curve_kind))},
                        {"n", c.dataset.curve_n},
                        {"noise_sigma", c.dataset.curve_noise_sigma},
                        {"seed", c.dataset.curve_seed}};
  else
    dataset["csv"] = {{"path", c.dataset.csv_path}};
  dataset["transforms"] = json::array();
  for (const auto& step : c.dataset.transforms) dataset["transforms"].push_back(transform_to_json(step));

  json kernel{{"epsilon", c.kernel.epsilon}, {"alpha", c.kernel.alpha}};
  kernel["n_neighbors"] = c.kernel.n_neighbors ? json(*c.kernel.n_neighbors) : json("all");

  json distance{{"sample_pairs", c.distance_check.sample_pairs},
                {"t", c.distance_check.t_values},
                {"seed", c.distance_check.seed}};
  distance["k"] = c.distance_check.k ? json(*c.distance_check.k) : json(nullptr);

  json out{{"seed", c.seed},
           {"dataset", dataset},
           {"kernel", kernel},
           {"embedding",
            {{"t", c.embedding.t},
             {"k_max", c.embedding.k_max},
             {"components", c.embedding.components},
             {"solver", c.embedding.solver},
             {"solver_seed", c.embedding.solver_seed}}},
           {"pca", {{"k", c.pca_k ? json(*c.pca_k) : json(nullptr)}}},
           {"decoder", decoder_to_json(c.decoder)},
           {"nre",
            {{"source", c.nre.source},
             {"k_max", c.nre.k_max},
             {"t_max", c.nre.t_max},
             {"include_baseline", c.nre.include_baseline}}},
           {"distance_check", distance},
           {"spectrum", {{"t", c.spectrum.t_values}, {"delta", c.spectrum.delta}}},
           {"allow_disconnected", c.allow_disconnected},
           {"dump_matrices", c.dump_matrices}};
  return out;
}

ExperimentConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open config file '" + path + "'");
  json doc;
  try {
    doc = json::parse(in);
  } catch (const json::parse_error& e) {
    throw ParameterError("config '" + path + "' is not valid JSON: " + e.what());
  }
  return config_from_json(doc);
}

void apply_override(json& doc, const std::string& assignment) {
  const auto eq = assignment.find('=');
  if (eq == std::string::npos || eq == 0) throw ParameterError("override '" + assignment + "' must look like key.path=value");
  const std::string key = assignment.substr(0, eq);
  const std::string text = assignment.substr(eq + 1);

  json value;
  try {
    value = json::parse(text);
  } catch (const json::parse_error&) {
    value = text;
  }

  json* node = &doc;
  std::size_t start = 0;
  while (true) {
    const auto dot = key.find('.', start);
    const std::string part = key.substr(start, dot == std::string::npos ? std::string::npos : dot - start);
    if (part.empty()) throw ParameterError("override '" + assignment + "' has an empty path segment");
    if (!node->is_object()) {
      if (!node->is_null()) throw ParameterError("override '" + assignment + "' descends into a non-object");
      *node = json::object();
    }
    if (dot == std::string::npos) {
      (*node)[part] = value;
      return;
    }
    node = &(*node)[part];
    start = dot + 1;
  }
}

DataMatrix apply_transforms(DataMatrix data, const std::vector<TransformStep>& steps, std::uint64_t base_seed) {
  for (std::size_t i = 0; i < steps.size(); ++i) {
    const TransformStep& s = steps[i];
    if (s.op == "standardize")
      data = standardize(data);
    else if (s.op == "minmax")
      data = minmax_normalize(data);
    else if (s.op == "scale_column")
      data = scale_column(data, s.column, s.factor);
    else if (s.op == "duplicate_column")
      data = duplicate_column(data, s.column, s.copies, s.noise_sigma,
                              s.seed.value_or(derive_seed(base_seed, {static_cast<std::int64_t>(i)})));
    else if (s.op == "discretize_column")
      data = discretize_column(data, s.column, s.levels);
    else
      throw ParameterError("unknown transform op '" + s.op + "'");
  }
  return data;
}

DataMatrix build_dataset(const DatasetSpec& spec) {
  DataMatrix data;
  if (spec.generator == "swiss_roll")
    data = make_swiss_roll(spec.swiss_roll);
  else if (spec.generator == "curve")
    data = make_curve_1d(spec.curve_kind, spec.curve_n, spec.curve_noise_sigma, spec.curve_seed);
  else if (spec.generator == "csv")
    data = read_data_matrix_csv(spec.csv_path);
  else
    throw ParameterError("unknown dataset generator '" + spec.generator + "'");
  return apply_transforms(std::move(data), spec.transforms, 0);
}

}  // namespace dmap
