// gapcomp: semantic compression of multimodal embeddings.
//
// Subcommands: gen-synth, train, metrics, compress, eval, sweep. Every
// command is config-file driven with flag overrides (flags win, then
// GAPCOMP_OUT, then the config file) and echoes its fully-resolved
// configuration to <out>/effective_config_<command>.json so any run can be
// reproduced byte-for-byte from its sidecar.

#include <CLI11.hpp>
#include <cstdint>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <string>
#include <vector>

#include "gapcomp/compression.hpp"
#include "gapcomp/config.hpp"
#include "gapcomp/embedding_store.hpp"
#include "gapcomp/errors.hpp"
#include "gapcomp/eval.hpp"
#include "gapcomp/geometry.hpp"
#include "gapcomp/seeding.hpp"
#include "gapcomp/sweep.hpp"
#include "gapcomp/synthetic.hpp"
#include "gapcomp/trainer.hpp"

namespace fs = std::filesystem;
using namespace gapcomp;

namespace {

std::string fmt(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.10g", v);
  return buf;
}

// 0.01 -> "0p01", for embedding a temperature in a filename.
std::string tau_tag(double t) {
  std::string s = fmt(t);
  for (auto& c : s) {
    if (c == '.') c = 'p';
  }
  return s;
}

void write_text_file(const fs::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw DataError("io error: cannot open " + path.string() + " for writing");
  out << text;
  if (!out) throw DataError("io error: failed writing " + path.string());
}

fs::path prepare_out_dir(const RunConfig& config) {
  fs::path out(config.out);
  fs::create_directories(out);
  return out;
}

void write_sidecar(const RunConfig& config, const fs::path& out, const std::string& command) {
  std::string name = "effective_config_" + command + ".json";
  for (auto& c : name) {
    if (c == '-') c = '_';
  }
  write_text_file(out / name, effective_config_json(config));
}

SyntheticData training_data(const RunConfig& config) {
  if (config.train.train_store.empty() != config.train.test_store.empty())
    throw ConfigError("parameter error: train.train_store and train.test_store "
                      "must be set together");
  if (config.train.train_store.empty()) return generate_synthetic(config.synth);

  EmbeddingStore train = load_store(config.train.train_store);
  EmbeddingStore test = load_store(config.train.test_store);
  if (train.dim != test.dim || train.modality_count() != test.modality_count())
    throw DataError("data error: train and test stores disagree on shape");
  SyntheticData data;
  data.train = store_to_split(train);
  data.test = store_to_split(test);
  data.input_dim = train.dim;
  data.modality_count = train.modality_count();
  return data;
}

int cmd_gen_synth(const RunConfig& config) {
  fs::path out = prepare_out_dir(config);
  write_sidecar(config, out, "gen-synth");

  SyntheticData data = generate_synthetic(config.synth);
  EmbeddingStore train = split_to_store(data.train, data.input_dim, data.modality_count);
  EmbeddingStore test = split_to_store(data.test, data.input_dim, data.modality_count);
  save_store(train, out / "train.gcmp");
  save_store(test, out / "test.gcmp");
  std::cout << "wrote " << (out / "train.gcmp").string() << " (" << train.records.size()
            << " records)\n";
  std::cout << "wrote " << (out / "test.gcmp").string() << " (" << test.records.size()
            << " records)\n";
  return 0;
}

int cmd_train(const RunConfig& config) {
  fs::path out = prepare_out_dir(config);
  write_sidecar(config, out, "train");

  SyntheticData data = training_data(config);
  for (double temperature : config.train.temperatures) {
    TrainConfig tc;
    tc.temperature = temperature;
    tc.learning_rate = config.train.learning_rate;
    tc.epochs = config.train.epochs;
    tc.batch_size = config.train.batch_size;
    tc.embed_dim = config.train.embed_dim;
    tc.seed = config.train.seed;

    TrainResult result = train(data, tc);
    std::string tag = "tau" + tau_tag(temperature);
    save_encoders(result.encoders, out / (tag + "_encoders.genc"));
    save_store(result.train_store, out / (tag + "_train.gcmp"));
    save_store(result.test_store, out / (tag + "_test.gcmp"));
    save_loss_history(result.loss_history, out / (tag + "_loss.csv"));
    std::cout << "temperature " << fmt(temperature) << ": final loss "
              << fmt(result.loss_history.empty() ? 0.0 : result.loss_history.back())
              << ", wrote " << (out / tag).string() << "_{encoders.genc,train.gcmp,"
              << "test.gcmp,loss.csv}\n";
  }
  return 0;
}

int cmd_metrics(const RunConfig& config) {
  if (config.metrics.store.empty())
    throw ConfigError("parameter error: metrics needs a store path");
  fs::path out = prepare_out_dir(config);
  write_sidecar(config, out, "metrics");

  EmbeddingStore store = load_store(config.metrics.store);
  std::string csv = "temperature,metric_name,value\n";
  const std::string tag = fmt(config.metrics.temperature);
  auto row = [&](const std::string& name, double value) {
    csv += tag + "," + name + "," + fmt(value) + "\n";
  };

  const int m = store.modality_count();
  for (int a = 0; a < m; ++a)
    for (int b = a + 1; b < m; ++b) {
      GapReport gap = modality_gap(store, static_cast<std::uint32_t>(a),
                                   static_cast<std::uint32_t>(b));
      row("gap_" + std::to_string(a) + "_" + std::to_string(b), gap.gap);
    }

  FisherReport fisher = fisher_ratio(store);
  row("fisher", fisher.fisher);
  row("trace_between", fisher.trace_between);
  row("trace_within", fisher.trace_within);

  VarianceSpectrum spectrum = explained_variance_spectrum(store);
  for (std::size_t i = 0; i < spectrum.eigenvalues.size(); ++i)
    row("eigenvalue_" + std::to_string(i), spectrum.eigenvalues[i]);
  for (std::size_t i = 0; i < spectrum.cumulative_fraction.size(); ++i)
    row("cumulative_variance_" + std::to_string(i), spectrum.cumulative_fraction[i]);

  write_text_file(out / "metrics.csv", csv);
  std::cout << "wrote " << (out / "metrics.csv").string() << "\n";
  return 0;
}

Granularity granularity_from_string(const std::string& s) {
  if (s == "per_concept") return Granularity::per_concept;
  if (s == "per_class") return Granularity::per_class;
  throw ConfigError("parameter error: unknown granularity '" + s + "'");
}

int cmd_compress(const RunConfig& config) {
  if (config.compress.store.empty())
    throw ConfigError("parameter error: compress needs a store path");
  if (!(config.compress.rate > 0.0) || config.compress.rate > 1.0)
    throw ConfigError("parameter error: rate must be in (0, 1], got " +
                      fmt(config.compress.rate));
  fs::path out = prepare_out_dir(config);
  write_sidecar(config, out, "compress");

  EmbeddingStore store = load_store(config.compress.store);
  Granularity granularity = granularity_from_string(config.compress.granularity);
  CentroidStore centroids = renormalize_centroids(concept_centroids(store, granularity));

  const int target = std::max(
      1, static_cast<int>(std::lround(config.compress.rate * centroids.dim)));
  SelectionMask mask = make_rfs_mask(centroids.dim, target, config.compress.seed);
  CentroidStore compressed = centroids;
  compressed.dim = mask.target_dim;
  for (auto& entry : compressed.entries)
    entry.vector = apply_mask(entry.vector, mask, /*renormalize=*/true);

  save_centroids(compressed, out / "centroids.gcmp");
  save_mask(mask, out / "mask.json");

  double ratio = compression_ratio(
      {static_cast<std::int64_t>(store.records.size()), store.dim},
      {static_cast<std::int64_t>(compressed.entries.size()), compressed.dim});
  std::cout << "wrote " << (out / "centroids.gcmp").string() << " ("
            << compressed.entries.size() << " centroids, dim " << compressed.dim << ")\n";
  std::cout << "wrote " << (out / "mask.json").string() << "\n";
  std::cout << "compression ratio " << fmt(ratio) << "\n";
  return 0;
}

int cmd_eval(const RunConfig& config) {
  if (config.eval.store.empty())
    throw ConfigError("parameter error: eval needs a store path");
  fs::path out = prepare_out_dir(config);
  write_sidecar(config, out, "eval");

  SweepStore cell;
  cell.temperature = config.eval.temperature;
  cell.seed = config.seed;
  cell.store = load_store(config.eval.store);

  SweepGrid grid;
  grid.rates = {config.eval.rate};
  grid.representations = {representation_from_string(config.eval.representation)};
  grid.split = config.split;
  grid.classifier = config.classifier;
  grid.jobs = 1;

  std::vector<EvalReport> reports = run_sweep({cell}, grid);
  write_text_file(out / "eval.csv", sweep_csv(reports));
  std::cout << "wrote " << (out / "eval.csv").string() << "\n";
  for (const auto& r : reports)
    if (r.status != "ok") std::cout << "cell failed: " << r.status << "\n";
  return 0;
}

int cmd_sweep(const RunConfig& config) {
  fs::path out = prepare_out_dir(config);
  write_sidecar(config, out, "sweep");

  SweepGrid grid;
  grid.rates = config.sweep.rates;
  grid.representations.clear();
  for (const auto& r : config.sweep.representations)
    grid.representations.push_back(representation_from_string(r));
  grid.tasks.clear();
  for (const auto& t : config.sweep.tasks) grid.tasks.push_back(task_from_string(t));
  grid.split = config.split;
  grid.classifier = config.classifier;
  grid.jobs = config.jobs;

  std::vector<SweepStore> stores;
  for (std::uint64_t seed : config.sweep.seeds) {
    SynthConfig sc = config.synth;
    sc.seed = seed;
    SyntheticData data = generate_synthetic(sc);
    for (double temperature : config.train.temperatures) {
      TrainConfig tc;
      tc.temperature = temperature;
      tc.learning_rate = config.train.learning_rate;
      tc.epochs = config.train.epochs;
      tc.batch_size = config.train.batch_size;
      tc.embed_dim = config.train.embed_dim;
      tc.seed = seed;
      TrainResult result = train(data, tc);
      stores.push_back({temperature, seed, std::move(result.test_store)});
      std::cout << "trained seed " << seed << " temperature " << fmt(temperature)
                << ", final loss "
                << fmt(result.loss_history.empty() ? 0.0 : result.loss_history.back()) << "\n";
    }
  }

  std::vector<EvalReport> reports = run_sweep(stores, grid);
  write_text_file(out / "sweep.csv", sweep_csv(reports));

  std::size_t failed = 0;
  for (const auto& r : reports)
    if (r.status != "ok") ++failed;
  std::cout << "wrote " << (out / "sweep.csv").string() << " (" << reports.size()
            << " rows, " << failed << " failed)\n";
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"semantic compression of multimodal embeddings via gap reduction"};
  app.require_subcommand(1);

  std::string config_path;
  std::string out_flag;
  std::uint64_t seed_flag = 0;
  int jobs_flag = 1;
  auto* opt_config =
      app.add_option("--config", config_path, "JSON config file")->check(CLI::ExistingFile);
  auto* opt_seed = app.add_option("--seed", seed_flag, "global seed override");
  auto* opt_jobs = app.add_option("--jobs", jobs_flag, "parallel sweep cells");
  auto* opt_out = app.add_option("--out", out_flag, "output directory (or GAPCOMP_OUT)");

  auto* sub_gen = app.add_subcommand("gen-synth", "generate a paired synthetic corpus");
  auto* sub_train = app.add_subcommand("train", "train encoders over the temperature list");
  std::vector<double> temps_flag;
  auto* opt_temps = sub_train->add_option("--temperature", temps_flag,
                                          "temperature(s), overrides the config list");

  auto* sub_metrics = app.add_subcommand("metrics", "geometry metrics of a store");
  std::string metrics_store;
  double metrics_temp = 0.0;
  auto* opt_mstore = sub_metrics->add_option("store", metrics_store, "embedding store");
  auto* opt_mtemp =
      sub_metrics->add_option("--temperature", metrics_temp, "tag for the CSV rows");

  auto* sub_compress = app.add_subcommand("compress", "centroid + random-feature compression");
  std::string compress_store, compress_gran;
  double compress_rate = 1.0;
  auto* opt_cstore = sub_compress->add_option("store", compress_store, "embedding store");
  auto* opt_cgran = sub_compress->add_option("--granularity", compress_gran,
                                             "per_concept or per_class");
  auto* opt_crate = sub_compress->add_option("--rate", compress_rate, "kept fraction (0, 1]");

  auto* sub_eval = app.add_subcommand("eval", "evaluate one store end to end");
  std::string eval_store, eval_repr;
  double eval_rate = 1.0, eval_temp = 0.0;
  auto* opt_estore = sub_eval->add_option("store", eval_store, "embedding store");
  auto* opt_erepr = sub_eval->add_option("--representation", eval_repr,
                                         "centroid, concat or single_modality");
  auto* opt_erate = sub_eval->add_option("--rate", eval_rate, "kept fraction");
  auto* opt_etemp = sub_eval->add_option("--temperature", eval_temp, "tag for the CSV row");

  auto* sub_sweep = app.add_subcommand("sweep", "full temperature x compression grid");

  for (auto* sub : {sub_gen, sub_train, sub_metrics, sub_compress, sub_eval, sub_sweep})
    sub->fallthrough();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    int code = app.exit(e);
    return code == 0 ? 0 : 1;
  }

  try {
    RunConfig config;
    if (opt_config->count()) config = load_config(config_path);
    if (const char* env_out = std::getenv("GAPCOMP_OUT"); env_out && *env_out)
      config.out = env_out;
    if (opt_out->count()) config.out = out_flag;
    if (opt_jobs->count()) config.jobs = jobs_flag;
    if (opt_seed->count()) {
      config.seed = seed_flag;
      config.synth.seed = seed_flag;
      config.train.seed = seed_flag;
      config.compress.seed = seed_flag;
    }

    if (sub_train->parsed() && opt_temps->count()) config.train.temperatures = temps_flag;
    if (sub_metrics->parsed()) {
      if (opt_mstore->count()) config.metrics.store = metrics_store;
      if (opt_mtemp->count()) config.metrics.temperature = metrics_temp;
    }
    if (sub_compress->parsed()) {
      if (opt_cstore->count()) config.compress.store = compress_store;
      if (opt_cgran->count()) config.compress.granularity = compress_gran;
      if (opt_crate->count()) config.compress.rate = compress_rate;
    }
    if (sub_eval->parsed()) {
      if (opt_estore->count()) config.eval.store = eval_store;
      if (opt_erepr->count()) config.eval.representation = eval_repr;
      if (opt_erate->count()) config.eval.rate = eval_rate;
      if (opt_etemp->count()) config.eval.temperature = eval_temp;
    }

    if (sub_gen->parsed()) return cmd_gen_synth(config);
    if (sub_train->parsed()) return cmd_train(config);
    if (sub_metrics->parsed()) return cmd_metrics(config);
    if (sub_compress->parsed()) return cmd_compress(config);
    if (sub_eval->parsed()) return cmd_eval(config);
    if (sub_sweep->parsed()) return cmd_sweep(config);
    throw ConfigError("parameter error: no subcommand given");
  } catch (const ConfigError& e) {
    std::cerr << "gapcomp: " << e.what() << "\n";
    return 1;
  } catch (const DataError& e) {
    std::cerr << "gapcomp: " << e.what() << "\n";
    return 2;
  } catch (const NumericError& e) {
    std::cerr << "gapcomp: " << e.what() << "\n";
    return 3;
  } catch (const fs::filesystem_error& e) {
    std::cerr << "gapcomp: io error: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "gapcomp: error: " << e.what() << "\n";
    return 1;
  }
}
