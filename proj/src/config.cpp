#include "gapcomp/config.hpp"

#include <algorithm>
#include <fstream>
#include <json.hpp>
#include <sstream>

#include "gapcomp/errors.hpp"

namespace gapcomp {
namespace {

using nlohmann::json;

// Pulls `key` out of `section` if present, tracking consumption so leftover
// keys can be reported.
class Section {
 public:
  Section(json j, std::string name) : j_(std::move(j)), name_(std::move(name)) {
    if (!j_.is_object())
      throw ConfigError("parameter error: config section '" + name_ + "' must be an object");
  }

  template <typename T>
  void get(const char* key, T& out) {
    auto it = j_.find(key);
    if (it == j_.end()) return;
    try {
      out = it->get<T>();
    } catch (const json::exception&) {
      throw ConfigError("parameter error: bad value for config key '" + name_ + "." + key + "'");
    }
    seen_.push_back(key);
  }

  json subsection(const char* key) {
    auto it = j_.find(key);
    if (it == j_.end()) return json::object();
    seen_.push_back(key);
    return *it;
  }

  void finish() const {
    for (auto it = j_.begin(); it != j_.end(); ++it) {
      if (std::find(seen_.begin(), seen_.end(), it.key()) == seen_.end())
        throw ConfigError("parameter error: unknown config key '" +
                          (name_.empty() ? it.key() : name_ + "." + it.key()) + "'");
    }
  }

 private:
  json j_;
  std::string name_;
  std::vector<std::string> seen_;
};

}  // namespace

RunConfig parse_config(const std::string& json_text) {
  json root;
  try {
    root = json::parse(json_text);
  } catch (const json::exception& e) {
    throw ConfigError(std::string("parameter error: config is not valid JSON: ") + e.what());
  }

  RunConfig config;
  Section top(root, "");
  top.get("out", config.out);
  top.get("jobs", config.jobs);
  top.get("seed", config.seed);

  {
    Section s(top.subsection("synth"), "synth");
    s.get("num_concepts", config.synth.num_concepts);
    s.get("samples_per_concept", config.synth.samples_per_concept);
    s.get("latent_dim", config.synth.latent_dim);
    s.get("input_dim", config.synth.input_dim);
    s.get("modality_count", config.synth.modality_count);
    s.get("noise_std", config.synth.noise_std);
    s.get("seed", config.synth.seed);
    s.finish();
  }
  {
    Section s(top.subsection("train"), "train");
    s.get("temperatures", config.train.temperatures);
    s.get("learning_rate", config.train.learning_rate);
    s.get("epochs", config.train.epochs);
    s.get("batch_size", config.train.batch_size);
    s.get("embed_dim", config.train.embed_dim);
    s.get("seed", config.train.seed);
    s.get("train_store", config.train.train_store);
    s.get("test_store", config.train.test_store);
    s.finish();
  }
  {
    Section s(top.subsection("split"), "split");
    s.get("train_fraction", config.split.train_fraction);
    s.get("min_per_class", config.split.min_per_class);
    s.finish();
  }
  {
    Section s(top.subsection("classifier"), "classifier");
    s.get("learning_rate", config.classifier.learning_rate);
    s.get("epochs", config.classifier.epochs);
    s.get("l2", config.classifier.l2);
    s.get("multilabel_threshold", config.classifier.multilabel_threshold);
    s.finish();
  }
  {
    Section s(top.subsection("sweep"), "sweep");
    s.get("rates", config.sweep.rates);
    s.get("representations", config.sweep.representations);
    s.get("tasks", config.sweep.tasks);
    s.get("seeds", config.sweep.seeds);
    s.finish();
  }
  {
    Section s(top.subsection("metrics"), "metrics");
    s.get("store", config.metrics.store);
    s.get("temperature", config.metrics.temperature);
    s.finish();
  }
  {
    Section s(top.subsection("compress"), "compress");
    s.get("store", config.compress.store);
    s.get("granularity", config.compress.granularity);
    s.get("rate", config.compress.rate);
    s.get("seed", config.compress.seed);
    s.finish();
  }
  {
    Section s(top.subsection("eval"), "eval");
    s.get("store", config.eval.store);
    s.get("representation", config.eval.representation);
    s.get("rate", config.eval.rate);
    s.get("temperature", config.eval.temperature);
    s.finish();
  }
  top.finish();
  return config;
}

RunConfig load_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw DataError("io error: cannot open config file " + path.string());
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse_config(buf.str());
}

std::string effective_config_json(const RunConfig& c) {
  json root;
  root["out"] = c.out;
  root["jobs"] = c.jobs;
  root["seed"] = c.seed;
  root["synth"] = {{"num_concepts", c.synth.num_concepts},
                   {"samples_per_concept", c.synth.samples_per_concept},
                   {"latent_dim", c.synth.latent_dim},
                   {"input_dim", c.synth.input_dim},
                   {"modality_count", c.synth.modality_count},
                   {"noise_std", c.synth.noise_std},
                   {"seed", c.synth.seed}};
  root["train"] = {{"temperatures", c.train.temperatures},
                   {"learning_rate", c.train.learning_rate},
                   {"epochs", c.train.epochs},
                   {"batch_size", c.train.batch_size},
                   {"embed_dim", c.train.embed_dim},
                   {"seed", c.train.seed},
                   {"train_store", c.train.train_store},
                   {"test_store", c.train.test_store}};
  root["split"] = {{"train_fraction", c.split.train_fraction},
                   {"min_per_class", c.split.min_per_class}};
  root["classifier"] = {{"learning_rate", c.classifier.learning_rate},
                        {"epochs", c.classifier.epochs},
                        {"l2", c.classifier.l2},
                        {"multilabel_threshold", c.classifier.multilabel_threshold}};
  root["sweep"] = {{"rates", c.sweep.rates},
                   {"representations", c.sweep.representations},
                   {"tasks", c.sweep.tasks},
                   {"seeds", c.sweep.seeds}};
  root["metrics"] = {{"store", c.metrics.store}, {"temperature", c.metrics.temperature}};
  root["compress"] = {{"store", c.compress.store},
                      {"granularity", c.compress.granularity},
                      {"rate", c.compress.rate},
                      {"seed", c.compress.seed}};
  root["eval"] = {{"store", c.eval.store},
                  {"representation", c.eval.representation},
                  {"rate", c.eval.rate},
                  {"temperature", c.eval.temperature}};
  return root.dump(2) + "\n";
}

}  // namespace gapcomp
