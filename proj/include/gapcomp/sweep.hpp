#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "gapcomp/embedding_store.hpp"
#include "gapcomp/eval.hpp"

namespace gapcomp {

enum class Representation { centroid, concat, single_modality };
enum class EvalTask { single_label, multi_label };

std::string to_string(Representation r);
Representation representation_from_string(const std::string& s);
std::string to_string(EvalTask t);
EvalTask task_from_string(const std::string& s);

// One trained source store (the held-out split of a training run).
struct SweepStore {
  double temperature = 0.0;
  std::uint64_t seed = 0;
  EmbeddingStore store;
};

struct SweepGrid {
  std::vector<double> rates = {0.05, 0.1, 0.25, 0.5, 0.75, 1.0};
  std::vector<Representation> representations = {Representation::centroid,
                                                 Representation::concat};
  std::vector<EvalTask> tasks = {EvalTask::single_label, EvalTask::multi_label};
  SplitSpec split;
  ClassifierConfig classifier;
  int jobs = 1;
};

// One grid cell: downstream metrics plus the geometry of the source store.
struct EvalReport {
  double temperature = 0.0;
  Representation representation = Representation::centroid;
  double compression_rate = 1.0;
  std::uint64_t seed = 0;
  std::optional<double> top1;
  std::optional<double> top5;
  std::optional<double> map;
  std::optional<double> micro_f1;
  double gap = 0.0;
  double fisher = 0.0;
  std::string status = "ok";
};

// Evaluates every (store, rate, representation) cell: build the
// representation, apply a shared random feature mask at the rate, split,
// train, score. A failing cell is recorded with its reason and the sweep
// continues. Rows come back in canonical order (temperature, representation,
// rate, seed) regardless of the number of worker threads.
std::vector<EvalReport> run_sweep(const std::vector<SweepStore>& stores,
                                  const SweepGrid& grid);

// Builds the classifier samples for one representation of a store.
LabeledVectors build_representation(const EmbeddingStore& store, Representation repr);

// CSV with header temperature,representation,compression_rate,seed,top1,
// top5,map,micro_f1,gap,fisher,status; one row per cell. Deterministic
// formatting, suitable for byte-identity checks.
std::string sweep_csv(const std::vector<EvalReport>& reports);

}  // namespace gapcomp
