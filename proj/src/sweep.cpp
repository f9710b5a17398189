#include "gapcomp/sweep.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdio>
#include <sstream>
#include <thread>

#include "gapcomp/compression.hpp"
#include "gapcomp/errors.hpp"
#include "gapcomp/geometry.hpp"
#include "gapcomp/seeding.hpp"

namespace gapcomp {

std::string to_string(Representation r) {
  switch (r) {
    case Representation::centroid: return "centroid";
    case Representation::concat: return "concat";
    case Representation::single_modality: return "single_modality";
  }
  return "unknown";
}

Representation representation_from_string(const std::string& s) {
  if (s == "centroid") return Representation::centroid;
  if (s == "concat") return Representation::concat;
  if (s == "single_modality") return Representation::single_modality;
  throw ConfigError("parameter error: unknown representation '" + s + "'");
}

std::string to_string(EvalTask t) {
  return t == EvalTask::single_label ? "single_label" : "multi_label";
}

EvalTask task_from_string(const std::string& s) {
  if (s == "single_label") return EvalTask::single_label;
  if (s == "multi_label") return EvalTask::multi_label;
  throw ConfigError("parameter error: unknown task '" + s + "'");
}

LabeledVectors build_representation(const EmbeddingStore& store, Representation repr) {
  LabeledVectors data;
  switch (repr) {
    case Representation::centroid: {
      CentroidStore cs = renormalize_centroids(
          concept_centroids(store, Granularity::per_concept));
      data.vectors.resize(static_cast<Eigen::Index>(cs.entries.size()), cs.dim);
      for (std::size_t i = 0; i < cs.entries.size(); ++i) {
        data.vectors.row(static_cast<Eigen::Index>(i)) = cs.entries[i].vector.transpose();
        data.class_labels.push_back(cs.entries[i].class_label);
        data.multi_labels.push_back(cs.entries[i].multi_labels);
      }
      break;
    }
    case Representation::concat: {
      auto entries = concat_baseline(store);
      data.vectors.resize(static_cast<Eigen::Index>(entries.size()),
                          static_cast<Eigen::Index>(store.dim) * store.modality_count());
      for (std::size_t i = 0; i < entries.size(); ++i) {
        data.vectors.row(static_cast<Eigen::Index>(i)) = entries[i].vector.transpose();
        data.class_labels.push_back(entries[i].class_label);
        data.multi_labels.push_back(entries[i].multi_labels);
      }
      break;
    }
    case Representation::single_modality: {
      std::vector<const EmbeddingRecord*> records;
      for (const auto& r : store.records)
        if (r.modality_id == 0) records.push_back(&r);
      std::sort(records.begin(), records.end(),
                [](const EmbeddingRecord* a, const EmbeddingRecord* b) {
                  return a->concept_id < b->concept_id;
                });
      data.vectors.resize(static_cast<Eigen::Index>(records.size()), store.dim);
      for (std::size_t i = 0; i < records.size(); ++i) {
        data.vectors.row(static_cast<Eigen::Index>(i)) = records[i]->vector.transpose();
        data.class_labels.push_back(records[i]->class_label);
        data.multi_labels.push_back(records[i]->multi_labels);
      }
      break;
    }
  }
  return data;
}

namespace {

double mean_pairwise_gap(const EmbeddingStore& store) {
  const int m = store.modality_count();
  if (m < 2) return 0.0;
  double sum = 0.0;
  int count = 0;
  for (int a = 0; a < m; ++a)
    for (int b = a + 1; b < m; ++b) {
      sum += modality_gap(store, static_cast<std::uint32_t>(a),
                          static_cast<std::uint32_t>(b)).gap;
      ++count;
    }
  return sum / count;
}

struct Cell {
  const SweepStore* source;
  Representation representation;
  double rate;
};

EvalReport evaluate_cell(const Cell& cell, const SweepGrid& grid, double gap, double fisher) {
  EvalReport report;
  report.temperature = cell.source->temperature;
  report.representation = cell.representation;
  report.compression_rate = cell.rate;
  report.seed = cell.source->seed;
  report.gap = gap;
  report.fisher = fisher;

  try {
    LabeledVectors data = build_representation(cell.source->store, cell.representation);

    const int dim = data.dim();
    // No upper clamp: a rate beyond 1 asks for more coordinates than exist
    // and is reported as a failed cell.
    const int target = std::max(1, static_cast<int>(std::lround(cell.rate * dim)));
    SelectionMask mask = make_rfs_mask(dim, target, mix_seed(cell.source->seed, 0x5e1ec7));
    data.vectors = apply_mask(data.vectors, mask, /*renormalize=*/true);

    SplitSpec split_spec = grid.split;
    split_spec.seed = mix_seed(cell.source->seed, 0x5b117);
    SplitResult split = split_train_test(data, split_spec);

    ClassifierConfig clf_config = grid.classifier;
    clf_config.seed = mix_seed(cell.source->seed, 0xc1a55);

    for (EvalTask task : grid.tasks) {
      if (task == EvalTask::single_label) {
        LinearClassifier clf = train_linear(split.train, clf_config);
        report.top1 = topk_accuracy(clf, split.test, 1);
        report.top5 = topk_accuracy(clf, split.test, 5);
      } else {
        MultilabelClassifier clf = train_one_vs_rest(split.train, clf_config);
        Eigen::MatrixXd scores = multilabel_scores(clf, split.test.vectors);
        report.map = mean_average_precision(scores, split.test.multi_labels, clf.classes);
        report.micro_f1 = micro_f1(scores, split.test.multi_labels, clf.classes,
                                   clf_config.multilabel_threshold);
      }
    }
  } catch (const std::exception& e) {
    report.status = std::string("failed: ") + e.what();
    report.top1.reset();
    report.top5.reset();
    report.map.reset();
    report.micro_f1.reset();
  }
  return report;
}

}  // namespace

std::vector<EvalReport> run_sweep(const std::vector<SweepStore>& stores,
                                  const SweepGrid& grid) {
  std::vector<Cell> cells;
  std::vector<std::pair<double, double>> geometry;  // (gap, fisher) per store
  geometry.reserve(stores.size());
  for (const auto& s : stores) {
    double gap = 0.0;
    double fisher = 0.0;
    try {
      gap = mean_pairwise_gap(s.store);
      fisher = fisher_ratio(s.store).fisher;
    } catch (const std::exception&) {
      // geometry failures surface per cell through the eval path
    }
    geometry.emplace_back(gap, fisher);
    for (Representation repr : grid.representations)
      for (double rate : grid.rates) cells.push_back({&s, repr, rate});
  }

  std::vector<EvalReport> reports(cells.size());
  const int jobs = std::max(1, grid.jobs);
  if (jobs == 1) {
    for (std::size_t i = 0; i < cells.size(); ++i) {
      const auto& geo = geometry[static_cast<std::size_t>(cells[i].source - stores.data())];
      reports[i] = evaluate_cell(cells[i], grid, geo.first, geo.second);
    }
  } else {
    std::atomic<std::size_t> next{0};
    auto worker = [&]() {
      for (std::size_t i = next.fetch_add(1); i < cells.size(); i = next.fetch_add(1)) {
        const auto& geo = geometry[static_cast<std::size_t>(cells[i].source - stores.data())];
        reports[i] = evaluate_cell(cells[i], grid, geo.first, geo.second);
      }
    };
    std::vector<std::thread> pool;
    for (int t = 0; t < jobs; ++t) pool.emplace_back(worker);
    for (auto& t : pool) t.join();
  }

  std::sort(reports.begin(), reports.end(), [](const EvalReport& a, const EvalReport& b) {
    if (a.temperature != b.temperature) return a.temperature < b.temperature;
    if (a.representation != b.representation)
      return static_cast<int>(a.representation) < static_cast<int>(b.representation);
    if (a.compression_rate != b.compression_rate) return a.compression_rate < b.compression_rate;
    return a.seed < b.seed;
  });
  return reports;
}

namespace {

std::string fmt_double(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.10g", v);
  return buf;
}

std::string fmt_optional(const std::optional<double>& v) {
  return v ? fmt_double(*v) : std::string();
}

// Quotes a CSV field when needed (failure reasons may contain commas).
std::string csv_escape(const std::string& s) {
  if (s.find_first_of(",\"\n") == std::string::npos) return s;
  std::string out = "\"";
  for (char c : s) {
    if (c == '"') out += '"';
    out += c;
  }
  out += '"';
  return out;
}

}  // namespace

std::string sweep_csv(const std::vector<EvalReport>& reports) {
  std::ostringstream os;
  os << "temperature,representation,compression_rate,seed,top1,top5,map,micro_f1,gap,fisher,"
        "status\n";
  for (const auto& r : reports) {
    os << fmt_double(r.temperature) << ',' << to_string(r.representation) << ','
       << fmt_double(r.compression_rate) << ',' << r.seed << ',' << fmt_optional(r.top1) << ','
       << fmt_optional(r.top5) << ',' << fmt_optional(r.map) << ',' << fmt_optional(r.micro_f1)
       << ',' << fmt_double(r.gap) << ',' << fmt_double(r.fisher) << ','
       << csv_escape(r.status) << '\n';
  }
  return os.str();
}

}  // namespace gapcomp
