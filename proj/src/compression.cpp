#include "gapcomp/compression.hpp"

#include <algorithm>
#include <fstream>
#include <map>
#include <numeric>
#include <random>
#include <set>
#include <string>

#include <json.hpp>

#include "gapcomp/errors.hpp"
#include "gapcomp/seeding.hpp"

namespace gapcomp {

namespace {

// Records grouped by concept, modality-complete, in ascending concept order.
std::map<std::uint64_t, std::vector<const EmbeddingRecord*>> group_by_concept(
    const EmbeddingStore& store) {
  std::map<std::uint64_t, std::vector<const EmbeddingRecord*>> groups;
  for (const auto& r : store.records) groups[r.concept_id].push_back(&r);
  const std::size_t m = store.modality_names.size();
  for (auto& [concept_id, records] : groups) {
    if (records.size() != m)
      throw DataError("integrity error: concept " + std::to_string(concept_id) + " has " +
                      std::to_string(records.size()) + " of " + std::to_string(m) +
                      " modalities");
    std::sort(records.begin(), records.end(),
              [](const EmbeddingRecord* a, const EmbeddingRecord* b) {
                return a->modality_id < b->modality_id;
              });
  }
  return groups;
}

}  // namespace

CentroidStore concept_centroids(const EmbeddingStore& store, Granularity granularity,
                                const std::vector<std::uint32_t>* class_universe,
                                std::vector<std::uint32_t>* skipped_labels) {
  if (!store.normalized)
    throw ConfigError("parameter error: concept_centroids requires a normalized store");

  CentroidStore cs;
  cs.dim = store.dim;
  cs.granularity = granularity;
  cs.renormalized = false;

  if (granularity == Granularity::per_concept) {
    for (const auto& [concept_id, records] : group_by_concept(store)) {
      CentroidEntry entry;
      entry.id = concept_id;
      entry.class_label = records.front()->class_label;
      entry.multi_labels = records.front()->multi_labels;
      entry.vector = Eigen::VectorXd::Zero(store.dim);
      for (const auto* r : records) entry.vector += r->vector;
      entry.vector /= static_cast<double>(records.size());
      cs.entries.push_back(std::move(entry));
    }
    return cs;
  }

  // per_class: pool every record carrying the label, across all modalities.
  std::map<std::uint32_t, std::pair<Eigen::VectorXd, std::int64_t>> sums;
  for (const auto& r : store.records) {
    auto [it, inserted] = sums.try_emplace(r.class_label, Eigen::VectorXd::Zero(store.dim), 0);
    it->second.first += r.vector;
    it->second.second += 1;
  }

  std::set<std::uint32_t> universe;
  if (class_universe) {
    universe.insert(class_universe->begin(), class_universe->end());
  } else {
    for (const auto& [label, acc] : sums) universe.insert(label);
  }

  for (std::uint32_t label : universe) {
    auto it = sums.find(label);
    if (it == sums.end()) {
      if (skipped_labels) skipped_labels->push_back(label);
      continue;
    }
    CentroidEntry entry;
    entry.id = label;
    entry.class_label = label;
    entry.multi_labels = {label};
    entry.vector = it->second.first / static_cast<double>(it->second.second);
    cs.entries.push_back(std::move(entry));
  }
  return cs;
}

CentroidStore renormalize_centroids(const CentroidStore& cs) {
  CentroidStore out = cs;
  for (auto& entry : out.entries) {
    double norm = entry.vector.norm();
    if (norm == 0.0)
      throw NumericError("degenerate-centroid error: zero norm for centroid id " +
                         std::to_string(entry.id));
    entry.vector /= norm;
  }
  out.renormalized = true;
  return out;
}

SelectionMask make_rfs_mask(int source_dim, int target_dim, std::uint64_t seed) {
  if (target_dim < 1 || target_dim > source_dim)
    throw ConfigError("parameter error: target_dim must satisfy 1 <= T <= D, got T=" +
                      std::to_string(target_dim) + " D=" + std::to_string(source_dim));

  // Partial Fisher-Yates: the first T slots end up a uniform size-T subset.
  std::vector<int> pool(static_cast<std::size_t>(source_dim));
  std::iota(pool.begin(), pool.end(), 0);
  std::mt19937_64 rng = make_rng(seed);
  for (int t = 0; t < target_dim; ++t) {
    std::uniform_int_distribution<int> pick(t, source_dim - 1);
    std::swap(pool[t], pool[pick(rng)]);
  }

  SelectionMask mask;
  mask.source_dim = source_dim;
  mask.target_dim = target_dim;
  mask.seed = seed;
  mask.indices.assign(pool.begin(), pool.begin() + target_dim);
  std::sort(mask.indices.begin(), mask.indices.end());
  return mask;
}

Eigen::MatrixXd apply_mask(const Eigen::MatrixXd& rows, const SelectionMask& mask,
                           bool renormalize) {
  if (rows.cols() != mask.source_dim)
    throw ConfigError("parameter error: vector dimension " + std::to_string(rows.cols()) +
                      " does not match mask source dimension " +
                      std::to_string(mask.source_dim));
  Eigen::MatrixXd out(rows.rows(), mask.target_dim);
  for (int j = 0; j < mask.target_dim; ++j) out.col(j) = rows.col(mask.indices[j]);
  if (renormalize) {
    for (Eigen::Index i = 0; i < out.rows(); ++i) {
      double norm = out.row(i).norm();
      if (norm == 0.0)
        throw NumericError("degenerate-vector error: zero norm after selection at row " +
                           std::to_string(i));
      out.row(i) /= norm;
    }
  }
  return out;
}

Eigen::VectorXd apply_mask(const Eigen::VectorXd& vector, const SelectionMask& mask,
                           bool renormalize) {
  Eigen::MatrixXd rows = vector.transpose();
  return apply_mask(rows, mask, renormalize).row(0).transpose();
}

std::vector<ConcatEntry> concat_baseline(const EmbeddingStore& store) {
  const int m = store.modality_count();
  std::vector<ConcatEntry> out;
  for (const auto& [concept_id, records] : group_by_concept(store)) {
    ConcatEntry entry;
    entry.concept_id = concept_id;
    entry.class_label = records.front()->class_label;
    entry.multi_labels = records.front()->multi_labels;
    entry.vector.resize(static_cast<Eigen::Index>(m) * store.dim);
    for (int mo = 0; mo < m; ++mo)
      entry.vector.segment(static_cast<Eigen::Index>(mo) * store.dim, store.dim) =
          records[mo]->vector;
    out.push_back(std::move(entry));
  }
  return out;
}

double compression_ratio(ReprStats original, ReprStats compressed) {
  return (static_cast<double>(compressed.entries) * static_cast<double>(compressed.dim)) /
         (static_cast<double>(original.entries) * static_cast<double>(original.dim));
}

namespace {

EmbeddingStore centroids_as_store(const CentroidStore& cs) {
  EmbeddingStore store;
  store.dim = cs.dim;
  store.normalized = cs.renormalized;
  store.modality_names = {"centroid"};
  for (const auto& e : cs.entries) {
    EmbeddingRecord r;
    r.concept_id = e.id;
    r.modality_id = 0;
    r.class_label = e.class_label;
    r.multi_labels = e.multi_labels;
    r.vector = e.vector;
    store.records.push_back(std::move(r));
  }
  return store;
}

}  // namespace

void save_centroids(const CentroidStore& cs, const std::filesystem::path& path) {
  std::uint8_t flag = cs.granularity == Granularity::per_concept ? 1 : 2;
  detail::write_store_file(centroids_as_store(cs), path, flag);
}

CentroidStore load_centroids(const std::filesystem::path& path) {
  std::uint8_t flag = 0;
  EmbeddingStore store = detail::read_store_file(path, &flag);
  if (store.modality_count() != 1 || (flag != 1 && flag != 2))
    throw DataError("format error: not a centroid store: " + path.string());

  CentroidStore cs;
  cs.dim = store.dim;
  cs.granularity = flag == 1 ? Granularity::per_concept : Granularity::per_class;
  cs.renormalized = store.normalized;
  for (auto& r : store.records) {
    CentroidEntry e;
    e.id = r.concept_id;
    e.class_label = r.class_label;
    e.multi_labels = std::move(r.multi_labels);
    e.vector = std::move(r.vector);
    cs.entries.push_back(std::move(e));
  }
  return cs;
}

void save_mask(const SelectionMask& mask, const std::filesystem::path& path) {
  nlohmann::json j;
  j["source_dim"] = mask.source_dim;
  j["target_dim"] = mask.target_dim;
  j["seed"] = mask.seed;
  j["indices"] = mask.indices;
  std::ofstream os(path, std::ios::trunc);
  if (!os) throw DataError("io error: cannot open for writing: " + path.string());
  os << j.dump(2) << '\n';
  if (!os) throw DataError("io error: write failed: " + path.string());
}

SelectionMask load_mask(const std::filesystem::path& path) {
  std::ifstream is(path);
  if (!is) throw DataError("io error: cannot open: " + path.string());
  nlohmann::json j;
  try {
    is >> j;
    SelectionMask mask;
    mask.source_dim = j.at("source_dim").get<int>();
    mask.target_dim = j.at("target_dim").get<int>();
    mask.seed = j.at("seed").get<std::uint64_t>();
    mask.indices = j.at("indices").get<std::vector<int>>();
    return mask;
  } catch (const nlohmann::json::exception& e) {
    throw DataError("format error: bad mask file " + path.string() + ": " + e.what());
  }
}

}  // namespace gapcomp
