#include "gapcomp/embedding_store.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <map>
#include <set>
#include <sstream>
#include <utility>

#include <json.hpp>

#include "gapcomp/binio.hpp"
#include "gapcomp/errors.hpp"

namespace gapcomp {

namespace {

constexpr char kMagic[4] = {'G', 'C', 'M', 'P'};
constexpr std::uint32_t kVersion = 1;
constexpr double kNormTolerance = 1e-6;

std::string describe_record(const EmbeddingRecord& r) {
  std::ostringstream os;
  os << "(concept " << r.concept_id << ", modality " << r.modality_id << ")";
  return os.str();
}

}  // namespace

namespace detail {

void write_store_file(const EmbeddingStore& store, const std::filesystem::path& path,
                      std::uint8_t reserved) {
  std::ofstream os(path, std::ios::binary | std::ios::trunc);
  if (!os) throw DataError("io error: cannot open for writing: " + path.string());

  os.write(kMagic, 4);
  binio::write_u32(os, kVersion);
  binio::write_u32(os, static_cast<std::uint32_t>(store.records.size()));
  binio::write_u32(os, static_cast<std::uint32_t>(store.modality_names.size()));
  binio::write_u32(os, static_cast<std::uint32_t>(store.dim));
  binio::write_u8(os, store.normalized ? 1 : 0);
  binio::write_u8(os, reserved);
  for (const auto& name : store.modality_names) binio::write_string(os, name);

  for (const auto& r : store.records) {
    binio::write_u64(os, r.concept_id);
    binio::write_u32(os, r.modality_id);
    binio::write_u32(os, r.class_label);
    binio::write_u32(os, static_cast<std::uint32_t>(r.multi_labels.size()));
    for (std::uint32_t l : r.multi_labels) binio::write_u32(os, l);
    for (int i = 0; i < store.dim; ++i)
      binio::write_f32(os, static_cast<float>(r.vector[i]));
  }
  os.flush();
  if (!os) throw DataError("io error: write failed: " + path.string());
}

EmbeddingStore read_store_file(const std::filesystem::path& path, std::uint8_t* reserved_out) {
  std::ifstream is(path, std::ios::binary);
  if (!is) throw DataError("io error: cannot open: " + path.string());

  char magic[4];
  if (!is.read(magic, 4) || std::memcmp(magic, kMagic, 4) != 0)
    throw DataError("format error: bad magic bytes in " + path.string());
  std::uint32_t version = binio::read_u32(is, "version");
  if (version != kVersion)
    throw DataError("format error: unsupported version " + std::to_string(version));

  std::uint32_t n_records = binio::read_u32(is, "record count");
  std::uint32_t m = binio::read_u32(is, "modality count");
  std::uint32_t d = binio::read_u32(is, "dimension");
  std::uint8_t normalized = binio::read_u8(is, "normalized flag");
  std::uint8_t reserved = binio::read_u8(is, "reserved byte");
  if (reserved_out) *reserved_out = reserved;

  EmbeddingStore store;
  store.dim = static_cast<int>(d);
  store.normalized = normalized != 0;
  store.modality_names.reserve(m);
  for (std::uint32_t i = 0; i < m; ++i)
    store.modality_names.push_back(binio::read_string(is, "modality name"));

  store.records.reserve(n_records);
  for (std::uint32_t i = 0; i < n_records; ++i) {
    EmbeddingRecord r;
    r.concept_id = binio::read_u64(is, "concept_id");
    r.modality_id = binio::read_u32(is, "modality_id");
    r.class_label = binio::read_u32(is, "class_label");
    std::uint32_t n_labels = binio::read_u32(is, "multilabel count");
    r.multi_labels.reserve(n_labels);
    for (std::uint32_t j = 0; j < n_labels; ++j)
      r.multi_labels.push_back(binio::read_u32(is, "multilabel entry"));
    r.vector.resize(d);
    for (std::uint32_t j = 0; j < d; ++j)
      r.vector[j] = static_cast<double>(binio::read_f32(is, "vector entry"));
    store.records.push_back(std::move(r));
  }
  return store;
}

}  // namespace detail

ValidationReport validate_store(const EmbeddingStore& store) {
  ValidationReport report;
  const int m = store.modality_count();

  std::set<std::pair<std::uint64_t, std::uint32_t>> seen;
  std::map<std::uint64_t, std::set<std::uint32_t>> modalities_of;

  for (const auto& r : store.records) {
    if (r.vector.size() != store.dim) {
      report.findings.push_back({ValidationFinding::Kind::dim_mismatch,
                                 "record " + describe_record(r) + " has dimension " +
                                     std::to_string(r.vector.size()) + ", store dimension is " +
                                     std::to_string(store.dim)});
    }
    if (r.modality_id >= static_cast<std::uint32_t>(m)) {
      report.findings.push_back({ValidationFinding::Kind::bad_modality_id,
                                 "record " + describe_record(r) + " names a modality beyond the " +
                                     std::to_string(m) + " declared"});
    }
    if (!seen.insert({r.concept_id, r.modality_id}).second) {
      report.findings.push_back({ValidationFinding::Kind::duplicate_pair,
                                 "duplicate pair " + describe_record(r)});
    }
    modalities_of[r.concept_id].insert(r.modality_id);

    bool finite = r.vector.allFinite();
    if (!finite) {
      report.findings.push_back({ValidationFinding::Kind::non_finite,
                                 "non-finite entry in record " + describe_record(r)});
    }
    if (store.normalized && finite && r.vector.size() == store.dim) {
      double norm = r.vector.norm();
      if (std::abs(norm - 1.0) > kNormTolerance) {
        std::ostringstream os;
        os << "record " << describe_record(r) << " has norm " << norm
           << " deviating from 1 by more than " << kNormTolerance;
        report.findings.push_back({ValidationFinding::Kind::norm_deviation, os.str()});
      }
    }
  }

  for (const auto& [concept_id, present] : modalities_of) {
    if (static_cast<int>(present.size()) != m) {
      report.findings.push_back({ValidationFinding::Kind::missing_modality,
                                 "concept " + std::to_string(concept_id) + " present in " +
                                     std::to_string(present.size()) + " of " + std::to_string(m) +
                                     " modalities"});
    }
  }
  return report;
}

namespace {

void reject_if_invalid(const EmbeddingStore& store, const std::string& origin) {
  ValidationReport report = validate_store(store);
  if (report.ok()) return;
  const ValidationFinding& f = report.findings.front();
  std::string what;
  switch (f.kind) {
    case ValidationFinding::Kind::missing_modality:
    case ValidationFinding::Kind::duplicate_pair:
      what = "integrity error: ";
      break;
    case ValidationFinding::Kind::non_finite:
    case ValidationFinding::Kind::norm_deviation:
      what = "data error: ";
      break;
    default:
      what = "format error: ";
      break;
  }
  throw DataError(what + f.message + " (" + origin + ", " +
                  std::to_string(report.findings.size()) + " finding(s) total)");
}

}  // namespace

EmbeddingStore load_store(const std::filesystem::path& path) {
  EmbeddingStore store = detail::read_store_file(path, nullptr);
  reject_if_invalid(store, path.string());
  return store;
}

void save_store(const EmbeddingStore& store, const std::filesystem::path& path) {
  reject_if_invalid(store, "save_store");
  detail::write_store_file(store, path, 0);
}

EmbeddingStore normalize_store(const EmbeddingStore& store) {
  EmbeddingStore out = store;
  for (auto& r : out.records) {
    double norm = r.vector.norm();
    if (norm == 0.0)
      throw NumericError("degenerate-vector error: zero norm in record " + describe_record(r));
    r.vector /= norm;
  }
  out.normalized = true;
  return out;
}

EmbeddingStore load_jsonl(const std::filesystem::path& path) {
  std::ifstream is(path);
  if (!is) throw DataError("io error: cannot open: " + path.string());

  EmbeddingStore store;
  std::string line;
  std::size_t line_no = 0;
  std::uint32_t max_modality = 0;
  while (std::getline(is, line)) {
    ++line_no;
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    nlohmann::json j;
    try {
      j = nlohmann::json::parse(line);
    } catch (const nlohmann::json::exception& e) {
      throw DataError("format error: line " + std::to_string(line_no) + ": " + e.what());
    }
    EmbeddingRecord r;
    try {
      r.concept_id = j.at("concept_id").get<std::uint64_t>();
      r.modality_id = j.at("modality_id").get<std::uint32_t>();
      r.class_label = j.at("class_label").get<std::uint32_t>();
      if (j.contains("multi_labels"))
        r.multi_labels = j.at("multi_labels").get<std::vector<std::uint32_t>>();
      auto coords = j.at("vector").get<std::vector<double>>();
      r.vector = Eigen::Map<const Eigen::VectorXd>(coords.data(),
                                                   static_cast<Eigen::Index>(coords.size()));
    } catch (const nlohmann::json::exception& e) {
      throw DataError("format error: line " + std::to_string(line_no) + ": " + e.what());
    }
    std::sort(r.multi_labels.begin(), r.multi_labels.end());
    r.multi_labels.erase(std::unique(r.multi_labels.begin(), r.multi_labels.end()),
                         r.multi_labels.end());
    max_modality = std::max(max_modality, r.modality_id);
    if (store.records.empty()) store.dim = static_cast<int>(r.vector.size());
    store.records.push_back(std::move(r));
  }
  if (!store.records.empty()) {
    for (std::uint32_t i = 0; i <= max_modality; ++i)
      store.modality_names.push_back("modality_" + std::to_string(i));
  }
  reject_if_invalid(store, path.string());
  return store;
}

void save_jsonl(const EmbeddingStore& store, const std::filesystem::path& path) {
  std::ofstream os(path, std::ios::trunc);
  if (!os) throw DataError("io error: cannot open for writing: " + path.string());
  for (const auto& r : store.records) {
    nlohmann::json j;
    j["concept_id"] = r.concept_id;
    j["modality_id"] = r.modality_id;
    j["class_label"] = r.class_label;
    j["multi_labels"] = r.multi_labels;
    std::vector<double> coords(r.vector.data(), r.vector.data() + r.vector.size());
    j["vector"] = coords;
    os << j.dump() << '\n';
  }
  if (!os) throw DataError("io error: write failed: " + path.string());
}

}  // namespace gapcomp
