#include <fstream>
#include <sstream>

#include <json.hpp>

#include "semwm/error.hpp"
#include "semwm/partition.hpp"

namespace semwm {

using nlohmann::json;

std::string partition_to_json(const Partition& p) {
  json j;
  j["version"] = kPartitionFormatVersion;
  j["type"] = std::string(to_string(mode_of(p)));
  j["dim"] = dim_of(p);
  json rows = json::array();
  if (const auto* km = std::get_if<KMeansPartition>(&p)) {
    j["k"] = km->k();
    for (const auto& c : km->centroids()) {
      rows.push_back(std::vector<double>(c.values().begin(), c.values().end()));
    }
    j["fit_seed"] = km->fit_seed();
    j["inertia"] = km->inertia();
  } else {
    const auto& lsh = std::get<LSHPartition>(p);
    j["d"] = lsh.d();
    for (const auto& row : lsh.normals()) rows.push_back(row);
    j["fit_seed"] = lsh.fit_seed();
  }
  j["rows"] = std::move(rows);
  return j.dump() + "\n";
}

namespace {

template <typename T>
T field(const json& j, const char* name) {
  if (!j.contains(name)) fail(ErrorCode::kFormat, std::string("partition file lacks '") + name + "'");
  try {
    return j.at(name).get<T>();
  } catch (const json::exception&) {
    fail(ErrorCode::kFormat, std::string("partition field '") + name + "' has the wrong type");
  }
}

}  // namespace

Partition partition_from_json(std::string_view text) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::parse_error& e) {
    fail(ErrorCode::kFormat, std::string("malformed partition file: ") + e.what());
  }
  if (!j.is_object()) fail(ErrorCode::kFormat, "partition file must hold a JSON object");
  const int version = field<int>(j, "version");
  if (version != kPartitionFormatVersion) {
    fail(ErrorCode::kFormat, "unsupported partition version " + std::to_string(version));
  }
  const auto type = field<std::string>(j, "type");
  const auto dim = field<std::size_t>(j, "dim");
  const auto rows = field<std::vector<std::vector<double>>>(j, "rows");
  const auto seed = j.contains("fit_seed") ? field<std::uint64_t>(j, "fit_seed") : 0;
  for (const auto& row : rows) {
    if (row.size() != dim) fail(ErrorCode::kFormat, "row length does not match dim");
  }

  try {
    if (type == "kmeans") {
      if (field<std::size_t>(j, "k") != rows.size()) {
        fail(ErrorCode::kFormat, "'k' does not match the number of rows");
      }
      std::vector<Embedding> centroids;
      centroids.reserve(rows.size());
      for (const auto& row : rows) {
        try {
          centroids.push_back(Embedding::from_unit(row));
        } catch (const Error&) {
          fail(ErrorCode::kFormat, "centroid is not unit-norm");
        }
      }
      const double inertia = j.contains("inertia") ? field<double>(j, "inertia") : 0.0;
      return KMeansPartition(std::move(centroids), seed, inertia);
    }
    if (type == "lsh") {
      if (field<std::size_t>(j, "d") != rows.size()) {
        fail(ErrorCode::kFormat, "'d' does not match the number of rows");
      }
      return LSHPartition(rows, seed);
    }
  } catch (const Error& e) {
    if (e.code() == ErrorCode::kFormat) throw;
    fail(ErrorCode::kFormat, std::string("invalid partition: ") + e.what());
  }
  fail(ErrorCode::kFormat, "unknown partition type '" + type + "'");
}

void save_partition(const Partition& p, const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) fail(ErrorCode::kIo, "cannot write " + path.string());
  out << partition_to_json(p);
  if (!out) fail(ErrorCode::kIo, "failed writing " + path.string());
}

Partition load_partition(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) fail(ErrorCode::kIo, "cannot read " + path.string());
  std::ostringstream buf;
  buf << in.rdbuf();
  return partition_from_json(buf.str());
}

}  // namespace semwm
