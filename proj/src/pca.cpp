#include "semrel/pca.hpp"

#include <Eigen/Dense>
#include <Eigen/SVD>
#include <cmath>
#include <istream>
#include <ostream>

#include <json.hpp>

#include "semrel/error.hpp"
#include "semrel/simd.hpp"
#include "text_io.hpp"

namespace semrel {

PcaModel::PcaModel(std::vector<double> mean, std::vector<double> components, std::vector<double> explained_variance)
    : mean_(std::move(mean)), components_(std::move(components)), explained_variance_(std::move(explained_variance)) {
  if (mean_.empty()) throw DataError("PCA model: empty mean");
  if (components_.size() != explained_variance_.size() * mean_.size()) {
    throw DataError("PCA model: components shape does not match " + std::to_string(explained_variance_.size()) +
                    "x" + std::to_string(mean_.size()));
  }
}

std::vector<double> PcaModel::transform(std::span<const double> v) const {
  if (v.size() != dim()) {
    throw DataError("PCA transform: vector length " + std::to_string(v.size()) + " != model dim " +
                    std::to_string(dim()));
  }
  std::vector<double> centred(v.begin(), v.end());
  simd::axpy(-1.0, mean_, centred);
  std::vector<double> out(rank());
  for (std::size_t j = 0; j < rank(); ++j) out[j] = simd::dot(component(j), centred);
  return out;
}

std::vector<double> PcaModel::inverse_transform(std::span<const double> coords) const {
  if (coords.size() != rank()) throw DataError("PCA inverse transform: coordinate count mismatch");
  std::vector<double> out = mean_;
  for (std::size_t j = 0; j < rank(); ++j) simd::axpy(coords[j], component(j), out);
  return out;
}

PcaModel fit_pca(std::span<const std::vector<double>> vectors, std::optional<std::size_t> k) {
  const std::size_t n = vectors.size();
  if (n < 2) throw DataError("PCA needs at least 2 vectors, got " + std::to_string(n));
  const std::size_t d = vectors.front().size();
  if (d == 0) throw DataError("PCA: zero-length vectors");
  const std::size_t max_rank = std::min(d, n);
  const std::size_t rank = k.value_or(max_rank);
  if (rank == 0 || rank > max_rank) {
    throw DataError("PCA: k=" + std::to_string(rank) + " outside [1, min(d, n)=" + std::to_string(max_rank) + "]");
  }

  Eigen::MatrixXd data(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(d));
  for (std::size_t i = 0; i < n; ++i) {
    if (vectors[i].size() != d) throw DataError("PCA: vector " + std::to_string(i) + " has wrong length");
    for (std::size_t j = 0; j < d; ++j) {
      if (!std::isfinite(vectors[i][j])) throw DataError("PCA: non-finite input value");
      data(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = vectors[i][j];
    }
  }
  const Eigen::RowVectorXd mean = data.colwise().mean();
  data.rowwise() -= mean;

  Eigen::BDCSVD<Eigen::MatrixXd> svd(data, Eigen::ComputeThinV);
  if (svd.info() != Eigen::Success) throw NumericalError("PCA: SVD did not converge");
  const Eigen::VectorXd& singular = svd.singularValues();
  const Eigen::MatrixXd& v = svd.matrixV();

  std::vector<double> components(rank * d);
  std::vector<double> variance(rank);
  for (std::size_t j = 0; j < rank; ++j) {
    const auto column = v.col(static_cast<Eigen::Index>(j));
    Eigen::Index pivot = 0;
    for (Eigen::Index i = 1; i < column.size(); ++i) {
      if (std::abs(column(i)) > std::abs(column(pivot))) pivot = i;
    }
    const double sign = column(pivot) < 0.0 ? -1.0 : 1.0;
    for (std::size_t i = 0; i < d; ++i) components[j * d + i] = sign * column(static_cast<Eigen::Index>(i));
    const double s = singular(static_cast<Eigen::Index>(j));
    variance[j] = s * s / static_cast<double>(n - 1);
  }
  return PcaModel(std::vector<double>(mean.data(), mean.data() + d), std::move(components), std::move(variance));
}

namespace {

void write_array(std::ostream& out, std::span<const double> values) {
  out << '[';
  for (std::size_t i = 0; i < values.size(); ++i) {
    if (i > 0) out << ',';
    out << text_io::format_significant(values[i], 12);
  }
  out << ']';
}

std::vector<double> read_array(const nlohmann::json& node, const char* field) {
  if (!node.is_array()) throw DataError(std::string("PCA model: '") + field + "' must be an array");
  std::vector<double> out;
  out.reserve(node.size());
  for (const auto& v : node) {
    if (!v.is_number()) throw DataError(std::string("PCA model: non-numeric value in '") + field + "'");
    out.push_back(v.get<double>());
  }
  return out;
}

}  // namespace

void write_pca(std::ostream& out, const PcaModel& model) {
  out << "{\"mean\":";
  write_array(out, model.mean());
  out << ",\"components\":[";
  for (std::size_t j = 0; j < model.rank(); ++j) {
    if (j > 0) out << ',';
    write_array(out, model.component(j));
  }
  out << "],\"explained_variance\":";
  write_array(out, model.explained_variance());
  out << "}\n";
}

void write_pca(const std::filesystem::path& path, const PcaModel& model) {
  std::ofstream out = text_io::open_output(path);
  write_pca(out, model);
  text_io::finish_output(out, path);
}

PcaModel read_pca(std::istream& in, std::string_view source_name) {
  nlohmann::json doc;
  try {
    doc = nlohmann::json::parse(in);
  } catch (const nlohmann::json::exception& e) {
    throw DataError(std::string(source_name) + ": invalid PCA JSON: " + e.what());
  }
  if (!doc.is_object() || !doc.contains("mean") || !doc.contains("components") ||
      !doc.contains("explained_variance")) {
    throw DataError(std::string(source_name) + ": PCA JSON needs mean, components, explained_variance");
  }
  std::vector<double> mean = read_array(doc["mean"], "mean");
  std::vector<double> components;
  if (!doc["components"].is_array()) throw DataError(std::string(source_name) + ": components must be an array");
  for (const auto& row : doc["components"]) {
    const std::vector<double> values = read_array(row, "components");
    if (values.size() != mean.size()) throw DataError(std::string(source_name) + ": component row length != dim");
    components.insert(components.end(), values.begin(), values.end());
  }
  return PcaModel(std::move(mean), std::move(components), read_array(doc["explained_variance"], "explained_variance"));
}

PcaModel load_pca(const std::filesystem::path& path) {
  std::ifstream in = text_io::open_input(path);
  return read_pca(in, path.string());
}

}  // namespace semrel
