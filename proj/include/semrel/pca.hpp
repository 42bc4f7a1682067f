#pragma once

// Full-rank PCA used as a coordinate change for embedding spaces: centre on
// the fit-set mean and rotate onto the principal axes. No whitening.

#include <filesystem>
#include <iosfwd>
#include <optional>
#include <span>
#include <vector>

namespace semrel {

class PcaModel {
 public:
  PcaModel() = default;
  // components: k rows of length d, row-major. Validates shapes only.
  PcaModel(std::vector<double> mean, std::vector<double> components, std::vector<double> explained_variance);

  std::size_t dim() const { return mean_.size(); }
  std::size_t rank() const { return explained_variance_.size(); }
  const std::vector<double>& mean() const { return mean_; }
  std::span<const double> component(std::size_t j) const { return {components_.data() + j * dim(), dim()}; }
  const std::vector<double>& explained_variance() const { return explained_variance_; }

  // components · (v − mean). DataError on length mismatch.
  std::vector<double> transform(std::span<const double> v) const;
  // mean + componentsᵀ · coords
  std::vector<double> inverse_transform(std::span<const double> coords) const;

  friend bool operator==(const PcaModel&, const PcaModel&) = default;

 private:
  std::vector<double> mean_;
  std::vector<double> components_;
  std::vector<double> explained_variance_;
};

// SVD of the centred data matrix. Default k = min(d, n). Explained variances
// use the n−1 denominator. Each component's largest-magnitude coordinate is
// made positive (first such coordinate on ties).
PcaModel fit_pca(std::span<const std::vector<double>> vectors, std::optional<std::size_t> k = std::nullopt);

// JSON {"mean":[…],"components":[[…]],"explained_variance":[…]}, 12 significant digits.
void write_pca(std::ostream& out, const PcaModel& model);
void write_pca(const std::filesystem::path& path, const PcaModel& model);
PcaModel read_pca(std::istream& in, std::string_view source_name);
PcaModel load_pca(const std::filesystem::path& path);

}  // namespace semrel
