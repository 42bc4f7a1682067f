#pragma once

// Epsilon-insensitive support vector regression with an RBF kernel, trained
// by SMO on the 2n-variable dual (second-order working-set selection).
// Features are z-scored with a scaler fit on the training rows.

#include <optional>
#include <span>
#include <vector>

namespace semrel {

// Row-major matrix of feature rows.
struct FeatureMatrix {
  std::size_t rows = 0;
  std::size_t cols = 0;
  std::vector<double> values;

  std::span<const double> row(std::size_t i) const { return {values.data() + i * cols, cols}; }
  void push_row(std::span<const double> r);
};

struct Scaler {
  std::vector<double> mean;
  std::vector<double> stddev;  // population; all > 0

  // DataError on a constant column or non-finite input.
  static Scaler fit(const FeatureMatrix& x);
  std::vector<double> apply(std::span<const double> row) const;

  friend bool operator==(const Scaler&, const Scaler&) = default;
};

struct SvrParams {
  double c = 1.0;
  double epsilon = 0.1;
  std::optional<double> gamma;  // nullopt: 1 / (num_features * variance of scaled X)
  double tolerance = 1e-8;      // max KKT violation at convergence
  std::size_t max_iterations = 0;  // 0: max(10^7, 100 * 2n)
  std::size_t cache_bytes = std::size_t{256} << 20;
};

class SvrModel {
 public:
  SvrModel() = default;
  SvrModel(Scaler scaler, double gamma, double c, double epsilon, FeatureMatrix support_vectors,
           std::vector<double> dual_coefs, double bias);

  // Unclamped regression value for a raw (unscaled) feature row.
  double predict(std::span<const double> features) const;
  double predict_scaled(std::span<const double> scaled) const;

  const Scaler& scaler() const { return scaler_; }
  double gamma() const { return gamma_; }
  double c() const { return c_; }
  double epsilon() const { return epsilon_; }
  const FeatureMatrix& support_vectors() const { return support_vectors_; }
  const std::vector<double>& dual_coefs() const { return dual_coefs_; }
  double bias() const { return bias_; }
  std::size_t num_features() const { return scaler_.mean.size(); }

  friend bool operator==(const SvrModel& a, const SvrModel& b);

 private:
  Scaler scaler_;
  double gamma_ = 1.0;
  double c_ = 1.0;
  double epsilon_ = 0.1;
  FeatureMatrix support_vectors_;  // scaled space
  std::vector<double> dual_coefs_;
  double bias_ = 0.0;
};

struct SvrFit {
  SvrModel model;
  std::vector<double> coefficients;  // beta_i = alpha_i - alpha*_i for every training row
  double dual_objective = 0.0;       // 1/2 b'Kb + eps*sum|b| - y'b
  double kkt_violation = 0.0;
  std::size_t iterations = 0;
};

double rbf_kernel(std::span<const double> a, std::span<const double> b, double gamma);

// DataError on shape problems, constant columns, non-finite input or targets;
// NumericalError if the solver exceeds its iteration budget.
SvrFit fit_svr_detailed(const FeatureMatrix& x, std::span<const double> y, const SvrParams& params);
SvrModel fit_svr(const FeatureMatrix& x, std::span<const double> y, const SvrParams& params);

// Resolved gamma for the default rule on already-scaled data.
double default_gamma(const FeatureMatrix& scaled);

}  // namespace semrel
