#include "semrel/svr.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <list>

#include "semrel/error.hpp"
#include "semrel/simd.hpp"

namespace semrel {

void FeatureMatrix::push_row(std::span<const double> r) {
  if (rows == 0 && cols == 0) cols = r.size();
  if (r.size() != cols) throw DataError("feature row length " + std::to_string(r.size()) + " != " + std::to_string(cols));
  values.insert(values.end(), r.begin(), r.end());
  ++rows;
}

Scaler Scaler::fit(const FeatureMatrix& x) {
  if (x.rows == 0) throw DataError("scaler: no rows");
  Scaler scaler;
  scaler.mean.assign(x.cols, 0.0);
  scaler.stddev.assign(x.cols, 0.0);
  for (std::size_t i = 0; i < x.rows; ++i) {
    const auto row = x.row(i);
    for (std::size_t j = 0; j < x.cols; ++j) {
      if (!std::isfinite(row[j])) throw DataError("non-finite feature value at row " + std::to_string(i));
      scaler.mean[j] += row[j];
    }
  }
  for (double& m : scaler.mean) m /= static_cast<double>(x.rows);
  for (std::size_t i = 0; i < x.rows; ++i) {
    const auto row = x.row(i);
    for (std::size_t j = 0; j < x.cols; ++j) {
      const double d = row[j] - scaler.mean[j];
      scaler.stddev[j] += d * d;
    }
  }
  for (std::size_t j = 0; j < x.cols; ++j) {
    scaler.stddev[j] = std::sqrt(scaler.stddev[j] / static_cast<double>(x.rows));
    // Relative threshold: float noise on a constant column must still count as constant.
    if (!(scaler.stddev[j] > 1e-12 * std::max(1.0, std::abs(scaler.mean[j])))) {
      throw DataError("constant feature column " + std::to_string(j) + " cannot be scaled");
    }
  }
  return scaler;
}

std::vector<double> Scaler::apply(std::span<const double> row) const {
  if (row.size() != mean.size()) {
    throw DataError("feature row length " + std::to_string(row.size()) + " != scaler width " +
                    std::to_string(mean.size()));
  }
  std::vector<double> out(row.size());
  for (std::size_t j = 0; j < row.size(); ++j) out[j] = (row[j] - mean[j]) / stddev[j];
  return out;
}

double rbf_kernel(std::span<const double> a, std::span<const double> b, double gamma) {
  return std::exp(-gamma * simd::squared_l2(a, b));
}

double default_gamma(const FeatureMatrix& scaled) {
  const auto n = static_cast<double>(scaled.values.size());
  double mean = 0.0;
  for (double v : scaled.values) mean += v;
  mean /= n;
  double variance = 0.0;
  for (double v : scaled.values) variance += (v - mean) * (v - mean);
  variance /= n;
  if (!(variance > 0.0)) return 1.0 / static_cast<double>(scaled.cols);
  return 1.0 / (static_cast<double>(scaled.cols) * variance);
}

SvrModel::SvrModel(Scaler scaler, double gamma, double c, double epsilon, FeatureMatrix support_vectors,
                   std::vector<double> dual_coefs, double bias)
    : scaler_(std::move(scaler)),
      gamma_(gamma),
      c_(c),
      epsilon_(epsilon),
      support_vectors_(std::move(support_vectors)),
      dual_coefs_(std::move(dual_coefs)),
      bias_(bias) {
  if (support_vectors_.rows != dual_coefs_.size()) throw DataError("SVR model: support vector / coefficient mismatch");
  if (support_vectors_.rows > 0 && support_vectors_.cols != scaler_.mean.size()) {
    throw DataError("SVR model: support vector width != scaler width");
  }
}

double SvrModel::predict_scaled(std::span<const double> scaled) const {
  double sum = bias_;
  for (std::size_t i = 0; i < support_vectors_.rows; ++i) {
    sum += dual_coefs_[i] * rbf_kernel(support_vectors_.row(i), scaled, gamma_);
  }
  return sum;
}

double SvrModel::predict(std::span<const double> features) const { return predict_scaled(scaler_.apply(features)); }

bool operator==(const SvrModel& a, const SvrModel& b) {
  return a.scaler_ == b.scaler_ && a.gamma_ == b.gamma_ && a.c_ == b.c_ && a.epsilon_ == b.epsilon_ &&
         a.support_vectors_.rows == b.support_vectors_.rows && a.support_vectors_.cols == b.support_vectors_.cols &&
         a.support_vectors_.values == b.support_vectors_.values && a.dual_coefs_ == b.dual_coefs_ &&
         a.bias_ == b.bias_;
}

namespace {

// LRU cache of kernel rows K(i, ·) over the n training rows.
class KernelCache {
 public:
  KernelCache(const FeatureMatrix& x, double gamma, std::size_t cache_bytes)
      : x_(x), gamma_(gamma), slots_(x.rows, lru_.end()), where_(x.rows, nullptr) {
    const std::size_t row_bytes = std::max<std::size_t>(1, x.rows * sizeof(double));
    capacity_ = std::max<std::size_t>(2, cache_bytes / row_bytes);
  }

  const double* row(std::size_t i) {
    if (where_[i] != nullptr) {
      lru_.splice(lru_.begin(), lru_, slots_[i]);
      return where_[i];
    }
    if (lru_.size() >= capacity_) {
      const std::size_t victim = lru_.back().index;
      where_[victim] = nullptr;
      slots_[victim] = lru_.end();
      lru_.back().index = i;
      lru_.splice(lru_.begin(), lru_, std::prev(lru_.end()));
    } else {
      lru_.push_front({i, std::vector<double>(x_.rows)});
    }
    Row& entry = lru_.front();
    const auto xi = x_.row(i);
    for (std::size_t j = 0; j < x_.rows; ++j) entry.values[j] = std::exp(-gamma_ * simd::squared_l2(xi, x_.row(j)));
    slots_[i] = lru_.begin();
    where_[i] = entry.values.data();
    return where_[i];
  }

 private:
  struct Row {
    std::size_t index;
    std::vector<double> values;
  };
  const FeatureMatrix& x_;
  double gamma_;
  std::size_t capacity_ = 2;
  std::list<Row> lru_;
  std::vector<std::list<Row>::iterator> slots_;
  std::vector<const double*> where_;
};

constexpr double kTau = 1e-12;

// SMO over l = 2n variables: t < n are alpha (y = +1), t >= n are alpha* (y = -1).
class SmoSolver {
 public:
  SmoSolver(const FeatureMatrix& scaled, std::span<const double> target, double c, double epsilon, double gamma,
            double tolerance, std::size_t max_iterations, std::size_t cache_bytes)
      : n_(scaled.rows),
        l_(2 * scaled.rows),
        c_(c),
        tolerance_(tolerance),
        max_iterations_(max_iterations),
        cache_(scaled, gamma, cache_bytes),
        alpha_(l_, 0.0),
        grad_(l_),
        p_(l_),
        qi_(l_),
        qj_(l_) {
    for (std::size_t t = 0; t < n_; ++t) {
      p_[t] = epsilon - target[t];
      p_[t + n_] = epsilon + target[t];
    }
    grad_ = p_;
  }

  void solve() {
    std::size_t iter = 0;
    while (true) {
      std::size_t i = 0;
      std::size_t j = 0;
      if (select_working_set(i, j)) break;
      if (++iter > max_iterations_) {
        throw NumericalError("SVR solver exceeded " + std::to_string(max_iterations_) +
                             " iterations (KKT violation " + std::to_string(violation_) + ")");
      }
      update_pair(i, j);
    }
    iterations_ = iter;
  }

  double rho() const {
    double ub = std::numeric_limits<double>::infinity();
    double lb = -std::numeric_limits<double>::infinity();
    double sum_free = 0.0;
    std::size_t free_count = 0;
    for (std::size_t t = 0; t < l_; ++t) {
      const double yg = y(t) * grad_[t];
      if (at_upper(t)) {
        if (y(t) < 0) ub = std::min(ub, yg);
        else lb = std::max(lb, yg);
      } else if (at_lower(t)) {
        if (y(t) > 0) ub = std::min(ub, yg);
        else lb = std::max(lb, yg);
      } else {
        ++free_count;
        sum_free += yg;
      }
    }
    return free_count > 0 ? sum_free / static_cast<double>(free_count) : 0.5 * (ub + lb);
  }

  std::vector<double> coefficients() const {
    std::vector<double> beta(n_);
    for (std::size_t t = 0; t < n_; ++t) beta[t] = alpha_[t] - alpha_[t + n_];
    return beta;
  }

  double objective() const {
    double sum = 0.0;
    for (std::size_t t = 0; t < l_; ++t) sum += alpha_[t] * (grad_[t] + p_[t]);
    return 0.5 * sum;
  }

  double violation() const { return violation_; }
  std::size_t iterations() const { return iterations_; }

 private:
  double y(std::size_t t) const { return t < n_ ? 1.0 : -1.0; }
  bool at_upper(std::size_t t) const { return alpha_[t] >= c_; }
  bool at_lower(std::size_t t) const { return alpha_[t] <= 0.0; }

  // Q(i, ·) = y_i y_t K(i mod n, t mod n)
  void fill_q(std::size_t i, std::vector<double>& q) {
    const double* k = cache_.row(i % n_);
    const double yi = y(i);
    for (std::size_t t = 0; t < n_; ++t) {
      q[t] = yi * k[t];
      q[t + n_] = -yi * k[t];
    }
  }

  // Returns true when converged (max KKT violation below tolerance).
  bool select_working_set(std::size_t& out_i, std::size_t& out_j) {
    double gmax = -std::numeric_limits<double>::infinity();
    double gmax2 = -std::numeric_limits<double>::infinity();
    std::ptrdiff_t gmax_idx = -1;
    std::ptrdiff_t gmin_idx = -1;
    double obj_diff_min = std::numeric_limits<double>::infinity();

    for (std::size_t t = 0; t < l_; ++t) {
      if (y(t) > 0) {
        if (!at_upper(t) && -grad_[t] >= gmax) {
          gmax = -grad_[t];
          gmax_idx = static_cast<std::ptrdiff_t>(t);
        }
      } else if (!at_lower(t) && grad_[t] >= gmax) {
        gmax = grad_[t];
        gmax_idx = static_cast<std::ptrdiff_t>(t);
      }
    }
    if (gmax_idx < 0) {
      violation_ = 0.0;
      return true;
    }
    const auto i = static_cast<std::size_t>(gmax_idx);
    fill_q(i, qi_);
    const double qd_i = 1.0;  // K(x, x) = 1 for RBF

    for (std::size_t t = 0; t < l_; ++t) {
      if (y(t) > 0) {
        if (!at_lower(t)) {
          const double grad_diff = gmax + grad_[t];
          gmax2 = std::max(gmax2, grad_[t]);
          if (grad_diff > 0.0) {
            double quad = qd_i + 1.0 - 2.0 * y(i) * qi_[t];
            if (quad <= 0.0) quad = kTau;
            const double obj_diff = -(grad_diff * grad_diff) / quad;
            if (obj_diff <= obj_diff_min) {
              gmin_idx = static_cast<std::ptrdiff_t>(t);
              obj_diff_min = obj_diff;
            }
          }
        }
      } else if (!at_upper(t)) {
        const double grad_diff = gmax - grad_[t];
        gmax2 = std::max(gmax2, -grad_[t]);
        if (grad_diff > 0.0) {
          double quad = qd_i + 1.0 + 2.0 * y(i) * qi_[t];
          if (quad <= 0.0) quad = kTau;
          const double obj_diff = -(grad_diff * grad_diff) / quad;
          if (obj_diff <= obj_diff_min) {
            gmin_idx = static_cast<std::ptrdiff_t>(t);
            obj_diff_min = obj_diff;
          }
        }
      }
    }
    violation_ = gmax + gmax2;
    if (violation_ < tolerance_ || gmin_idx < 0) return true;
    out_i = i;
    out_j = static_cast<std::size_t>(gmin_idx);
    return false;
  }

  void update_pair(std::size_t i, std::size_t j) {
    fill_q(j, qj_);  // qi_ still holds row i from selection
    const double old_ai = alpha_[i];
    const double old_aj = alpha_[j];
    double& ai = alpha_[i];
    double& aj = alpha_[j];
    if (y(i) != y(j)) {
      double quad = 2.0 + 2.0 * qi_[j];
      if (quad <= 0.0) quad = kTau;
      const double delta = (-grad_[i] - grad_[j]) / quad;
      const double diff = ai - aj;
      ai += delta;
      aj += delta;
      if (diff > 0.0) {
        if (aj < 0.0) {
          aj = 0.0;
          ai = diff;
        }
      } else if (ai < 0.0) {
        ai = 0.0;
        aj = -diff;
      }
      if (diff > 0.0) {
        if (ai > c_) {
          ai = c_;
          aj = c_ - diff;
        }
      } else if (aj > c_) {
        aj = c_;
        ai = c_ + diff;
      }
    } else {
      double quad = 2.0 - 2.0 * qi_[j];
      if (quad <= 0.0) quad = kTau;
      const double delta = (grad_[i] - grad_[j]) / quad;
      const double sum = ai + aj;
      ai -= delta;
      aj += delta;
      if (sum > c_) {
        if (ai > c_) {
          ai = c_;
          aj = sum - c_;
        }
      } else if (aj < 0.0) {
        aj = 0.0;
        ai = sum;
      }
      if (sum > c_) {
        if (aj > c_) {
          aj = c_;
          ai = sum - c_;
        }
      } else if (ai < 0.0) {
        ai = 0.0;
        aj = sum;
      }
    }
    const double delta_i = ai - old_ai;
    const double delta_j = aj - old_aj;
    for (std::size_t t = 0; t < l_; ++t) grad_[t] += qi_[t] * delta_i + qj_[t] * delta_j;
  }

  std::size_t n_;
  std::size_t l_;
  double c_;
  double tolerance_;
  std::size_t max_iterations_;
  KernelCache cache_;
  std::vector<double> alpha_;
  std::vector<double> grad_;
  std::vector<double> p_;
  std::vector<double> qi_;
  std::vector<double> qj_;
  double violation_ = 0.0;
  std::size_t iterations_ = 0;
};

}  // namespace

SvrFit fit_svr_detailed(const FeatureMatrix& x, std::span<const double> y, const SvrParams& params) {
  if (x.rows != y.size()) {
    throw DataError("SVR: " + std::to_string(x.rows) + " feature rows but " + std::to_string(y.size()) + " targets");
  }
  if (x.rows < 2) throw DataError("SVR: need at least 2 training rows");
  if (x.cols == 0) throw DataError("SVR: no features");
  for (double v : y) {
    if (!std::isfinite(v)) throw DataError("SVR: non-finite target");
  }
  if (!(params.c > 0.0) || !(params.epsilon >= 0.0) || !(params.tolerance > 0.0)) {
    throw ConfigError("SVR: need C > 0, epsilon >= 0, tolerance > 0");
  }
  if (params.gamma && !(*params.gamma > 0.0)) throw ConfigError("SVR: gamma must be positive");

  Scaler scaler = Scaler::fit(x);
  FeatureMatrix scaled;
  scaled.cols = x.cols;
  scaled.values.reserve(x.values.size());
  for (std::size_t i = 0; i < x.rows; ++i) scaled.push_row(scaler.apply(x.row(i)));
  const double gamma = params.gamma.value_or(default_gamma(scaled));

  const std::size_t max_iterations =
      params.max_iterations > 0 ? params.max_iterations : std::max<std::size_t>(10'000'000, 200 * x.rows);
  SmoSolver solver(scaled, y, params.c, params.epsilon, gamma, params.tolerance, max_iterations, params.cache_bytes);
  solver.solve();

  SvrFit fit;
  fit.coefficients = solver.coefficients();
  fit.dual_objective = solver.objective();
  fit.kkt_violation = solver.violation();
  fit.iterations = solver.iterations();

  FeatureMatrix support;
  support.cols = x.cols;
  std::vector<double> coefs;
  for (std::size_t i = 0; i < x.rows; ++i) {
    if (fit.coefficients[i] != 0.0) {
      support.push_row(scaled.row(i));
      coefs.push_back(fit.coefficients[i]);
    }
  }
  fit.model = SvrModel(std::move(scaler), gamma, params.c, params.epsilon, std::move(support), std::move(coefs),
                       -solver.rho());
  return fit;
}

SvrModel fit_svr(const FeatureMatrix& x, std::span<const double> y, const SvrParams& params) {
  return fit_svr_detailed(x, y, params).model;
}

}  // namespace semrel
