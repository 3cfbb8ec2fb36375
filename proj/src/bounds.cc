#include "pisynth/bounds.h"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <vector>

#include <Eigen/Dense>

namespace pisynth {

double CoveringLowerBound(double volume, int n, double epsilon) {
  if (!(volume > 0.0) || n < 1 || !(epsilon > 0.0)) {
    throw std::invalid_argument("CoveringLowerBound: inputs must be positive");
  }
  return std::pow(1.0 / epsilon, n) * volume / std::pow(2.0, n);
}

double GridSampleBound(double volume, int n, double tau) {
  if (!(volume > 0.0) || n < 1 || !(tau > 0.0)) {
    throw std::invalid_argument("GridSampleBound: inputs must be positive");
  }
  return std::pow(1.0 / tau, n) * volume;
}

void BoundQuery::Validate() const {
  if (!(delta > 0.0 && delta <= 1.0)) {
    throw std::invalid_argument("delta must lie in (0, 1]");
  }
  if (!(volume > 0.0)) throw std::invalid_argument("volume must be > 0");
  if (n < 1) throw std::invalid_argument("dimension must be >= 1");
  if (!(resolution > 0.0)) throw std::invalid_argument("tau must be > 0");
}

std::string ToString(BoundForm f) {
  switch (f) {
    case BoundForm::kCoveringAsPrinted:
      return "covering_as_printed";
    case BoundForm::kResolutionAsPrinted:
      return "resolution_as_printed";
    case BoundForm::kCanonical:
      return "canonical";
  }
  return "?";
}

SampleBound UniformSampleBound(const BoundQuery& q, BoundForm form) {
  q.Validate();
  // The ε/2-ball has max-norm volume (2·ε/2)^n = ε^n, the same mass as the
  // τ-cell of the resolution forms.
  const double cell = std::pow(q.resolution, q.n);
  const double mass = cell / q.volume;
  if (!(mass < 1.0)) {
    throw std::invalid_argument(
        "resolution cell volume must be smaller than the domain volume");
  }
  const double log_miss = std::log1p(-mass);  // log(1 − p) < 0
  const double common = std::log(1.0 / q.delta) + std::log(q.volume);
  SampleBound out;
  switch (form) {
    case BoundForm::kCoveringAsPrinted:
      out.raw = (common + std::log(cell)) / log_miss;
      out.value = out.raw;
      break;
    case BoundForm::kResolutionAsPrinted:
      out.raw = (common + q.n * std::log(1.0 / q.resolution)) / log_miss;
      out.value = out.raw;
      break;
    case BoundForm::kCanonical:
      out.raw = (common + q.n * std::log(1.0 / q.resolution)) / -log_miss;
      out.value = std::ceil(out.raw);
      break;
  }
  if (!(out.value > 0.0)) {
    out.warning = ToString(form) +
                  " evaluates to a nonpositive sample count (log(1 - p) < 0 "
                  "in the denominator); use the canonical form";
  }
  return out;
}

Eigen::VectorXd SolveNnls(const Eigen::MatrixXd& a, const Eigen::VectorXd& b) {
  const int m = static_cast<int>(a.cols());
  const double tol = 1e-12 * std::max(1.0, a.cwiseAbs().maxCoeff());
  Eigen::VectorXd x = Eigen::VectorXd::Zero(m);
  std::vector<bool> passive(m, false);
  for (int outer = 0; outer < 3 * m + 10; ++outer) {
    const Eigen::VectorXd grad = a.transpose() * (b - a * x);
    int best = -1;
    for (int j = 0; j < m; ++j) {
      if (!passive[j] && grad[j] > tol && (best < 0 || grad[j] > grad[best])) {
        best = j;
      }
    }
    if (best < 0) break;
    passive[best] = true;
    while (true) {
      std::vector<int> cols;
      for (int j = 0; j < m; ++j) {
        if (passive[j]) cols.push_back(j);
      }
      Eigen::MatrixXd sub(a.rows(), cols.size());
      for (std::size_t k = 0; k < cols.size(); ++k) sub.col(k) = a.col(cols[k]);
      const Eigen::VectorXd z = sub.colPivHouseholderQr().solve(b);
      Eigen::VectorXd s = Eigen::VectorXd::Zero(m);
      for (std::size_t k = 0; k < cols.size(); ++k) s[cols[k]] = z[k];
      bool feasible = true;
      double alpha = 1.0;
      for (int j : cols) {
        if (s[j] <= 0.0) {
          feasible = false;
          alpha = std::min(alpha, x[j] / (x[j] - s[j]));
        }
      }
      if (feasible) {
        x = s;
        break;
      }
      x += alpha * (s - x);
      for (int j : cols) {
        if (x[j] <= tol) {
          passive[j] = false;
          x[j] = 0.0;
        }
      }
    }
  }
  return x;
}

PolytopeCSet::PolytopeCSet(Eigen::MatrixXd rows) : rows_(std::move(rows)) {
  const int n = dim();
  if (n < 1 || rows_.rows() < n + 1) {
    throw std::invalid_argument("a C-set needs at least n + 1 half-spaces");
  }
  // Positive spanning: every ±e_j must be a nonnegative combination of rows.
  const Eigen::MatrixXd ht = rows_.transpose();
  for (int j = 0; j < n; ++j) {
    for (double sign : {1.0, -1.0}) {
      Eigen::VectorXd target = Eigen::VectorXd::Zero(n);
      target[j] = sign;
      const Eigen::VectorXd w = SolveNnls(ht, target);
      if ((ht * w - target).norm() > 1e-9) {
        throw std::invalid_argument(
            "half-space rows do not positively span R^n; set is unbounded");
      }
    }
  }
}

PolytopeCSet PolytopeCSet::UnitMaxBall(int n) {
  Eigen::MatrixXd rows(2 * n, n);
  rows << Eigen::MatrixXd::Identity(n, n), -Eigen::MatrixXd::Identity(n, n);
  return PolytopeCSet(rows);
}

PolytopeCSet PolytopeCSet::UnitOneBall(int n) {
  const int count = 1 << n;
  Eigen::MatrixXd rows(count, n);
  for (int k = 0; k < count; ++k) {
    for (int d = 0; d < n; ++d) rows(k, d) = (k >> d) & 1 ? 1.0 : -1.0;
  }
  return PolytopeCSet(rows);
}

PolytopeCSet PolytopeCSet::Scaled(double c) const {
  if (!(c > 0.0)) throw std::invalid_argument("scale must be > 0");
  return PolytopeCSet(rows_ / c);
}

double Psi(const PolytopeCSet& s, const Vector& x) {
  if (x.size() != s.dim()) throw std::invalid_argument("Psi: dimension mismatch");
  return std::max(0.0, (s.rows() * x).maxCoeff());
}

double UBar(const PolytopeCSet& s) {
  return s.rows().cwiseAbs().rowwise().sum().maxCoeff();
}

double ContractionBound(const PolytopeCSet& s, double lambda,
                        double lipschitz, double r) {
  return lambda + lipschitz * r * UBar(s);
}

double MaxRadiusForLevel(const PolytopeCSet& s, double lambda,
                         double lipschitz, double rho) {
  return (rho - lambda) / (lipschitz * UBar(s));
}

std::optional<std::pair<double, double>> InvarianceLevelWindow(
    const PolytopeCSet& s, double lambda, double lipschitz, double r) {
  const double u = UBar(s);
  const double lo = lambda + lipschitz * u * r;
  const double hi = 1.0 - r * u;
  if (lo > hi) return std::nullopt;
  return std::make_pair(lo, hi);
}

}  // namespace pisynth
