#pragma once

#include <optional>
#include <string>
#include <utility>

#include <Eigen/Core>

#include "pisynth/geometry.h"

namespace pisynth {

/// Lower bound on the ε-covering number of a set of the given volume in the
/// max norm: (1/ε)^n · vol / vol(B_{1,∞}(0)), with vol(B_{1,∞}(0)) = 2^n.
double CoveringLowerBound(double volume, int n, double epsilon);

/// Sample count for a deterministic τ-grid over the domain: (1/τ)^n · vol(X).
double GridSampleBound(double volume, int n, double tau);

struct BoundQuery {
  /// Failure probability, in (0, 1].
  double delta{0.05};
  double volume{0.0};
  int n{0};
  /// τ for the resolution forms, ε for the covering-net form.
  double resolution{0.0};

  void Validate() const;
};

enum class BoundForm {
  /// The ε-net sampling bound exactly as printed:
  /// (log(1/δ) + log vol + log ε^n) / log(1 − ε^n / vol).
  kCoveringAsPrinted,
  /// The resolution bound exactly as printed:
  /// (log(1/δ) + log vol + n log(1/τ)) / log(1 − τ^n / vol).
  kResolutionAsPrinted,
  /// Union-bound form with a positive denominator:
  /// (log(1/δ) + log vol + n log(1/τ)) / −log(1 − τ^n / vol), rounded up.
  kCanonical,
};

std::string ToString(BoundForm f);

struct SampleBound {
  double value{0.0};
  /// Unrounded value (equals `value` for the printed forms).
  double raw{0.0};
  /// Set when a printed form evaluates to a nonpositive sample count.
  std::optional<std::string> warning;
};

/// Throws std::invalid_argument if the query is invalid or the resolution
/// cell carries probability mass ≥ 1 (τ^n ≥ vol).
SampleBound UniformSampleBound(const BoundQuery& query, BoundForm form);

/// Polytope C-set S = {x : h_i·x ≤ 1 for all rows h_i}.
class PolytopeCSet {
 public:
  /// Throws std::invalid_argument unless the rows positively span R^n,
  /// which is exactly the condition for S to be bounded.
  explicit PolytopeCSet(Eigen::MatrixXd rows);

  /// The unit max-norm ball (rows ±e_i).
  static PolytopeCSet UnitMaxBall(int n);
  /// The unit 1-norm ball (rows are all sign vectors).
  static PolytopeCSet UnitOneBall(int n);

  int dim() const { return static_cast<int>(rows_.cols()); }
  const Eigen::MatrixXd& rows() const { return rows_; }

  /// The set scaled by c > 0 (rows divided by c).
  PolytopeCSet Scaled(double c) const;

 private:
  Eigen::MatrixXd rows_;
};

/// Minkowski function ψ_S(x) = inf{λ ≥ 0 : x ∈ λS} = max(0, max_i h_i·x).
double Psi(const PolytopeCSet& s, const Vector& x);

/// ū = max over ‖u‖∞ ≤ 1 of ψ_S(u) = max_i ‖h_i‖₁.
double UBar(const PolytopeCSet& s);

/// Bound on ψ_S over the successor box of any ball B_r(x) ⊆ S when S is
/// λ-contractive: λ + L·r·ū.
double ContractionBound(const PolytopeCSet& s, double lambda,
                        double lipschitz, double r);

/// Largest r for which the contraction bound stays ≤ ρ: (ρ − λ)/(L·ū).
double MaxRadiusForLevel(const PolytopeCSet& s, double lambda,
                         double lipschitz, double rho);

/// Admissible levels ρ ∈ [λ + L·ū·r, 1 − r·ū] for which a cover of ρS by
/// radius-r balls is invariant; absent when the interval is empty.
std::optional<std::pair<double, double>> InvarianceLevelWindow(
    const PolytopeCSet& s, double lambda, double lipschitz, double r);

/// Nonnegative least squares min ‖A w − b‖₂ s.t. w ≥ 0 (Lawson-Hanson).
Eigen::VectorXd SolveNnls(const Eigen::MatrixXd& a, const Eigen::VectorXd& b);

}  // namespace pisynth
