#pragma once

// Points on the unit sphere S^{d-1}, point configurations and finite atomic
// (signed) measures. All types are immutable after construction.

#include <Eigen/Core>

#include <cstdint>
#include <span>
#include <vector>

#include "ninput/config.hpp"

namespace ninput {

using Vector = Eigen::VectorXd;
using Matrix = Eigen::MatrixXd;

/// A point on S^{d-1}, d >= 2. The norm is checked to 1e-12 on construction.
class UnitVector {
 public:
  explicit UnitVector(Vector coords);

  /// Normalizes `v`; throws InvalidArgument for a (numerically) zero vector.
  static UnitVector normalized(const Vector& v);
  /// Signed standard basis vector sign * e_{index+1} (index is 0-based).
  static UnitVector basis(int dim, int index, double sign = 1.0);

  int dim() const { return static_cast<int>(coords_.size()); }
  const Vector& coords() const { return coords_; }
  double operator[](int i) const { return coords_[i]; }
  double dot(const UnitVector& other) const { return coords_.dot(other.coords_); }

  UnitVector operator-() const;
  friend bool operator==(const UnitVector& a, const UnitVector& b) {
    return a.coords_ == b.coords_;
  }

 private:
  struct Trusted {};
  UnitVector(Vector coords, Trusted) : coords_(std::move(coords)) {}

  Vector coords_;
};

/// Ordered multiset of N >= 1 points sharing one dimension; repeats allowed.
class PointConfiguration {
 public:
  explicit PointConfiguration(std::vector<UnitVector> points);

  int dim() const { return dim_; }
  std::size_t size() const { return points_.size(); }
  const UnitVector& operator[](std::size_t i) const { return points_[i]; }
  const std::vector<UnitVector>& points() const { return points_; }
  auto begin() const { return points_.begin(); }
  auto end() const { return points_.end(); }

  /// Applies the same orthogonal map to every point.
  PointConfiguration transformed(const Matrix& rotation) const;

 private:
  int dim_;
  std::vector<UnitVector> points_;
};

/// Finite atomic signed measure sum_i w_i delta_{x_i}. Atoms are never
/// merged, so repeated atoms stay separate entries.
class DiscreteMeasure {
 public:
  DiscreteMeasure(std::vector<UnitVector> atoms, std::vector<double> weights);

  static DiscreteMeasure dirac(const UnitVector& x, double weight = 1.0);
  /// Uniform weights 1/N on the points of `config`.
  static DiscreteMeasure empirical(const PointConfiguration& config);

  int dim() const { return dim_; }
  std::size_t size() const { return atoms_.size(); }
  const std::vector<UnitVector>& atoms() const { return atoms_; }
  const std::vector<double>& weights() const { return weights_; }
  const UnitVector& atom(std::size_t i) const { return atoms_[i]; }
  double weight(std::size_t i) const { return weights_[i]; }

  double total_mass() const { return total_mass_; }
  bool is_probability(double tol = kDefaultTolerances.geometric) const;
  bool is_balanced(double tol = kDefaultTolerances.geometric) const;

  /// Drops atoms whose |weight| < threshold.
  DiscreteMeasure pruned(double threshold) const;

 private:
  int dim_;
  std::vector<UnitVector> atoms_;
  std::vector<double> weights_;
  double total_mass_;
};

/// M i.i.d. uniform points (normalized standard Gaussians, mt19937_64).
PointConfiguration sample_sphere(int d, std::size_t count, std::uint64_t seed);

/// Gram matrix G_ij = <x_i, x_j>.
Matrix gram(const PointConfiguration& config);

/// g - <g, x> x.
Vector project_tangent(const UnitVector& x, const Vector& g);

/// (x + v) / |x + v|; throws DegenerateRetraction when |x + v| < 1e-14.
UnitVector retract(const UnitVector& x, const Vector& v);

/// (1 - t) mu + t nu, atoms concatenated.
DiscreteMeasure mix(const DiscreteMeasure& mu, const DiscreteMeasure& nu, double t);

/// a mu + b nu, atoms concatenated.
DiscreteMeasure combine(const DiscreteMeasure& mu, const DiscreteMeasure& nu,
                        double a, double b);

/// Haar-random orthogonal d x d matrix (QR of a Gaussian matrix).
Matrix random_orthogonal(int d, std::uint64_t seed);

}  // namespace ninput
