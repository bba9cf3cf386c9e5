#include "ninput/sphere.hpp"

#include <Eigen/QR>

#include <cmath>
#include <random>
#include <string>

#include "ninput/errors.hpp"

namespace ninput {
namespace {

void require_same_dim(int a, int b, const char* what) {
  if (a != b) {
    throw InvalidArgument(std::string(what) + ": dimension mismatch (" +
                          std::to_string(a) + " vs " + std::to_string(b) + ")");
  }
}

}  // namespace

UnitVector::UnitVector(Vector coords) : coords_(std::move(coords)) {
  if (coords_.size() < 2) {
    throw InvalidArgument("UnitVector: dimension must be at least 2");
  }
  const double norm = coords_.norm();
  if (!std::isfinite(norm) || std::abs(norm - 1.0) > kDefaultTolerances.geometric) {
    throw InvalidArgument("UnitVector: norm " + std::to_string(norm) + " is not 1");
  }
}

UnitVector UnitVector::normalized(const Vector& v) {
  if (v.size() < 2) throw InvalidArgument("UnitVector: dimension must be at least 2");
  const double norm = v.norm();
  if (!(norm > 0.0) || !std::isfinite(norm)) {
    throw InvalidArgument("UnitVector: cannot normalize a zero or non-finite vector");
  }
  return UnitVector(v / norm, Trusted{});
}

UnitVector UnitVector::basis(int dim, int index, double sign) {
  if (dim < 2 || index < 0 || index >= dim) {
    throw InvalidArgument("UnitVector::basis: index out of range");
  }
  Vector e = Vector::Zero(dim);
  e[index] = sign < 0 ? -1.0 : 1.0;
  return UnitVector(std::move(e), Trusted{});
}

UnitVector UnitVector::operator-() const { return UnitVector(-coords_, Trusted{}); }

PointConfiguration::PointConfiguration(std::vector<UnitVector> points)
    : dim_(0), points_(std::move(points)) {
  if (points_.empty()) throw InvalidArgument("PointConfiguration: needs at least one point");
  dim_ = points_.front().dim();
  for (const auto& p : points_) require_same_dim(dim_, p.dim(), "PointConfiguration");
}

PointConfiguration PointConfiguration::transformed(const Matrix& rotation) const {
  std::vector<UnitVector> out;
  out.reserve(points_.size());
  for (const auto& p : points_) out.push_back(UnitVector::normalized(rotation * p.coords()));
  return PointConfiguration(std::move(out));
}

DiscreteMeasure::DiscreteMeasure(std::vector<UnitVector> atoms, std::vector<double> weights)
    : dim_(0), atoms_(std::move(atoms)), weights_(std::move(weights)), total_mass_(0.0) {
  if (atoms_.empty()) throw InvalidArgument("DiscreteMeasure: needs at least one atom");
  if (atoms_.size() != weights_.size()) {
    throw InvalidArgument("DiscreteMeasure: atoms and weights differ in length");
  }
  dim_ = atoms_.front().dim();
  for (const auto& a : atoms_) require_same_dim(dim_, a.dim(), "DiscreteMeasure");
  for (double w : weights_) {
    if (!std::isfinite(w)) throw InvalidArgument("DiscreteMeasure: non-finite weight");
    total_mass_ += w;
  }
}

DiscreteMeasure DiscreteMeasure::dirac(const UnitVector& x, double weight) {
  return DiscreteMeasure({x}, {weight});
}

DiscreteMeasure DiscreteMeasure::empirical(const PointConfiguration& config) {
  const double w = 1.0 / static_cast<double>(config.size());
  return DiscreteMeasure(config.points(), std::vector<double>(config.size(), w));
}

bool DiscreteMeasure::is_probability(double tol) const {
  for (double w : weights_) {
    if (w < 0.0) return false;
  }
  return std::abs(total_mass_ - 1.0) <= tol;
}

bool DiscreteMeasure::is_balanced(double tol) const { return std::abs(total_mass_) <= tol; }

DiscreteMeasure DiscreteMeasure::pruned(double threshold) const {
  std::vector<UnitVector> atoms;
  std::vector<double> weights;
  for (std::size_t i = 0; i < atoms_.size(); ++i) {
    if (std::abs(weights_[i]) >= threshold) {
      atoms.push_back(atoms_[i]);
      weights.push_back(weights_[i]);
    }
  }
  if (atoms.empty()) {
    // Keep one zero-weight atom so the measure stays well formed.
    return DiscreteMeasure({atoms_.front()}, {0.0});
  }
  return DiscreteMeasure(std::move(atoms), std::move(weights));
}

PointConfiguration sample_sphere(int d, std::size_t count, std::uint64_t seed) {
  if (d < 2) throw InvalidArgument("sample_sphere: d must be at least 2");
  if (count < 1) throw InvalidArgument("sample_sphere: need at least one point");
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> normal;
  std::vector<UnitVector> points;
  points.reserve(count);
  Vector g(d);
  while (points.size() < count) {
    for (int k = 0; k < d; ++k) g[k] = normal(rng);
    if (g.squaredNorm() == 0.0) continue;
    points.push_back(UnitVector::normalized(g));
  }
  return PointConfiguration(std::move(points));
}

Matrix gram(const PointConfiguration& config) {
  const auto n = static_cast<Eigen::Index>(config.size());
  Matrix g(n, n);
  for (Eigen::Index i = 0; i < n; ++i) {
    g(i, i) = config[i].coords().squaredNorm();
    for (Eigen::Index j = i + 1; j < n; ++j) {
      g(i, j) = g(j, i) = config[i].dot(config[j]);
    }
  }
  return g;
}

Vector project_tangent(const UnitVector& x, const Vector& g) {
  require_same_dim(x.dim(), static_cast<int>(g.size()), "project_tangent");
  return g - g.dot(x.coords()) * x.coords();
}

UnitVector retract(const UnitVector& x, const Vector& v) {
  require_same_dim(x.dim(), static_cast<int>(v.size()), "retract");
  const Vector y = x.coords() + v;
  if (y.norm() < 1e-14) throw DegenerateRetraction("retract: x + v vanishes");
  return UnitVector::normalized(y);
}

DiscreteMeasure combine(const DiscreteMeasure& mu, const DiscreteMeasure& nu, double a,
                        double b) {
  require_same_dim(mu.dim(), nu.dim(), "combine");
  std::vector<UnitVector> atoms = mu.atoms();
  atoms.insert(atoms.end(), nu.atoms().begin(), nu.atoms().end());
  std::vector<double> weights;
  weights.reserve(atoms.size());
  for (double w : mu.weights()) weights.push_back(a * w);
  for (double w : nu.weights()) weights.push_back(b * w);
  return DiscreteMeasure(std::move(atoms), std::move(weights));
}

DiscreteMeasure mix(const DiscreteMeasure& mu, const DiscreteMeasure& nu, double t) {
  require_same_dim(mu.dim(), nu.dim(), "mix");
  if ((t < 0.0 || t > 1.0) && mu.is_probability() && nu.is_probability()) {
    throw InvalidArgument("mix: t must lie in [0, 1] for probability measures");
  }
  return combine(mu, nu, 1.0 - t, t);
}

Matrix random_orthogonal(int d, std::uint64_t seed) {
  if (d < 1) throw InvalidArgument("random_orthogonal: d must be positive");
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> normal;
  Matrix a(d, d);
  for (int j = 0; j < d; ++j)
    for (int i = 0; i < d; ++i) a(i, j) = normal(rng);
  Eigen::HouseholderQR<Matrix> qr(a);
  Matrix q = qr.householderQ();
  // Sign fix makes the distribution Haar.
  const Matrix r = qr.matrixQR().triangularView<Eigen::Upper>();
  for (int j = 0; j < d; ++j) {
    if (r(j, j) < 0) q.col(j) = -q.col(j);
  }
  return q;
}

}  // namespace ninput
