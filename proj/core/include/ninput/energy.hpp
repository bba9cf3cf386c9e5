#pragma once

// Discrete and mutual energies, potentials, Monte-Carlo energies under the
// uniform measure, and the mixture polynomial t -> I_K((1-t) mu + t nu).
//
// Exact sums run over every ordered tuple of atoms (with repetition), in
// lexicographic order inside fixed blocks; block sums are combined by a
// pairwise tree, so results do not depend on the thread count.

#include <cstdint>
#include <span>
#include <vector>

#include "ninput/kernels.hpp"
#include "ninput/sphere.hpp"

namespace ninput {

struct EnergyEstimate {
  double value = 0.0;
  double std_error = 0.0;   // 0 for exact computations
  std::int64_t samples_used = 0;

  bool exact() const { return std_error == 0.0; }
};

/// (1/N^n) sum over all N^n ordered n-tuples of K. Exact. n <= 4.
EnergyEstimate discrete_energy(const KernelSpec& k, const PointConfiguration& config);

/// sum over atom tuples of w_1(i_1)...w_n(i_n) K(x_{i_1}, ..., x_{i_n}). Exact. n <= 4.
EnergyEstimate mutual_energy(const KernelSpec& k, std::span<const DiscreteMeasure> measures);
EnergyEstimate mutual_energy(const KernelSpec& k, std::initializer_list<DiscreteMeasure> measures);

/// I_K(mu) = I_K(mu, ..., mu).
EnergyEstimate self_energy(const KernelSpec& k, const DiscreteMeasure& mu);

/// j-fold potential U_K^{mu_1..mu_j}, 1 <= j <= n-1, evaluated at query
/// tuples: `at` is read in consecutive groups of n-j points, one value per group.
std::vector<double> potential(const KernelSpec& k, std::span<const DiscreteMeasure> measures,
                              const PointConfiguration& at);

/// Unbiased estimate of I_K(sigma) on S^{d-1} from `tuples` independent
/// n-tuples of uniform points; std_error = sample sd / sqrt(tuples).
EnergyEstimate mc_energy_uniform(const KernelSpec& k, int d, std::int64_t tuples, std::uint64_t seed);

/// g(t) = sum_k C(n,k) (1-t)^{n-k} t^k c_k with c_k = I_K(mu^{n-k}, nu^k).
class MixturePolynomial {
 public:
  explicit MixturePolynomial(std::vector<double> coefficients);

  int degree() const { return static_cast<int>(coeffs_.size()) - 1; }
  const std::vector<double>& coefficients() const { return coeffs_; }

  double operator()(double t) const { return derivative(t, 0); }
  /// order-th derivative at t (Bernstein difference form).
  double derivative(double t, int order) const;

 private:
  std::vector<double> coeffs_;
};

/// Exact mixed energies of two probability measures.
MixturePolynomial mixture_polynomial(const KernelSpec& k, const DiscreteMeasure& mu,
                                     const DiscreteMeasure& nu);

/// c_k for k = 0..n without the probability precondition (signed inputs allowed).
std::vector<double> mixed_energies(const KernelSpec& k, const DiscreteMeasure& mu,
                                   const DiscreteMeasure& nu);

}  // namespace ninput
