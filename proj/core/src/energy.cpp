#include "ninput/energy.hpp"

#include <array>
#include <cmath>
#include <random>
#include <string>

#include "ninput/config.hpp"
#include "ninput/errors.hpp"
#include "ninput/parallel.hpp"

namespace ninput {
namespace {

constexpr std::size_t kMcBlock = 8192;

void require_exact_arity(const KernelSpec& k) {
  if (k.arity() > kMaxExactArity) {
    throw InvalidArgument("exact energy sums are limited to arity <= " +
                          std::to_string(kMaxExactArity) + " (kernel '" + k.describe() +
                          "' has arity " + std::to_string(k.arity()) + ")");
  }
}

// Sum over all atom tuples whose first index is `first`, lexicographic in the rest.
double tuple_sum_with_first(const KernelSpec& k, std::span<const DiscreteMeasure> measures,
                            std::size_t first) {
  const std::size_t n = measures.size();
  std::array<const Vector*, kMaxArity> args{};
  std::array<std::size_t, kMaxArity> idx{};
  args[0] = &measures[0].atom(first).coords();
  const double w0 = measures[0].weight(first);
  if (n == 1) return w0 * k.eval(KernelArgs(args.data(), 1));
  double acc = 0.0;
  for (;;) {
    double w = w0;
    for (std::size_t m = 1; m < n; ++m) {
      args[m] = &measures[m].atom(idx[m]).coords();
      w *= measures[m].weight(idx[m]);
    }
    if (w != 0.0) acc += w * k.eval(KernelArgs(args.data(), n));
    std::size_t m = n;
    while (--m > 0) {
      if (++idx[m] < measures[m].size()) break;
      idx[m] = 0;
    }
    if (m == 0) return acc;
  }
}

void check_measures(const KernelSpec& k, std::span<const DiscreteMeasure> measures) {
  if (static_cast<int>(measures.size()) != k.arity()) {
    throw InvalidArgument("mutual_energy: kernel '" + k.describe() + "' needs " +
                          std::to_string(k.arity()) + " measures, got " +
                          std::to_string(measures.size()));
  }
  for (const auto& m : measures) {
    if (m.dim() != measures[0].dim()) throw InvalidArgument("mutual_energy: dimension mismatch");
  }
}

double binomial(int n, int k) {
  double r = 1.0;
  for (int i = 1; i <= k; ++i) r = r * (n - k + i) / i;
  return r;
}

}  // namespace

EnergyEstimate mutual_energy(const KernelSpec& k, std::span<const DiscreteMeasure> measures) {
  check_measures(k, measures);
  require_exact_arity(k);
  const double value = deterministic_sum(measures[0].size(), 1, [&](std::size_t i) {
    return tuple_sum_with_first(k, measures, i);
  });
  std::int64_t tuples = 1;
  for (const auto& m : measures) tuples *= static_cast<std::int64_t>(m.size());
  return {value, 0.0, tuples};
}

EnergyEstimate mutual_energy(const KernelSpec& k, std::initializer_list<DiscreteMeasure> measures) {
  return mutual_energy(k, std::span<const DiscreteMeasure>(measures.begin(), measures.size()));
}

EnergyEstimate self_energy(const KernelSpec& k, const DiscreteMeasure& mu) {
  const std::vector<DiscreteMeasure> copies(static_cast<std::size_t>(k.arity()), mu);
  return mutual_energy(k, copies);
}

EnergyEstimate discrete_energy(const KernelSpec& k, const PointConfiguration& config) {
  require_exact_arity(k);
  const std::size_t n = static_cast<std::size_t>(k.arity());
  const std::size_t count = config.size();
  const double raw = deterministic_sum(count, 1, [&](std::size_t first) {
    std::array<const Vector*, kMaxArity> args{};
    std::array<std::size_t, kMaxArity> idx{};
    args[0] = &config[first].coords();
    if (n == 1) return k.eval(KernelArgs(args.data(), 1));
    double acc = 0.0;
    for (;;) {
      for (std::size_t m = 1; m < n; ++m) args[m] = &config[idx[m]].coords();
      acc += k.eval(KernelArgs(args.data(), n));
      std::size_t m = n;
      while (--m > 0) {
        if (++idx[m] < count) break;
        idx[m] = 0;
      }
      if (m == 0) return acc;
    }
  });
  const double tuples = std::pow(static_cast<double>(count), static_cast<double>(n));
  return {raw / tuples, 0.0, static_cast<std::int64_t>(tuples)};
}

std::vector<double> potential(const KernelSpec& k, std::span<const DiscreteMeasure> measures,
                              const PointConfiguration& at) {
  const int j = static_cast<int>(measures.size());
  if (j < 1 || j > k.arity() - 1) {
    throw InvalidArgument("potential: order j must satisfy 1 <= j <= n-1");
  }
  for (const auto& m : measures) {
    if (m.dim() != at.dim()) throw InvalidArgument("potential: dimension mismatch");
  }
  const std::size_t group = static_cast<std::size_t>(k.arity() - j);
  if (at.size() % group != 0) {
    throw InvalidArgument("potential: query points must come in groups of " + std::to_string(group));
  }
  // Integrate the query slots against Dirac masses: U(x) = I_K(mu_1..mu_j, delta_x...).
  const std::size_t queries = at.size() / group;
  std::vector<double> out(queries);
  for (std::size_t q = 0; q < queries; ++q) {
    std::vector<DiscreteMeasure> all(measures.begin(), measures.end());
    for (std::size_t s = 0; s < group; ++s) all.push_back(DiscreteMeasure::dirac(at[q * group + s]));
    out[q] = mutual_energy(k, all).value;
  }
  return out;
}

EnergyEstimate mc_energy_uniform(const KernelSpec& k, int d, std::int64_t tuples, std::uint64_t seed) {
  if (tuples < 100) throw InvalidArgument("mc_energy_uniform: need at least 100 tuples");
  if (d < 2) throw InvalidArgument("mc_energy_uniform: d must be at least 2");
  const std::size_t n = static_cast<std::size_t>(k.arity());
  const std::size_t total = static_cast<std::size_t>(tuples);
  const std::size_t blocks = (total + kMcBlock - 1) / kMcBlock;
  std::vector<MomentAccumulator> parts(blocks);
  parallel_for(blocks, [&](std::size_t b) {
    std::mt19937_64 rng(derive_seed(seed, b));
    std::normal_distribution<double> normal;
    std::vector<Vector> pts(n, Vector(d));
    std::array<const Vector*, kMaxArity> args{};
    for (std::size_t i = 0; i < n; ++i) args[i] = &pts[i];
    const std::size_t lo = b * kMcBlock;
    const std::size_t hi = std::min(total, lo + kMcBlock);
    MomentAccumulator acc;
    for (std::size_t s = lo; s < hi; ++s) {
      for (auto& p : pts) {
        double norm2 = 0.0;
        do {
          for (int c = 0; c < d; ++c) p[c] = normal(rng);
          norm2 = p.squaredNorm();
        } while (norm2 == 0.0);
        p /= std::sqrt(norm2);
      }
      acc.add(k.eval(KernelArgs(args.data(), n)));
    }
    parts[b] = acc;
  });
  const MomentAccumulator all = pairwise_merge(parts);
  return {all.mean, std::sqrt(all.variance() / all.count), tuples};
}

MixturePolynomial::MixturePolynomial(std::vector<double> coefficients) : coeffs_(std::move(coefficients)) {
  if (coeffs_.empty()) throw InvalidArgument("MixturePolynomial: no coefficients");
}

double MixturePolynomial::derivative(double t, int order) const {
  const int n = degree();
  if (order > n) return 0.0;
  // order-th forward differences of the Bernstein coefficients
  std::vector<double> diff = coeffs_;
  for (int r = 0; r < order; ++r) {
    for (std::size_t i = 0; i + 1 < diff.size(); ++i) diff[i] = diff[i + 1] - diff[i];
    diff.pop_back();
  }
  const int m = n - order;
  double value = 0.0;
  for (int i = 0; i <= m; ++i) {
    value += binomial(m, i) * std::pow(1.0 - t, m - i) * std::pow(t, i) * diff[i];
  }
  double factor = 1.0;
  for (int r = 0; r < order; ++r) factor *= n - r;
  return factor * value;
}

std::vector<double> mixed_energies(const KernelSpec& k, const DiscreteMeasure& mu,
                                   const DiscreteMeasure& nu) {
  if (mu.dim() != nu.dim()) throw InvalidArgument("mixture_polynomial: dimension mismatch");
  const int n = k.arity();
  std::vector<double> c(static_cast<std::size_t>(n + 1));
  for (int j = 0; j <= n; ++j) {
    std::vector<DiscreteMeasure> args;
    for (int i = 0; i < n - j; ++i) args.push_back(mu);
    for (int i = 0; i < j; ++i) args.push_back(nu);
    c[static_cast<std::size_t>(j)] = mutual_energy(k, args).value;
  }
  return c;
}

MixturePolynomial mixture_polynomial(const KernelSpec& k, const DiscreteMeasure& mu,
                                     const DiscreteMeasure& nu) {
  if (!mu.is_probability() || !nu.is_probability()) {
    throw InvalidArgument("mixture_polynomial: both inputs must be probability measures");
  }
  return MixturePolynomial(mixed_energies(k, mu, nu));
}

}  // namespace ninput
