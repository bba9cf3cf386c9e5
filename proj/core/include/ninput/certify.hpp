#pragma once

// Randomized (conditional) positive-definiteness tests, convexity probes of
// the energy along mixtures, potential-constancy checks and an inequality
// battery for mutual energies.
//
// A pass is statistical only. A failure always carries an explicit witness
// (pins plus a signed measure) whose energy has been recomputed through
// mutual_energy.

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "ninput/config.hpp"
#include "ninput/energy.hpp"
#include "ninput/kernels.hpp"
#include "ninput/sphere.hpp"

namespace ninput {

enum class PDMode { pd, conditional };
enum class PDOutcome { pass_statistical, fail };

const char* to_string(PDMode m);
const char* to_string(PDOutcome o);

struct PDWitness {
  std::vector<UnitVector> pins;   // empty for 2-input kernels
  DiscreteMeasure measure;
  double energy;                  // I_K(delta_pins..., measure, measure) < 0
};

struct PDVerdict {
  PDMode mode = PDMode::pd;
  PDOutcome outcome = PDOutcome::pass_statistical;
  std::optional<PDWitness> witness;
  int trials_run = 0;
  double min_eigenvalue_seen = 0.0;   // relative to max |M_ij| of its matrix

  bool passed() const { return outcome == PDOutcome::pass_statistical; }
};

/// One matrix: M_ij = G(x_i, x_j) on the given points. In conditional mode
/// the smallest eigenvalue of M restricted to sum-zero coefficient vectors.
/// Fails when that eigenvalue is below -tol * max|M_ij|.
PDVerdict pd_test_points(const KernelSpec& g, const PointConfiguration& points, bool conditional,
                         double tol = kDefaultTolerances.eigenvalue);

struct PDTestOptions {
  bool conditional = false;
  int trials = 25;
  int set_size = 40;
  std::uint64_t seed = 0;
  double tol = kDefaultTolerances.eigenvalue;
  /// Points placed in every sampled set (e.g. pins and their antipodes).
  std::vector<UnitVector> include;
};

/// Random point sets of set_size points each; the first set also contains
/// the signed basis vectors.
PDVerdict pd_test_2input(const KernelSpec& g, int d, const PDTestOptions& opt);

struct NPDTestOptions {
  bool conditional = false;
  int pin_trials = 4;      // the canonical pin tuple plus pin_trials-1 random ones
  int inner_trials = 25;   // point sets per pin tuple
  int set_size = 40;
  std::uint64_t seed = 0;
  double tol = kDefaultTolerances.eigenvalue;
};

/// n >= 3: pins n-2 slots and tests each resulting 2-input kernel.
PDVerdict npd_test(const KernelSpec& k, int d, const NPDTestOptions& opt);

/// Largest |c_i| is normalized to 1 and atoms with |c_i| < truncation are
/// dropped; in conditional mode the residual mass goes to the largest atom
/// so the witness stays balanced.
DiscreteMeasure witness_measure(const PointConfiguration& points, const Vector& coefficients,
                                bool balanced, double truncation = kDefaultTolerances.witness_truncation);

struct ConvexityReport {
  MixturePolynomial g{std::vector<double>{0.0}};
  double g_prime_0 = 0.0;
  double g_double_prime_0 = 0.0;
  /// From the 2-input energy of U_K^{mu^{n-2}} along the same mixture.
  double h_prime_0 = 0.0;
  double h_double_prime_0 = 0.0;
  bool convex_on_unit_interval = true;   // g'' >= -1e-10 on a 1000-point grid
  double chord_violation = 0.0;          // max_t g(t) - ((1-t) g(0) + t g(1))
  std::optional<double> violation_t;     // where the chord test fails, if it does
};

ConvexityReport convexity_probe(const KernelSpec& k, const DiscreteMeasure& mu, const DiscreteMeasure& nu);

struct ConstancyOptions {
  /// Exact evaluation when |mu|^{n-1} * points stays below this many kernel
  /// evaluations; otherwise (n-1)-tuples are resampled from mu.
  double exact_budget = 2e7;
  /// Resampled tuples per test point; 0 means |mu|.
  std::int64_t samples = 0;
  std::uint64_t seed = 0;
  /// Pass also when max_deviation <= stderr_multiple * stderr.
  double stderr_multiple = 0.0;
};

struct ConstancyResult {
  double max_deviation = 0.0;
  double mean = 0.0;
  double std_error = 0.0;   // 0 when exact
  double tol_used = 0.0;
  bool exact = true;
  bool pass = false;
};

/// U_K^{mu^{n-1}} at each test point; pass iff max |U - mean| <= tolerance.
ConstancyResult potential_constancy_check(const KernelSpec& k, const DiscreteMeasure& mu,
                                          const PointConfiguration& test_points, double tol,
                                          const ConstancyOptions& opt = {});

struct InequalityResidual {
  std::string name;
  double worst_residual = 0.0;   // max over trials of LHS - RHS; <= 0 means it held
  int evaluated = 0;
  bool asserted = false;         // implied by the kernel's known definiteness
  bool expected_violation = false;
};

struct InequalityReport {
  std::vector<InequalityResidual> entries;
  const InequalityResidual& at(const std::string& name) const;
};

/// Residuals for: am, gm, lower_bound, max_on_diagonal, mu_n_minus_1,
/// convex_n_minus_1, on random probability measures with 1 to 4 atoms.
InequalityReport inequality_suite(const KernelSpec& k, int d, int trials, std::uint64_t seed);

/// Probability measure with `atoms` uniform atoms and random positive weights.
DiscreteMeasure random_probability_measure(int d, int atoms, std::uint64_t seed);

}  // namespace ninput
