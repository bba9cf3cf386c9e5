#pragma once

// Particle descent for discrete energies on S^{d-1} and directional
// local-minimum probes in the space of probability measures.

#include <cstdint>
#include <vector>

#include "ninput/kernels.hpp"
#include "ninput/sphere.hpp"

namespace ninput {

enum class GradMode { analytic, finite_difference };

const char* to_string(GradMode m);

struct OptimizerConfig {
  int steps = 1000;
  double step_size = 0.5;     // first trial step of every line search
  std::uint64_t seed = 0;     // random initial configuration
  bool maximize = false;
  GradMode grad_mode = GradMode::analytic;
  double fd_epsilon = 1e-6;   // in [1e-8, 1e-4]
  double stop_tol = 1e-9;     // on the RMS per-particle tangent force

  void validate() const;      // throws InvalidArgument
};

struct OptimizationTrace {
  std::vector<double> energies;   // E before the first step, then after each step
  PointConfiguration final_config;
  bool converged = false;
  int iterations_run = 0;
  double final_gradient_norm = 0.0;
};

/// Tangent gradient of E_K with respect to particle i. Falls back to finite
/// differences (with a warning) where a non-smooth kernel meets coincident points.
Vector energy_gradient(const KernelSpec& k, const PointConfiguration& config, std::size_t i,
                       GradMode mode = GradMode::analytic, double fd_epsilon = 1e-6);

/// All N tangent gradients at once.
std::vector<Vector> energy_gradients(const KernelSpec& k, const PointConfiguration& config,
                                     GradMode mode = GradMode::analytic, double fd_epsilon = 1e-6);

/// Starts from sample_sphere(d, N, cfg.seed).
OptimizationTrace optimize_discrete(const KernelSpec& k, int N, int d, const OptimizerConfig& cfg);

/// Same descent from a given configuration (deterministic, no randomness).
OptimizationTrace optimize_from(const KernelSpec& k, const PointConfiguration& initial,
                                const OptimizerConfig& cfg);

struct MultistartResult {
  std::vector<OptimizationTrace> runs;   // in start order
  std::vector<std::uint64_t> seeds;
  std::size_t best = 0;

  const OptimizationTrace& best_run() const { return runs[best]; }
};

/// `starts` runs with seeds derived from cfg.seed; best-of by final energy.
MultistartResult optimize_multistart(const KernelSpec& k, int N, int d, const OptimizerConfig& cfg,
                                     int starts = 4);

struct DirectionProbe {
  bool holds = false;          // g(t) >= g(0) - tol on [0, t_max]
  double min_gap = 0.0;        // min_t g(t) - g(0)
  double worst_t = 0.0;
  /// min over alpha in (0,1) of I(mu^{n-1}, nu) - alpha I(nu) - (1-alpha) I(mu)
  double alpha_residual = 0.0;
  double best_alpha = 0.0;
};

struct LocalMinReport {
  std::vector<DirectionProbe> directions;
  bool all_hold = true;
};

LocalMinReport local_min_probe(const KernelSpec& k, const DiscreteMeasure& mu,
                               const std::vector<DiscreteMeasure>& directions, double t_max,
                               double tol = 1e-10);

}  // namespace ninput
