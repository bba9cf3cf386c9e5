#include "ninput/optimize.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <optional>
#include <string>

#include "ninput/config.hpp"
#include "ninput/energy.hpp"
#include "ninput/errors.hpp"
#include "ninput/log.hpp"
#include "ninput/parallel.hpp"

namespace ninput {
namespace {

constexpr double kArmijo = 1e-4;
constexpr double kBacktrack = 0.5;
constexpr int kMaxBacktracks = 50;

void check_arity(const KernelSpec& k) {
  if (k.arity() > kMaxExactArity) {
    throw InvalidArgument("optimizer: arity above " + std::to_string(kMaxExactArity) + " is not supported");
  }
}

// Sum of K over the tuples with first index `first`, coordinates taken from `pts`.
double first_slot_sum(const KernelSpec& k, const std::vector<const Vector*>& pts, std::size_t first) {
  const std::size_t n = static_cast<std::size_t>(k.arity());
  const std::size_t count = pts.size();
  std::array<const Vector*, kMaxArity> args{};
  std::array<std::size_t, kMaxArity> idx{};
  args[0] = pts[first];
  double acc = 0.0;
  for (;;) {
    for (std::size_t m = 1; m < n; ++m) args[m] = pts[idx[m]];
    acc += k.eval(KernelArgs(args.data(), n));
    std::size_t m = n;
    while (--m > 0) {
      if (++idx[m] < count) break;
      idx[m] = 0;
    }
    if (m == 0) return acc;
  }
}

// Ambient energy (1/N^n) sum over all tuples, for raw (possibly off-sphere) points.
double raw_energy(const KernelSpec& k, const std::vector<const Vector*>& pts) {
  double acc = 0.0;
  for (std::size_t i = 0; i < pts.size(); ++i) acc += first_slot_sum(k, pts, i);
  return acc / std::pow(static_cast<double>(pts.size()), k.arity());
}

Vector fd_gradient(const KernelSpec& k, const PointConfiguration& config, std::size_t i, double eps) {
  std::vector<const Vector*> pts;
  for (const auto& p : config) pts.push_back(&p.coords());
  Vector probe = config[i].coords();
  pts[i] = &probe;
  Vector g(config.dim());
  for (int c = 0; c < config.dim(); ++c) {
    const double orig = probe[c];
    probe[c] = orig + eps;
    const double up = raw_energy(k, pts);
    probe[c] = orig - eps;
    const double down = raw_energy(k, pts);
    probe[c] = orig;
    g[c] = (up - down) / (2.0 * eps);
  }
  return project_tangent(config[i], g);
}

bool has_coincident_partner(const PointConfiguration& config, std::size_t i) {
  for (std::size_t j = 0; j < config.size(); ++j) {
    if (j != i && (config[j].coords() - config[i].coords()).norm() < kDefaultTolerances.geometric) {
      return true;
    }
  }
  return false;
}

Vector analytic_gradient(const KernelSpec& k, const PointConfiguration& config, std::size_t i) {
  // By symmetry every slot contributes the same total, so
  // dE/dx_i = (n / N^n) sum over tuples (i, j_2, ..., j_n) of grad_0 K.
  const std::size_t n = static_cast<std::size_t>(k.arity());
  const std::size_t count = config.size();
  const double scale = static_cast<double>(n) / std::pow(static_cast<double>(count), static_cast<double>(n));
  Vector g = Vector::Zero(config.dim());
  std::array<const Vector*, kMaxArity> args{};
  std::array<std::size_t, kMaxArity> idx{};
  args[0] = &config[i].coords();
  for (;;) {
    for (std::size_t m = 1; m < n; ++m) args[m] = &config[idx[m]].coords();
    k.add_gradient(KernelArgs(args.data(), n), 0, scale, g);
    std::size_t m = n;
    while (--m > 0) {
      if (++idx[m] < count) break;
      idx[m] = 0;
    }
    if (m == 0) break;
  }
  return project_tangent(config[i], g);
}

Vector gradient_impl(const KernelSpec& k, const PointConfiguration& config, std::size_t i,
                     GradMode mode, double eps) {
  if (mode == GradMode::analytic && !k.traits().smooth && has_coincident_partner(config, i)) {
    warn("energy_gradient: kernel '" + k.describe() +
         "' is not differentiable at coincident points; using finite differences");
    mode = GradMode::finite_difference;
  }
  return mode == GradMode::analytic ? analytic_gradient(k, config, i) : fd_gradient(k, config, i, eps);
}

double rms_force(const std::vector<Vector>& grads) {
  double s = 0.0;
  for (const auto& g : grads) s += g.squaredNorm();
  const double n = static_cast<double>(grads.size());
  return std::sqrt(s / n) * n;
}

}  // namespace

const char* to_string(GradMode m) {
  return m == GradMode::analytic ? "analytic" : "finite_difference";
}

void OptimizerConfig::validate() const {
  if (steps < 0) throw InvalidArgument("OptimizerConfig: steps must be nonnegative");
  if (!(step_size > 0.0)) throw InvalidArgument("OptimizerConfig: step_size must be positive");
  if (grad_mode == GradMode::finite_difference && !(fd_epsilon >= 1e-8 && fd_epsilon <= 1e-4)) {
    throw InvalidArgument("OptimizerConfig: fd_epsilon must lie in [1e-8, 1e-4]");
  }
  if (!(stop_tol >= 0.0)) throw InvalidArgument("OptimizerConfig: stop_tol must be nonnegative");
}

Vector energy_gradient(const KernelSpec& k, const PointConfiguration& config, std::size_t i,
                       GradMode mode, double fd_epsilon) {
  check_arity(k);
  if (i >= config.size()) throw InvalidArgument("energy_gradient: particle index out of range");
  return gradient_impl(k, config, i, mode, fd_epsilon);
}

std::vector<Vector> energy_gradients(const KernelSpec& k, const PointConfiguration& config,
                                     GradMode mode, double fd_epsilon) {
  check_arity(k);
  std::vector<Vector> out(config.size());
  parallel_for(config.size(), [&](std::size_t i) { out[i] = gradient_impl(k, config, i, mode, fd_epsilon); });
  return out;
}

OptimizationTrace optimize_from(const KernelSpec& k, const PointConfiguration& initial,
                                const OptimizerConfig& cfg) {
  cfg.validate();
  check_arity(k);
  const double sign = cfg.maximize ? -1.0 : 1.0;
  const std::size_t count = initial.size();

  PointConfiguration x = initial;
  double energy = discrete_energy(k, x).value;
  OptimizationTrace trace{{energy}, x, false, 0, 0.0};

  for (int it = 0; it < cfg.steps; ++it) {
    std::vector<Vector> grads = energy_gradients(k, x, cfg.grad_mode, cfg.fd_epsilon);
    const double force = rms_force(grads);
    trace.final_gradient_norm = force;
    if (force <= cfg.stop_tol) {
      trace.converged = true;
      break;
    }
    // Per-particle force direction: -N * grad_i of the (signed) objective.
    double slope = 0.0;
    for (auto& g : grads) {
      g *= -sign * static_cast<double>(count);
      slope += g.squaredNorm() / static_cast<double>(count);
    }
    const double f0 = sign * energy;
    double step = cfg.step_size;
    bool accepted = false;
    for (int b = 0; b < kMaxBacktracks; ++b, step *= kBacktrack) {
      std::vector<UnitVector> moved;
      moved.reserve(count);
      for (std::size_t i = 0; i < count; ++i) moved.push_back(retract(x[i], step * grads[i]));
      PointConfiguration candidate(std::move(moved));
      const double e = discrete_energy(k, candidate).value;
      if (sign * e <= f0 - kArmijo * step * slope) {
        x = std::move(candidate);
        energy = e;
        accepted = true;
        break;
      }
    }
    if (!accepted) break;   // no descent possible at machine precision
    trace.energies.push_back(energy);
    trace.iterations_run = it + 1;
  }
  if (!trace.converged) {
    trace.final_gradient_norm = rms_force(energy_gradients(k, x, cfg.grad_mode, cfg.fd_epsilon));
    trace.converged = trace.final_gradient_norm <= cfg.stop_tol;
  }
  trace.final_config = std::move(x);
  return trace;
}

OptimizationTrace optimize_discrete(const KernelSpec& k, int N, int d, const OptimizerConfig& cfg) {
  if (N < 1) throw InvalidArgument("optimize_discrete: N must be at least 1");
  if (d < 2) throw InvalidArgument("optimize_discrete: d must be at least 2");
  return optimize_from(k, sample_sphere(d, static_cast<std::size_t>(N), cfg.seed), cfg);
}

MultistartResult optimize_multistart(const KernelSpec& k, int N, int d, const OptimizerConfig& cfg,
                                     int starts) {
  if (starts < 1) throw InvalidArgument("optimize_multistart: starts must be at least 1");
  cfg.validate();
  MultistartResult r;
  for (int s = 0; s < starts; ++s) r.seeds.push_back(derive_seed(cfg.seed, static_cast<std::uint64_t>(s)));
  std::vector<std::optional<OptimizationTrace>> runs(static_cast<std::size_t>(starts));
  parallel_for(runs.size(), [&](std::size_t s) {
    OptimizerConfig c = cfg;
    c.seed = r.seeds[s];
    runs[s] = optimize_discrete(k, N, d, c);
  });
  for (auto& run : runs) r.runs.push_back(std::move(*run));
  for (std::size_t s = 1; s < r.runs.size(); ++s) {
    const double e = r.runs[s].energies.back();
    const double best = r.runs[r.best].energies.back();
    if (cfg.maximize ? e > best : e < best) r.best = s;
  }
  return r;
}

LocalMinReport local_min_probe(const KernelSpec& k, const DiscreteMeasure& mu,
                               const std::vector<DiscreteMeasure>& directions, double t_max, double tol) {
  if (!(t_max > 0.0 && t_max <= 1.0)) throw InvalidArgument("local_min_probe: t_max must lie in (0, 1]");
  constexpr int kTGrid = 200;
  constexpr int kAlphaGrid = 999;
  LocalMinReport report;
  for (const auto& nu : directions) {
    const MixturePolynomial g = mixture_polynomial(k, mu, nu);
    const double g0 = g(0.0);
    DirectionProbe p;
    p.min_gap = std::numeric_limits<double>::infinity();
    for (int i = 0; i <= kTGrid; ++i) {
      const double t = t_max * i / kTGrid;
      const double gap = g(t) - g0;
      if (gap < p.min_gap) {
        p.min_gap = gap;
        p.worst_t = t;
      }
    }
    p.holds = p.min_gap >= -tol;

    const auto& c = g.coefficients();
    const double i_mu = c.front();
    const double i_nu = c.back();
    const double cross = c[1];   // I(mu^{n-1}, nu)
    p.alpha_residual = std::numeric_limits<double>::infinity();
    for (int a = 1; a <= kAlphaGrid; ++a) {
      const double alpha = static_cast<double>(a) / (kAlphaGrid + 1);
      const double r = cross - alpha * i_nu - (1.0 - alpha) * i_mu;
      if (r < p.alpha_residual) {
        p.alpha_residual = r;
        p.best_alpha = alpha;
      }
    }
    report.all_hold = report.all_hold && p.holds;
    report.directions.push_back(p);
  }
  return report;
}

}  // namespace ninput
