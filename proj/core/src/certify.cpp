#include "ninput/certify.hpp"

#include <Eigen/Eigenvalues>
#include <Eigen/QR>

#include <algorithm>
#include <cmath>
#include <limits>
#include <random>
#include <stdexcept>

#include "ninput/errors.hpp"
#include "ninput/parallel.hpp"

namespace ninput {
namespace {

Matrix kernel_matrix(const KernelSpec& g, const PointConfiguration& points) {
  const auto m = static_cast<Eigen::Index>(points.size());
  Matrix mat(m, m);
  for (Eigen::Index i = 0; i < m; ++i) {
    for (Eigen::Index j = i; j < m; ++j) {
      const Vector* args[2] = {&points[i].coords(), &points[j].coords()};
      mat(i, j) = mat(j, i) = g.eval(KernelArgs(args, 2));
    }
  }
  return mat;
}

// Orthonormal basis of the sum-zero subspace of R^m, as m x (m-1) columns.
Matrix sum_zero_basis(Eigen::Index m) {
  Eigen::HouseholderQR<Matrix> qr(Matrix::Ones(m, 1));
  const Matrix q = qr.householderQ();
  return q.rightCols(m - 1);
}

struct MatrixVerdict {
  double min_eigenvalue = 0.0;   // relative
  std::optional<DiscreteMeasure> witness;
  double witness_energy = 0.0;
};

// The witness energy is computed by `energy_of` so that n-input callers can
// route it through the original kernel.
template <class EnergyOf>
MatrixVerdict test_matrix(const KernelSpec& g, const PointConfiguration& points, bool conditional,
                          double tol, const EnergyOf& energy_of) {
  const Matrix mat = kernel_matrix(g, points);
  const double scale = mat.cwiseAbs().maxCoeff();
  MatrixVerdict out;
  if (!(scale > 0.0) || (conditional && points.size() < 2)) return out;

  Matrix basis;
  Matrix reduced;
  if (conditional) {
    basis = sum_zero_basis(mat.rows());
    reduced = basis.transpose() * mat * basis;
  } else {
    reduced = mat;
  }
  Eigen::SelfAdjointEigenSolver<Matrix> solver(reduced);
  if (solver.info() != Eigen::Success) throw std::runtime_error("eigensolver failed");
  const double lambda = solver.eigenvalues()(0);
  out.min_eigenvalue = lambda / scale;
  if (lambda >= -tol * scale) return out;

  const Vector y = solver.eigenvectors().col(0);
  const Vector c = conditional ? Vector(basis * y) : y;
  DiscreteMeasure nu = witness_measure(points, c, conditional);
  const double energy = energy_of(nu);
  if (energy < 0.0) {
    out.witness = std::move(nu);
    out.witness_energy = energy;
  }
  return out;
}

std::vector<UnitVector> canonical_pins(int d, int count) {
  std::vector<UnitVector> pins;
  for (int i = 0; i < count; ++i) pins.push_back(UnitVector::basis(d, i % d));
  return pins;
}

}  // namespace

const char* to_string(PDMode m) { return m == PDMode::pd ? "pd" : "conditional"; }

const char* to_string(PDOutcome o) {
  return o == PDOutcome::pass_statistical ? "pass_statistical" : "fail";
}

DiscreteMeasure witness_measure(const PointConfiguration& points, const Vector& coefficients,
                                bool balanced, double truncation) {
  if (static_cast<std::size_t>(coefficients.size()) != points.size()) {
    throw InvalidArgument("witness_measure: coefficient count differs from point count");
  }
  Eigen::Index largest = 0;
  const double peak = coefficients.cwiseAbs().maxCoeff(&largest);
  if (!(peak > 0.0)) throw InvalidArgument("witness_measure: zero coefficient vector");
  // Fix the sign so the largest coefficient is positive (the energy is even in c).
  const double norm = coefficients[largest] > 0 ? peak : -peak;
  std::vector<UnitVector> atoms;
  std::vector<double> weights;
  std::size_t largest_slot = 0;
  double kept = 0.0;
  for (Eigen::Index i = 0; i < coefficients.size(); ++i) {
    const double w = coefficients[i] / norm;
    if (std::abs(w) < truncation) continue;
    if (i == largest) largest_slot = atoms.size();
    atoms.push_back(points[static_cast<std::size_t>(i)]);
    weights.push_back(w);
    kept += w;
  }
  if (balanced) weights[largest_slot] -= kept;
  return DiscreteMeasure(std::move(atoms), std::move(weights));
}

PDVerdict pd_test_points(const KernelSpec& g, const PointConfiguration& points, bool conditional,
                         double tol) {
  if (g.arity() != 2) throw InvalidArgument("pd_test_points: kernel must have arity 2");
  const MatrixVerdict mv = test_matrix(g, points, conditional, tol, [&](const DiscreteMeasure& nu) {
    return mutual_energy(g, {nu, nu}).value;
  });
  PDVerdict v;
  v.mode = conditional ? PDMode::conditional : PDMode::pd;
  v.trials_run = 1;
  v.min_eigenvalue_seen = mv.min_eigenvalue;
  if (mv.witness) {
    v.outcome = PDOutcome::fail;
    v.witness = PDWitness{{}, *mv.witness, mv.witness_energy};
  }
  return v;
}

namespace {

// Shared driver: `energy_of` evaluates the witness through the caller's kernel.
template <class EnergyOf>
PDVerdict run_trials(const KernelSpec& g, int d, const PDTestOptions& opt,
                     const std::vector<UnitVector>& pins, const EnergyOf& energy_of) {
  if (g.arity() != 2) throw InvalidArgument("pd_test_2input: kernel must have arity 2");
  if (d < 2) throw InvalidArgument("pd_test_2input: d must be at least 2");
  if (opt.trials < 1) throw InvalidArgument("pd_test_2input: trials must be at least 1");
  if (opt.set_size < 2) throw InvalidArgument("pd_test_2input: set_size must be at least 2");
  for (const auto& p : opt.include) {
    if (p.dim() != d) throw InvalidArgument("pd_test_2input: included point has wrong dimension");
  }

  const auto trials = static_cast<std::size_t>(opt.trials);
  std::vector<MatrixVerdict> results(trials);
  parallel_for(trials, [&](std::size_t t) {
    std::vector<UnitVector> pts = opt.include;
    const auto target = static_cast<std::size_t>(opt.set_size);
    if (t == 0) {
      for (int i = 0; i < d && pts.size() + 2 <= target; ++i) {
        pts.push_back(UnitVector::basis(d, i));
        pts.push_back(UnitVector::basis(d, i, -1.0));
      }
    }
    if (pts.size() < target) {
      const PointConfiguration fill = sample_sphere(d, target - pts.size(), derive_seed(opt.seed, t));
      pts.insert(pts.end(), fill.begin(), fill.end());
    }
    results[t] = test_matrix(g, PointConfiguration(std::move(pts)), opt.conditional, opt.tol, energy_of);
  });

  PDVerdict v;
  v.mode = opt.conditional ? PDMode::conditional : PDMode::pd;
  v.trials_run = opt.trials;
  v.min_eigenvalue_seen = std::numeric_limits<double>::infinity();
  for (const auto& r : results) {
    v.min_eigenvalue_seen = std::min(v.min_eigenvalue_seen, r.min_eigenvalue);
    if (r.witness && !v.witness) {
      v.outcome = PDOutcome::fail;
      v.witness = PDWitness{pins, *r.witness, r.witness_energy};
    }
  }
  return v;
}

}  // namespace

PDVerdict pd_test_2input(const KernelSpec& g, int d, const PDTestOptions& opt) {
  return run_trials(g, d, opt, {}, [&](const DiscreteMeasure& nu) {
    return mutual_energy(g, {nu, nu}).value;
  });
}

PDVerdict npd_test(const KernelSpec& k, int d, const NPDTestOptions& opt) {
  const int n = k.arity();
  if (n < 3) throw InvalidArgument("npd_test: arity must be at least 3 (use pd_test_2input)");
  if (opt.pin_trials < 1) throw InvalidArgument("npd_test: pin_trials must be at least 1");
  const int m = n - 2;

  PDVerdict total;
  total.mode = opt.conditional ? PDMode::conditional : PDMode::pd;
  total.min_eigenvalue_seen = std::numeric_limits<double>::infinity();
  for (int p = 0; p < opt.pin_trials; ++p) {
    std::vector<UnitVector> pins;
    if (p == 0) {
      pins = canonical_pins(d, m);
    } else {
      const PointConfiguration r = sample_sphere(d, static_cast<std::size_t>(m),
                                                 derive_seed(opt.seed, 1000003u + static_cast<unsigned>(p)));
      pins = r.points();
    }
    PDTestOptions inner;
    inner.conditional = opt.conditional;
    inner.trials = opt.inner_trials;
    inner.set_size = opt.set_size;
    inner.seed = derive_seed(opt.seed, static_cast<std::uint64_t>(p));
    inner.tol = opt.tol;
    for (const auto& z : pins) {
      inner.include.push_back(z);
      inner.include.push_back(-z);
    }
    const KernelSpec g = pin(k, pins);
    const PDVerdict v = run_trials(g, d, inner, pins, [&](const DiscreteMeasure& nu) {
      std::vector<DiscreteMeasure> args;
      for (const auto& z : pins) args.push_back(DiscreteMeasure::dirac(z));
      args.push_back(nu);
      args.push_back(nu);
      return mutual_energy(k, args).value;
    });
    total.trials_run += v.trials_run;
    total.min_eigenvalue_seen = std::min(total.min_eigenvalue_seen, v.min_eigenvalue_seen);
    if (!v.passed()) {
      total.outcome = PDOutcome::fail;
      total.witness = v.witness;
      break;
    }
  }
  return total;
}

ConvexityReport convexity_probe(const KernelSpec& k, const DiscreteMeasure& mu, const DiscreteMeasure& nu) {
  if (!mu.is_probability() || !nu.is_probability()) {
    throw InvalidArgument("convexity_probe: both inputs must be probability measures");
  }
  ConvexityReport r;
  r.g = mixture_polynomial(k, mu, nu);
  r.g_prime_0 = r.g.derivative(0.0, 1);
  r.g_double_prime_0 = r.g.derivative(0.0, 2);

  // h(t) = I_H((1-t) mu + t nu) with H = U_K^{mu^{n-2}} (H = K when n = 2);
  // quadratic in t, so three samples determine both derivatives.
  const int n = k.arity();
  KernelSpec h = k;
  if (n > 2) {
    const std::vector<DiscreteMeasure> slots(static_cast<std::size_t>(n - 2), mu);
    h = potential_kernel(k, slots);
  }
  auto h_at = [&](double t) {
    const DiscreteMeasure m = mix(mu, nu, t);
    return mutual_energy(h, {m, m}).value;
  };
  const double h0 = h_at(0.0);
  const double h_half = h_at(0.5);
  const double h1 = h_at(1.0);
  r.h_prime_0 = -3.0 * h0 + 4.0 * h_half - h1;
  r.h_double_prime_0 = 4.0 * (h0 - 2.0 * h_half + h1);

  constexpr int kGrid = 1000;
  const double g0 = r.g(0.0);
  const double g1 = r.g(1.0);
  for (int i = 0; i < kGrid; ++i) {
    const double t = static_cast<double>(i) / (kGrid - 1);
    if (r.g.derivative(t, 2) < -1e-10) r.convex_on_unit_interval = false;
    const double gap = r.g(t) - ((1.0 - t) * g0 + t * g1);
    if (gap > r.chord_violation) {
      r.chord_violation = gap;
      r.violation_t = t;
    }
  }
  if (r.chord_violation <= 1e-10) r.violation_t.reset();
  return r;
}

ConstancyResult potential_constancy_check(const KernelSpec& k, const DiscreteMeasure& mu,
                                          const PointConfiguration& test_points, double tol,
                                          const ConstancyOptions& opt) {
  const int n = k.arity();
  if (n < 2) throw InvalidArgument("potential_constancy_check: arity must be at least 2");
  if (test_points.dim() != mu.dim()) throw InvalidArgument("potential_constancy_check: dimension mismatch");
  const std::size_t q = test_points.size();
  const double cost = std::pow(static_cast<double>(mu.size()), n - 1) * static_cast<double>(q);

  ConstancyResult r;
  std::vector<double> values(q);
  if (cost <= opt.exact_budget) {
    const std::vector<DiscreteMeasure> slots(static_cast<std::size_t>(n - 1), mu);
    values = potential(k, slots, test_points);
  } else {
    // Resample (n-1)-tuples from mu (weights proportional to |w|, signs kept);
    // the same tuples are used at every test point.
    r.exact = false;
    const std::int64_t samples = opt.samples > 0 ? opt.samples : static_cast<std::int64_t>(mu.size());
    std::vector<double> abs_w(mu.size());
    double mass = 0.0;
    for (std::size_t i = 0; i < mu.size(); ++i) mass += abs_w[i] = std::abs(mu.weight(i));
    if (!(mass > 0.0)) throw InvalidArgument("potential_constancy_check: measure has zero mass");
    std::mt19937_64 rng(opt.seed);
    std::discrete_distribution<std::size_t> pick(abs_w.begin(), abs_w.end());
    const auto m = static_cast<std::size_t>(n - 1);
    std::vector<std::size_t> idx(static_cast<std::size_t>(samples) * m);
    for (auto& i : idx) i = pick(rng);
    std::vector<MomentAccumulator> acc(q);
    parallel_for(q, [&](std::size_t p) {
      std::vector<const Vector*> args(static_cast<std::size_t>(n));
      args[m] = &test_points[p].coords();
      MomentAccumulator a;
      for (std::int64_t s = 0; s < samples; ++s) {
        double sign = 1.0;
        for (std::size_t j = 0; j < m; ++j) {
          const std::size_t atom = idx[static_cast<std::size_t>(s) * m + j];
          args[j] = &mu.atom(atom).coords();
          if (mu.weight(atom) < 0) sign = -sign;
        }
        a.add(sign * std::pow(mass, static_cast<double>(m)) * k.eval(KernelArgs(args.data(), args.size())));
      }
      acc[p] = a;
    });
    double var = 0.0;
    for (std::size_t p = 0; p < q; ++p) {
      values[p] = acc[p].mean;
      var += acc[p].variance();
    }
    r.std_error = std::sqrt(var / static_cast<double>(q) / static_cast<double>(samples));
  }
  r.mean = pairwise_sum(values) / static_cast<double>(q);
  for (double v : values) r.max_deviation = std::max(r.max_deviation, std::abs(v - r.mean));
  r.tol_used = std::max({tol, opt.stderr_multiple * r.std_error, kDefaultTolerances.geometric});
  r.pass = r.max_deviation <= r.tol_used;
  return r;
}

const InequalityResidual& InequalityReport::at(const std::string& name) const {
  for (const auto& e : entries) {
    if (e.name == name) return e;
  }
  throw InvalidArgument("InequalityReport: no entry named '" + name + "'");
}

DiscreteMeasure random_probability_measure(int d, int atoms, std::uint64_t seed) {
  if (atoms < 1) throw InvalidArgument("random_probability_measure: need at least one atom");
  const PointConfiguration pts = sample_sphere(d, static_cast<std::size_t>(atoms), seed);
  std::mt19937_64 rng(derive_seed(seed, 1));
  std::uniform_real_distribution<double> unif(0.05, 1.0);
  std::vector<double> w(static_cast<std::size_t>(atoms));
  double total = 0.0;
  for (auto& x : w) total += x = unif(rng);
  for (auto& x : w) x /= total;
  return DiscreteMeasure(pts.points(), std::move(w));
}

InequalityReport inequality_suite(const KernelSpec& k, int d, int trials, std::uint64_t seed) {
  if (trials < 1) throw InvalidArgument("inequality_suite: trials must be at least 1");
  const int n = k.arity();
  if (n < 2) throw InvalidArgument("inequality_suite: arity must be at least 2");
  const Definiteness def = k.definiteness();
  const bool pd = def == Definiteness::positive_definite;
  const bool cpd = pd || def == Definiteness::conditionally_positive_definite;
  const bool not_cpd = def == Definiteness::not_conditionally_positive_definite;

  // Diagonal maximum: exact for rotation-invariant kernels, sampled otherwise.
  double diag_max = -std::numeric_limits<double>::infinity();
  {
    std::vector<UnitVector> probes{UnitVector::basis(d, 0)};
    if (!k.rotation_invariant()) {
      const PointConfiguration extra = sample_sphere(d, 2000, derive_seed(seed, 7));
      probes.insert(probes.end(), extra.begin(), extra.end());
    }
    std::vector<const Vector*> args(static_cast<std::size_t>(n));
    for (const auto& z : probes) {
      std::fill(args.begin(), args.end(), &z.coords());
      diag_max = std::max(diag_max, k.eval(KernelArgs(args.data(), args.size())));
    }
  }

  struct Trial {
    double am, gm, lower, diag, mun1, convn1;
    bool gm_defined;
  };
  const auto count = static_cast<std::size_t>(trials);
  std::vector<Trial> out(count);
  parallel_for(count, [&](std::size_t t) {
    const std::uint64_t s = derive_seed(seed, t);
    std::mt19937_64 rng(s);
    std::uniform_int_distribution<int> atoms(1, 4);
    std::vector<DiscreteMeasure> mus;
    for (int j = 0; j < n; ++j) {
      mus.push_back(random_probability_measure(d, atoms(rng), derive_seed(s, static_cast<std::uint64_t>(j) + 1)));
    }
    const double mixed = mutual_energy(k, mus).value;
    std::vector<double> self(static_cast<std::size_t>(n));
    double mean_self = 0.0;
    bool nonneg = true;
    for (int j = 0; j < n; ++j) {
      self[static_cast<std::size_t>(j)] = self_energy(k, mus[static_cast<std::size_t>(j)]).value;
      mean_self += self[static_cast<std::size_t>(j)] / n;
      nonneg = nonneg && self[static_cast<std::size_t>(j)] >= 0.0;
    }
    Trial r{};
    r.am = mixed - mean_self;
    r.lower = -mean_self - mixed;
    r.gm_defined = nonneg;
    if (nonneg) {
      double geo = 1.0;
      for (double v : self) geo *= std::pow(v, 1.0 / n);
      r.gm = mixed - geo;
    }

    // One random point tuple: the atoms' first points.
    std::vector<const Vector*> args;
    for (const auto& m : mus) args.push_back(&m.atom(0).coords());
    r.diag = k.eval(KernelArgs(args.data(), args.size())) - diag_max;

    // mu = mus[0], nu = mus[1]: the mixed energies I(mu^{n-k}, nu^k).
    const std::vector<double> c = mixed_energies(k, mus[0], mus[1]);
    const double i_mu = c.front();
    const double i_nu = c.back();
    r.mun1 = c[1] - ((n - 1.0) / n * i_mu + i_nu / n);
    r.convn1 = n / (n - 1.0) * (c[static_cast<std::size_t>(n - 1)] - i_mu) - (i_nu - i_mu);
    out[t] = r;
  });

  InequalityReport report;
  auto entry = [&](const char* name, bool asserted, auto field, auto defined) {
    InequalityResidual e;
    e.name = name;
    e.worst_residual = -std::numeric_limits<double>::infinity();
    e.asserted = asserted;
    e.expected_violation = not_cpd;
    for (const auto& r : out) {
      if (!defined(r)) continue;
      e.worst_residual = std::max(e.worst_residual, field(r));
      ++e.evaluated;
    }
    if (e.evaluated == 0) e.worst_residual = 0.0;
    report.entries.push_back(e);
  };
  auto always = [](const Trial&) { return true; };
  entry("am", cpd, [](const Trial& r) { return r.am; }, always);
  entry("gm", pd, [](const Trial& r) { return r.gm; }, [](const Trial& r) { return r.gm_defined; });
  entry("lower_bound", pd, [](const Trial& r) { return r.lower; }, always);
  entry("max_on_diagonal", cpd, [](const Trial& r) { return r.diag; }, always);
  entry("mu_n_minus_1", cpd, [](const Trial& r) { return r.mun1; }, always);
  entry("convex_n_minus_1", cpd, [](const Trial& r) { return r.convn1; }, always);
  return report;
}

}  // namespace ninput
