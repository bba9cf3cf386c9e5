#include "ninput/scenarios.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <random>
#include <sstream>

#include "ninput/certify.hpp"
#include "ninput/energy.hpp"
#include "ninput/errors.hpp"
#include "ninput/kernels.hpp"
#include "ninput/optimize.hpp"
#include "ninput/parallel.hpp"

namespace ninput {
namespace {

// Stable across platforms, unlike std::hash.
std::uint64_t fnv1a(const std::string& text) {
  std::uint64_t h = 0xcbf29ce484222325ull;
  for (unsigned char ch : text) {
    h ^= ch;
    h *= 0x100000001b3ull;
  }
  return h;
}

class Ctx {
 public:
  Ctx(const ScenarioInfo& info, const Overrides& overrides) : params_(info.defaults) {
    for (const auto& [k, v] : overrides) {
      if (!params_.count(k)) {
        std::string known;
        for (const auto& [name, _] : params_) known += (known.empty() ? "" : ", ") + name;
        throw InvalidArgument("scenario '" + info.name + "' has no parameter '" + k + "' (known: " + known + ")");
      }
      params_[k] = v;
    }
    report.scenario = info.name;
    report.parameters = params_;
    tol_scale_ = num("tol_scale");
    if (!(tol_scale_ > 0.0)) throw InvalidArgument("tol_scale must be positive");
  }

  double num(const std::string& key) const {
    const std::string& v = params_.at(key);
    try {
      std::size_t used = 0;
      const double x = std::stod(v, &used);
      if (used != v.size()) throw std::invalid_argument(v);
      return x;
    } catch (const std::exception&) {
      throw InvalidArgument("parameter '" + key + "': '" + v + "' is not a number");
    }
  }
  int integer(const std::string& key) const {
    const double x = num(key);
    if (x != std::floor(x) || std::abs(x) > 2e9) throw InvalidArgument("parameter '" + key + "' must be an integer");
    return static_cast<int>(x);
  }
  std::int64_t count(const std::string& key) const {
    const double x = num(key);
    if (x != std::floor(x) || x < 1 || x > 9e15) {
      throw InvalidArgument("parameter '" + key + "' must be a positive integer");
    }
    return static_cast<std::int64_t>(x);
  }
  std::vector<double> nums(const std::string& key) const {
    std::vector<double> out;
    std::stringstream ss(params_.at(key));
    std::string item;
    while (std::getline(ss, item, ',')) {
      try {
        out.push_back(std::stod(item));
      } catch (const std::exception&) {
        throw InvalidArgument("parameter '" + key + "': '" + item + "' is not a number");
      }
    }
    if (out.empty()) throw InvalidArgument("parameter '" + key + "' is empty");
    return out;
  }
  std::vector<int> ints(const std::string& key) const {
    std::vector<int> out;
    for (double x : nums(key)) {
      if (x != std::floor(x)) throw InvalidArgument("parameter '" + key + "' must list integers");
      out.push_back(static_cast<int>(x));
    }
    return out;
  }

  /// Seed for a named sub-computation, recorded in the report.
  std::uint64_t seed(const std::string& label, std::uint64_t stream = 0) {
    const auto base = static_cast<std::uint64_t>(count_or_zero("seed"));
    const std::uint64_t s = derive_seed(derive_seed(base, fnv1a(label)), stream);
    report.seeds[label + (stream ? "#" + std::to_string(stream) : "")] = s;
    return s;
  }

  void check(std::string description, double observed, double expected, double tolerance,
             Comparison comparison, Source source, std::string basis) {
    report.assertions.push_back(make_assertion(std::move(description), observed, expected,
                                               tolerance * tol_scale_, comparison, source, std::move(basis)));
  }
  void near(std::string d, double obs, double exp, double tol, Source s, std::string basis) {
    check(std::move(d), obs, exp, tol, Comparison::near, s, std::move(basis));
  }
  void at_most(std::string d, double obs, double bound, double tol, Source s, std::string basis) {
    check(std::move(d), obs, bound, tol, Comparison::at_most, s, std::move(basis));
  }
  void at_least(std::string d, double obs, double bound, double tol, Source s, std::string basis) {
    check(std::move(d), obs, bound, tol, Comparison::at_least, s, std::move(basis));
  }
  void holds(std::string d, bool ok, Source s, std::string basis) {
    check(std::move(d), ok ? 1.0 : 0.0, 1.0, 0.0, Comparison::near, s, std::move(basis));
  }

  Report report;

 private:
  double count_or_zero(const std::string& key) const {
    const double x = num(key);
    if (x < 0 || x != std::floor(x)) throw InvalidArgument("parameter '" + key + "' must be a nonnegative integer");
    return x;
  }

  std::map<std::string, std::string> params_;
  double tol_scale_ = 1.0;
};

using Runner = std::function<void(Ctx&)>;

struct Entry {
  ScenarioInfo info;
  Runner run;
};

UnitVector e(int d, int i, double sign = 1.0) { return UnitVector::basis(d, i - 1, sign); }

std::string dstr(int d) { return "d=" + std::to_string(d); }

// Expected uniform-measure energies from the moment oracle on S^{d-1}:
// E[u^2] = 1/d and E[uvt] = 1/d^2 for independent uniform x, y, z.
double moment_u2(int d) { return 1.0 / d; }
double moment_uvt(int d) { return 1.0 / (static_cast<double>(d) * d); }

// ---------------------------------------------------------------------------

void mc_scenario(Ctx& c, const KernelSpec& k, const std::string& label,
                 const std::function<double(int)>& expected, Source source, const std::string& basis,
                 bool require_small_stderr) {
  const std::int64_t tuples = c.count("tuples");
  for (int d : c.ints("d")) {
    const EnergyEstimate est = mc_energy_uniform(k, d, tuples, c.seed(label, static_cast<std::uint64_t>(d)));
    c.near(label + " under uniform measure, " + dstr(d), est.value, expected(d), 4.0 * est.std_error, source, basis);
    if (require_small_stderr) {
      c.at_most("standard error, " + dstr(d), est.std_error, 5e-4, 0.0, Source::elementary,
                "budget: 4 standard errors below 0.002");
    }
  }
}

void area2_sigma(Ctx& c) {
  const KernelSpec k = make_kernel("area2");
  mc_scenario(
      c, k, "I_area2", [](int d) { return 0.75 * (d - 1.0) / d; }, Source::reference,
      "expected squared area of a triangle with uniform vertices on S^{d-1} is 3(d-1)/(4d)", true);

  // The 2-fold potential of the uniform measure is constant (rotation invariance).
  const int d = 3;
  const DiscreteMeasure sigma = DiscreteMeasure::empirical(
      sample_sphere(d, static_cast<std::size_t>(c.count("surrogate")), c.seed("surrogate")));
  const PointConfiguration test = sample_sphere(d, static_cast<std::size_t>(c.count("test_points")), c.seed("test_points"));
  ConstancyOptions opt;
  opt.seed = c.seed("resample");
  opt.stderr_multiple = 5.0;
  const ConstancyResult r = potential_constancy_check(k, sigma, test, 0.0, opt);
  c.at_most("max deviation of U_area2^{sigma^2} over test points, d=3", r.max_deviation, 5.0 * r.std_error, 0.0,
            Source::reference, "potentials of rotation-invariant kernels against the uniform measure are constant");
}

void vol2_sigma(Ctx& c) {
  mc_scenario(
      c, make_kernel("vol2"), "I_vol2",
      [](int d) { return 1.0 - 3.0 * moment_u2(d) + 2.0 * moment_uvt(d); }, Source::oracle,
      "vol2 = 1 - u^2 - v^2 - t^2 + 2uvt with E[u^2] = 1/d, E[uvt] = 1/d^2", false);
}

void frame_bound(Ctx& c) {
  mc_scenario(
      c, make_kernel("frame2"), "I_frame2", [](int d) { return moment_u2(d); }, Source::reference,
      "frame energy of the uniform measure equals the lower bound 1/d", false);
}

void check_conditional_witness(Ctx& c, const KernelSpec& k, const std::string& label) {
  const int d = c.integer("d");
  NPDTestOptions opt;
  opt.conditional = true;
  opt.seed = c.seed("npd_" + label);
  const PDVerdict v = npd_test(k, d, opt);
  c.holds(label + ": conditional test finds a witness", !v.passed(), Source::reference,
          label + " is not conditionally 3-positive definite");
  if (v.witness) {
    std::vector<DiscreteMeasure> args;
    for (const auto& z : v.witness->pins) args.push_back(DiscreteMeasure::dirac(z));
    args.push_back(v.witness->measure);
    args.push_back(v.witness->measure);
    const double again = mutual_energy(k, args).value;
    c.at_most(label + ": witness energy", v.witness->energy, 0.0, 0.0, Source::elementary, "witness is negative");
    c.near(label + ": witness energy recomputed", again, v.witness->energy, 1e-12, Source::elementary,
           "mutual energy of the witness reproduces the reported value");
    c.near(label + ": witness total mass", v.witness->measure.total_mass(), 0.0, 1e-12, Source::elementary,
           "conditional witnesses are balanced");
  }
}

void s011_counterexample(Ctx& c) {
  const int d = c.integer("d");
  const KernelSpec k = make_kernel("s011");
  const DiscreteMeasure mu = combine(DiscreteMeasure::dirac(e(d, 2)), DiscreteMeasure::dirac(e(d, 1, -1)), 1, -1);
  const double value = mutual_energy(k, {DiscreteMeasure::dirac(e(d, 1)), mu, mu}).value;
  c.near("I_s011(delta_e1, mu, mu), mu = delta_e2 - delta_{-e1}", value, -1.0, 1e-12, Source::reference,
         "pinning s011 at e1 gives a 2-input kernel with negative energy on a balanced measure");
  check_conditional_witness(c, k, "s011");
}

void exact_not_cpd(Ctx& c, const std::string& name, const DiscreteMeasure& nu, const std::string& what) {
  const int d = c.integer("d");
  const KernelSpec k = make_kernel(name);
  const double value = mutual_energy(k, {DiscreteMeasure::dirac(e(d, 1)), nu, nu}).value;
  c.near("I_" + name + "(delta_e1, nu, nu), nu = " + what, value, -2.0, 1e-12, Source::reference,
         name + " pinned at e1 has energy -2 on " + what);
  check_conditional_witness(c, k, name);
}

void negvol2_not_cpd(Ctx& c) {
  const int d = c.integer("d");
  exact_not_cpd(c, "neg_vol2", combine(DiscreteMeasure::dirac(e(d, 2)), DiscreteMeasure::dirac(e(d, 3)), 1, 1),
                "delta_e2 + delta_e3");
  // Plain test on exactly {e2, e3} for the pinned kernel.
  const KernelSpec g = pin(make_kernel("neg_vol2"), {e(d, 1)});
  const PDVerdict v = pd_test_points(g, PointConfiguration({e(d, 2), e(d, 3)}), false);
  c.near("plain test of pin(neg_vol2, e1) on {e2, e3}: witness energy", v.witness ? v.witness->energy : 0.0, -2.0,
         1e-12, Source::reference, "the 2x2 matrix (0, -1; -1, 0) with c = (1, 1)");
}

void negarea2_not_cpd(Ctx& c) {
  const int d = c.integer("d");
  exact_not_cpd(c, "neg_area2",
                combine(DiscreteMeasure::dirac(e(d, 2)), DiscreteMeasure::dirac(e(d, 1, -1)), 1, 1),
                "delta_e2 + delta_{-e1}");
}

void s011_potential(Ctx& c) {
  const int d = c.integer("d");
  const KernelSpec k = make_kernel("s011");
  const PointConfiguration sigma = sample_sphere(d, static_cast<std::size_t>(c.count("atoms")), c.seed("surrogate"));
  const DiscreteMeasure mu = DiscreteMeasure::empirical(sigma);
  const int pairs = c.integer("pairs");
  const PointConfiguration at = sample_sphere(d, static_cast<std::size_t>(2 * pairs), c.seed("pairs"));
  const std::vector<DiscreteMeasure> slots{mu};
  const std::vector<double> u = potential(k, slots, at);
  double worst = 0.0;   // in standard errors
  for (int p = 0; p < pairs; ++p) {
    const Vector* args[3] = {nullptr, &at[2 * p].coords(), &at[2 * p + 1].coords()};
    MomentAccumulator acc;
    for (const auto& z : sigma) {
      args[0] = &z.coords();
      acc.add(k.eval(KernelArgs(args, 3)));
    }
    const double se = std::sqrt(acc.variance() / acc.count);
    const double expected = at[2 * p].dot(at[2 * p + 1]) / d;
    worst = std::max(worst, std::abs(u[static_cast<std::size_t>(p)] - expected) / se);
  }
  c.at_most("max |U_s011^sigma(x,y) - <x,y>/d| in standard errors over random pairs", worst, 4.0, 0.0,
            Source::reference, "U_s011^sigma(x, y) = <x, y>/d");
}

void uvt_potential(Ctx& c) {
  const int d = 3;
  const KernelSpec k = make_kernel("uvt");
  const DiscreteMeasure sigma = DiscreteMeasure::empirical(
      sample_sphere(d, static_cast<std::size_t>(c.count("surrogate")), c.seed("surrogate")));
  const PointConfiguration test = sample_sphere(d, static_cast<std::size_t>(c.count("test_points")), c.seed("test_points"));
  ConstancyOptions opt;
  opt.seed = c.seed("resample");
  opt.stderr_multiple = 5.0;
  const ConstancyResult r = potential_constancy_check(k, sigma, test, 0.0, opt);
  c.at_most("max deviation of U_uvt^{sigma^2} over test points", r.max_deviation, 5.0 * r.std_error, 0.0,
            Source::reference, "potentials of rotation-invariant kernels against the uniform measure are constant");
  c.near("mean of U_uvt^{sigma^2}", r.mean, moment_uvt(d), 4.0 * r.std_error, Source::oracle,
         "U_uvt^{sigma^2}(x) = x^T E[y y^T] E[z z^T] x = 1/d^2");
  const ConstancyResult dirac = potential_constancy_check(k, DiscreteMeasure::dirac(e(d, 1)), test, 0.0, opt);
  c.at_least("max deviation of U_uvt^{delta_e1^2} (varies as <x, e1>^2)", dirac.max_deviation, 1e-3, 0.0,
             Source::elementary, "U(x) = <x, e1>^2 is not constant");
}

void npd_battery(Ctx& c, const std::vector<std::pair<std::string, KernelSpec>>& kernels, bool conditional,
                 const std::string& basis) {
  for (const auto& [label, k] : kernels) {
    for (int d : c.ints("d")) {
      NPDTestOptions opt;
      opt.conditional = conditional;
      opt.pin_trials = c.integer("pin_trials");
      opt.inner_trials = c.integer("inner_trials");
      opt.set_size = c.integer("set_size");
      opt.seed = c.seed(label, static_cast<std::uint64_t>(d));
      const PDVerdict v = npd_test(k, d, opt);
      c.holds(label + " passes the " + to_string(v.mode) + " test, " + dstr(d), v.passed(), Source::reference, basis);
      c.at_least(label + " smallest relative eigenvalue, " + dstr(d), v.min_eigenvalue_seen, -1e-9, 0.0,
                 Source::reference, basis);
      c.at_least(label + " pinned point sets tested, " + dstr(d), v.trials_run, 100.0, 0.0, Source::elementary,
                 "coverage requirement");
    }
  }
}

void uvt_pd(Ctx& c) {
  npd_battery(c, {{"uvt", make_kernel("uvt")}}, false,
              "f(uvt) with nonnegative Maclaurin coefficients is 3-positive definite");
}

void quad_a_pd(Ctx& c) {
  std::vector<std::pair<std::string, KernelSpec>> ks;
  for (double a : c.nums("a")) {
    std::ostringstream s;
    s << a;
    ks.emplace_back("quad_a(a=" + s.str() + ",shift)", make_kernel("quad_a", {{"a", s.str()}, {"shift", "true"}}));
  }
  npd_battery(c, ks, false, "t^2 + u^2 + v^2 - a uvt + 1/(1-a) is 3-positive definite for a < 1");
}

void sumlift_cpd(Ctx& c) {
  npd_battery(c, {{"sum_lift(inner,3)", sum_lift(make_kernel("inner"), 3)}}, true,
              "sums over subsets of a positive definite kernel are conditionally positive definite");
}

void prodlift_pd(Ctx& c) {
  npd_battery(c,
              {{"prod_lift(frame2,3)", prod_lift(make_kernel("frame2"), 3)},
               {"prod_lift(inner,3)", prod_lift(make_kernel("inner"), 3)}},
              false, "products over subsets of a positive definite kernel are positive definite if H >= 0 or m = n-1");
}

void s100_nonconvex(Ctx& c) {
  const int d = c.integer("d");
  const KernelSpec k = make_kernel("s100");
  const DiscreteMeasure sigma = DiscreteMeasure::empirical(
      sample_sphere(d, static_cast<std::size_t>(c.count("atoms")), c.seed("surrogate")));
  const DiscreteMeasure nu = DiscreteMeasure::dirac(e(d, 1));
  const ConvexityReport r = convexity_probe(k, sigma, nu);
  const double chord = r.g(0.5) - 0.5 * (r.g(0.0) + r.g(1.0));
  const double expected = 3.0 * 0.125 * (d - 1.0) / d;
  c.near("g(1/2) - chord at t = 1/2, mixing sigma toward delta_e1", chord, expected, c.num("margin_tol"),
         Source::reference, "I_s100((1-t) sigma + t delta) = 3 t^2 (1-t) (d-1)/d");
  c.holds("s100 energy is not convex on the segment", !r.convex_on_unit_interval, Source::reference,
          "s100 energy is not convex at sigma");
  check_conditional_witness(c, k, "s100");
}

std::vector<KernelSpec> identity_kernels(int n) {
  if (n == 3) {
    return {make_kernel("uvt"),
            make_kernel("vol2"),
            make_kernel("area2"),
            make_kernel("s011"),
            make_kernel("s100"),
            make_kernel("quad_a", {{"a", "0.5"}, {"shift", "true"}}),
            make_kernel("prod_f_uvt", {{"f", "exp"}}),
            sum_lift(make_kernel("inner"), 3),
            prod_lift(make_kernel("frame2"), 3)};
  }
  return {sum_lift(make_kernel("inner"), 4), prod_lift(make_kernel("inner"), 4), sum_lift(make_kernel("uvt"), 4),
          prod_lift(make_kernel("frame2"), 4), sum_lift(make_kernel("s011"), 4), sum_lift(make_kernel("area2"), 4)};
}

void derivative_identities(Ctx& c) {
  const int d = c.integer("d");
  const int setups = c.integer("setups");
  for (int n : {3, 4}) {
    const std::vector<KernelSpec> ks = identity_kernels(n);
    const std::uint64_t seed = c.seed("n" + std::to_string(n));
    // Each identity is checked as |a - b| <= 1e-8 max(|a|, |b|) + 1e-14; the
    // reported value is the worst ratio of the two sides.
    auto ratio = [](double a, double b) {
      return std::abs(a - b) / (1e-8 * std::max(std::abs(a), std::abs(b)) + 1e-14);
    };
    double worst1 = 0.0;
    double worst2 = 0.0;
    for (int s = 0; s < setups; ++s) {
      const std::uint64_t sd = derive_seed(seed, static_cast<std::uint64_t>(s));
      std::mt19937_64 rng(sd);
      std::uniform_int_distribution<int> atoms(1, 4);
      const KernelSpec& k = ks[static_cast<std::size_t>(s) % ks.size()];
      const DiscreteMeasure mu = random_probability_measure(d, atoms(rng), derive_seed(sd, 1));
      const DiscreteMeasure nu = random_probability_measure(d, atoms(rng), derive_seed(sd, 2));
      const ConvexityReport r = convexity_probe(k, mu, nu);
      worst1 = std::max(worst1, ratio(r.h_prime_0, 2.0 / n * r.g_prime_0));
      worst2 = std::max(worst2, ratio(r.h_double_prime_0, 2.0 / (n * (n - 1.0)) * r.g_double_prime_0));
    }
    const std::string ns = "n=" + std::to_string(n);
    c.at_most("h'(0) vs (2/n) g'(0): worst error / (1e-8 max + 1e-14), " + ns, worst1, 1.0, 0.0,
              Source::reference, "h'(0) = (2/n) g'(0) = 2 (I(mu^{n-1}, nu) - I(mu))");
    c.at_most("h''(0) vs 2/(n(n-1)) g''(0): worst error / (1e-8 max + 1e-14), " + ns, worst2, 1.0, 0.0,
              Source::reference, "h''(0) = 2 (I(mu) - 2 I(mu^{n-1}, nu) + I(mu^{n-2}, nu^2))");
  }
}

void bcr_shift(Ctx& c) {
  const int d = c.integer("d");
  const int trials = c.integer("trials");
  const int set_size = c.integer("set_size");
  const UnitVector x0 = e(d, 1);

  // Pointwise identities.
  {
    const KernelSpec g = pin(make_kernel("neg_vol2"), {x0});
    const ShiftedKernels sh = cpd_shift(g, x0);
    const PointConfiguration pts = sample_sphere(d, 40, c.seed("pointwise"));
    double worst = 0.0;
    for (std::size_t i = 0; i + 1 < pts.size(); i += 2) {
      worst = std::max(worst, std::abs(sh.phi({pts[i], pts[i + 1]}) - g({pts[i], pts[i + 1]})));
    }
    c.at_most("max |phi - G| for G = pin(neg_vol2, e1), x0 = e1", worst, 1e-14, 0.0, Source::reference,
              "G(x, e1) = G(e1, y) = 0 and G(e1, e1) = 0 for the pinned negative volume kernel");

    const KernelSpec sq = make_kernel("riesz", {{"s", "2"}, {"scale", "-1"}});
    const ShiftedKernels sq_shift = cpd_shift(sq, x0);
    worst = sq_shift.phi0 ? 0.0 : 1.0;
    if (sq_shift.phi0) {
      for (std::size_t i = 0; i + 1 < pts.size(); i += 2) {
        const double expected = 2.0 * (pts[i].coords() - x0.coords()).dot(pts[i + 1].coords() - x0.coords());
        worst = std::max(worst, std::abs((*sq_shift.phi0)({pts[i], pts[i + 1]}) - expected));
      }
    }
    c.at_most("max |phi0 - 2<x - e1, y - e1>| for G = -|x - y|^2", worst, 1e-14, 0.0, Source::oracle,
              "expand |x - y|^2 = 2 - 2<x, y> on the sphere");
  }

  // Shift equivalence on shared point sets: phi plain on X <=> G conditional on X + {x0}.
  const std::vector<std::pair<std::string, KernelSpec>> ks{
      {"-|x-y|", make_kernel("riesz", {{"s", "1"}, {"scale", "-1"}})},
      {"-|x-y|^2", make_kernel("riesz", {{"s", "2"}, {"scale", "-1"}})},
      {"inner", make_kernel("inner")},
      {"pin(neg_vol2,e1)", pin(make_kernel("neg_vol2"), {x0})},
      {"pin(s011,e1)", pin(make_kernel("s011"), {x0})},
      {"pin(uvt,e1)", pin(make_kernel("uvt"), {x0})},
  };
  for (const auto& [label, g] : ks) {
    const KernelSpec phi = cpd_shift(g, x0).phi;
    int agree = 0;
    int failures = 0;
    for (int t = 0; t < trials; ++t) {
      const PointConfiguration x = sample_sphere(d, static_cast<std::size_t>(set_size), c.seed(label, static_cast<std::uint64_t>(t) + 1));
      std::vector<UnitVector> with = x.points();
      with.push_back(x0);
      const bool plain = pd_test_points(phi, x, false).passed();
      const bool cond = pd_test_points(g, PointConfiguration(with), true).passed();
      agree += plain == cond;
      failures += !cond;
    }
    c.at_least("shift equivalence agreement for " + label + " (of " + std::to_string(trials) + " sets; " +
                   std::to_string(failures) + " conditional failures)",
               agree, trials, 0.0, Source::reference,
               "phi is positive definite on X iff G is conditionally positive definite on X plus x0");
  }
}

void inequality_suite_scenario(Ctx& c) {
  const int d = c.integer("d");
  const int trials = c.integer("trials");
  const std::string basis_pd = "mutual energies of n-positive definite kernels obey AM, GM and lower bounds";
  {
    const InequalityReport r = inequality_suite(make_kernel("uvt"), d, trials, c.seed("uvt"));
    for (const char* name : {"am", "gm", "lower_bound", "max_on_diagonal", "mu_n_minus_1", "convex_n_minus_1"}) {
      c.at_most(std::string("uvt: worst ") + name + " residual", r.at(name).worst_residual, 0.0, 1e-10,
                Source::reference, basis_pd);
    }
  }
  for (double a : {-1.0, 0.0, 0.5, 1.0}) {
    std::ostringstream s;
    s << a;
    const KernelSpec k = make_kernel("quad_a", {{"a", s.str()}});
    const InequalityReport r = inequality_suite(k, d, trials, c.seed("quad_a", static_cast<std::uint64_t>(a * 10 + 20)));
    const std::string label = "quad_a(a=" + s.str() + ")";
    c.at_most(label + ": worst max_on_diagonal residual", r.at("max_on_diagonal").worst_residual, 0.0, 1e-10,
              Source::reference, "conditionally n-positive definite kernels attain their maximum on the diagonal");
    c.at_most(label + ": worst am residual", r.at("am").worst_residual, 0.0, 1e-10, Source::reference,
              "conditionally n-positive definite kernels obey the AM bound");
  }
  {
    const InequalityReport r = inequality_suite(sum_lift(make_kernel("inner"), 3), d, trials, c.seed("sum_lift"));
    c.at_most("sum_lift(inner,3): worst am residual", r.at("am").worst_residual, 0.0, 1e-10, Source::reference,
              "conditionally n-positive definite kernels obey the AM bound");
  }
  {
    const InequalityReport r = inequality_suite(make_kernel("s100"), d, trials, c.seed("s100"));
    c.at_least("s100: worst am residual (violation expected)", r.at("am").worst_residual, 1e-6, 0.0,
               Source::reference, "s100 is not conditionally 3-positive definite");
  }
}

struct OptimizerTarget {
  double target;   // lower bound (maximize) or upper bound (minimize) for the best run
  double bound;    // the measure-space optimum, never beaten by a discrete configuration
  std::string basis;
};

void optimizer_scenario(Ctx& c, const KernelSpec& k, bool maximize, const std::string& label,
                        const OptimizerTarget& goal) {
  OptimizerConfig cfg;
  cfg.steps = c.integer("steps");
  cfg.step_size = c.num("step_size");
  cfg.maximize = maximize;
  cfg.seed = c.seed(label);
  const MultistartResult r = optimize_multistart(k, c.integer("n"), c.integer("d"), cfg, c.integer("starts"));
  for (std::size_t s = 0; s < r.seeds.size(); ++s) c.report.seeds[label + "#start" + std::to_string(s)] = r.seeds[s];
  const double best = r.best_run().energies.back();
  bool monotone = true;
  for (const auto& run : r.runs) {
    for (std::size_t i = 1; i < run.energies.size(); ++i) {
      const double delta = run.energies[i] - run.energies[i - 1];
      if (maximize ? delta < -1e-12 : delta > 1e-12) monotone = false;
    }
  }
  const Comparison toward = maximize ? Comparison::at_least : Comparison::at_most;
  const Comparison beyond = maximize ? Comparison::at_most : Comparison::at_least;
  c.holds(label + ": energies monotone along every run", monotone, Source::elementary,
          "the line search accepts improving steps only");
  c.check(label + ": best final energy reaches the target", best, goal.target, 0.0, toward, Source::reference, goal.basis);
  c.check(label + ": best final energy does not pass the optimum over measures", best, goal.bound, 1e-9, beyond,
          Source::reference, "discrete energies are energies of empirical measures");
}

void maximize_area2(Ctx& c) {
  optimizer_scenario(c, make_kernel("area2"), true, "maximize_area2",
                     {0.45, 0.75 * (c.integer("d") - 1.0) / c.integer("d"),
                      "sup over probability measures of I_area2 is 3(d-1)/(4d)"});
}

void maximize_vol2(Ctx& c) {
  const double d = c.integer("d");
  optimizer_scenario(c, make_kernel("vol2"), true, "maximize_vol2",
                     {0.19, (d - 1.0) * (d - 2.0) / (d * d), "sup over probability measures of I_vol2 is (d-1)(d-2)/d^2"});
}

void minimize_s011(Ctx& c) {
  optimizer_scenario(c, make_kernel("s011"), false, "minimize_s011",
                     {1e-6, 0.0, "I_s011(mu) = 3 m^T S m (m the mean, S the second moment), zero iff m = 0"});
}

// ---------------------------------------------------------------------------

std::map<std::string, std::string> with_common(std::map<std::string, std::string> p) {
  p.emplace("seed", "1");
  p.emplace("tuples", "1000000");
  p.emplace("tol_scale", "1");
  return p;
}

const std::vector<Entry>& registry() {
  static const std::vector<Entry> entries = [] {
    const std::map<std::string, std::string> pd_defaults{
        {"d", "3,4"}, {"pin_trials", "4"}, {"inner_trials", "25"}, {"set_size", "40"}};
    std::vector<Entry> v{
        {{"area2-sigma", "Monte-Carlo squared triangle area under the uniform measure; potential constancy",
          {{"d", "2,3,5"}, {"surrogate", "20000"}, {"test_points", "50"}}},
         area2_sigma},
        {{"vol2-sigma", "Monte-Carlo squared volume under the uniform measure vs the moment oracle", {{"d", "3,4"}}},
         vol2_sigma},
        {{"frame-bound", "Monte-Carlo frame energy under the uniform measure equals 1/d", {{"d", "2,3,4,5,6"}}},
         frame_bound},
        {{"s011-counterexample", "exact negative energy of s011 pinned at e1; conditional witness", {{"d", "3"}}},
         s011_counterexample},
        {{"negvol2-not-cpd", "exact value -2 for the negated squared volume; conditional witness", {{"d", "3"}}},
         negvol2_not_cpd},
        {{"negarea2-not-cpd", "exact value -2 for the negated squared area; conditional witness", {{"d", "3"}}},
         negarea2_not_cpd},
        {{"s011-potential", "first potential of s011 against the uniform measure is <x,y>/d",
          {{"d", "3"}, {"atoms", "100000"}, {"pairs", "20"}}},
         s011_potential},
        {{"uvt-potential", "second potential of uvt: constant 1/d^2 for uniform, varying for a point mass",
          {{"surrogate", "20000"}, {"test_points", "50"}}},
         uvt_potential},
        {{"uvt-pd", "uvt passes the 3-positive-definiteness test", pd_defaults}, uvt_pd},
        {{"quad-a-pd", "shifted quad_a passes the 3-positive-definiteness test", [&] {
            auto p = pd_defaults;
            p["a"] = "-1,0,0.5,0.9";
            return p;
          }()},
         quad_a_pd},
        {{"sumlift-cpd", "sum_lift(inner,3) passes the conditional test", pd_defaults}, sumlift_cpd},
        {{"prodlift-pd", "prod_lift of nonnegative or (n-1)-input kernels passes the test", pd_defaults}, prodlift_pd},
        {{"s100-nonconvex", "s100 energy is not convex along uniform -> point mass",
          {{"d", "3"}, {"atoms", "250"}, {"margin_tol", "0.03"}}},
         s100_nonconvex},
        {{"derivative-identities", "first and second derivative identities between g and h at t = 0",
          {{"d", "3"}, {"setups", "50"}}},
         derivative_identities},
        {{"bcr-shift", "shifted kernel is positive definite iff the original is conditionally so",
          {{"d", "3"}, {"trials", "20"}, {"set_size", "30"}}},
         bcr_shift},
        {{"inequality-suite", "AM, GM, lower-bound, diagonal and convexity residuals", {{"d", "3"}, {"trials", "1000"}}},
         inequality_suite_scenario},
        {{"maximize-area2", "particle ascent for the squared triangle area",
          {{"d", "3"}, {"n", "30"}, {"steps", "2000"}, {"step_size", "0.5"}, {"starts", "4"}}},
         maximize_area2},
        {{"maximize-vol2", "particle ascent for the squared volume",
          {{"d", "3"}, {"n", "30"}, {"steps", "2000"}, {"step_size", "0.5"}, {"starts", "4"}}},
         maximize_vol2},
        {{"minimize-s011", "particle descent for s011 reaches the infimum 0",
          {{"d", "3"}, {"n", "2"}, {"steps", "2000"}, {"step_size", "0.5"}, {"starts", "4"}}},
         minimize_s011},
    };
    for (auto& entry : v) entry.info.defaults = with_common(entry.info.defaults);
    std::sort(v.begin(), v.end(), [](const Entry& a, const Entry& b) { return a.info.name < b.info.name; });
    return v;
  }();
  return entries;
}

}  // namespace

std::vector<ScenarioInfo> scenario_catalog() {
  std::vector<ScenarioInfo> out;
  for (const auto& e : registry()) out.push_back(e.info);
  return out;
}

std::vector<std::string> list_scenarios() {
  std::vector<std::string> out;
  for (const auto& e : registry()) out.push_back(e.info.name);
  return out;
}

Report run_scenario(const std::string& name, const Overrides& overrides) {
  for (const auto& entry : registry()) {
    if (entry.info.name != name) continue;
    Ctx ctx(entry.info, overrides);
    entry.run(ctx);
    return std::move(ctx.report);
  }
  std::string known;
  for (const auto& n : list_scenarios()) known += (known.empty() ? "" : ", ") + n;
  throw UnknownScenario("unknown scenario '" + name + "'; available: " + known);
}

}  // namespace ninput
