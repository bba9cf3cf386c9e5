// Acceptance run: one PASS/FAIL line per criterion, details indented below.
// Exit status is nonzero when any criterion fails.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <string>
#include <vector>

#include "ninput/certify.hpp"
#include "ninput/energy.hpp"
#include "ninput/kernels.hpp"
#include "ninput/optimize.hpp"
#include "ninput/parallel.hpp"
#include "ninput/scenarios.hpp"

namespace {

using namespace ninput;

struct Criterion {
  std::vector<std::string> details;
  bool ok = true;

  void require(bool cond, const std::string& what) {
    details.push_back(std::string(cond ? "ok   " : "FAIL ") + what);
    ok = ok && cond;
  }
  void note(const std::string& what) { details.push_back("     " + what); }
};

std::string fmt(const char* f, double a, double b = 0.0, double c = 0.0) {
  char buf[256];
  std::snprintf(buf, sizeof buf, f, a, b, c);
  return buf;
}

double seconds_since(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

void require_report(Criterion& c, const Report& r) {
  for (const auto& a : r.assertions) {
    if (!a.pass) c.require(false, r.scenario + ": " + a.description + fmt(" (observed %.6g, expected %.6g)", a.observed, a.expected));
  }
  c.require(r.passed(), r.scenario + " passes (" + std::to_string(r.assertions.size()) + " assertions)");
}

UnitVector e(int d, int i, double s = 1.0) { return UnitVector::basis(d, i - 1, s); }
DiscreteMeasure dirac(const UnitVector& x) { return DiscreteMeasure::dirac(x); }

void c1_area2(Criterion& c) {
  for (int d : {2, 3, 5}) {
    const auto t0 = std::chrono::steady_clock::now();
    const auto r = mc_energy_uniform(make_kernel("area2"), d, 1000000, derive_seed(1, d));
    const double secs = seconds_since(t0);
    const double target = 3.0 * (d - 1) / (4.0 * d);
    c.require(std::abs(r.value - target) <= 4.0 * r.std_error,
              fmt("d=%g: %.6f vs %.6f within 4 stderr", d, r.value, target));
    c.require(r.std_error < 5e-4, fmt("d=%g: stderr %.3g < 5e-4", d, r.std_error));
    c.require(secs < 15.0, fmt("d=%g: %.2f s < 15 s", d, secs));
  }
  require_report(c, run_scenario("area2-sigma"));
}

void c2_vol2(Criterion& c) {
  // Moment oracle: E[u^2] = 1/d, E[uvt] = 1/d^2, E[u] = E[uv] = 0.
  const int d = 3;
  const double target = 1.0 - 3.0 / d + 2.0 / (d * d);
  const auto r = mc_energy_uniform(make_kernel("vol2"), d, 1000000, 7);
  c.require(std::abs(target - 2.0 / 9.0) < 1e-15, "oracle value 2/9 for d=3");
  c.require(std::abs(r.value - target) <= 4.0 * r.std_error,
            fmt("%.6f vs %.6f within 4 stderr (%.2g)", r.value, target, r.std_error));
  require_report(c, run_scenario("vol2-sigma"));
}

void c3_counterexamples(Criterion& c) {
  const double a = mutual_energy(make_kernel("s011"), {dirac(e(3, 1)), combine(dirac(e(3, 2)), dirac(e(3, 1, -1)), 1, -1),
                                                       combine(dirac(e(3, 2)), dirac(e(3, 1, -1)), 1, -1)})
                       .value;
  const auto nu = combine(dirac(e(3, 2)), dirac(e(3, 3)), 1, 1);
  const double b = mutual_energy(make_kernel("neg_vol2"), {dirac(e(3, 1)), nu, nu}).value;
  const auto rho = combine(dirac(e(3, 2)), dirac(e(3, 1, -1)), 1, 1);
  const double d = mutual_energy(make_kernel("neg_area2"), {dirac(e(3, 1)), rho, rho}).value;
  c.require(std::abs(a + 1.0) <= 1e-12, fmt("s011: %.17g", a));
  c.require(std::abs(b + 2.0) <= 1e-12, fmt("neg_vol2: %.17g", b));
  c.require(std::abs(d + 2.0) <= 1e-12, fmt("neg_area2: %.17g", d));
}

void c4_pd_battery(Criterion& c) {
  for (const char* s : {"uvt-pd", "quad-a-pd", "sumlift-cpd", "prodlift-pd"}) require_report(c, run_scenario(s));
  for (const char* name : {"neg_vol2", "neg_area2", "s011", "s100"}) {
    const KernelSpec k = make_kernel(name);
    NPDTestOptions opt;
    opt.conditional = true;
    opt.seed = 42;
    const PDVerdict v = npd_test(k, 3, opt);
    if (!v.witness) {
      c.require(false, std::string(name) + ": conditional witness found");
      continue;
    }
    std::vector<DiscreteMeasure> args;
    for (const auto& z : v.witness->pins) args.push_back(dirac(z));
    args.push_back(v.witness->measure);
    args.push_back(v.witness->measure);
    const double again = mutual_energy(k, args).value;
    c.require(again < 0.0 && std::abs(again - v.witness->energy) <= 1e-12 &&
                  std::abs(v.witness->measure.total_mass()) <= 1e-12,
              std::string(name) + fmt(": balanced witness, energy %.6g recomputed %.6g", v.witness->energy, again));
  }
}

void c5_inequalities(Criterion& c) {
  const InequalityReport r = inequality_suite(make_kernel("uvt"), 3, 1000, 5);
  for (const char* name : {"am", "gm", "lower_bound"}) {
    const auto& e = r.at(name);
    c.require(e.evaluated == 1000 && e.worst_residual <= 1e-10,
              std::string("uvt ") + name + fmt(": worst residual %.3g over %g triples", e.worst_residual, e.evaluated));
  }
  for (const char* a : {"-1", "0", "0.5", "1"}) {
    const InequalityReport q = inequality_suite(make_kernel("quad_a", {{"a", a}}), 3, 1000, 6);
    const auto& e = q.at("max_on_diagonal");
    c.require(e.worst_residual <= 1e-10,
              std::string("quad_a a=") + a + fmt(": diagonal residual %.3g over %g triples", e.worst_residual, e.evaluated));
  }
}

void c6_derivatives(Criterion& c) { require_report(c, run_scenario("derivative-identities")); }

void c7_optimizer(Criterion& c) {
  const auto t0 = std::chrono::steady_clock::now();
  require_report(c, run_scenario("maximize-area2"));
  c.note(fmt("maximize-area2 took %.1f s", seconds_since(t0)));
  require_report(c, run_scenario("minimize-s011"));

  double worst = 0.0;
  const char* kernels[] = {"area2", "vol2", "s011", "uvt", "s100"};
  for (int trial = 0; trial < 100; ++trial) {
    const KernelSpec k = make_kernel(kernels[trial % 5]);
    const PointConfiguration cfg = sample_sphere(3 + trial % 3, 6, derive_seed(77, trial));
    const auto a = energy_gradients(k, cfg, GradMode::analytic);
    const auto f = energy_gradients(k, cfg, GradMode::finite_difference, 1e-6);
    double diff = 0.0, scale = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) {
      diff = std::max(diff, (a[i] - f[i]).norm());
      scale = std::max(scale, a[i].norm());
    }
    worst = std::max(worst, diff / std::max(scale, 1e-12));
  }
  c.require(worst <= 1e-6, fmt("analytic vs finite-difference gradients, worst relative gap %.3g", worst));
}

void c8_constancy(Criterion& c) {
  for (const char* name : {"area2", "uvt"}) {
    const KernelSpec k = make_kernel(name);
    const DiscreteMeasure sigma = DiscreteMeasure::empirical(sample_sphere(3, 20000, 101));
    const PointConfiguration pts = sample_sphere(3, 50, 102);
    ConstancyOptions opt;
    opt.seed = 103;
    opt.stderr_multiple = 5.0;
    const ConstancyResult r = potential_constancy_check(k, sigma, pts, 0.0, opt);
    c.require(r.pass, std::string(name) + fmt(": surrogate max deviation %.3g <= %.3g (stderr %.3g)", r.max_deviation,
                                               r.tol_used, r.std_error));
    const ConstancyResult p = potential_constancy_check(k, dirac(e(3, 1)), pts, 0.0, opt);
    c.require(!p.pass, std::string(name) + fmt(": point mass at e1 fails the check (max deviation %.3g, tol %.3g)",
                                               p.max_deviation, p.tol_used));
  }
}

void c9_determinism(Criterion& c) {
  const std::vector<std::string> names{"area2-sigma", "s011-counterexample", "uvt-pd", "derivative-identities",
                                       "inequality-suite", "minimize-s011"};
  const Overrides small{{"tuples", "200000"}};
  for (const auto& name : names) {
    std::vector<std::string> outputs;
    for (int threads : {1, 4, 1, 4}) {
      set_thread_count(threads);
      Overrides o;
      if (name == "area2-sigma") o = small;
      outputs.push_back(run_scenario(name, o).to_json());
    }
    set_thread_count(1);
    bool same = true;
    for (const auto& s : outputs) same = same && s == outputs.front();
    c.require(same, name + ": identical JSON for threads 1, 4, 1, 4");
  }
}

}  // namespace

int main() {
  const std::vector<std::pair<std::string, std::function<void(Criterion&)>>> criteria{
      {"1 area2 energy of the uniform measure", c1_area2},
      {"2 vol2 energy of the uniform measure", c2_vol2},
      {"3 exact counterexample values", c3_counterexamples},
      {"4 definiteness battery and witnesses", c4_pd_battery},
      {"5 inequality suite", c5_inequalities},
      {"6 derivative identities", c6_derivatives},
      {"7 optimizer", c7_optimizer},
      {"8 potential constancy", c8_constancy},
      {"9 determinism across thread counts", c9_determinism},
  };
  int failed = 0;
  for (const auto& [name, run] : criteria) {
    Criterion c;
    try {
      run(c);
    } catch (const std::exception& ex) {
      c.require(false, std::string("exception: ") + ex.what());
    }
    std::printf("%s criterion %s\n", c.ok ? "PASS" : "FAIL", name.c_str());
    for (const auto& d : c.details) std::printf("    %s\n", d.c_str());
    std::fflush(stdout);
    failed += c.ok ? 0 : 1;
  }
  std::printf("%d of %zu criteria passed\n", static_cast<int>(criteria.size()) - failed, criteria.size());
  return failed == 0 ? 0 : 1;
}
