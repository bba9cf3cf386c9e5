// ninput: command-line front end for energies, definiteness tests, convexity
// probes, particle optimization and the verification scenarios.
//
// Exit codes: 0 success, 2 a verification assertion failed, 64 usage error,
// 1 anything else.

#include <algorithm>
#include <atomic>
#include <chrono>
#include <fstream>
#include <iostream>
#include <map>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"
#include "ninput/certify.hpp"
#include "ninput/energy.hpp"
#include "ninput/errors.hpp"
#include "ninput/kernel_parse.hpp"
#include "ninput/measure_io.hpp"
#include "ninput/optimize.hpp"
#include "ninput/parallel.hpp"
#include "ninput/scenarios.hpp"

namespace {

using nlohmann::ordered_json;
using namespace ninput;

constexpr int kExitAssertion = 2;
constexpr int kExitUsage = 64;

struct Globals {
  double tol_scale = 1.0;
  std::int64_t tuples = 0;   // 0: command default
  int threads = 0;           // 0: hardware concurrency
};

std::string measure_csv(const DiscreteMeasure& m) {
  std::ostringstream out;
  write_measure_csv(out, m);
  return out.str();
}

ordered_json estimate_json(const EnergyEstimate& e) {
  return {{"value", e.value}, {"stderr", e.std_error}, {"samples_used", e.samples_used}};
}

ordered_json verdict_json(const PDVerdict& v) {
  ordered_json j{{"mode", to_string(v.mode)},
                 {"outcome", to_string(v.outcome)},
                 {"trials_run", v.trials_run},
                 {"min_eigenvalue_seen", v.min_eigenvalue_seen}};
  if (v.witness) {
    ordered_json pins = ordered_json::array();
    for (const auto& z : v.witness->pins) {
      pins.push_back(std::vector<double>(z.coords().data(), z.coords().data() + z.dim()));
    }
    j["witness"] = {{"pins", pins}, {"energy", v.witness->energy}, {"measure_csv", measure_csv(v.witness->measure)}};
  }
  return j;
}

void print(const ordered_json& j) { std::cout << j.dump(2) << "\n"; }

std::vector<DiscreteMeasure> read_measures(const std::vector<std::string>& paths) {
  std::vector<DiscreteMeasure> out;
  for (const auto& p : paths) out.push_back(read_measure_csv(std::filesystem::path(p)));
  return out;
}

// "uniform:M" (M sampled points, dimension from --d) or a CSV path.
DiscreteMeasure measure_arg(const std::string& arg, int d, std::uint64_t seed) {
  const std::string prefix = "uniform:";
  if (arg.rfind(prefix, 0) == 0) {
    const long long m = std::stoll(arg.substr(prefix.size()));
    if (m < 1) throw InvalidArgument("uniform:M needs M >= 1");
    if (d < 2) throw InvalidArgument("uniform:M needs --d >= 2");
    return DiscreteMeasure::empirical(sample_sphere(d, static_cast<std::size_t>(m), seed));
  }
  return read_measure_csv(std::filesystem::path(arg));
}

std::map<std::string, std::string> parse_params(const std::vector<std::string>& items) {
  std::map<std::string, std::string> out;
  for (const auto& item : items) {
    const auto eq = item.find('=');
    if (eq == std::string::npos || eq == 0) throw InvalidArgument("--param expects key=value, got '" + item + "'");
    out[item.substr(0, eq)] = item.substr(eq + 1);
  }
  return out;
}

int run_verify(const std::vector<std::string>& requested, int jobs, const std::optional<std::uint64_t>& seed,
               const std::string& out_path, const std::vector<std::string>& params, bool timing,
               const Globals& g) {
  const std::vector<ScenarioInfo> catalog = scenario_catalog();
  std::vector<const ScenarioInfo*> selected;   // registry order
  for (const auto& info : catalog) {
    if (requested.empty() || std::find(requested.begin(), requested.end(), info.name) != requested.end()) {
      selected.push_back(&info);
    }
  }
  for (const auto& n : requested) {
    if (std::none_of(catalog.begin(), catalog.end(), [&](const auto& c) { return c.name == n; })) {
      std::string known;
      for (const auto& c : catalog) known += (known.empty() ? "" : ", ") + c.name;
      throw UnknownScenario("unknown scenario '" + n + "'; available: " + known);
    }
  }

  Overrides overrides = parse_params(params);
  for (const auto& [key, value] : overrides) {
    if (std::none_of(selected.begin(), selected.end(), [&](const auto* c) { return c->defaults.count(key) > 0; })) {
      throw InvalidArgument("no selected scenario accepts parameter '" + key + "'");
    }
  }
  if (seed) overrides["seed"] = std::to_string(*seed);
  if (g.tuples > 0) overrides["tuples"] = std::to_string(g.tuples);
  if (g.tol_scale != 1.0) {
    std::ostringstream s;
    s.precision(17);
    s << g.tol_scale;
    overrides["tol_scale"] = s.str();
  }
  std::vector<std::string> names;
  for (const auto* c : selected) names.push_back(c->name);

  std::vector<Report> reports(names.size());
  std::vector<std::exception_ptr> errors(names.size());
  std::atomic<std::size_t> next{0};
  auto worker = [&] {
    for (std::size_t i; (i = next.fetch_add(1)) < names.size();) {
      try {
        const auto start = std::chrono::steady_clock::now();
        // Each scenario takes the overrides it knows.
        Overrides mine;
        for (const auto& [k, v] : overrides) {
          if (selected[i]->defaults.count(k)) mine[k] = v;
        }
        reports[i] = run_scenario(names[i], mine);
        if (timing) {
          reports[i].wall_seconds =
              std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
        }
        std::cerr << (reports[i].passed() ? "PASS " : "FAIL ") << names[i] << "\n";
      } catch (...) {
        errors[i] = std::current_exception();
      }
    }
  };
  std::vector<std::thread> pool;
  for (int j = 1; j < std::max(1, jobs); ++j) pool.emplace_back(worker);
  worker();
  for (auto& t : pool) t.join();
  for (const auto& e : errors) {
    if (e) std::rethrow_exception(e);
  }

  const std::string json = reports_to_json(reports);
  if (out_path.empty()) {
    std::cout << json << "\n";
  } else {
    std::ofstream out(out_path);
    if (!out) throw std::runtime_error("cannot write " + out_path);
    out << json << "\n";
  }
  for (const auto& r : reports) {
    if (!r.passed()) return kExitAssertion;
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"ninput: n-input kernel energies on spheres"};
  app.require_subcommand(1);
  app.set_config("--config", "", "flat key=value file; command-line flags win");
  Globals g;
  app.add_option("--tol-scale", g.tol_scale, "multiply every tolerance")->check(CLI::PositiveNumber);
  app.add_option("--tuples", g.tuples, "Monte-Carlo tuple budget")->check(CLI::PositiveNumber);
  app.add_option("--threads", g.threads, "worker threads (default: all cores)")->check(CLI::PositiveNumber);

  std::string kernel;
  int d = 3;
  std::uint64_t seed = 0;

  // energy
  auto* energy = app.add_subcommand("energy", "discrete energy of a point configuration");
  std::string points;
  energy->add_option("--kernel", kernel, "kernel spec, e.g. quad_a:a=0.5,shift=true")->required();
  energy->add_option("--points", points, "points CSV")->required();

  // energy-int
  auto* energy_int = app.add_subcommand("energy-int", "Monte-Carlo energy under the uniform measure");
  std::int64_t tuples = 1000000;
  energy_int->add_option("--kernel", kernel)->required();
  energy_int->add_option("--d", d, "ambient dimension")->required();
  energy_int->add_option("--tuples", tuples)->check(CLI::Range(100ll, 1000000000000ll));
  energy_int->add_option("--seed", seed);

  // mutual
  auto* mutual = app.add_subcommand("mutual", "mutual energy of n measures");
  std::vector<std::string> measures;
  mutual->add_option("--kernel", kernel)->required();
  mutual->add_option("--measure", measures, "measure CSV (repeat n times, or once for I(mu))")->required();

  // potential
  auto* pot = app.add_subcommand("potential", "j-th potential at query points");
  int order = 1;
  std::string at;
  pot->add_option("--kernel", kernel)->required();
  pot->add_option("--measure", measures, "measure CSV (once, or j times)")->required();
  pot->add_option("--order", order, "j")->required();
  pot->add_option("--at", at, "query points CSV, read in groups of n-j")->required();

  // pdtest
  auto* pdtest = app.add_subcommand("pdtest", "randomized (conditional) positive-definiteness test");
  bool conditional = false;
  int trials = 25;
  int pin_trials = 4;
  int set_size = 40;
  double tol = kDefaultTolerances.eigenvalue;
  pdtest->add_option("--kernel", kernel)->required();
  pdtest->add_option("--d", d)->required();
  pdtest->add_flag("--conditional", conditional);
  pdtest->add_option("--trials", trials, "point sets (per pin tuple for n >= 3)")->check(CLI::PositiveNumber);
  pdtest->add_option("--pin-trials", pin_trials, "pin tuples for n >= 3")->check(CLI::PositiveNumber);
  pdtest->add_option("--set-size", set_size)->check(CLI::Range(2, 100000));
  pdtest->add_option("--seed", seed);
  pdtest->add_option("--tol", tol, "relative eigenvalue tolerance")->check(CLI::NonNegativeNumber);

  // convexity
  auto* convexity = app.add_subcommand("convexity", "convexity probe along (1-t) mu + t nu");
  std::string mu_arg;
  std::string nu_arg;
  convexity->add_option("--kernel", kernel)->required();
  convexity->add_option("--mu", mu_arg, "CSV or uniform:M")->required();
  convexity->add_option("--nu", nu_arg, "CSV or uniform:M")->required();
  convexity->add_option("--d", d, "dimension for uniform:M");
  convexity->add_option("--seed", seed);

  // inequalities
  auto* ineq = app.add_subcommand("inequalities", "AM/GM/lower-bound/diagonal residuals");
  int ineq_trials = 1000;
  ineq->add_option("--kernel", kernel)->required();
  ineq->add_option("--d", d)->required();
  ineq->add_option("--trials", ineq_trials)->check(CLI::PositiveNumber);
  ineq->add_option("--seed", seed);

  // minimize
  auto* minimize = app.add_subcommand("minimize", "particle descent (or ascent) on S^{d-1}");
  int particles = 0;
  int starts = 1;
  bool fd = false;
  std::string trace_out;
  std::string points_out;
  OptimizerConfig cfg;
  minimize->add_option("--kernel", kernel)->required();
  minimize->add_option("--n", particles, "number of particles")->required()->check(CLI::PositiveNumber);
  minimize->add_option("--d", d)->required();
  minimize->add_flag("--maximize", cfg.maximize);
  minimize->add_option("--steps", cfg.steps)->check(CLI::NonNegativeNumber);
  minimize->add_option("--lr", cfg.step_size, "first trial step of the line search")->check(CLI::PositiveNumber);
  minimize->add_option("--seed", seed);
  minimize->add_option("--multistart", starts)->check(CLI::PositiveNumber);
  minimize->add_flag("--fd", fd, "finite-difference gradients");
  minimize->add_option("--fd-epsilon", cfg.fd_epsilon)->check(CLI::Range(1e-8, 1e-4));
  minimize->add_option("--stop-tol", cfg.stop_tol)->check(CLI::NonNegativeNumber);
  minimize->add_option("--trace-out", trace_out, "CSV of (iteration, energy) for the best run");
  minimize->add_option("--points-out", points_out, "CSV of the best final configuration");

  // verify / scenarios
  auto* verify = app.add_subcommand("verify", "run verification scenarios (all by default)");
  std::vector<std::string> scenario_names;
  int jobs = 1;
  std::optional<std::uint64_t> verify_seed;
  std::string out_path;
  std::vector<std::string> params;
  bool timing = false;
  verify->add_option("--scenario,scenario", scenario_names, "scenario name (repeatable)");
  verify->add_option("--jobs", jobs)->check(CLI::PositiveNumber);
  verify->add_option("--seed", verify_seed);
  verify->add_option("--out", out_path, "write the JSON report here");
  verify->add_option("--param", params, "scenario parameter override key=value");
  verify->add_flag("--timing", timing, "include wall-clock seconds (makes output run-dependent)");

  auto* list = app.add_subcommand("scenarios", "list scenarios and their parameters");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : kExitUsage;
  }

  try {
    if (g.threads > 0) set_thread_count(g.threads);

    if (*energy) {
      print(estimate_json(discrete_energy(parse_kernel(kernel), read_points_csv(std::filesystem::path(points)))));
    } else if (*energy_int) {
      print(estimate_json(mc_energy_uniform(parse_kernel(kernel), d, g.tuples > 0 ? g.tuples : tuples, seed)));
    } else if (*mutual) {
      const KernelSpec k = parse_kernel(kernel);
      std::vector<DiscreteMeasure> ms = read_measures(measures);
      if (ms.size() == 1) ms.assign(static_cast<std::size_t>(k.arity()), ms.front());
      print(estimate_json(mutual_energy(k, ms)));
    } else if (*pot) {
      const KernelSpec k = parse_kernel(kernel);
      std::vector<DiscreteMeasure> ms = read_measures(measures);
      if (ms.size() == 1) ms.assign(static_cast<std::size_t>(order), ms.front());
      if (static_cast<int>(ms.size()) != order) throw InvalidArgument("--order must match the number of --measure files");
      const std::vector<double> values = potential(k, ms, read_points_csv(std::filesystem::path(at)));
      print({{"values", values}});
    } else if (*pdtest) {
      const KernelSpec k = parse_kernel(kernel);
      const double t = tol * g.tol_scale;
      if (k.arity() == 2) {
        PDTestOptions opt;
        opt.conditional = conditional;
        opt.trials = trials;
        opt.set_size = set_size;
        opt.seed = seed;
        opt.tol = t;
        print(verdict_json(pd_test_2input(k, d, opt)));
      } else {
        NPDTestOptions opt;
        opt.conditional = conditional;
        opt.pin_trials = pin_trials;
        opt.inner_trials = trials;
        opt.set_size = set_size;
        opt.seed = seed;
        opt.tol = t;
        print(verdict_json(npd_test(k, d, opt)));
      }
    } else if (*convexity) {
      const KernelSpec k = parse_kernel(kernel);
      const DiscreteMeasure mu = measure_arg(mu_arg, d, derive_seed(seed, 0));
      const DiscreteMeasure nu = measure_arg(nu_arg, d, derive_seed(seed, 1));
      const ConvexityReport r = convexity_probe(k, mu, nu);
      ordered_json j{{"coefficients", r.g.coefficients()},
                     {"g_prime_0", r.g_prime_0},
                     {"g_double_prime_0", r.g_double_prime_0},
                     {"h_prime_0", r.h_prime_0},
                     {"h_double_prime_0", r.h_double_prime_0},
                     {"convex_on_unit_interval", r.convex_on_unit_interval},
                     {"chord_violation", r.chord_violation}};
      j["violation_t"] = r.violation_t ? ordered_json(*r.violation_t) : ordered_json(nullptr);
      print(j);
    } else if (*ineq) {
      const InequalityReport r = inequality_suite(parse_kernel(kernel), d, ineq_trials, seed);
      ordered_json j = ordered_json::array();
      for (const auto& e : r.entries) {
        j.push_back({{"name", e.name},
                     {"worst_residual", e.worst_residual},
                     {"evaluated", e.evaluated},
                     {"asserted", e.asserted},
                     {"expected_violation", e.expected_violation}});
      }
      print({{"inequalities", j}});
    } else if (*minimize) {
      const KernelSpec k = parse_kernel(kernel);
      cfg.seed = seed;
      cfg.grad_mode = fd ? GradMode::finite_difference : GradMode::analytic;
      const MultistartResult r = optimize_multistart(k, particles, d, cfg, starts);
      const OptimizationTrace& best = r.best_run();
      if (!trace_out.empty()) {
        std::ofstream out(trace_out);
        out << "iteration,energy\n";
        out.precision(17);
        for (std::size_t i = 0; i < best.energies.size(); ++i) out << i << "," << best.energies[i] << "\n";
      }
      if (!points_out.empty()) {
        std::ofstream out(points_out);
        write_points_csv(out, best.final_config);
      }
      ordered_json runs = ordered_json::array();
      for (std::size_t s = 0; s < r.runs.size(); ++s) {
        runs.push_back({{"seed", r.seeds[s]},
                        {"final_energy", r.runs[s].energies.back()},
                        {"iterations_run", r.runs[s].iterations_run},
                        {"converged", r.runs[s].converged},
                        {"final_gradient_norm", r.runs[s].final_gradient_norm}});
      }
      print({{"kernel", k.describe()},
             {"maximize", cfg.maximize},
             {"best", r.best},
             {"final_energy", best.energies.back()},
             {"runs", runs}});
    } else if (*verify) {
      return run_verify(scenario_names, jobs, verify_seed, out_path, params, timing, g);
    } else if (*list) {
      ordered_json j = ordered_json::array();
      for (const auto& s : scenario_catalog()) j.push_back({{"name", s.name}, {"summary", s.summary}, {"parameters", s.defaults}});
      print(j);
    }
    return 0;
  } catch (const InvalidArgument& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitUsage;
  } catch (const UnknownScenario& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitUsage;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
}
