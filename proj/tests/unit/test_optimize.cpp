#include <gtest/gtest.h>

#include <cmath>

#include "helpers.hpp"
#include "ninput/certify.hpp"
#include "ninput/energy.hpp"
#include "ninput/errors.hpp"
#include "ninput/optimize.hpp"

namespace {

using namespace ninput;
using ninput::testing::dirac;
using ninput::testing::e;

PointConfiguration moved(const PointConfiguration& c, std::size_t i, const Vector& v) {
  std::vector<UnitVector> pts = c.points();
  pts[i] = retract(pts[i], v);
  return PointConfiguration(pts);
}

TEST(Gradient, MatchesDirectionalDerivative) {
  const PointConfiguration c = sample_sphere(3, 6, 1);
  for (const char* name : {"area2", "vol2", "s011", "uvt"}) {
    const auto k = make_kernel(name);
    for (std::size_t i : {0u, 3u}) {
      const Vector g = energy_gradient(k, c, i);
      EXPECT_NEAR(g.dot(c[i].coords()), 0.0, 1e-12);
      const Vector v = project_tangent(c[i], Vector::LinSpaced(3, 0.3, -0.8));
      const double h = 1e-6;
      const double fd =
          (discrete_energy(k, moved(c, i, h * v)).value - discrete_energy(k, moved(c, i, -h * v)).value) / (2 * h);
      EXPECT_NEAR(g.dot(v), fd, 1e-7) << name;
    }
  }
}

TEST(Gradient, AnalyticMatchesFiniteDifferenceMode) {
  const PointConfiguration c = sample_sphere(4, 5, 2);
  const auto k = make_kernel("quad_a", {{"a", "0.5"}});
  const auto a = energy_gradients(k, c);
  const auto f = energy_gradients(k, c, GradMode::finite_difference, 1e-6);
  for (std::size_t i = 0; i < a.size(); ++i) EXPECT_LE((a[i] - f[i]).norm(), 1e-7);
}

TEST(Gradient, CoincidentPointsAreCritical) {
  const UnitVector x = UnitVector::normalized(Vector::LinSpaced(3, 1.0, 2.0));
  const PointConfiguration c({x, x, x, x});
  EXPECT_NEAR(energy_gradient(make_kernel("area2"), c, 0).norm(), 0.0, 1e-15);
  EXPECT_THROW(energy_gradient(make_kernel("area2"), c, 4), InvalidArgument);
}

TEST(Config, Validation) {
  OptimizerConfig cfg;
  EXPECT_NO_THROW(cfg.validate());
  cfg.grad_mode = GradMode::finite_difference;
  cfg.fd_epsilon = 1e-3;
  EXPECT_THROW(cfg.validate(), InvalidArgument);
  cfg = {};
  cfg.steps = -1;
  EXPECT_THROW(cfg.validate(), InvalidArgument);
  cfg = {};
  cfg.step_size = 0.0;
  EXPECT_THROW(cfg.validate(), InvalidArgument);
}

TEST(Descent, MonotoneAndReproducible) {
  OptimizerConfig cfg;
  cfg.steps = 60;
  cfg.seed = 5;
  cfg.maximize = true;
  const auto k = make_kernel("area2");
  const auto a = optimize_discrete(k, 8, 3, cfg);
  const auto b = optimize_discrete(k, 8, 3, cfg);
  ASSERT_EQ(a.energies.size(), b.energies.size());
  for (std::size_t i = 0; i < a.energies.size(); ++i) EXPECT_EQ(a.energies[i], b.energies[i]);
  for (std::size_t i = 1; i < a.energies.size(); ++i) EXPECT_GE(a.energies[i], a.energies[i - 1]);
  EXPECT_GT(a.energies.back(), a.energies.front());
  EXPECT_EQ(static_cast<int>(a.energies.size()), a.iterations_run + 1);
}

TEST(Descent, MinimizeS011ReachesZero) {
  OptimizerConfig cfg;
  cfg.steps = 500;
  cfg.seed = 3;
  const auto t = optimize_discrete(make_kernel("s011"), 2, 3, cfg);
  EXPECT_LE(t.energies.back(), 1e-6);
  for (std::size_t i = 1; i < t.energies.size(); ++i) EXPECT_LE(t.energies[i], t.energies[i - 1]);
}

TEST(Descent, ZeroStepsReturnsStart) {
  OptimizerConfig cfg;
  cfg.steps = 0;
  const PointConfiguration start = sample_sphere(3, 4, 9);
  const auto t = optimize_from(make_kernel("uvt"), start, cfg);
  EXPECT_EQ(t.energies.size(), 1u);
  EXPECT_TRUE(t.final_config[0] == start[0]);
}

TEST(Descent, StationaryStartConverges) {
  OptimizerConfig cfg;
  const UnitVector x = e(3, 1);
  const auto t = optimize_from(make_kernel("area2"), PointConfiguration({x, x, x}), cfg);
  EXPECT_TRUE(t.converged);
  EXPECT_EQ(t.iterations_run, 0);
}

TEST(Multistart, BestIsMinimal) {
  OptimizerConfig cfg;
  cfg.steps = 30;
  cfg.seed = 7;
  const auto k = make_kernel("s011");
  const auto r = optimize_multistart(k, 3, 3, cfg, 3);
  ASSERT_EQ(r.runs.size(), 3u);
  ASSERT_EQ(r.seeds.size(), 3u);
  for (const auto& run : r.runs) EXPECT_GE(run.energies.back(), r.best_run().energies.back());
  EXPECT_THROW(optimize_multistart(k, 3, 3, cfg, 0), InvalidArgument);
}

TEST(LocalMin, SelfDirectionIsFlat) {
  const auto mu = random_probability_measure(3, 3, 1);
  const LocalMinReport r = local_min_probe(make_kernel("uvt"), mu, {mu}, 0.5);
  ASSERT_EQ(r.directions.size(), 1u);
  EXPECT_TRUE(r.all_hold);
  EXPECT_NEAR(r.directions[0].min_gap, 0.0, 1e-12);
}

TEST(LocalMin, S011AtSixPointDesignHolds) {
  std::vector<UnitVector> atoms;
  for (int i = 1; i <= 3; ++i) {
    atoms.push_back(e(3, i));
    atoms.push_back(e(3, i, -1));
  }
  const DiscreteMeasure mu(atoms, std::vector<double>(6, 1.0 / 6));
  std::vector<DiscreteMeasure> dirs{dirac(e(3, 1)), random_probability_measure(3, 3, 4)};
  const LocalMinReport r = local_min_probe(make_kernel("s011"), mu, dirs, 1.0);
  EXPECT_TRUE(r.all_hold);
  for (const auto& d : r.directions) EXPECT_GE(d.min_gap, -1e-12);
}

TEST(LocalMin, RejectsBadInterval) {
  const auto mu = random_probability_measure(3, 3, 1);
  EXPECT_THROW(local_min_probe(make_kernel("uvt"), mu, {mu}, 0.0), InvalidArgument);
  EXPECT_THROW(local_min_probe(make_kernel("uvt"), mu, {mu}, 1.5), InvalidArgument);
}

}  // namespace
