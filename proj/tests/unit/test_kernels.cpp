#include <gtest/gtest.h>

#include <Eigen/Geometry>
#include <Eigen/LU>

#include <algorithm>
#include <array>
#include <cmath>

#include "helpers.hpp"
#include "ninput/errors.hpp"
#include "ninput/kernel_parse.hpp"
#include "ninput/kernels.hpp"
#include "ninput/log.hpp"

namespace {

using namespace ninput;
using ninput::testing::dirac;
using ninput::testing::e;
using ninput::testing::random_points;

// Central differences of the raw-vector extension, slot by slot.
Vector fd_gradient(const KernelSpec& k, std::vector<Vector> x, int slot, double h = 1e-6) {
  Vector g(x[slot].size());
  std::vector<const Vector*> args;
  for (auto& v : x) args.push_back(&v);
  for (Eigen::Index c = 0; c < g.size(); ++c) {
    const double keep = x[slot][c];
    x[slot][c] = keep + h;
    const double plus = k.eval(args);
    x[slot][c] = keep - h;
    const double minus = k.eval(args);
    x[slot][c] = keep;
    g[c] = (plus - minus) / (2.0 * h);
  }
  return g;
}

Vector analytic_gradient(const KernelSpec& k, const std::vector<Vector>& x, int slot) {
  std::vector<const Vector*> args;
  for (const auto& v : x) args.push_back(&v);
  Vector g = Vector::Zero(x[slot].size());
  k.add_gradient(args, slot, 1.0, g);
  return g;
}

std::vector<KernelSpec> smooth_catalog() {
  return {make_kernel("inner"),
          make_kernel("frame2"),
          make_kernel("riesz", {{"s", "3"}}),
          make_kernel("uvt"),
          make_kernel("prod_f_uvt", {{"f", "exp"}}),
          make_kernel("prod_f_uvt", {{"coeffs", "1,0.5,2"}}),
          make_kernel("vol2"),
          make_kernel("neg_vol2"),
          make_kernel("area2"),
          make_kernel("neg_area2"),
          make_kernel("s011"),
          make_kernel("s100"),
          make_kernel("quad_a", {{"a", "0.5"}, {"shift", "true"}}),
          make_kernel("uvt", {{"scale", "-2.5"}}),
          sum_lift(make_kernel("frame2"), 4),
          prod_lift(make_kernel("inner"), 3),
          prod_lift(make_kernel("uvt"), 4)};
}

TEST(Catalog, ValuesAtBasisVectors) {
  const auto x = e(3, 1), y = e(3, 2), z = e(3, 3);
  EXPECT_DOUBLE_EQ(make_kernel("vol2")({x, y, z}), 1.0);
  EXPECT_DOUBLE_EQ(make_kernel("vol2")({x, x, y}), 0.0);
  EXPECT_DOUBLE_EQ(make_kernel("uvt")({x, x, x}), 1.0);
  EXPECT_DOUBLE_EQ(make_kernel("uvt")({x, y, z}), 0.0);
  EXPECT_DOUBLE_EQ(make_kernel("s011")({x, x, x}), 3.0);
  EXPECT_DOUBLE_EQ(make_kernel("s100")({x, x, x}), 0.0);
  EXPECT_DOUBLE_EQ(make_kernel("area2")({x, x, x}), 0.0);
  EXPECT_DOUBLE_EQ(make_kernel("area2")({x, y, z}), 0.75);
  EXPECT_DOUBLE_EQ(make_kernel("quad_a", {{"a", "0.5"}})({x, y, z}), 0.0);
  EXPECT_DOUBLE_EQ(make_kernel("quad_a", {{"a", "0.5"}, {"shift", "true"}})({x, y, z}), 2.0);
  EXPECT_DOUBLE_EQ(make_kernel("riesz", {{"s", "2"}})({x, -x}), 4.0);
  EXPECT_DOUBLE_EQ(make_kernel("frame2")({x, y}), 0.0);
  EXPECT_DOUBLE_EQ(make_kernel("inner", {{"scale", "3"}})({x, x}), 3.0);
}

TEST(Catalog, Area2IsSquaredTriangleArea) {
  // Squared area of the triangle x,y,z via the cross product.
  const auto pts = random_points(3, 30, 5);
  const auto k = make_kernel("area2");
  for (std::size_t i = 0; i + 2 < pts.size(); i += 3) {
    const Eigen::Vector3d a = pts[i].coords(), b = pts[i + 1].coords(), c = pts[i + 2].coords();
    const double area = 0.5 * (b - a).cross(c - a).norm();
    EXPECT_NEAR(k({pts[i], pts[i + 1], pts[i + 2]}), area * area, 1e-12);
  }
}

TEST(Catalog, Vol2IsGramDeterminant) {
  const auto pts = random_points(4, 30, 6);
  const auto k = make_kernel("vol2");
  for (std::size_t i = 0; i + 2 < pts.size(); i += 3) {
    const Matrix g = gram(PointConfiguration({pts[i], pts[i + 1], pts[i + 2]}));
    EXPECT_NEAR(k({pts[i], pts[i + 1], pts[i + 2]}), g.determinant(), 1e-12);
  }
}

TEST(Catalog, SymmetricUnderPermutations) {
  const auto pts = random_points(4, 4, 8);
  for (const auto& k : smooth_catalog()) {
    std::vector<int> idx(k.arity());
    for (int i = 0; i < k.arity(); ++i) idx[i] = i;
    std::vector<UnitVector> base;
    for (int i : idx) base.push_back(pts[i]);
    const double ref = k(base);
    do {
      std::vector<UnitVector> p;
      for (int i : idx) p.push_back(pts[i]);
      EXPECT_NEAR(k(p), ref, 1e-12 * std::max(1.0, std::abs(ref))) << k.describe();
    } while (std::next_permutation(idx.begin(), idx.end()));
  }
}

TEST(Catalog, RotationInvariant) {
  const auto pts = random_points(5, 4, 9);
  const Matrix q = random_orthogonal(5, 3);
  for (const auto& k : smooth_catalog()) {
    std::vector<UnitVector> a(pts.begin(), pts.begin() + k.arity());
    std::vector<UnitVector> b;
    for (const auto& p : a) b.push_back(UnitVector::normalized(q * p.coords()));
    EXPECT_NEAR(k(a), k(b), 1e-11) << k.describe();
  }
}

TEST(Catalog, AnalyticGradientsMatchFiniteDifferences) {
  const auto pts = random_points(4, 4, 10);
  for (const auto& k : smooth_catalog()) {
    std::vector<Vector> x;
    for (int i = 0; i < k.arity(); ++i) x.push_back(pts[i].coords());
    for (int slot = 0; slot < k.arity(); ++slot) {
      const Vector a = analytic_gradient(k, x, slot);
      const Vector f = fd_gradient(k, x, slot);
      EXPECT_LE((a - f).cwiseAbs().maxCoeff(), 1e-7 * std::max(1.0, f.cwiseAbs().maxCoeff()))
          << k.describe() << " slot " << slot;
    }
  }
}

TEST(Catalog, RejectsBadParameters) {
  EXPECT_THROW(make_kernel("nope"), InvalidArgument);
  EXPECT_THROW(make_kernel("riesz"), InvalidArgument);
  EXPECT_THROW(make_kernel("riesz", {{"s", "-1"}}), InvalidArgument);
  EXPECT_THROW(make_kernel("uvt", {{"a", "1"}}), InvalidArgument);
  EXPECT_THROW(make_kernel("quad_a", {{"a", "1"}, {"shift", "true"}}), InvalidArgument);
  EXPECT_THROW(make_kernel("prod_f_uvt", {{"coeffs", "1,-1"}}), InvalidArgument);
  EXPECT_THROW(make_kernel("prod_f_uvt"), InvalidArgument);
  EXPECT_THROW(make_kernel("quad_a", {{"a", "x"}}), InvalidArgument);
}

TEST(Catalog, CheckedEvaluationRejectsMismatch) {
  const auto k = make_kernel("uvt");
  EXPECT_THROW(k({e(3, 1), e(3, 2)}), InvalidArgument);
  EXPECT_THROW(k({e(3, 1), e(3, 2), e(4, 1)}), InvalidArgument);
}

TEST(Catalog, DefinitenessMetadata) {
  EXPECT_EQ(make_kernel("uvt").definiteness(), Definiteness::positive_definite);
  EXPECT_EQ(make_kernel("s011").definiteness(), Definiteness::not_conditionally_positive_definite);
  EXPECT_EQ(make_kernel("quad_a", {{"a", "0.9"}}).definiteness(),
            Definiteness::conditionally_positive_definite);
  EXPECT_EQ(make_kernel("quad_a", {{"a", "2"}}).definiteness(), Definiteness::unknown);
  EXPECT_EQ(make_kernel("uvt", {{"scale", "-1"}}).definiteness(), Definiteness::unknown);
}

TEST(Lifts, SumLiftOfInnerOnThreePoints) {
  const auto k = sum_lift(make_kernel("inner"), 3);
  const auto x = e(3, 1), y = e(3, 2);
  EXPECT_EQ(k.arity(), 3);
  EXPECT_DOUBLE_EQ(k({x, x, y}), 1.0);
  EXPECT_DOUBLE_EQ(k({x, x, x}), 3.0);
}

TEST(Lifts, ProdLiftOfInnerIsUvt) {
  const auto lift = prod_lift(make_kernel("inner"), 3);
  const auto uvt = make_kernel("uvt");
  const auto pts = random_points(3, 9, 12);
  for (std::size_t i = 0; i < 9; i += 3) {
    EXPECT_NEAR(lift({pts[i], pts[i + 1], pts[i + 2]}), uvt({pts[i], pts[i + 1], pts[i + 2]}), 1e-14);
  }
}

TEST(Lifts, ArityChecks) {
  EXPECT_THROW(sum_lift(make_kernel("inner"), 2), InvalidArgument);
  EXPECT_THROW(prod_lift(make_kernel("uvt"), 3), InvalidArgument);
  EXPECT_NO_THROW(sum_lift(make_kernel("uvt"), 4));
}

TEST(Lifts, ProdLiftWarnsForSignedFactor) {
  std::vector<std::string> seen;
  auto prev = set_warning_handler([&](std::string_view m) { seen.emplace_back(m); });
  (void)prod_lift(make_kernel("inner"), 4);
  set_warning_handler(prev);
  EXPECT_FALSE(seen.empty());
}

TEST(Pin, FixesLeadingSlots) {
  const auto k = make_kernel("neg_vol2");
  const auto g = pin(k, {e(3, 1)});
  EXPECT_EQ(g.arity(), 2);
  const auto pts = random_points(3, 6, 13);
  for (std::size_t i = 0; i < 6; i += 2) {
    EXPECT_DOUBLE_EQ(g({pts[i], pts[i + 1]}), k({e(3, 1), pts[i], pts[i + 1]}));
  }
  EXPECT_THROW(pin(k, {e(3, 1), e(3, 2)}), InvalidArgument);
}

TEST(Shift, PhiExpansion) {
  const auto g = make_kernel("riesz", {{"s", "2"}, {"scale", "-1"}});
  const auto x0 = e(3, 1);
  const ShiftedKernels s = cpd_shift(g, x0);
  ASSERT_TRUE(s.phi0.has_value());
  const auto pts = random_points(3, 10, 14);
  for (std::size_t i = 0; i < 10; i += 2) {
    const Vector a = pts[i].coords() - x0.coords();
    const Vector b = pts[i + 1].coords() - x0.coords();
    EXPECT_NEAR((*s.phi0)({pts[i], pts[i + 1]}), 2.0 * a.dot(b), 1e-13);
    EXPECT_NEAR(s.phi({pts[i], pts[i + 1]}), 2.0 * a.dot(b), 1e-13);  // G(x0,x0) = 0
  }
  EXPECT_FALSE(cpd_shift(make_kernel("inner"), x0).phi0.has_value());
  EXPECT_THROW(cpd_shift(make_kernel("uvt"), x0), InvalidArgument);
}

TEST(Combinators, SumProductScale) {
  const auto a = make_kernel("inner");
  const auto b = make_kernel("frame2");
  const auto x = UnitVector::normalized(Vector::LinSpaced(3, 1.0, 2.0));
  const auto y = e(3, 2);
  const double u = x.dot(y);
  EXPECT_NEAR(kernel_sum(a, b)({x, y}), u + u * u, 1e-15);
  EXPECT_NEAR(kernel_product(a, b)({x, y}), u * u * u, 1e-15);
  EXPECT_NEAR(kernel_scale(b, -2.0)({x, y}), -2.0 * u * u, 1e-15);
  EXPECT_THROW(kernel_sum(a, make_kernel("uvt")), InvalidArgument);
}

TEST(PotentialKernel, IntegratesLeadingSlots) {
  const auto k = make_kernel("uvt");
  const DiscreteMeasure mu({e(3, 1), e(3, 2)}, {0.5, 0.5});
  const std::array<DiscreteMeasure, 1> ms{mu};
  const auto u = potential_kernel(k, ms);
  EXPECT_EQ(u.arity(), 2);
  const auto y = e(3, 1);
  // 0.5 * uvt(e1, e1, e1) + 0.5 * uvt(e2, e1, e1) = 0.5
  EXPECT_DOUBLE_EQ(u({y, y}), 0.5);
  const std::array<DiscreteMeasure, 3> too_many{mu, mu, mu};
  EXPECT_THROW(potential_kernel(k, too_many), InvalidArgument);
}

TEST(Parse, CatalogAndLifts) {
  EXPECT_EQ(parse_kernel("uvt").arity(), 3);
  EXPECT_EQ(parse_kernel("sum_lift(frame2,4)").arity(), 4);
  EXPECT_EQ(parse_kernel("prod_lift(sum_lift(inner,3),4)").arity(), 4);
  const auto q = parse_kernel("quad_a:a=0.5,shift=true");
  EXPECT_DOUBLE_EQ(q({e(3, 1), e(3, 2), e(3, 3)}), 2.0);
  const auto p = parse_kernel("prod_f_uvt:coeffs=0,1");
  EXPECT_DOUBLE_EQ(p({e(3, 1), e(3, 1), e(3, 1)}), 1.0);
  EXPECT_THROW(parse_kernel("sum_lift(inner"), InvalidArgument);
  EXPECT_THROW(parse_kernel(""), InvalidArgument);
  EXPECT_THROW(parse_kernel("uvt:scale"), InvalidArgument);
}

TEST(Parse, DescribeRoundTrips) {
  for (const char* text : {"uvt", "quad_a:a=0.5,shift=true", "sum_lift(frame2,4)", "riesz:s=1.5"}) {
    const auto k = parse_kernel(text);
    const auto again = parse_kernel(k.describe());
    const auto pts = random_points(3, k.arity(), 15);
    EXPECT_DOUBLE_EQ(k(pts), again(pts)) << text;
  }
}

}  // namespace
