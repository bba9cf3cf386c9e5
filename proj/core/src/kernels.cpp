#include "ninput/kernels.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <numeric>
#include <sstream>

#include "ninput/config.hpp"
#include "ninput/errors.hpp"
#include "ninput/log.hpp"

namespace ninput {
namespace {

using ArgArray = std::array<const Vector*, kMaxArity>;

// ---- catalog building blocks -------------------------------------------------

struct Partials3 {
  double du, dv, dt;
};

// K(x, y, z) = F(u, v, t), u = <x,y>, v = <y,z>, t = <z,x>.
template <class F>
class Gram3Kernel final : public KernelImpl {
 public:
  explicit Gram3Kernel(F f) : f_(std::move(f)) {}

  double eval(KernelArgs x) const override {
    const double u = x[0]->dot(*x[1]);
    const double v = x[1]->dot(*x[2]);
    const double t = x[2]->dot(*x[0]);
    return f_.value(u, v, t);
  }

  void add_gradient(KernelArgs x, int slot, double scale, Eigen::Ref<Vector> out) const override {
    const double u = x[0]->dot(*x[1]);
    const double v = x[1]->dot(*x[2]);
    const double t = x[2]->dot(*x[0]);
    const Partials3 p = f_.partials(u, v, t);
    switch (slot) {
      case 0:
        out += scale * (p.du * *x[1] + p.dt * *x[2]);
        break;
      case 1:
        out += scale * (p.du * *x[0] + p.dv * *x[2]);
        break;
      default:
        out += scale * (p.dv * *x[1] + p.dt * *x[0]);
        break;
    }
  }

 private:
  F f_;
};

struct Vol2 {
  double value(double u, double v, double t) const {
    return 1.0 - u * u - v * v - t * t + 2.0 * u * v * t;
  }
  Partials3 partials(double u, double v, double t) const {
    return {-2.0 * u + 2.0 * v * t, -2.0 * v + 2.0 * u * t, -2.0 * t + 2.0 * u * v};
  }
};

struct Area2 {
  double value(double u, double v, double t) const {
    return 0.75 - 0.5 * (u + v + t) + 0.5 * (u * v + v * t + t * u) -
           0.25 * (u * u + v * v + t * t);
  }
  Partials3 partials(double u, double v, double t) const {
    return {-0.5 + 0.5 * (v + t) - 0.5 * u, -0.5 + 0.5 * (u + t) - 0.5 * v,
            -0.5 + 0.5 * (u + v) - 0.5 * t};
  }
};

struct S011 {
  double value(double u, double v, double t) const { return u * v + v * t + t * u; }
  Partials3 partials(double u, double v, double t) const { return {v + t, u + t, u + v}; }
};

struct S100 {
  double value(double u, double v, double t) const {
    return (t - u * v) + (u - v * t) + (v - t * u);
  }
  Partials3 partials(double u, double v, double t) const {
    return {1.0 - v - t, 1.0 - u - t, 1.0 - u - v};
  }
};

struct QuadA {
  double a;
  double constant;
  double value(double u, double v, double t) const {
    return t * t + u * u + v * v - a * u * v * t + constant;
  }
  Partials3 partials(double u, double v, double t) const {
    return {2.0 * u - a * v * t, 2.0 * v - a * u * t, 2.0 * t - a * u * v};
  }
};

// f(uvt) with f a nonnegative-coefficient polynomial or exp.
struct ProductOfGram {
  std::vector<double> coeffs;  // empty means exp
  double f(double p) const {
    if (coeffs.empty()) return std::exp(p);
    double acc = 0.0;
    for (auto it = coeffs.rbegin(); it != coeffs.rend(); ++it) acc = acc * p + *it;
    return acc;
  }
  double df(double p) const {
    if (coeffs.empty()) return std::exp(p);
    double acc = 0.0;
    for (std::size_t k = coeffs.size(); k-- > 1;) acc = acc * p + static_cast<double>(k) * coeffs[k];
    return acc;
  }
  double value(double u, double v, double t) const { return f(u * v * t); }
  Partials3 partials(double u, double v, double t) const {
    const double g = df(u * v * t);
    return {g * v * t, g * u * t, g * u * v};
  }
};

template <class F>
struct Negated {
  F inner;
  double value(double u, double v, double t) const { return -inner.value(u, v, t); }
  Partials3 partials(double u, double v, double t) const {
    const auto p = inner.partials(u, v, t);
    return {-p.du, -p.dv, -p.dt};
  }
};

class InnerKernel final : public KernelImpl {
 public:
  double eval(KernelArgs x) const override { return x[0]->dot(*x[1]); }
  void add_gradient(KernelArgs x, int slot, double scale, Eigen::Ref<Vector> out) const override {
    out += scale * *x[1 - slot];
  }
};

class FrameKernel final : public KernelImpl {
 public:
  double eval(KernelArgs x) const override {
    const double u = x[0]->dot(*x[1]);
    return u * u;
  }
  void add_gradient(KernelArgs x, int slot, double scale, Eigen::Ref<Vector> out) const override {
    out += scale * 2.0 * x[0]->dot(*x[1]) * *x[1 - slot];
  }
};

class RieszKernel final : public KernelImpl {
 public:
  explicit RieszKernel(double s) : s_(s) {}
  double eval(KernelArgs x) const override { return std::pow((*x[0] - *x[1]).norm(), s_); }
  void add_gradient(KernelArgs x, int slot, double scale, Eigen::Ref<Vector> out) const override {
    Vector diff = *x[slot] - *x[1 - slot];
    const double r = diff.norm();
    if (r == 0.0) return;
    out += scale * s_ * std::pow(r, s_ - 2.0) * diff;
  }

 private:
  double s_;
};

// ---- composite kernels -----------------------------------------------------

std::vector<std::vector<int>> subsets(int n, int m) {
  std::vector<std::vector<int>> out;
  std::vector<int> idx(m);
  std::iota(idx.begin(), idx.end(), 0);
  for (;;) {
    out.push_back(idx);
    int i = m - 1;
    while (i >= 0 && idx[i] == n - m + i) --i;
    if (i < 0) break;
    ++idx[i];
    for (int j = i + 1; j < m; ++j) idx[j] = idx[j - 1] + 1;
  }
  return out;
}

class LiftKernel final : public KernelImpl {
 public:
  LiftKernel(KernelSpec h, int n, bool product)
      : h_(std::move(h)), subsets_(subsets(n, h_.arity())), product_(product) {}

  double eval(KernelArgs x) const override {
    double acc = product_ ? 1.0 : 0.0;
    for (const auto& s : subsets_) {
      const double value = h_.eval(gather(x, s));
      acc = product_ ? acc * value : acc + value;
    }
    return acc;
  }

  void add_gradient(KernelArgs x, int slot, double scale, Eigen::Ref<Vector> out) const override {
    if (!product_) {
      for (const auto& s : subsets_) {
        const auto pos = std::find(s.begin(), s.end(), slot);
        if (pos != s.end()) {
          h_.add_gradient(gather(x, s), static_cast<int>(pos - s.begin()), scale, out);
        }
      }
      return;
    }
    std::vector<double> values(subsets_.size());
    for (std::size_t i = 0; i < subsets_.size(); ++i) values[i] = h_.eval(gather(x, subsets_[i]));
    // prefix/suffix products avoid dividing by a possibly zero factor
    std::vector<double> prefix(values.size() + 1, 1.0), suffix(values.size() + 1, 1.0);
    for (std::size_t i = 0; i < values.size(); ++i) prefix[i + 1] = prefix[i] * values[i];
    for (std::size_t i = values.size(); i-- > 0;) suffix[i] = suffix[i + 1] * values[i];
    for (std::size_t i = 0; i < subsets_.size(); ++i) {
      const auto& s = subsets_[i];
      const auto pos = std::find(s.begin(), s.end(), slot);
      if (pos == s.end()) continue;
      const double others = prefix[i] * suffix[i + 1];
      if (others != 0.0) {
        h_.add_gradient(gather(x, s), static_cast<int>(pos - s.begin()), scale * others, out);
      }
    }
  }

 private:
  struct Gathered {
    ArgArray ptrs;
    std::size_t n;
    operator KernelArgs() const { return KernelArgs(ptrs.data(), n); }
  };
  static Gathered gather(KernelArgs x, const std::vector<int>& s) {
    Gathered g{{}, s.size()};
    for (std::size_t i = 0; i < s.size(); ++i) g.ptrs[i] = x[s[i]];
    return g;
  }

  KernelSpec h_;
  std::vector<std::vector<int>> subsets_;
  bool product_;
};

class PinnedKernel final : public KernelImpl {
 public:
  PinnedKernel(KernelSpec k, std::vector<Vector> pins) : k_(std::move(k)), pins_(std::move(pins)) {}

  double eval(KernelArgs x) const override { return k_.eval(args(x)); }
  void add_gradient(KernelArgs x, int slot, double scale, Eigen::Ref<Vector> out) const override {
    const ArgArray a = args_array(x);
    k_.add_gradient(KernelArgs(a.data(), pins_.size() + x.size()),
                    static_cast<int>(pins_.size()) + slot, scale, out);
  }

 private:
  ArgArray args_array(KernelArgs x) const {
    ArgArray a{};
    std::size_t i = 0;
    for (const auto& p : pins_) a[i++] = &p;
    for (const Vector* v : x) a[i++] = v;
    return a;
  }
  struct Args {
    ArgArray a;
    std::size_t n;
    operator KernelArgs() const { return KernelArgs(a.data(), n); }
  };
  Args args(KernelArgs x) const { return {args_array(x), pins_.size() + x.size()}; }

  KernelSpec k_;
  std::vector<Vector> pins_;
};

class ShiftKernel final : public KernelImpl {
 public:
  ShiftKernel(KernelSpec g, Vector x0, bool with_constant)
      : g_(std::move(g)), x0_(std::move(x0)) {
    if (with_constant) {
      const Vector* a[2] = {&x0_, &x0_};
      constant_ = g_.eval(KernelArgs(a, 2));
    }
  }

  double eval(KernelArgs x) const override {
    const Vector* xy[2] = {x[0], x[1]};
    const Vector* x_x0[2] = {x[0], &x0_};
    const Vector* x0_y[2] = {&x0_, x[1]};
    return g_.eval(KernelArgs(xy, 2)) + constant_ - g_.eval(KernelArgs(x_x0, 2)) -
           g_.eval(KernelArgs(x0_y, 2));
  }

  void add_gradient(KernelArgs x, int slot, double scale, Eigen::Ref<Vector> out) const override {
    const Vector* xy[2] = {x[0], x[1]};
    g_.add_gradient(KernelArgs(xy, 2), slot, scale, out);
    if (slot == 0) {
      const Vector* x_x0[2] = {x[0], &x0_};
      g_.add_gradient(KernelArgs(x_x0, 2), 0, -scale, out);
    } else {
      const Vector* x0_y[2] = {&x0_, x[1]};
      g_.add_gradient(KernelArgs(x0_y, 2), 1, -scale, out);
    }
  }

 private:
  KernelSpec g_;
  Vector x0_;
  double constant_ = 0.0;
};

class SumKernel final : public KernelImpl {
 public:
  SumKernel(KernelSpec k, KernelSpec l) : k_(std::move(k)), l_(std::move(l)) {}
  double eval(KernelArgs x) const override { return k_.eval(x) + l_.eval(x); }
  void add_gradient(KernelArgs x, int slot, double scale, Eigen::Ref<Vector> out) const override {
    k_.add_gradient(x, slot, scale, out);
    l_.add_gradient(x, slot, scale, out);
  }

 private:
  KernelSpec k_, l_;
};

class ProductKernel final : public KernelImpl {
 public:
  ProductKernel(KernelSpec k, KernelSpec l) : k_(std::move(k)), l_(std::move(l)) {}
  double eval(KernelArgs x) const override { return k_.eval(x) * l_.eval(x); }
  void add_gradient(KernelArgs x, int slot, double scale, Eigen::Ref<Vector> out) const override {
    k_.add_gradient(x, slot, scale * l_.eval(x), out);
    l_.add_gradient(x, slot, scale * k_.eval(x), out);
  }

 private:
  KernelSpec k_, l_;
};

class ScaledKernel final : public KernelImpl {
 public:
  ScaledKernel(std::shared_ptr<const KernelImpl> k, double c) : k_(std::move(k)), c_(c) {}
  double eval(KernelArgs x) const override { return c_ * k_->eval(x); }
  void add_gradient(KernelArgs x, int slot, double scale, Eigen::Ref<Vector> out) const override {
    k_->add_gradient(x, slot, scale * c_, out);
  }

 private:
  std::shared_ptr<const KernelImpl> k_;
  double c_;
};

class PotentialKernel final : public KernelImpl {
 public:
  PotentialKernel(KernelSpec k, std::vector<DiscreteMeasure> measures)
      : k_(std::move(k)), measures_(std::move(measures)) {}

  double eval(KernelArgs x) const override {
    double acc = 0.0;
    for_each_tuple(x, [&](KernelArgs full, double w) { acc += w * k_.eval(full); });
    return acc;
  }

  void add_gradient(KernelArgs x, int slot, double scale, Eigen::Ref<Vector> out) const override {
    const int j = static_cast<int>(measures_.size());
    for_each_tuple(x, [&](KernelArgs full, double w) {
      k_.add_gradient(full, j + slot, scale * w, out);
    });
  }

 private:
  template <class Fn>
  void for_each_tuple(KernelArgs x, Fn&& fn) const {
    const std::size_t j = measures_.size();
    ArgArray a{};
    for (std::size_t i = 0; i < x.size(); ++i) a[j + i] = x[i];
    std::array<std::size_t, kMaxArity> idx{};
    for (;;) {
      double w = 1.0;
      for (std::size_t m = 0; m < j; ++m) {
        a[m] = &measures_[m].atom(idx[m]).coords();
        w *= measures_[m].weight(idx[m]);
      }
      fn(KernelArgs(a.data(), j + x.size()), w);
      std::size_t m = j;
      while (m-- > 0) {
        if (++idx[m] < measures_[m].size()) break;
        idx[m] = 0;
      }
      if (m == static_cast<std::size_t>(-1)) return;
    }
  }

  KernelSpec k_;
  std::vector<DiscreteMeasure> measures_;
};

// ---- parameter helpers -------------------------------------------------------

double param_double(const ParamMap& p, const std::string& key, std::optional<double> fallback) {
  const auto it = p.find(key);
  if (it == p.end()) {
    if (fallback) return *fallback;
    throw InvalidArgument("kernel parameter '" + key + "' is required");
  }
  try {
    std::size_t used = 0;
    const double v = std::stod(it->second, &used);
    if (used != it->second.size()) throw std::invalid_argument(it->second);
    return v;
  } catch (const std::exception&) {
    throw InvalidArgument("kernel parameter '" + key + "' is not a number: " + it->second);
  }
}

bool param_bool(const ParamMap& p, const std::string& key, bool fallback) {
  const auto it = p.find(key);
  if (it == p.end()) return fallback;
  if (it->second == "true" || it->second == "1") return true;
  if (it->second == "false" || it->second == "0") return false;
  throw InvalidArgument("kernel parameter '" + key + "' must be true or false");
}

std::vector<double> param_list(const ParamMap& p, const std::string& key) {
  std::vector<double> out;
  std::stringstream ss(p.at(key));
  std::string cell;
  while (std::getline(ss, cell, ',')) {
    ParamMap one{{key, cell}};
    out.push_back(param_double(one, key, std::nullopt));
  }
  return out;
}

void check_keys(const std::string& name, const ParamMap& p, std::initializer_list<const char*> allowed) {
  for (const auto& [key, value] : p) {
    if (key == "scale") continue;
    if (std::none_of(allowed.begin(), allowed.end(), [&](const char* a) { return key == a; })) {
      throw InvalidArgument("kernel '" + name + "' has no parameter '" + key + "'");
    }
  }
}

template <class F>
std::shared_ptr<const KernelImpl> gram3(F f) {
  return std::make_shared<Gram3Kernel<F>>(std::move(f));
}

Definiteness combine_sum(Definiteness a, Definiteness b) {
  using D = Definiteness;
  if (a == D::positive_definite && b == D::positive_definite) return D::positive_definite;
  const auto cpdish = [](D d) {
    return d == D::positive_definite || d == D::conditionally_positive_definite;
  };
  if (cpdish(a) && cpdish(b)) return D::conditionally_positive_definite;
  return D::unknown;
}

std::string format_double(double x) {
  std::ostringstream os;
  os.precision(17);
  os << x;
  return os.str();
}

}  // namespace

const char* to_string(Definiteness d) {
  switch (d) {
    case Definiteness::positive_definite:
      return "positive_definite";
    case Definiteness::conditionally_positive_definite:
      return "conditionally_positive_definite";
    case Definiteness::not_conditionally_positive_definite:
      return "not_conditionally_positive_definite";
    case Definiteness::unknown:
      break;
  }
  return "unknown";
}

KernelSpec::KernelSpec(std::string name, int arity, ParamMap params, Traits traits,
                       std::shared_ptr<const KernelImpl> impl)
    : name_(std::move(name)),
      arity_(arity),
      params_(std::move(params)),
      traits_(traits),
      impl_(std::move(impl)) {
  if (arity_ < 1 || arity_ > kMaxArity) {
    throw InvalidArgument("kernel arity must be in [1, " + std::to_string(kMaxArity) + "]");
  }
}

std::string KernelSpec::describe() const {
  if (params_.empty()) return name_;
  std::string out = name_ + ":";
  bool first = true;
  for (const auto& [k, v] : params_) {
    out += (first ? "" : ",") + k + "=" + v;
    first = false;
  }
  return out;
}

double KernelSpec::operator()(std::span<const UnitVector> points) const {
  if (static_cast<int>(points.size()) != arity_) {
    throw InvalidArgument("kernel '" + name_ + "' expects " + std::to_string(arity_) +
                          " points, got " + std::to_string(points.size()));
  }
  ArgArray a{};
  for (std::size_t i = 0; i < points.size(); ++i) {
    if (points[i].dim() != points[0].dim()) throw InvalidArgument("kernel: dimension mismatch");
    a[i] = &points[i].coords();
  }
  return eval(KernelArgs(a.data(), points.size()));
}

double KernelSpec::operator()(std::initializer_list<UnitVector> points) const {
  return (*this)(std::span<const UnitVector>(points.begin(), points.size()));
}

std::vector<std::string> catalog_names() {
  std::vector<std::string> names{"inner", "riesz", "frame2", "uvt", "prod_f_uvt", "vol2",
                                 "neg_vol2", "area2", "neg_area2", "s011", "s100", "quad_a"};
  std::sort(names.begin(), names.end());
  return names;
}

KernelSpec make_kernel(const std::string& name, const ParamMap& params) {
  using D = Definiteness;
  KernelSpec::Traits traits;
  std::shared_ptr<const KernelImpl> impl;
  int arity = 3;

  if (name == "inner") {
    check_keys(name, params, {});
    arity = 2;
    traits.definiteness = D::positive_definite;
    impl = std::make_shared<InnerKernel>();
  } else if (name == "riesz") {
    check_keys(name, params, {"s"});
    const double s = param_double(params, "s", std::nullopt);
    if (!(s > 0.0)) throw InvalidArgument("riesz: s must be positive");
    arity = 2;
    traits.nonnegative = true;
    traits.smooth = s > 1.0;
    impl = std::make_shared<RieszKernel>(s);
  } else if (name == "frame2") {
    check_keys(name, params, {});
    arity = 2;
    traits.definiteness = D::positive_definite;
    traits.nonnegative = true;
    impl = std::make_shared<FrameKernel>();
  } else if (name == "uvt" || name == "prod_f_uvt") {
    ProductOfGram f;
    if (name == "uvt") {
      check_keys(name, params, {});
      f.coeffs = {0.0, 1.0};
    } else {
      check_keys(name, params, {"coeffs", "f"});
      const bool has_coeffs = params.count("coeffs") > 0;
      const bool has_f = params.count("f") > 0;
      if (has_coeffs == has_f) {
        throw InvalidArgument("prod_f_uvt: give exactly one of coeffs=... or f=exp");
      }
      if (has_f) {
        if (params.at("f") != "exp") throw InvalidArgument("prod_f_uvt: only f=exp is supported");
      } else {
        f.coeffs = param_list(params, "coeffs");
        if (f.coeffs.empty()) throw InvalidArgument("prod_f_uvt: empty coefficient list");
        for (double c : f.coeffs) {
          if (c < 0.0) throw InvalidArgument("prod_f_uvt: coefficients must be nonnegative");
        }
      }
    }
    traits.definiteness = D::positive_definite;
    impl = gram3(std::move(f));
  } else if (name == "vol2") {
    check_keys(name, params, {});
    traits.nonnegative = true;
    impl = gram3(Vol2{});
  } else if (name == "neg_vol2") {
    check_keys(name, params, {});
    traits.definiteness = D::not_conditionally_positive_definite;
    impl = gram3(Negated<Vol2>{});
  } else if (name == "area2") {
    check_keys(name, params, {});
    traits.nonnegative = true;
    impl = gram3(Area2{});
  } else if (name == "neg_area2") {
    check_keys(name, params, {});
    traits.definiteness = D::not_conditionally_positive_definite;
    impl = gram3(Negated<Area2>{});
  } else if (name == "s011") {
    check_keys(name, params, {});
    traits.definiteness = D::not_conditionally_positive_definite;
    impl = gram3(S011{});
  } else if (name == "s100") {
    check_keys(name, params, {});
    traits.definiteness = D::not_conditionally_positive_definite;
    impl = gram3(S100{});
  } else if (name == "quad_a") {
    check_keys(name, params, {"a", "shift"});
    const double a = param_double(params, "a", std::nullopt);
    const bool shift = param_bool(params, "shift", false);
    if (shift && a == 1.0) throw InvalidArgument("quad_a: shift=true needs a != 1");
    if (shift && a < 1.0) {
      traits.definiteness = D::positive_definite;
    } else if (!shift && a <= 1.0) {
      traits.definiteness = D::conditionally_positive_definite;
    }
    impl = gram3(QuadA{a, shift ? 1.0 / (1.0 - a) : 0.0});
  } else {
    throw InvalidArgument("unknown kernel '" + name + "'");
  }

  if (params.count("scale")) {
    const double c = param_double(params, "scale", std::nullopt);
    impl = std::make_shared<ScaledKernel>(impl, c);
    if (c < 0.0) {
      traits.definiteness = D::unknown;
      traits.nonnegative = false;
    } else if (c == 0.0) {
      traits.definiteness = D::positive_definite;
      traits.nonnegative = true;
    }
  }
  return KernelSpec(name, arity, params, traits, std::move(impl));
}

KernelSpec sum_lift(const KernelSpec& h, int n) {
  const int m = h.arity();
  if (m < 2 || m > n - 1 || n > kMaxArity) {
    throw InvalidArgument("sum_lift: need 2 <= arity(H) <= n-1");
  }
  KernelSpec::Traits traits = h.traits();
  const bool cpd = h.definiteness() == Definiteness::positive_definite ||
                   h.definiteness() == Definiteness::conditionally_positive_definite;
  traits.definiteness = cpd ? Definiteness::conditionally_positive_definite : Definiteness::unknown;
  return KernelSpec("sum_lift(" + h.describe() + "," + std::to_string(n) + ")", n, {}, traits,
                    std::make_shared<LiftKernel>(h, n, false));
}

KernelSpec prod_lift(const KernelSpec& h, int n) {
  const int m = h.arity();
  if (m < 2 || m > n - 1 || n > kMaxArity) {
    throw InvalidArgument("prod_lift: need 2 <= arity(H) <= n-1");
  }
  if (!h.traits().nonnegative && m < n - 1) {
    warn("prod_lift: H is not known to be nonnegative and arity(H) < n-1; "
         "positive definiteness of the product is not guaranteed");
  }
  KernelSpec::Traits traits = h.traits();
  const bool pd_preserved = h.definiteness() == Definiteness::positive_definite &&
                            (h.traits().nonnegative || m == n - 1);
  traits.definiteness = pd_preserved ? Definiteness::positive_definite : Definiteness::unknown;
  return KernelSpec("prod_lift(" + h.describe() + "," + std::to_string(n) + ")", n, {}, traits,
                    std::make_shared<LiftKernel>(h, n, true));
}

KernelSpec pin(const KernelSpec& k, std::span<const UnitVector> pins) {
  const int m = static_cast<int>(pins.size());
  if (m < 1 || m > k.arity() - 2) throw InvalidArgument("pin: need 1 <= #pins <= n-2");
  std::vector<Vector> coords;
  std::string label;
  for (const auto& p : pins) {
    if (p.dim() != pins[0].dim()) throw InvalidArgument("pin: dimension mismatch");
    coords.push_back(p.coords());
  }
  KernelSpec::Traits traits = k.traits();
  traits.rotation_invariant = false;
  if (traits.definiteness == Definiteness::not_conditionally_positive_definite) {
    traits.definiteness = Definiteness::unknown;
  }
  return KernelSpec("pin(" + k.describe() + ")", k.arity() - m, {}, traits,
                    std::make_shared<PinnedKernel>(k, std::move(coords)));
}

KernelSpec pin(const KernelSpec& k, std::initializer_list<UnitVector> pins) {
  return pin(k, std::span<const UnitVector>(pins.begin(), pins.size()));
}

ShiftedKernels cpd_shift(const KernelSpec& g, const UnitVector& x0) {
  if (g.arity() != 2) throw InvalidArgument("cpd_shift: kernel must have two inputs");
  KernelSpec::Traits traits = g.traits();
  traits.rotation_invariant = false;
  traits.nonnegative = false;
  const bool cpd = g.definiteness() == Definiteness::positive_definite ||
                   g.definiteness() == Definiteness::conditionally_positive_definite;
  traits.definiteness = cpd ? Definiteness::positive_definite : Definiteness::unknown;

  ShiftedKernels out{KernelSpec("cpd_shift(" + g.describe() + ")", 2, {}, traits,
                                std::make_shared<ShiftKernel>(g, x0.coords(), true)),
                     std::nullopt};
  if (g({x0, x0}) <= 0.0) {
    out.phi0 = KernelSpec("cpd_shift0(" + g.describe() + ")", 2, {}, traits,
                          std::make_shared<ShiftKernel>(g, x0.coords(), false));
  }
  return out;
}

KernelSpec kernel_sum(const KernelSpec& k, const KernelSpec& l) {
  if (k.arity() != l.arity()) throw InvalidArgument("kernel_sum: arity mismatch");
  KernelSpec::Traits traits;
  traits.rotation_invariant = k.rotation_invariant() && l.rotation_invariant();
  traits.definiteness = combine_sum(k.definiteness(), l.definiteness());
  traits.nonnegative = k.traits().nonnegative && l.traits().nonnegative;
  traits.smooth = k.traits().smooth && l.traits().smooth;
  return KernelSpec("(" + k.describe() + "+" + l.describe() + ")", k.arity(), {}, traits,
                    std::make_shared<SumKernel>(k, l));
}

KernelSpec kernel_product(const KernelSpec& k, const KernelSpec& l) {
  if (k.arity() != l.arity()) throw InvalidArgument("kernel_product: arity mismatch");
  KernelSpec::Traits traits;
  traits.rotation_invariant = k.rotation_invariant() && l.rotation_invariant();
  traits.definiteness = (k.definiteness() == Definiteness::positive_definite &&
                         l.definiteness() == Definiteness::positive_definite)
                            ? Definiteness::positive_definite
                            : Definiteness::unknown;
  traits.nonnegative = k.traits().nonnegative && l.traits().nonnegative;
  traits.smooth = k.traits().smooth && l.traits().smooth;
  return KernelSpec("(" + k.describe() + "*" + l.describe() + ")", k.arity(), {}, traits,
                    std::make_shared<ProductKernel>(k, l));
}

KernelSpec kernel_scale(const KernelSpec& k, double c) {
  KernelSpec::Traits traits = k.traits();
  if (c < 0.0) {
    traits.definiteness = Definiteness::unknown;
    traits.nonnegative = false;
  }
  return KernelSpec(format_double(c) + "*" + k.describe(), k.arity(), {}, traits,
                    std::make_shared<ScaledKernel>(k.impl(), c));
}

KernelSpec potential_kernel(const KernelSpec& k, std::span<const DiscreteMeasure> measures) {
  const int j = static_cast<int>(measures.size());
  if (j < 1 || j > k.arity() - 1) throw InvalidArgument("potential_kernel: need 1 <= j <= n-1");
  for (const auto& m : measures) {
    if (m.dim() != measures[0].dim()) throw InvalidArgument("potential_kernel: dimension mismatch");
  }
  KernelSpec::Traits traits = k.traits();
  traits.rotation_invariant = false;
  const bool all_probability = std::all_of(measures.begin(), measures.end(),
                                           [](const DiscreteMeasure& m) { return m.is_probability(); });
  if (!all_probability || traits.definiteness == Definiteness::not_conditionally_positive_definite) {
    traits.definiteness = Definiteness::unknown;
  }
  if (!all_probability) traits.nonnegative = false;
  return KernelSpec("potential(" + k.describe() + ")", k.arity() - j, {}, traits,
                    std::make_shared<PotentialKernel>(
                        k, std::vector<DiscreteMeasure>(measures.begin(), measures.end())));
}

}  // namespace ninput
