#pragma once

// Symmetric continuous n-input kernels on the sphere.
//
// A KernelSpec is an immutable handle to an evaluator plus metadata. Catalog
// kernels are polynomials (or exp of a polynomial) in the Gram entries
// u = <x,y>, v = <y,z>, t = <z,x>; composite kernels (lifts, pins, shifts,
// potentials, sums, products) wrap other specs.
//
// Kernels are evaluated on raw coordinate vectors, so they extend off the
// sphere in the obvious way; gradients are Euclidean gradients of that
// extension with respect to one slot.

#include <map>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "ninput/sphere.hpp"

namespace ninput {

/// Pointers to the n input vectors of one kernel evaluation.
using KernelArgs = std::span<const Vector* const>;

/// What is known (proved) about a kernel's definiteness.
enum class Definiteness {
  unknown,
  positive_definite,              // n-positive definite
  conditionally_positive_definite,
  not_conditionally_positive_definite,
};

const char* to_string(Definiteness d);

class KernelImpl {
 public:
  virtual ~KernelImpl() = default;
  virtual double eval(KernelArgs x) const = 0;
  /// out += scale * d/dx[slot] K(x).
  virtual void add_gradient(KernelArgs x, int slot, double scale, Eigen::Ref<Vector> out) const = 0;
};

/// Parameter values as given on the command line, e.g. {"a": "0.5"}.
using ParamMap = std::map<std::string, std::string>;

class KernelSpec {
 public:
  struct Traits {
    bool rotation_invariant = true;
    Definiteness definiteness = Definiteness::unknown;
    bool nonnegative = false;   // K >= 0 everywhere on the sphere
    bool smooth = true;         // analytic gradient valid everywhere
  };

  KernelSpec(std::string name, int arity, ParamMap params, Traits traits,
             std::shared_ptr<const KernelImpl> impl);

  const std::string& name() const { return name_; }
  int arity() const { return arity_; }
  const ParamMap& params() const { return params_; }
  const Traits& traits() const { return traits_; }
  bool rotation_invariant() const { return traits_.rotation_invariant; }
  Definiteness definiteness() const { return traits_.definiteness; }

  /// Canonical text form, parseable by parse_kernel for catalog and lift kernels.
  std::string describe() const;

  /// Checked evaluation on unit vectors; throws on arity/dimension mismatch.
  double operator()(std::span<const UnitVector> points) const;
  double operator()(std::initializer_list<UnitVector> points) const;

  /// Unchecked evaluation on raw vectors (hot path).
  double eval(KernelArgs x) const { return impl_->eval(x); }
  void add_gradient(KernelArgs x, int slot, double scale, Eigen::Ref<Vector> out) const {
    impl_->add_gradient(x, slot, scale, out);
  }

  const std::shared_ptr<const KernelImpl>& impl() const { return impl_; }

 private:
  std::string name_;
  int arity_;
  ParamMap params_;
  Traits traits_;
  std::shared_ptr<const KernelImpl> impl_;
};

// -- catalog -----------------------------------------------------------------

/// Looks up a catalog kernel by name. Recognized names and parameters:
///   inner, riesz (s > 0), frame2,
///   uvt, prod_f_uvt (coeffs = nonnegative list | f = exp),
///   vol2, neg_vol2, area2, neg_area2, s011, s100,
///   quad_a (a, shift = true|false).
/// Every catalog kernel also accepts scale = c (multiplies the kernel by c).
KernelSpec make_kernel(const std::string& name, const ParamMap& params = {});

/// Names accepted by make_kernel, sorted.
std::vector<std::string> catalog_names();

// -- constructions -----------------------------------------------------------

/// K(z_1..z_n) = sum over m-subsets of H. Requires 2 <= m = arity(H) <= n-1.
KernelSpec sum_lift(const KernelSpec& h, int n);

/// K(z_1..z_n) = product over m-subsets of H. Requires 2 <= m <= n-1; warns
/// when H is not known to be nonnegative and m < n-1.
KernelSpec prod_lift(const KernelSpec& h, int n);

/// Fixes the first m slots at `pins`; 1 <= m <= n-2.
KernelSpec pin(const KernelSpec& k, std::span<const UnitVector> pins);
KernelSpec pin(const KernelSpec& k, std::initializer_list<UnitVector> pins);

/// phi(x,y) = G(x,y) + G(x0,x0) - G(x,x0) - G(x0,y), and, when G(x0,x0) <= 0,
/// phi0(x,y) = G(x,y) - G(x,x0) - G(x0,y).
struct ShiftedKernels {
  KernelSpec phi;
  std::optional<KernelSpec> phi0;
};
ShiftedKernels cpd_shift(const KernelSpec& g, const UnitVector& x0);

KernelSpec kernel_sum(const KernelSpec& k, const KernelSpec& l);
KernelSpec kernel_product(const KernelSpec& k, const KernelSpec& l);
KernelSpec kernel_scale(const KernelSpec& k, double c);

/// The (n-j)-input kernel U_K^{mu_1..mu_j}: K integrated in its first j slots.
KernelSpec potential_kernel(const KernelSpec& k, std::span<const DiscreteMeasure> measures);

}  // namespace ninput
