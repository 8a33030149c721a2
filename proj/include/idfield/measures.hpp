#ifndef IDFIELD_MEASURES_HPP
#define IDFIELD_MEASURES_HPP

#include <Eigen/Dense>
#include <cstdint>
#include <utility>
#include <variant>
#include <vector>

#include "idfield/groups.hpp"

namespace idfield {

// ---------------------------------------------------------------------------
// Mark distributions (the law of a single point's mark)
// ---------------------------------------------------------------------------

struct DiscreteAtoms {
  // (value, probability); probabilities sum to 1 within 1e-12. Value 0 is
  // allowed only with probability 0.
  std::vector<std::pair<double, double>> atoms;
};

struct GaussianMark {
  double mean = 0.0;
  double stddev = 1.0;
};

// Two-sided power law: density proportional to |x|^{-1-alpha} on
// |x| >= scale * low_cutoff, normalized. The hard low cutoff keeps the total
// mass finite and sampling exact; the induced small-jump truncation bias is
// reported, not compensated.
struct TwoSidedPareto {
  double alpha = 1.5;       // in (0,2)
  double scale = 1.0;       // > 0, multiplies the normalized variate
  double low_cutoff = 1.0;  // eps_m > 0
};

using MarkDistribution = std::variant<DiscreteAtoms, GaussianMark, TwoSidedPareto>;

bool marks_are_discrete(const MarkDistribution& m);

// Deterministic quadrature discretization of a continuous mark law:
// (node, weight) pairs with weights summing to ~1.
struct QuadratureOptions {
  int cells = 2048;
  double tail_mass = 1e-8;
};
std::vector<std::pair<double, double>> mark_quadrature(
    const MarkDistribution& m, const QuadratureOptions& opt);

double sample_mark(const MarkDistribution& m, class RngStream& rng);

// ---------------------------------------------------------------------------
// Lévy measure specifications
// ---------------------------------------------------------------------------

// Finitely supported moving-average filter f: G -> R, nonzero coefficients,
// sorted by group element.
struct Kernel {
  std::vector<std::pair<GroupElement, double>> support;

  static Kernel from(const GroupSpec& spec,
                     std::vector<std::pair<GroupElement, double>> entries);
  // Largest coordinate-wise span of the support (informational).
  std::int64_t width() const;
  // Coefficient at u, or 0 when u is outside the support.
  double coeff(const GroupElement& u) const;
};

// Orbit of a kernel configuration under translation: the Lévy measure
// sum_{t in G} (R_t)_* kappa, where kappa is the image of rate * marks under
// v -> (v * f(h))_h. Dissipative on infinite groups.
struct DissipativeKernel {
  Kernel kernel;
  MarkDistribution marks;
  double rate = 1.0;  // intensity per group element
};

// Finite invariant mass on constant configurations (the translation-fixed
// points): atoms (c, w) with c != 0, w > 0.
struct FixedPointAtoms {
  std::vector<std::pair<double, double>> atoms;  // (constant value, mass)
};

using LevyComponent = std::variant<DissipativeKernel, FixedPointAtoms>;

struct LevySpec {
  GroupSpec group;
  std::vector<LevyComponent> components;  // empty = the zero measure
};

// ---------------------------------------------------------------------------
// Validation
// ---------------------------------------------------------------------------

// A LevySpec that passed validate_levy, tagged with the computed constants.
class ValidatedLevy {
public:
  const LevySpec& spec() const { return spec_; }
  const GroupSpec& group() const { return spec_.group; }
  const QuadratureOptions& quadrature() const { return quad_; }

  // int |Xi_e|^2 ^ 1 dl, the per-coordinate Lévy integrability constant
  // (equal for every coordinate by translation invariance).
  double integrability_constant() const { return integrability_; }
  // Total mass per component; +infinity for a kernel orbit on an infinite
  // group.
  const std::vector<double>& component_mass() const { return component_mass_; }
  double total_mass() const;
  bool zero_measure() const { return spec_.components.empty(); }

private:
  friend ValidatedLevy validate_levy(LevySpec, QuadratureOptions);
  LevySpec spec_;
  QuadratureOptions quad_;
  double integrability_ = 0.0;
  std::vector<double> component_mass_;
};

// Confirms l({0}) = 0 and per-coordinate integrability; computes the
// constants. Throws ZeroAtomMass / Nonintegrable / EmptySpec / InvalidSpec.
ValidatedLevy validate_levy(LevySpec spec, QuadratureOptions quad = {});

// ---------------------------------------------------------------------------
// Finite-dimensional marginals
// ---------------------------------------------------------------------------

struct FinDimLevy {
  enum class Kind { ExactAtoms, QuadratureGrid };
  Kind kind = Kind::ExactAtoms;
  std::vector<GroupElement> coords;
  // (vector on coords, mass); masses > 0, no atom at the zero vector.
  std::vector<std::pair<Eigen::VectorXd, double>> atoms;

  double total_mass() const;
};

// Pushforward of l under (Xi_{g1},...,Xi_{gk}), restricted away from the
// zero vector. Exact for discrete marks and fixed-point atoms, quadrature
// otherwise. Throws DuplicateCoords.
FinDimLevy coordinate_marginal(const ValidatedLevy& levy,
                               const std::vector<GroupElement>& coords);

// Contributing translates: all t with t^{-1} g in the kernel support for
// some g in coords, ascending. Exposed for the window-dilation logic.
std::vector<GroupElement> contributing_translates(
    const GroupSpec& spec, const Kernel& kernel,
    const std::vector<GroupElement>& coords);

// ---------------------------------------------------------------------------
// Nullity classification and the invariant split
// ---------------------------------------------------------------------------

struct NullityVerdict {
  bool is_null = true;
  // Components forming an invariant set of positive finite measure.
  std::vector<std::size_t> witness_components;
  double witness_mass = 0.0;  // lambda
};

// Null iff the spec admits no invariant set of positive finite measure:
// fixed-point atoms always witness non-nullity; on a finite group any
// component of positive finite mass does (the whole space is invariant).
NullityVerdict classify_nullity(const ValidatedLevy& levy);

// Splits l = l' + l'' along the witness: l' the witnessed finite invariant
// part, l'' the rest; supports disjoint and invariant. Throws NoWitness.
std::pair<ValidatedLevy, ValidatedLevy> split_by_invariant(
    const ValidatedLevy& levy, const NullityVerdict& verdict);

}  // namespace idfield

#endif
