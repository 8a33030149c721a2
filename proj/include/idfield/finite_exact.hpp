#ifndef IDFIELD_FINITE_EXACT_HPP
#define IDFIELD_FINITE_EXACT_HPP

#include <Eigen/Dense>
#include <cstdint>
#include <string>
#include <vector>

namespace idfield {

// Finite state set with a sigma-finite measure (exact rationals num/den,
// plus an explicit infinite-mass flag per state) and a Theta-indexed family
// of measure-preserving self-maps. Maps need not be invertible.
struct FiniteSystem {
  int n = 0;
  std::vector<std::int64_t> mass_num;  // per-state numerator (>= 0)
  std::int64_t mass_den = 1;           // common denominator (> 0)
  std::vector<std::uint8_t> mass_inf;  // sigma-finite infinity flag
  std::vector<std::vector<int>> maps;  // each of size n

  static FiniteSystem probability(std::vector<std::int64_t> num,
                                  std::int64_t den,
                                  std::vector<std::vector<int>> maps);
  static FiniteSystem sigma_finite(std::vector<std::int64_t> num,
                                   std::int64_t den,
                                   std::vector<std::uint8_t> inf,
                                   std::vector<std::vector<int>> maps);

  bool is_probability() const;
  bool positive(int s) const { return mass_inf[s] || mass_num[s] > 0; }
  double mass(int s) const;
};

// Checks every map against xi(T^{-1}{s}) = xi({s}) exactly; throws
// NotMeasurePreserving.
void validate_system(const FiniteSystem& sys);

// Minimal common invariant sets modulo null states: connected components of
// the relation s ~ T_theta(s) restricted to positive-measure states.
struct InvariantPartition {
  std::vector<std::vector<int>> atoms;
};
InvariantPartition invariant_partition(const FiniteSystem& sys);

// xi(E) in {0,1} for every invariant E; probability systems only.
bool is_ergodic(const FiniteSystem& sys);

// Componentwise product with the product measure; same index set sizes.
FiniteSystem product_system(const FiniteSystem& a, const FiniteSystem& b);

// T x T ergodic.
bool is_weakly_mixing(const FiniteSystem& sys);

// ---------------------------------------------------------------------------
// Exhaustive double-ergodicity check
// ---------------------------------------------------------------------------

struct EquivalenceReport {
  std::int64_t enumerated = 0;      // deduped systems
  std::int64_t ergodic_count = 0;
  std::int64_t wm_count = 0;        // T x T ergodic
  std::int64_t checks = 0;          // (T, S) products tested
  std::vector<std::string> counterexamples;
};

// Enumerates every probability system with <= max_states states, map tuples
// of length max_maps drawn from all measure-preserving self-maps, and
// measures on the rational grid with denominators <= max_denominator
// (deduped by relabeling isomorphism). Verifies for each T:
// is_ergodic(T x T) <=> is_ergodic(T x S) for every enumerated ergodic S.
EquivalenceReport check_double_ergodicity_equivalence(int max_states,
                                                      int max_maps,
                                                      int max_denominator = 4);

// ---------------------------------------------------------------------------
// The double-ergodicity proof pipeline, machine-checked on an instance
// ---------------------------------------------------------------------------

struct PipelineReport {
  double f_mean = 0.0;
  double correlation_constant = 0.0;  // the constant value of F
  double max_operator_entry = 0.0;    // largest |.| entry of the weighted Gram
  double max_f_on_support = 0.0;      // largest |f| on positive-mass pairs
  bool passed = false;
};

// Hypotheses: f is T x S-invariant with zero mean, T x T ergodic, S ergodic.
// Computes F(x,x') = int f(x,y) f(x',y) deta, checks F is T x T-invariant
// and constant = 0 (via the projection f_Y = 0), checks the operator
// Psi_f(psi)(y) = int f(x,y) psi(x) dxi vanishes, and concludes f = 0 on
// positive-mass pairs; all tolerances 1e-12. Throws HypothesisViolation
// naming the failed hypothesis.
PipelineReport double_ergodicity_pipeline(const FiniteSystem& T, const FiniteSystem& S,
                                  const Eigen::MatrixXd& f);

// ---------------------------------------------------------------------------
// Nullity of sigma-finite actions
// ---------------------------------------------------------------------------

// A finite system is null iff it admits no invariant set of positive finite
// measure: every invariant component has zero or infinite mass.
bool is_null_action(const FiniteSystem& sys);

// Symbolic descriptors for actions that cannot be tabulated; only the
// lattice translation action on Z^d with counting measure is supported
// (null: the only invariant sets are empty or everything). Anything else
// throws UnsupportedDescriptor.
struct SymbolicAction {
  std::string kind;  // "lattice_translation"
  int dim = 1;
};
bool is_null_action(const SymbolicAction& action);

}  // namespace idfield

#endif
