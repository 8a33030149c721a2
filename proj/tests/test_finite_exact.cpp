#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <algorithm>
#include <set>

#include "idfield/errors.hpp"
#include "idfield/finite_exact.hpp"
#include "idfield/rng.hpp"

using namespace idfield;

namespace {

std::vector<int> rotation(int n) {
  std::vector<int> m(n);
  for (int i = 0; i < n; ++i) m[i] = (i + 1) % n;
  return m;
}

std::vector<int> ident(int n) {
  std::vector<int> m(n);
  for (int i = 0; i < n; ++i) m[i] = i;
  return m;
}

FiniteSystem uniform_system(int n, std::vector<std::vector<int>> maps) {
  return FiniteSystem::probability(std::vector<std::int64_t>(n, 1), n,
                                   std::move(maps));
}

// Exhaustive oracle: all invariant subsets (mod null) of a finite system,
// as bitmasks over states.
std::set<std::uint32_t> invariant_subsets_bruteforce(const FiniteSystem& sys) {
  std::set<std::uint32_t> out;
  for (std::uint32_t mask = 0; mask < (1u << sys.n); ++mask) {
    bool ok = true;
    for (const auto& map : sys.maps)
      for (int s = 0; s < sys.n && ok; ++s) {
        if (!sys.positive(s)) continue;
        const bool in_e = (mask >> s) & 1u;
        const bool image_in_e = (mask >> map[s]) & 1u;
        // xi(T^{-1}E symdiff E) = 0 iff 1_E is constant along positive-mass
        // transitions s -> T(s).
        if (in_e != image_in_e) ok = false;
      }
    if (ok) out.insert(mask & [&] {
      std::uint32_t positive = 0;
      for (int s = 0; s < sys.n; ++s)
        if (sys.positive(s)) positive |= 1u << s;
      return positive;
    }());
  }
  return out;
}

std::set<std::uint32_t> invariant_subsets_from_partition(const FiniteSystem& sys) {
  const InvariantPartition part = invariant_partition(sys);
  std::set<std::uint32_t> out;
  const std::size_t k = part.atoms.size();
  for (std::uint32_t pick = 0; pick < (1u << k); ++pick) {
    std::uint32_t mask = 0;
    for (std::size_t i = 0; i < k; ++i)
      if ((pick >> i) & 1u)
        for (int s : part.atoms[i]) mask |= 1u << s;
    out.insert(mask);
  }
  return out;
}

}  // namespace

TEST_CASE("invariant partitions of the named examples") {
  const FiniteSystem rot4 = uniform_system(4, {rotation(4)});
  CHECK(invariant_partition(rot4).atoms.size() == 1);

  const FiniteSystem id3 = uniform_system(3, {ident(3)});
  CHECK(invariant_partition(id3).atoms.size() == 3);

  // rotation x rotation on (Z/2)^2: diagonal and antidiagonal.
  const FiniteSystem rot2 = uniform_system(2, {rotation(2)});
  const FiniteSystem prod = product_system(rot2, rot2);
  const InvariantPartition part = invariant_partition(prod);
  REQUIRE(part.atoms.size() == 2);
  std::set<std::vector<int>> atoms(part.atoms.begin(), part.atoms.end());
  CHECK(atoms.count({0, 3}) == 1);  // states (0,0) and (1,1)
  CHECK(atoms.count({1, 2}) == 1);
}

TEST_CASE("partition generates exactly the invariant-set lattice (n <= 4)") {
  RngStream rng(80, 0);
  for (int trial = 0; trial < 200; ++trial) {
    const int n = 1 + int(rng.next_u32() % 4);
    // Random measure from quarters, random preserving maps by rejection.
    std::vector<std::int64_t> units(n, 0);
    for (int i = 0; i < 4; ++i) units[rng.next_u32() % n] += 1;
    std::vector<std::vector<int>> maps;
    int guard = 0;
    while (maps.size() < 2 && guard++ < 20000) {
      std::vector<int> m(n);
      for (auto& x : m) x = int(rng.next_u32() % n);
      bool ok = true;
      for (int s = 0; s < n && ok; ++s) {
        std::int64_t pre = 0;
        for (int t = 0; t < n; ++t)
          if (m[t] == s) pre += units[t];
        ok = pre == units[s];
      }
      if (ok) maps.push_back(std::move(m));
    }
    if (maps.size() < 2) continue;
    const FiniteSystem sys = FiniteSystem::probability(units, 4, maps);
    CHECK(invariant_subsets_bruteforce(sys) ==
          invariant_subsets_from_partition(sys));
  }
}

TEST_CASE("ergodicity of the named examples") {
  CHECK(is_ergodic(uniform_system(5, {rotation(5)})));
  CHECK_FALSE(is_ergodic(uniform_system(2, {ident(2)})));
  CHECK(is_ergodic(uniform_system(1, {ident(1)})));
  CHECK_THROWS_AS(
      is_ergodic(FiniteSystem::sigma_finite({1, 1}, 1, {0, 0}, {ident(2)})),
      NotProbability);
}

TEST_CASE("products") {
  const FiniteSystem rot2 = uniform_system(2, {rotation(2)});
  const FiniteSystem prod = product_system(rot2, rot2);
  CHECK_FALSE(is_ergodic(prod));
  // Product measure masses multiply.
  CHECK(prod.mass(0) == doctest::Approx(0.25));
  CHECK(prod.mass_den == 4);

  // anything x one-state keeps the statistics.
  const FiniteSystem one = uniform_system(1, {ident(1)});
  const FiniteSystem rot3 = uniform_system(3, {rotation(3)});
  CHECK(is_ergodic(product_system(rot3, one)) == is_ergodic(rot3));
  CHECK(is_weakly_mixing(product_system(rot3, one)) == is_weakly_mixing(rot3));

  FiniteSystem wrong = rot3;
  wrong.maps.push_back(rotation(3));
  CHECK_THROWS_AS(product_system(wrong, rot3), IndexMismatch);
}

TEST_CASE("weak mixing on finite systems is triviality (n <= 3, uniform)") {
  CHECK(is_weakly_mixing(uniform_system(1, {ident(1)})));
  CHECK_FALSE(is_weakly_mixing(uniform_system(2, {rotation(2)})));

  // Exhaustive oracle over all measure-preserving map pairs for uniform
  // measures: weak mixing holds iff there is a single positive-mass state.
  for (int n = 1; n <= 3; ++n) {
    std::vector<std::vector<int>> perms;
    std::vector<int> p = ident(n);
    do {
      perms.push_back(p);
    } while (std::next_permutation(p.begin(), p.end()));
    for (const auto& m1 : perms)
      for (const auto& m2 : perms)
        CHECK(is_weakly_mixing(uniform_system(n, {m1, m2})) == (n == 1));
  }
}

TEST_CASE("measure preservation validation") {
  // A merging map cannot preserve point masses.
  CHECK_THROWS_AS(
      FiniteSystem::probability({2, 1, 1}, 4, {{0, 0, 0}}),
      NotMeasurePreserving);
  CHECK_THROWS_AS(FiniteSystem::probability({1, 1}, 2, {{0, 2}}),
                  NotMeasurePreserving);
  // Fuzzed negatives: perturbed permutations on non-uniform measures.
  RngStream rng(81, 0);
  int rejected = 0;
  for (int trial = 0; trial < 200; ++trial) {
    std::vector<int> m = {1, 0, 2};  // valid for units (1,1,2)
    m[rng.next_u32() % 3] = int(rng.next_u32() % 3);
    try {
      FiniteSystem::probability({1, 1, 2}, 4, {m});
    } catch (const NotMeasurePreserving&) {
      ++rejected;
    }
  }
  CHECK(rejected > 0);

  // Infinity flags must match on preimages.
  CHECK_THROWS_AS(
      FiniteSystem::sigma_finite({0, 1}, 1, {1, 0}, {{1, 0}}),
      NotMeasurePreserving);
  CHECK_NOTHROW(FiniteSystem::sigma_finite({0, 0}, 1, {1, 1}, {{1, 0}}));
}

TEST_CASE("double-ergodicity equivalence by exhaustion") {
  const EquivalenceReport one = check_double_ergodicity_equivalence(1, 2, 4);
  CHECK(one.counterexamples.empty());
  CHECK(one.enumerated >= 1);

  const EquivalenceReport two = check_double_ergodicity_equivalence(2, 2, 4);
  CHECK(two.counterexamples.empty());
  CHECK(two.ergodic_count > 0);
  CHECK(two.wm_count > 0);

  const EquivalenceReport three = check_double_ergodicity_equivalence(3, 2, 3);
  CHECK(three.counterexamples.empty());

  CHECK_THROWS_AS(check_double_ergodicity_equivalence(9, 2, 4), BudgetExceeded);
}

TEST_CASE("proof pipeline on hand-built instances") {
  const FiniteSystem one = uniform_system(1, {ident(1), ident(1)});
  const FiniteSystem rot3 =
      uniform_system(3, {rotation(3), rotation(3)});

  // T one-state, S ergodic, f = 0: all checks pass with C = 0.
  Eigen::MatrixXd f0 = Eigen::MatrixXd::Zero(1, 3);
  const PipelineReport ok = double_ergodicity_pipeline(one, rot3, f0);
  CHECK(ok.passed);
  CHECK(ok.correlation_constant == 0.0);

  // Invariant zero-mean f is forced to vanish; garbage on null states is
  // invisible mod null.
  const FiniteSystem t_with_null =
      FiniteSystem::probability({1, 0}, 1, {{0, 0}, {0, 1}});
  Eigen::MatrixXd f(2, 3);
  f << 0.0, 0.0, 0.0, 17.0, -3.0, 42.0;
  CHECK(double_ergodicity_pipeline(t_with_null, rot3, f).passed);

  // Nonzero mean violates the hypotheses.
  Eigen::MatrixXd fbad = Eigen::MatrixXd::Constant(1, 3, 0.5);
  CHECK_THROWS_AS(double_ergodicity_pipeline(one, rot3, fbad), HypothesisViolation);

  // Non-invariant f is rejected.
  Eigen::MatrixXd fni(1, 3);
  fni << 1.0, -1.0, 0.0;
  CHECK_THROWS_AS(double_ergodicity_pipeline(one, rot3, fni), HypothesisViolation);

  // T x T non-ergodic is rejected.
  const FiniteSystem rot2 = uniform_system(2, {rotation(2), rotation(2)});
  Eigen::MatrixXd fz = Eigen::MatrixXd::Zero(2, 3);
  CHECK_THROWS_AS(double_ergodicity_pipeline(rot2, rot3, fz), HypothesisViolation);

  // Non-ergodic S is rejected.
  const FiniteSystem id2 = uniform_system(2, {ident(2), ident(2)});
  Eigen::MatrixXd fy = Eigen::MatrixXd::Zero(1, 2);
  CHECK_THROWS_AS(double_ergodicity_pipeline(one, id2, fy), HypothesisViolation);
}

TEST_CASE("nullity of finite and symbolic actions") {
  CHECK_FALSE(is_null_action(uniform_system(4, {rotation(4)})));

  // Two fixed points with masses {1, infinity}: the finite one witnesses.
  const FiniteSystem two_fixed =
      FiniteSystem::sigma_finite({1, 0}, 1, {0, 1}, {ident(2)});
  CHECK_FALSE(is_null_action(two_fixed));

  // All-infinite invariant components: null.
  const FiniteSystem swap_inf =
      FiniteSystem::sigma_finite({0, 0}, 1, {1, 1}, {{1, 0}});
  CHECK(is_null_action(swap_inf));

  CHECK(is_null_action(SymbolicAction{"lattice_translation", 1}));
  CHECK(is_null_action(SymbolicAction{"lattice_translation", 3}));
  CHECK_THROWS_AS(is_null_action(SymbolicAction{"horocycle_flow", 1}),
                  UnsupportedDescriptor);
}
