#include "idfield/finite_exact.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <numeric>
#include <set>

#include "idfield/errors.hpp"
#include "idfield/parallel.hpp"

namespace idfield {

namespace {

struct UnionFind {
  std::vector<int> parent;
  explicit UnionFind(int n) : parent(n) {
    std::iota(parent.begin(), parent.end(), 0);
  }
  int find(int x) {
    while (parent[x] != x) x = parent[x] = parent[parent[x]];
    return x;
  }
  void unite(int a, int b) { parent[find(a)] = find(b); }
};

int positive_component_count(const FiniteSystem& sys) {
  UnionFind uf(sys.n);
  for (const auto& map : sys.maps)
    for (int st = 0; st < sys.n; ++st)
      if (sys.positive(st)) uf.unite(st, map[st]);
  std::set<int> roots;
  for (int st = 0; st < sys.n; ++st)
    if (sys.positive(st)) roots.insert(uf.find(st));
  return int(roots.size());
}

}  // namespace

FiniteSystem FiniteSystem::probability(std::vector<std::int64_t> num,
                                       std::int64_t den,
                                       std::vector<std::vector<int>> maps) {
  FiniteSystem s;
  s.n = int(num.size());
  s.mass_num = std::move(num);
  s.mass_den = den;
  s.mass_inf.assign(s.n, 0);
  s.maps = std::move(maps);
  validate_system(s);
  return s;
}

FiniteSystem FiniteSystem::sigma_finite(std::vector<std::int64_t> num,
                                        std::int64_t den,
                                        std::vector<std::uint8_t> inf,
                                        std::vector<std::vector<int>> maps) {
  FiniteSystem s;
  s.n = int(num.size());
  s.mass_num = std::move(num);
  s.mass_den = den;
  s.mass_inf = std::move(inf);
  s.maps = std::move(maps);
  validate_system(s);
  return s;
}

bool FiniteSystem::is_probability() const {
  if (std::any_of(mass_inf.begin(), mass_inf.end(),
                  [](std::uint8_t f) { return f != 0; }))
    return false;
  return std::accumulate(mass_num.begin(), mass_num.end(), std::int64_t(0)) ==
         mass_den;
}

double FiniteSystem::mass(int s) const {
  if (mass_inf[s]) return std::numeric_limits<double>::infinity();
  return double(mass_num[s]) / double(mass_den);
}

void validate_system(const FiniteSystem& sys) {
  if (sys.n <= 0) throw InvalidSpec("system needs >= 1 state");
  if (sys.mass_den <= 0) throw InvalidSpec("denominator must be > 0");
  if (int(sys.mass_num.size()) != sys.n || int(sys.mass_inf.size()) != sys.n)
    throw InvalidSpec("measure arrays must have one entry per state");
  for (std::int64_t m : sys.mass_num)
    if (m < 0) throw InvalidSpec("masses must be >= 0");
  for (const auto& map : sys.maps) {
    if (int(map.size()) != sys.n)
      throw NotMeasurePreserving("map is not a self-map of the state set");
    for (int s : map)
      if (s < 0 || s >= sys.n)
        throw NotMeasurePreserving("map leaves the state set");
    // xi(T^{-1}{s}) = xi({s}) exactly, including the infinity flags.
    for (int s = 0; s < sys.n; ++s) {
      std::int64_t pre = 0;
      bool pre_inf = false;
      for (int t = 0; t < sys.n; ++t)
        if (map[t] == s) {
          pre += sys.mass_num[t];
          pre_inf = pre_inf || sys.mass_inf[t];
        }
      const bool s_inf = sys.mass_inf[s];
      if (pre_inf != s_inf || (!s_inf && pre != sys.mass_num[s]))
        throw NotMeasurePreserving("preimage mass mismatch at a state");
    }
  }
}

InvariantPartition invariant_partition(const FiniteSystem& sys) {
  validate_system(sys);
  UnionFind uf(sys.n);
  for (const auto& map : sys.maps)
    for (int s = 0; s < sys.n; ++s)
      if (sys.positive(s)) uf.unite(s, map[s]);
  std::map<int, std::vector<int>> comps;
  for (int s = 0; s < sys.n; ++s)
    if (sys.positive(s)) comps[uf.find(s)].push_back(s);
  InvariantPartition part;
  for (auto& [root, states] : comps) part.atoms.push_back(std::move(states));
  return part;
}

bool is_ergodic(const FiniteSystem& sys) {
  if (!sys.is_probability())
    throw NotProbability("ergodicity is defined for probability systems");
  validate_system(sys);
  return positive_component_count(sys) == 1;
}

FiniteSystem product_system(const FiniteSystem& a, const FiniteSystem& b) {
  if (a.maps.size() != b.maps.size())
    throw IndexMismatch("systems must share the index set");
  FiniteSystem p;
  p.n = a.n * b.n;
  p.mass_den = a.mass_den * b.mass_den;
  p.mass_num.resize(p.n);
  p.mass_inf.resize(p.n);
  for (int i = 0; i < a.n; ++i)
    for (int j = 0; j < b.n; ++j) {
      const int s = i * b.n + j;
      const bool zero = (!a.mass_inf[i] && a.mass_num[i] == 0) ||
                        (!b.mass_inf[j] && b.mass_num[j] == 0);
      p.mass_num[s] = zero ? 0 : a.mass_num[i] * b.mass_num[j];
      p.mass_inf[s] = !zero && (a.mass_inf[i] || b.mass_inf[j]);
    }
  for (std::size_t m = 0; m < a.maps.size(); ++m) {
    std::vector<int> map(p.n);
    for (int i = 0; i < a.n; ++i)
      for (int j = 0; j < b.n; ++j)
        map[i * b.n + j] = a.maps[m][i] * b.n + b.maps[m][j];
    p.maps.push_back(std::move(map));
  }
  return p;
}

bool is_weakly_mixing(const FiniteSystem& sys) {
  return is_ergodic(product_system(sys, sys));
}

// ---------------------------------------------------------------------------
// Enumeration
// ---------------------------------------------------------------------------

namespace {

std::int64_t lcm_upto(int k) {
  std::int64_t l = 1;
  for (int i = 2; i <= k; ++i) l = std::lcm<std::int64_t>(l, i);
  return l;
}

// All measures on n states: units over the common denominator, each unit's
// reduced denominator <= max_den, summing to the denominator.
void enumerate_measures(int n, std::int64_t den, int max_den,
                        std::vector<std::int64_t>& cur,
                        std::vector<std::vector<std::int64_t>>& out) {
  if (int(cur.size()) == n) {
    if (std::accumulate(cur.begin(), cur.end(), std::int64_t(0)) == den)
      out.push_back(cur);
    return;
  }
  const std::int64_t used = std::accumulate(cur.begin(), cur.end(), std::int64_t(0));
  for (std::int64_t u = 0; u <= den - used; ++u) {
    if (u > 0 && den / std::gcd(u, den) > max_den) continue;
    cur.push_back(u);
    enumerate_measures(n, den, max_den, cur, out);
    cur.pop_back();
  }
}

std::vector<std::vector<int>> preserving_maps(
    const std::vector<std::int64_t>& units) {
  const int n = int(units.size());
  std::vector<std::vector<int>> out;
  std::vector<int> map(n, 0);
  for (;;) {
    bool ok = true;
    for (int s = 0; s < n && ok; ++s) {
      std::int64_t pre = 0;
      for (int t = 0; t < n; ++t)
        if (map[t] == s) pre += units[t];
      ok = pre == units[s];
    }
    if (ok) out.push_back(map);
    int i = n - 1;
    while (i >= 0 && map[i] == n - 1) map[i--] = 0;
    if (i < 0) break;
    ++map[i];
  }
  return out;
}

// Canonical encoding under state relabeling (measure relabeled, maps
// conjugated); the equivalence is isomorphism-invariant, so dedup by the
// lexicographically smallest encoding.
std::vector<std::int64_t> canonical_encoding(
    const std::vector<std::int64_t>& units,
    const std::vector<const std::vector<int>*>& maps) {
  const int n = int(units.size());
  std::vector<int> perm(n);
  std::iota(perm.begin(), perm.end(), 0);
  std::vector<std::int64_t> best;
  do {
    std::vector<std::int64_t> enc;
    enc.reserve(n * (1 + maps.size()));
    for (int i = 0; i < n; ++i) enc.push_back(units[perm[i]]);
    for (const auto* map : maps) {
      // conjugated map: state perm^{-1}(i) -> perm^{-1}((*map)[...])
      std::vector<int> inv(n);
      for (int i = 0; i < n; ++i) inv[perm[i]] = i;
      for (int i = 0; i < n; ++i) enc.push_back(inv[(*map)[perm[i]]]);
    }
    if (best.empty() || enc < best) best = std::move(enc);
  } while (std::next_permutation(perm.begin(), perm.end()));
  return best;
}

}  // namespace

EquivalenceReport check_double_ergodicity_equivalence(int max_states,
                                                      int max_maps,
                                                      int max_denominator) {
  if (max_states < 1 || max_states > 5)
    throw BudgetExceeded("max_states must lie in [1,5]");
  if (max_maps < 1 || max_maps > 3)
    throw BudgetExceeded("max_maps must lie in [1,3]");
  const std::int64_t den = lcm_upto(max_denominator);

  std::vector<FiniteSystem> systems;
  std::set<std::vector<std::int64_t>> seen;
  for (int n = 1; n <= max_states; ++n) {
    std::vector<std::vector<std::int64_t>> measures;
    std::vector<std::int64_t> cur;
    enumerate_measures(n, den, max_denominator, cur, measures);
    for (const auto& units : measures) {
      const auto maps = preserving_maps(units);
      // All ordered tuples of length max_maps.
      std::vector<std::size_t> idx(max_maps, 0);
      for (;;) {
        std::vector<const std::vector<int>*> tuple;
        for (int m = 0; m < max_maps; ++m) tuple.push_back(&maps[idx[m]]);
        auto enc = canonical_encoding(units, tuple);
        enc.push_back(n);
        if (seen.insert(std::move(enc)).second) {
          std::vector<std::vector<int>> ms;
          for (const auto* t : tuple) ms.push_back(*t);
          systems.push_back(FiniteSystem::probability(units, den, std::move(ms)));
        }
        int m = max_maps - 1;
        while (m >= 0 && idx[m] + 1 == maps.size()) idx[m--] = 0;
        if (m < 0) break;
        ++idx[m];
      }
    }
  }

  EquivalenceReport rep;
  rep.enumerated = std::int64_t(systems.size());

  std::vector<std::uint8_t> ergodic(systems.size()), wm(systems.size());
  parallel_for(std::int64_t(systems.size()), [&](std::int64_t i) {
    ergodic[i] = positive_component_count(systems[i]) == 1 ? 1 : 0;
    wm[i] = positive_component_count(product_system(systems[i], systems[i])) == 1
                ? 1
                : 0;
  });
  std::vector<std::size_t> ergodic_ids;
  for (std::size_t i = 0; i < systems.size(); ++i) {
    rep.ergodic_count += ergodic[i];
    rep.wm_count += wm[i];
    if (ergodic[i]) ergodic_ids.push_back(i);
  }

  std::vector<std::int64_t> checks(systems.size(), 0);
  std::vector<std::string> counterexamples(systems.size());
  parallel_for(std::int64_t(systems.size()), [&](std::int64_t ti) {
    bool all_products_ergodic = true;
    for (std::size_t si : ergodic_ids) {
      ++checks[ti];
      if (positive_component_count(product_system(systems[ti], systems[si])) !=
          1) {
        all_products_ergodic = false;
        break;
      }
    }
    if (all_products_ergodic != bool(wm[ti]))
      counterexamples[ti] =
          "system " + std::to_string(ti) + ": TxT ergodic=" +
          (wm[ti] ? "yes" : "no") + " but all TxS ergodic=" +
          (all_products_ergodic ? "yes" : "no");
  });
  for (std::size_t i = 0; i < systems.size(); ++i) {
    rep.checks += checks[i];
    if (!counterexamples[i].empty())
      rep.counterexamples.push_back(counterexamples[i]);
  }
  return rep;
}

// ---------------------------------------------------------------------------
// Proof pipeline
// ---------------------------------------------------------------------------

PipelineReport double_ergodicity_pipeline(const FiniteSystem& T, const FiniteSystem& S,
                                  const Eigen::MatrixXd& f) {
  constexpr double kTol = 1e-12;
  if (!T.is_probability() || !S.is_probability())
    throw NotProbability("pipeline needs probability systems");
  if (T.maps.size() != S.maps.size())
    throw IndexMismatch("systems must share the index set");
  if (f.rows() != T.n || f.cols() != S.n)
    throw DimensionMismatch("f must be an X x Y matrix");
  if (!is_weakly_mixing(T))
    throw HypothesisViolation("T x T is not ergodic");
  if (!is_ergodic(S)) throw HypothesisViolation("S is not ergodic");

  Eigen::VectorXd xi(T.n), eta(S.n);
  for (int i = 0; i < T.n; ++i) xi[i] = T.mass(i);
  for (int j = 0; j < S.n; ++j) eta[j] = S.mass(j);

  // T x S-invariance of f, modulo null pairs.
  for (std::size_t m = 0; m < T.maps.size(); ++m)
    for (int x = 0; x < T.n; ++x)
      for (int y = 0; y < S.n; ++y)
        if (xi[x] > 0.0 && eta[y] > 0.0 &&
            std::abs(f(T.maps[m][x], S.maps[m][y]) - f(x, y)) > kTol)
          throw HypothesisViolation("f is not T x S-invariant");

  PipelineReport rep;
  rep.f_mean = xi.dot(f * eta);
  if (std::abs(rep.f_mean) > kTol)
    throw HypothesisViolation("f does not have zero mean");

  // F(x,x') = int f(x,y) f(x',y) deta(y); T x T-invariant by construction,
  // checked anyway, then forced constant by ergodicity of T x T.
  const Eigen::MatrixXd F = f * eta.asDiagonal() * f.transpose();
  for (std::size_t m = 0; m < T.maps.size(); ++m)
    for (int x = 0; x < T.n; ++x)
      for (int x2 = 0; x2 < T.n; ++x2)
        if (xi[x] > 0.0 && xi[x2] > 0.0 &&
            std::abs(F(T.maps[m][x], T.maps[m][x2]) - F(x, x2)) > kTol)
          throw HypothesisViolation("F is not T x T-invariant");

  // The constant equals 0 because the projection f_Y = int f dxi is
  // S-invariant, hence constant, hence its eta-mean 0.
  const Eigen::VectorXd f_Y = f.transpose() * xi;
  double c_val = 0.0;
  bool c_set = false;
  for (int x = 0; x < T.n; ++x)
    for (int x2 = 0; x2 < T.n; ++x2)
      if (xi[x] > 0.0 && xi[x2] > 0.0) {
        if (!c_set) {
          c_val = F(x, x2);
          c_set = true;
        } else if (std::abs(F(x, x2) - c_val) > kTol) {
          throw HypothesisViolation("F is not constant on positive-mass pairs");
        }
      }
  rep.correlation_constant = c_set ? c_val : 0.0;
  double fy_mean = f_Y.dot(eta);
  if (std::abs(fy_mean) > kTol || std::abs(rep.correlation_constant) > kTol)
    throw HypothesisViolation("the correlation constant does not vanish");

  // Psi_f(psi)(y) = int f(x,y) psi(x) dxi(x): the weighted Gram
  // diag(xi) F diag(xi) must vanish entrywise.
  const Eigen::MatrixXd gram =
      xi.asDiagonal() * F * xi.asDiagonal();
  rep.max_operator_entry = gram.cwiseAbs().maxCoeff();
  if (rep.max_operator_entry > kTol)
    throw HypothesisViolation("Psi_f is not the zero operator");

  rep.max_f_on_support = 0.0;
  double eta_min = 1.0;
  for (int j = 0; j < S.n; ++j)
    if (eta[j] > 0.0) eta_min = std::min(eta_min, eta[j]);
  for (int x = 0; x < T.n; ++x)
    for (int y = 0; y < S.n; ++y)
      if (xi[x] > 0.0 && eta[y] > 0.0)
        rep.max_f_on_support = std::max(rep.max_f_on_support, std::abs(f(x, y)));
  // F(x,x) = sum_y f(x,y)^2 eta_y <= kTol bounds |f| by sqrt(kTol/eta_min).
  if (rep.max_f_on_support > std::sqrt(kTol / eta_min))
    throw HypothesisViolation("f does not vanish on positive-mass pairs");
  rep.passed = true;
  return rep;
}

bool is_null_action(const FiniteSystem& sys) {
  validate_system(sys);
  // Invariant sets mod null are unions of partition atoms; a witness is an
  // atom of positive finite total mass.
  for (const auto& atom : invariant_partition(sys).atoms) {
    std::int64_t total = 0;
    bool inf = false;
    for (int s : atom) {
      total += sys.mass_num[s];
      inf = inf || sys.mass_inf[s];
    }
    if (!inf && total > 0) return false;
  }
  return true;
}

bool is_null_action(const SymbolicAction& action) {
  if (action.kind == "lattice_translation") {
    if (action.dim < 1) throw UnsupportedDescriptor("dimension must be >= 1");
    // Translation on Z^d with counting measure: the only invariant sets are
    // empty and everything, so no invariant set has positive finite mass.
    return true;
  }
  throw UnsupportedDescriptor("unknown symbolic action: " + action.kind);
}

}  // namespace idfield
