#include "idfield/groups.hpp"

#include <algorithm>
#include <cstdlib>
#include <string>

#include "idfield/errors.hpp"

namespace idfield {

GroupSpec GroupSpec::lattice(int d) {
  if (d < 1) throw InvalidSpec("lattice dimension must be >= 1");
  GroupSpec s;
  s.kind = GroupKind::IntegerLattice;
  s.dim = d;
  return s;
}

GroupSpec GroupSpec::cyclic(std::vector<std::int64_t> moduli) {
  if (moduli.empty()) throw InvalidSpec("cyclic product needs >= 1 modulus");
  for (std::int64_t m : moduli)
    if (m < 1) throw InvalidSpec("cyclic moduli must be >= 1");
  GroupSpec s;
  s.kind = GroupKind::FiniteCyclicProduct;
  s.dim = int(moduli.size());
  s.moduli = std::move(moduli);
  return s;
}

std::int64_t GroupSpec::order() const {
  if (!finite()) throw InvalidSpec("infinite group has no order");
  std::int64_t n = 1;
  for (std::int64_t m : moduli) n *= m;
  return n;
}

void check_element(const GroupSpec& spec, const GroupElement& a) {
  if (int(a.coords.size()) != spec.arity())
    throw InvalidElement("element arity " + std::to_string(a.coords.size()) +
                         " does not match group arity " +
                         std::to_string(spec.arity()));
  if (spec.kind == GroupKind::FiniteCyclicProduct) {
    for (std::size_t i = 0; i < a.coords.size(); ++i)
      if (a.coords[i] < 0 || a.coords[i] >= spec.moduli[i])
        throw InvalidElement("residue out of range [0, m)");
  }
}

GroupElement identity(const GroupSpec& spec) {
  return GroupElement(std::vector<std::int64_t>(spec.arity(), 0));
}

GroupElement group_op(const GroupSpec& spec, const GroupElement& a,
                      const GroupElement& b) {
  check_element(spec, a);
  check_element(spec, b);
  GroupElement out = a;
  for (std::size_t i = 0; i < out.coords.size(); ++i) {
    out.coords[i] += b.coords[i];
    if (spec.kind == GroupKind::FiniteCyclicProduct) {
      out.coords[i] %= spec.moduli[i];
      if (out.coords[i] < 0) out.coords[i] += spec.moduli[i];
    }
  }
  return out;
}

GroupElement inverse(const GroupSpec& spec, const GroupElement& a) {
  check_element(spec, a);
  GroupElement out = a;
  for (std::size_t i = 0; i < out.coords.size(); ++i) {
    if (spec.kind == GroupKind::FiniteCyclicProduct) {
      out.coords[i] = a.coords[i] == 0 ? 0 : spec.moduli[i] - a.coords[i];
    } else {
      out.coords[i] = -a.coords[i];
    }
  }
  return out;
}

FolnerWindow folner_window(const GroupSpec& spec, std::int64_t radius) {
  if (radius < 0) throw InvalidSpec("window radius must be >= 0");
  FolnerWindow w;
  w.radius = radius;
  const int k = spec.arity();
  std::vector<std::int64_t> lo(k), hi(k);
  for (int i = 0; i < k; ++i) {
    if (spec.kind == GroupKind::IntegerLattice) {
      lo[i] = -radius;
      hi[i] = radius;
    } else {
      lo[i] = 0;
      hi[i] = spec.moduli[i] - 1;
    }
  }
  std::vector<std::int64_t> cur = lo;
  for (;;) {
    w.elements.push_back(GroupElement(cur));
    int i = k - 1;
    while (i >= 0 && cur[i] == hi[i]) {
      cur[i] = lo[i];
      --i;
    }
    if (i < 0) break;
    ++cur[i];
  }
  return w;
}

std::int64_t sup_norm(const GroupSpec& spec, const GroupElement& a) {
  check_element(spec, a);
  if (spec.finite()) return 0;
  std::int64_t m = 0;
  for (std::int64_t c : a.coords) m = std::max(m, std::abs(c));
  return m;
}

std::int64_t window_position(const GroupSpec& spec, std::int64_t radius,
                             const GroupElement& g) {
  check_element(spec, g);
  std::int64_t idx = 0;
  for (int i = 0; i < spec.arity(); ++i) {
    std::int64_t lo, hi;
    if (spec.kind == GroupKind::IntegerLattice) {
      lo = -radius;
      hi = radius;
    } else {
      lo = 0;
      hi = spec.moduli[i] - 1;
    }
    if (g.coords[i] < lo || g.coords[i] > hi)
      throw WindowUnderflow("coordinate outside the window");
    idx = idx * (hi - lo + 1) + (g.coords[i] - lo);
  }
  return idx;
}

}  // namespace idfield
