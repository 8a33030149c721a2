#include "idfield/measures.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <set>
#include <string>

#include "idfield/errors.hpp"
#include "idfield/rng.hpp"

namespace idfield {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

void check_finite(double x, const char* what) {
  if (!std::isfinite(x)) throw InvalidSpec(std::string(what) + " must be finite");
}

// z with P(|N(0,1)| > z) <= tail, by bisection on erfc.
double normal_tail_radius(double tail) {
  double lo = 0.0, hi = 40.0;
  for (int i = 0; i < 200; ++i) {
    const double mid = 0.5 * (lo + hi);
    if (std::erfc(mid / std::sqrt(2.0)) > tail)
      lo = mid;
    else
      hi = mid;
  }
  return hi;
}

void validate_marks(const MarkDistribution& m) {
  if (const auto* d = std::get_if<DiscreteAtoms>(&m)) {
    if (d->atoms.empty()) throw EmptySpec("discrete mark law has no atoms");
    double total = 0.0;
    for (const auto& [v, p] : d->atoms) {
      check_finite(v, "mark value");
      check_finite(p, "mark probability");
      if (p < 0.0) throw InvalidSpec("mark probability must be >= 0");
      if (v == 0.0 && p > 0.0)
        throw ZeroAtomMass("mark value 0 carries positive probability");
      total += p;
    }
    if (std::abs(total - 1.0) > 1e-12)
      throw InvalidSpec("mark probabilities must sum to 1 (got " +
                        std::to_string(total) + ")");
  } else if (const auto* g = std::get_if<GaussianMark>(&m)) {
    check_finite(g->mean, "mark mean");
    check_finite(g->stddev, "mark stddev");
    if (g->stddev <= 0.0) throw InvalidSpec("mark stddev must be > 0");
  } else {
    const auto& p = std::get<TwoSidedPareto>(m);
    if (!(p.alpha > 0.0 && p.alpha < 2.0))
      throw InvalidSpec("pareto alpha must lie in (0,2)");
    if (!(p.scale > 0.0)) throw InvalidSpec("pareto scale must be > 0");
    if (!(p.low_cutoff > 0.0)) throw InvalidSpec("pareto cutoff must be > 0");
  }
}

}  // namespace

bool marks_are_discrete(const MarkDistribution& m) {
  return std::holds_alternative<DiscreteAtoms>(m);
}

std::vector<std::pair<double, double>> mark_quadrature(
    const MarkDistribution& m, const QuadratureOptions& opt) {
  std::vector<std::pair<double, double>> grid;
  if (const auto* d = std::get_if<DiscreteAtoms>(&m)) {
    for (const auto& [v, p] : d->atoms)
      if (p > 0.0) grid.emplace_back(v, p);
    return grid;
  }
  if (const auto* g = std::get_if<GaussianMark>(&m)) {
    // Composite midpoint over [mean - R sigma, mean + R sigma], tail < opt.
    const double R = normal_tail_radius(opt.tail_mass);
    const double lo = g->mean - R * g->stddev, hi = g->mean + R * g->stddev;
    const double dx = (hi - lo) / opt.cells;
    const double norm = 1.0 / (g->stddev * std::sqrt(2.0 * 3.14159265358979323846));
    grid.reserve(opt.cells);
    for (int i = 0; i < opt.cells; ++i) {
      const double x = lo + (i + 0.5) * dx;
      const double z = (x - g->mean) / g->stddev;
      grid.emplace_back(x, norm * std::exp(-0.5 * z * z) * dx);
    }
    return grid;
  }
  // Pareto: midpoint in the quantile domain (equal-mass cells per side), so
  // the heavy tail is resolved exactly in mass.
  const auto& p = std::get<TwoSidedPareto>(m);
  const int half = std::max(1, opt.cells / 2);
  const double w = 0.5 / half;
  grid.reserve(2 * half);
  for (int i = half - 1; i >= 0; --i) {
    const double u = (i + 0.5) / half;  // upper-tail probability within a side
    const double mag = p.scale * p.low_cutoff * std::pow(u, -1.0 / p.alpha);
    grid.emplace_back(-mag, w);
  }
  for (int i = 0; i < half; ++i) {
    const double u = (i + 0.5) / half;
    const double mag = p.scale * p.low_cutoff * std::pow(u, -1.0 / p.alpha);
    grid.emplace_back(mag, w);
  }
  return grid;
}

double sample_mark(const MarkDistribution& m, RngStream& rng) {
  if (const auto* d = std::get_if<DiscreteAtoms>(&m)) {
    double u = rng.uniform();
    double acc = 0.0;
    for (const auto& [v, p] : d->atoms) {
      acc += p;
      if (u < acc) return v;
    }
    return d->atoms.back().first;
  }
  if (const auto* g = std::get_if<GaussianMark>(&m))
    return g->mean + g->stddev * rng.normal();
  const auto& p = std::get<TwoSidedPareto>(m);
  const double u = rng.uniform_pos();
  const double mag = p.scale * p.low_cutoff * std::pow(u, -1.0 / p.alpha);
  return rng.uniform() < 0.5 ? -mag : mag;
}

Kernel Kernel::from(const GroupSpec& spec,
                    std::vector<std::pair<GroupElement, double>> entries) {
  if (entries.empty()) throw EmptySpec("kernel has empty support");
  std::sort(entries.begin(), entries.end());
  for (std::size_t i = 0; i < entries.size(); ++i) {
    check_element(spec, entries[i].first);
    check_finite(entries[i].second, "kernel coefficient");
    if (entries[i].second == 0.0)
      throw InvalidSpec("kernel coefficients must be nonzero");
    if (i > 0 && entries[i].first == entries[i - 1].first)
      throw InvalidSpec("duplicate kernel support element");
  }
  Kernel k;
  k.support = std::move(entries);
  return k;
}

std::int64_t Kernel::width() const {
  std::int64_t w = 0;
  const std::size_t arity = support.front().first.coords.size();
  for (std::size_t i = 0; i < arity; ++i) {
    std::int64_t lo = support.front().first.coords[i], hi = lo;
    for (const auto& [e, c] : support) {
      lo = std::min(lo, e.coords[i]);
      hi = std::max(hi, e.coords[i]);
    }
    w = std::max(w, hi - lo);
  }
  return w;
}

double Kernel::coeff(const GroupElement& u) const {
  auto it = std::lower_bound(
      support.begin(), support.end(), u,
      [](const auto& entry, const GroupElement& key) { return entry.first < key; });
  if (it != support.end() && it->first == u) return it->second;
  return 0.0;
}

ValidatedLevy validate_levy(LevySpec spec, QuadratureOptions quad) {
  ValidatedLevy out;
  if (quad.cells < 2) throw InvalidSpec("quadrature needs >= 2 cells");
  out.quad_ = quad;
  out.component_mass_.reserve(spec.components.size());

  for (const auto& comp : spec.components) {
    if (const auto* k = std::get_if<DissipativeKernel>(&comp)) {
      if (k->kernel.support.empty()) throw EmptySpec("kernel has empty support");
      for (const auto& [e, c] : k->kernel.support) check_element(spec.group, e);
      validate_marks(k->marks);
      check_finite(k->rate, "rate");
      if (!(k->rate > 0.0)) throw InvalidSpec("rate must be > 0");
      out.component_mass_.push_back(
          spec.group.finite() ? k->rate * double(spec.group.order()) : kInf);
    } else {
      const auto& a = std::get<FixedPointAtoms>(comp);
      if (a.atoms.empty()) throw EmptySpec("fixed-point component has no atoms");
      double mass = 0.0;
      for (const auto& [c, w] : a.atoms) {
        check_finite(c, "atom value");
        check_finite(w, "atom mass");
        if (c == 0.0) throw ZeroAtomMass("fixed-point atom at 0 violates l({0}) = 0");
        if (!(w > 0.0)) throw InvalidSpec("atom mass must be > 0");
        mass += w;
      }
      out.component_mass_.push_back(mass);
    }
  }

  out.spec_ = std::move(spec);

  // Per-coordinate integrability at the identity (all coordinates agree by
  // translation invariance): closed-form sum over marginal atoms / grid.
  ValidatedLevy probe = out;  // marginal needs a validated handle
  const FinDimLevy marg =
      coordinate_marginal(probe, {identity(out.spec_.group)});
  double integ = 0.0;
  for (const auto& [v, mass] : marg.atoms)
    integ += mass * std::min(v[0] * v[0], 1.0);
  if (!std::isfinite(integ) || integ > 1e12)
    throw Nonintegrable("per-coordinate Lévy integral diverges");
  out.integrability_ = integ;
  return out;
}

double ValidatedLevy::total_mass() const {
  double m = 0.0;
  for (double c : component_mass_) m += c;
  return m;
}

double FinDimLevy::total_mass() const {
  double m = 0.0;
  for (const auto& [v, mass] : atoms) m += mass;
  return m;
}

std::vector<GroupElement> contributing_translates(
    const GroupSpec& spec, const Kernel& kernel,
    const std::vector<GroupElement>& coords) {
  std::set<GroupElement> out;
  for (const auto& g : coords)
    for (const auto& [h, c] : kernel.support)
      out.insert(group_op(spec, g, inverse(spec, h)));
  return {out.begin(), out.end()};
}

FinDimLevy coordinate_marginal(const ValidatedLevy& levy,
                               const std::vector<GroupElement>& coords) {
  if (coords.empty()) throw InvalidSpec("marginal needs >= 1 coordinate");
  for (std::size_t i = 0; i < coords.size(); ++i) {
    check_element(levy.group(), coords[i]);
    for (std::size_t j = i + 1; j < coords.size(); ++j)
      if (coords[i] == coords[j]) throw DuplicateCoords("repeated coordinate");
  }

  FinDimLevy out;
  out.coords = coords;
  out.kind = FinDimLevy::Kind::ExactAtoms;
  const std::size_t k = coords.size();

  for (const auto& comp : levy.spec().components) {
    if (const auto* a = std::get_if<FixedPointAtoms>(&comp)) {
      for (const auto& [c, w] : a->atoms)
        out.atoms.emplace_back(Eigen::VectorXd::Constant(k, c), w);
      continue;
    }
    const auto& dk = std::get<DissipativeKernel>(comp);
    if (!marks_are_discrete(dk.marks)) out.kind = FinDimLevy::Kind::QuadratureGrid;
    const auto grid = mark_quadrature(dk.marks, levy.quadrature());
    const auto translates =
        contributing_translates(levy.group(), dk.kernel, coords);
    for (const auto& t : translates) {
      Eigen::VectorXd base(k);
      const GroupElement tinv = inverse(levy.group(), t);
      for (std::size_t i = 0; i < k; ++i)
        base[i] = dk.kernel.coeff(group_op(levy.group(), tinv, coords[i]));
      for (const auto& [v, p] : grid) {
        if (v == 0.0 || p <= 0.0) continue;
        Eigen::VectorXd atom = v * base;
        if ((atom.array() == 0.0).all()) continue;
        out.atoms.emplace_back(std::move(atom), dk.rate * p);
      }
    }
  }
  return out;
}

NullityVerdict classify_nullity(const ValidatedLevy& levy) {
  NullityVerdict v;
  const auto& comps = levy.spec().components;
  for (std::size_t i = 0; i < comps.size(); ++i) {
    const double mass = levy.component_mass()[i];
    const bool fixed_points = std::holds_alternative<FixedPointAtoms>(comps[i]);
    if ((fixed_points || levy.group().finite()) && mass > 0.0 &&
        std::isfinite(mass)) {
      v.witness_components.push_back(i);
      v.witness_mass += mass;
    }
  }
  v.is_null = v.witness_components.empty();
  return v;
}

std::pair<ValidatedLevy, ValidatedLevy> split_by_invariant(
    const ValidatedLevy& levy, const NullityVerdict& verdict) {
  if (verdict.is_null || verdict.witness_components.empty())
    throw NoWitness("nullity verdict carries no invariant witness");
  LevySpec prime, rest;
  prime.group = rest.group = levy.group();
  std::set<std::size_t> witness(verdict.witness_components.begin(),
                                verdict.witness_components.end());
  for (std::size_t i = 0; i < levy.spec().components.size(); ++i) {
    (witness.count(i) ? prime : rest)
        .components.push_back(levy.spec().components[i]);
  }
  return {validate_levy(std::move(prime), levy.quadrature()),
          validate_levy(std::move(rest), levy.quadrature())};
}

}  // namespace idfield
