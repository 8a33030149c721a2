#include "idfield/poisson.hpp"

#include <algorithm>
#include <ostream>
#include <string>

#include "idfield/errors.hpp"

namespace idfield {

bool SampleRegion::contains(const GroupElement& g) const {
  if (whole_group) return true;
  if (g.coords.size() != box.size()) return false;
  for (std::size_t i = 0; i < box.size(); ++i)
    if (g.coords[i] < box[i].first || g.coords[i] > box[i].second) return false;
  return true;
}

bool SampleRegion::contains_all(const std::vector<GroupElement>& gs) const {
  return std::all_of(gs.begin(), gs.end(),
                     [&](const GroupElement& g) { return contains(g); });
}

SampleRegion SampleRegion::shifted(const GroupSpec& spec,
                                   const GroupElement& g) const {
  if (whole_group) return *this;
  check_element(spec, g);
  SampleRegion out = *this;
  for (std::size_t i = 0; i < box.size(); ++i) {
    out.box[i].first += g.coords[i];
    out.box[i].second += g.coords[i];
  }
  return out;
}

// window (-) support: the box of translates contributing to any in-window
// coordinate. Passing kernel == nullptr gives the bare window box.
SampleRegion kernel_extended_region(const GroupSpec& spec, const Kernel* kernel,
                                    const FolnerWindow& window) {
  SampleRegion region;
  if (spec.finite()) {
    region.whole_group = true;
    return region;
  }
  region.box.assign(spec.arity(), {-window.radius, window.radius});
  if (kernel)
    for (const auto& [h, c] : kernel->support)
      for (int i = 0; i < spec.arity(); ++i) {
        region.box[i].first =
            std::min(region.box[i].first, -window.radius - h.coords[i]);
        region.box[i].second =
            std::max(region.box[i].second, window.radius - h.coords[i]);
      }
  return region;
}

SampleRegion extended_region(const ValidatedLevy& levy,
                             const FolnerWindow& window) {
  const GroupSpec& spec = levy.group();
  SampleRegion region = kernel_extended_region(spec, nullptr, window);
  if (region.whole_group) return region;
  for (const auto& comp : levy.spec().components) {
    const auto* dk = std::get_if<DissipativeKernel>(&comp);
    if (!dk) continue;
    const SampleRegion r = kernel_extended_region(spec, &dk->kernel, window);
    for (int i = 0; i < spec.arity(); ++i) {
      region.box[i].first = std::min(region.box[i].first, r.box[i].first);
      region.box[i].second = std::max(region.box[i].second, r.box[i].second);
    }
  }
  return region;
}

std::vector<GroupElement> region_elements(const GroupSpec& spec,
                                          const SampleRegion& region) {
  if (region.whole_group) return folner_window(spec, 0).elements;
  std::vector<GroupElement> out;
  const int k = int(region.box.size());
  std::vector<std::int64_t> cur(k);
  for (int i = 0; i < k; ++i) cur[i] = region.box[i].first;
  for (;;) {
    out.push_back(GroupElement(cur));
    int i = k - 1;
    while (i >= 0 && cur[i] == region.box[i].second) {
      cur[i] = region.box[i].first;
      --i;
    }
    if (i < 0) break;
    ++cur[i];
  }
  return out;
}

namespace {

double region_size(const GroupSpec& spec, const SampleRegion& region) {
  if (region.whole_group) return double(spec.order());
  double n = 1.0;
  for (const auto& [lo, hi] : region.box) n *= double(hi - lo + 1);
  return n;
}

GroupElement uniform_location(const GroupSpec& spec, const SampleRegion& region,
                              RngStream& rng) {
  std::vector<std::int64_t> c(spec.arity());
  for (int i = 0; i < spec.arity(); ++i) {
    const std::int64_t lo = region.whole_group ? 0 : region.box[i].first;
    const std::int64_t hi =
        region.whole_group ? spec.moduli[i] - 1 : region.box[i].second;
    const std::uint64_t span = std::uint64_t(hi - lo + 1);
    c[i] = lo + std::int64_t(rng.next_u64() % span);
  }
  return GroupElement(std::move(c));
}

}  // namespace

PointConfiguration sample_point_config(const ValidatedLevy& levy,
                                       const FolnerWindow& window,
                                       RngStream& rng) {
  if (window.elements.empty()) throw InvalidSpec("window must be nonempty");
  PointConfiguration theta;
  theta.window = window;
  theta.region = extended_region(levy, window);

  // Per-kernel sampling regions differ only when supports differ; each
  // component uses its own exact dilation so in-window coordinates are
  // unbiased, while theta.region records the common faithful box.
  const auto& comps = levy.spec().components;
  double expected = 0.0;
  for (std::size_t ci = 0; ci < comps.size(); ++ci) {
    if (const auto* dk = std::get_if<DissipativeKernel>(&comps[ci])) {
      expected += dk->rate *
                  region_size(levy.group(),
                              kernel_extended_region(levy.group(), &dk->kernel, window));
    } else {
      for (const auto& [c, w] : std::get<FixedPointAtoms>(comps[ci]).atoms)
        expected += w;
    }
  }
  if (expected > 1e8)
    throw OverflowGuard("expected point count " + std::to_string(expected) +
                        " exceeds 1e8");

  for (std::size_t ci = 0; ci < comps.size(); ++ci) {
    if (const auto* dk = std::get_if<DissipativeKernel>(&comps[ci])) {
      const SampleRegion reg = kernel_extended_region(levy.group(), &dk->kernel, window);
      const std::int64_t n =
          rng.poisson(dk->rate * region_size(levy.group(), reg));
      for (std::int64_t i = 0; i < n; ++i) {
        LocatedPoint p;
        p.location = uniform_location(levy.group(), reg, rng);
        p.mark = sample_mark(dk->marks, rng);
        p.component = ci;
        theta.points.push_back(std::move(p));
      }
    } else {
      for (const auto& [c, w] : std::get<FixedPointAtoms>(comps[ci]).atoms) {
        GlobalAtom a;
        a.value = c;
        a.multiplicity = rng.poisson(w);
        a.component = ci;
        if (a.multiplicity > 0) theta.global_atoms.push_back(a);
      }
    }
  }
  return theta;
}

std::int64_t PointConfiguration::total_count() const {
  std::int64_t n = std::int64_t(points.size());
  for (const auto& a : global_atoms) n += a.multiplicity;
  return n;
}

std::int64_t count(const PointConfiguration& theta,
                   const std::function<bool(const PointView&)>& region) {
  std::int64_t n = 0;
  for (const auto& p : theta.points)
    if (region(PointView{&p.location, p.mark, p.component})) ++n;
  for (const auto& a : theta.global_atoms)
    if (region(PointView{nullptr, a.value, a.component})) n += a.multiplicity;
  return n;
}

PointConfiguration shift_config(const PointConfiguration& theta,
                                const GroupSpec& spec, const GroupElement& g) {
  check_element(spec, g);
  PointConfiguration out = theta;
  for (auto& p : out.points) p.location = group_op(spec, g, p.location);
  out.region = theta.region.shifted(spec, g);
  return out;
}

void write_config_csv(std::ostream& os, const GroupSpec& spec,
                      const PointConfiguration& theta) {
  os << "componentId";
  for (int i = 0; i < spec.arity(); ++i) os << ",location" << i;
  os << ",mark\n";
  for (const auto& p : theta.points) {
    os << p.component;
    for (std::int64_t c : p.location.coords) os << ',' << c;
    os << ',' << p.mark << '\n';
  }
  for (const auto& a : theta.global_atoms)
    for (std::int64_t i = 0; i < a.multiplicity; ++i) {
      os << a.component;
      for (int j = 0; j < spec.arity(); ++j) os << ",*";
      os << ',' << a.value << '\n';
    }
}

}  // namespace idfield
