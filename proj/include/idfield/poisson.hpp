#ifndef IDFIELD_POISSON_HPP
#define IDFIELD_POISSON_HPP

#include <cstdint>
#include <functional>
#include <iosfwd>
#include <optional>
#include <vector>

#include "idfield/measures.hpp"
#include "idfield/rng.hpp"

namespace idfield {

// Box of locations on which a configuration is a faithful sample of the
// Poisson random measure. On a finite cyclic product the whole group is
// always covered.
struct SampleRegion {
  bool whole_group = false;
  std::vector<std::pair<std::int64_t, std::int64_t>> box;  // per-dim [lo, hi]

  bool contains(const GroupElement& g) const;
  bool contains_all(const std::vector<GroupElement>& gs) const;
  SampleRegion shifted(const GroupSpec& spec, const GroupElement& g) const;
};

struct LocatedPoint {
  GroupElement location;
  double mark = 0.0;
  std::size_t component = 0;
};

// Shift-fixed constant configurations are stored as global multiplicities
// rather than located points, which makes their invariance under
// shift_config exact.
struct GlobalAtom {
  double value = 0.0;
  std::int64_t multiplicity = 0;
  std::size_t component = 0;
};

struct PointConfiguration {
  FolnerWindow window;      // window the sample was generated for
  SampleRegion region;      // faithful location region (window + dilation)
  std::vector<LocatedPoint> points;
  std::vector<GlobalAtom> global_atoms;

  std::int64_t total_count() const;
};

// One realization of the Poisson random measure: per kernel component,
// K ~ Poisson(rate * |extended window|) locations uniform on the extended
// window with i.i.d. marks; per fixed-point atom, multiplicity ~ Poisson(w).
// Throws OverflowGuard if the expected point count exceeds 1e8.
PointConfiguration sample_point_config(const ValidatedLevy& levy,
                                       const FolnerWindow& window,
                                       RngStream& rng);

// View passed to counting predicates: located points carry their location,
// global atoms have location == nullptr.
struct PointView {
  const GroupElement* location;  // nullptr for a global (fixed-point) atom
  double mark;
  std::size_t component;
};

// Number of points satisfying the predicate; additive over disjoint
// predicates. Global atoms are counted with their multiplicity.
std::int64_t count(const PointConfiguration& theta,
                   const std::function<bool(const PointView&)>& region);

// The suspension shift: every location t becomes g*t, marks unchanged,
// global atoms unchanged; the faithful region shifts along. Exact (pure
// relabeling, never errors); reads outside the shifted region raise
// WindowUnderflow at evaluation time.
PointConfiguration shift_config(const PointConfiguration& theta,
                                const GroupSpec& spec, const GroupElement& g);

// Extended sampling region for a window: the window dilated by every kernel
// support in the spec, so each in-window coordinate sees all contributing
// points. Convention: translate t contributes to coordinate g iff
// t^{-1} g lies in the kernel support, so the region is window (-) support.
SampleRegion extended_region(const ValidatedLevy& levy,
                             const FolnerWindow& window);
// Dilation by a single kernel's support (kernel == nullptr: the bare window).
SampleRegion kernel_extended_region(const GroupSpec& spec, const Kernel* kernel,
                                    const FolnerWindow& window);
std::vector<GroupElement> region_elements(const GroupSpec& spec,
                                          const SampleRegion& region);

// Audit CSV: componentId, location..., mark (global atoms repeated per
// multiplicity with '*' locations).
void write_config_csv(std::ostream& os, const GroupSpec& spec,
                      const PointConfiguration& theta);

}  // namespace idfield

#endif
