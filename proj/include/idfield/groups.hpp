#ifndef IDFIELD_GROUPS_HPP
#define IDFIELD_GROUPS_HPP

#include <cstdint>
#include <vector>

namespace idfield {

// Countable index groups: the integer lattice Z^d and finite products of
// cyclic groups. Both are amenable, which is what makes the empirical
// ergodic averages downstream meaningful.
enum class GroupKind { IntegerLattice, FiniteCyclicProduct };

struct GroupSpec {
  GroupKind kind = GroupKind::IntegerLattice;
  int dim = 1;                          // lattice dimension (d >= 1)
  std::vector<std::int64_t> moduli;     // cyclic moduli (each >= 1)

  static GroupSpec lattice(int d);
  static GroupSpec cyclic(std::vector<std::int64_t> moduli);

  int arity() const {
    return kind == GroupKind::IntegerLattice ? dim : int(moduli.size());
  }
  bool finite() const { return kind == GroupKind::FiniteCyclicProduct; }
  // Number of elements of a finite group.
  std::int64_t order() const;

  bool operator==(const GroupSpec&) const = default;
};

// Coordinates of a group element: lattice coordinates, or residues reduced
// into [0, m_i). Comparison is lexicographic.
struct GroupElement {
  std::vector<std::int64_t> coords;

  GroupElement() = default;
  explicit GroupElement(std::vector<std::int64_t> c) : coords(std::move(c)) {}

  auto operator<=>(const GroupElement&) const = default;
};

struct FolnerWindow {
  std::int64_t radius = 0;
  std::vector<GroupElement> elements;  // lexicographic order
};

GroupElement identity(const GroupSpec& spec);
GroupElement group_op(const GroupSpec& spec, const GroupElement& a,
                      const GroupElement& b);
GroupElement inverse(const GroupSpec& spec, const GroupElement& a);

// [-N,N]^d on the lattice; the whole group on a finite cyclic product.
FolnerWindow folner_window(const GroupSpec& spec, std::int64_t radius);

// Throws InvalidElement unless a has the right arity (and reduced residues
// on cyclic groups).
void check_element(const GroupSpec& spec, const GroupElement& a);

// sup-norm of lattice coordinates (0 for finite groups, whose windows do
// not grow).
std::int64_t sup_norm(const GroupSpec& spec, const GroupElement& a);

// Position of g in the lexicographic enumeration of folner_window(spec,
// radius); throws WindowUnderflow outside.
std::int64_t window_position(const GroupSpec& spec, std::int64_t radius,
                             const GroupElement& g);

}  // namespace idfield

#endif
