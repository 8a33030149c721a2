#ifndef IDFIELD_INTEGRALS_HPP
#define IDFIELD_INTEGRALS_HPP

#include <Eigen/Dense>
#include <complex>
#include <vector>

#include "idfield/poisson.hpp"

namespace idfield {

// Cylinder function on R^G: depends on finitely many coordinates.
// Projection(g) is the canonical coordinate map Xi_g.
struct CylinderFunction {
  enum class Kind { Projection, LinearCombo, Indicator };
  Kind kind = Kind::Projection;
  std::vector<GroupElement> coords;
  Eigen::VectorXd weights;          // LinearCombo
  Eigen::VectorXd box_lo, box_hi;   // Indicator: closed box

  static CylinderFunction projection(GroupElement g);
  static CylinderFunction linear(std::vector<GroupElement> coords,
                                 Eigen::VectorXd weights);
  static CylinderFunction indicator(std::vector<GroupElement> coords,
                                    Eigen::VectorXd lo, Eigen::VectorXd hi);

  double operator()(const Eigen::VectorXd& values) const;
  bool is_linear() const { return kind != Kind::Indicator; }

  // f composed with R_g: same map read at coordinates g^{-1} c.
  CylinderFunction compose_shift(const GroupSpec& spec,
                                 const GroupElement& g) const;
};

// int f * 1_{eps <= |f| <= 1} dl on the finite-dimensional marginal
// (both boundaries inclusive). Exact for atom marginals, quadrature
// otherwise.
double compensator(const ValidatedLevy& levy, const CylinderFunction& f,
                   double eps);

// Finite-eps member of the defining limit of the compensated Poisson
// integral: sum over points p of f(x_p) * 1_{|f(x_p)| > eps} minus the
// compensator, where x_p is the configuration contributed by p (kernel
// translate scaled by the mark, or the constant c for a global atom).
// Indicator kind evaluates f on the summed configuration instead.
// Deterministic given theta; throws WindowUnderflow when the coordinates'
// contributor set is not covered by theta's faithful region.
double stochastic_integral(const PointConfiguration& theta,
                           const CylinderFunction& f, const ValidatedLevy& levy,
                           double eps);

// log E exp(i t I_l(f)) = int (e^{itf} - 1 - itf * 1_{|f|<=1}) dl, computed
// on the finite-dimensional marginal. Real part <= 0.
std::complex<double> analytic_log_charfn(const ValidatedLevy& levy,
                                         const CylinderFunction& f, double t);

// Reported truncation-bias bound int_{|f| <= eps} f^2 dl for the finite-eps
// evaluation (zero when every marginal atom clears eps).
double truncation_bias_bound(const ValidatedLevy& levy,
                             const CylinderFunction& f, double eps);

// Summed configuration restricted to coords: sum over points of their raw
// contributions (no thresholds, no compensation).
Eigen::VectorXd summed_configuration(const PointConfiguration& theta,
                                     const ValidatedLevy& levy,
                                     const std::vector<GroupElement>& coords);

// Coordinate-wise per-point thresholded sums: each point's contribution at a
// coordinate is kept only when its own magnitude exceeds eps, accumulated in
// point order. Entry i equals stochastic_integral with f = Xi_{coords[i]}
// plus that projection's compensator, bit for bit.
Eigen::VectorXd thresholded_field(const PointConfiguration& theta,
                                  const ValidatedLevy& levy,
                                  const std::vector<GroupElement>& coords,
                                  double eps);

}  // namespace idfield

#endif
