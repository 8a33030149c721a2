#include "idfield/integrals.hpp"

#include <algorithm>
#include <cmath>
#include <map>

#include "idfield/errors.hpp"

namespace idfield {

CylinderFunction CylinderFunction::projection(GroupElement g) {
  CylinderFunction f;
  f.kind = Kind::Projection;
  f.coords = {std::move(g)};
  return f;
}

CylinderFunction CylinderFunction::linear(std::vector<GroupElement> coords,
                                          Eigen::VectorXd weights) {
  if (coords.size() != std::size_t(weights.size()))
    throw DimensionMismatch("one weight per coordinate required");
  if (coords.empty()) throw InvalidSpec("cylinder function needs coordinates");
  CylinderFunction f;
  f.kind = Kind::LinearCombo;
  f.coords = std::move(coords);
  f.weights = std::move(weights);
  return f;
}

CylinderFunction CylinderFunction::indicator(std::vector<GroupElement> coords,
                                             Eigen::VectorXd lo,
                                             Eigen::VectorXd hi) {
  if (coords.size() != std::size_t(lo.size()) || lo.size() != hi.size())
    throw DimensionMismatch("indicator box must match coordinates");
  if (coords.empty()) throw InvalidSpec("cylinder function needs coordinates");
  CylinderFunction f;
  f.kind = Kind::Indicator;
  f.coords = std::move(coords);
  f.box_lo = std::move(lo);
  f.box_hi = std::move(hi);
  return f;
}

double CylinderFunction::operator()(const Eigen::VectorXd& values) const {
  if (values.size() != Eigen::Index(coords.size()))
    throw DimensionMismatch("value vector does not match coordinates");
  switch (kind) {
    case Kind::Projection:
      return values[0];
    case Kind::LinearCombo:
      return weights.dot(values);
    case Kind::Indicator:
      return ((values.array() >= box_lo.array()) &&
              (values.array() <= box_hi.array()))
                     .all()
                 ? 1.0
                 : 0.0;
  }
  return 0.0;
}

CylinderFunction CylinderFunction::compose_shift(const GroupSpec& spec,
                                                 const GroupElement& g) const {
  CylinderFunction out = *this;
  const GroupElement ginv = inverse(spec, g);
  for (auto& c : out.coords) c = group_op(spec, ginv, c);
  return out;
}

namespace {

void check_covered(const PointConfiguration& theta, const ValidatedLevy& levy,
                   const std::vector<GroupElement>& coords) {
  for (const auto& comp : levy.spec().components) {
    const auto* dk = std::get_if<DissipativeKernel>(&comp);
    if (!dk) continue;
    if (!theta.region.contains_all(
            contributing_translates(levy.group(), dk->kernel, coords)))
      throw WindowUnderflow(
          "coordinates require contributors outside the sampled region");
  }
}

}  // namespace

double compensator(const ValidatedLevy& levy, const CylinderFunction& f,
                   double eps) {
  if (!(eps > 0.0 && eps <= 1.0))
    throw InvalidSpec("eps must lie in (0,1]");
  const FinDimLevy marg = coordinate_marginal(levy, f.coords);
  double out = 0.0;
  for (const auto& [v, mass] : marg.atoms) {
    const double fv = f(v);
    const double a = std::abs(fv);
    if (a >= eps && a <= 1.0) out += mass * fv;
  }
  return out;
}

Eigen::VectorXd summed_configuration(const PointConfiguration& theta,
                                     const ValidatedLevy& levy,
                                     const std::vector<GroupElement>& coords) {
  check_covered(theta, levy, coords);
  std::map<GroupElement, Eigen::Index> index;
  for (std::size_t i = 0; i < coords.size(); ++i)
    index.emplace(coords[i], Eigen::Index(i));
  Eigen::VectorXd values = Eigen::VectorXd::Zero(coords.size());
  const auto& comps = levy.spec().components;
  for (const auto& p : theta.points) {
    const auto& dk = std::get<DissipativeKernel>(comps[p.component]);
    for (const auto& [h, c] : dk.kernel.support) {
      const auto it = index.find(group_op(levy.group(), p.location, h));
      if (it != index.end()) values[it->second] += p.mark * c;
    }
  }
  for (const auto& a : theta.global_atoms)
    for (std::int64_t i = 0; i < a.multiplicity; ++i)
      values.array() += a.value;
  return values;
}

Eigen::VectorXd thresholded_field(const PointConfiguration& theta,
                                  const ValidatedLevy& levy,
                                  const std::vector<GroupElement>& coords,
                                  double eps) {
  check_covered(theta, levy, coords);
  std::map<GroupElement, Eigen::Index> index;
  for (std::size_t i = 0; i < coords.size(); ++i)
    index.emplace(coords[i], Eigen::Index(i));
  Eigen::VectorXd values = Eigen::VectorXd::Zero(coords.size());
  const auto& comps = levy.spec().components;
  for (const auto& p : theta.points) {
    const auto& dk = std::get<DissipativeKernel>(comps[p.component]);
    for (const auto& [h, c] : dk.kernel.support) {
      const double contribution = p.mark * c;
      if (std::abs(contribution) <= eps) continue;
      const auto it = index.find(group_op(levy.group(), p.location, h));
      if (it != index.end()) values[it->second] += contribution;
    }
  }
  for (const auto& a : theta.global_atoms) {
    if (std::abs(a.value) <= eps) continue;
    for (std::int64_t i = 0; i < a.multiplicity; ++i)
      values.array() += a.value;
  }
  return values;
}

double stochastic_integral(const PointConfiguration& theta,
                           const CylinderFunction& f, const ValidatedLevy& levy,
                           double eps) {
  if (f.kind == CylinderFunction::Kind::Indicator)
    return f(summed_configuration(theta, levy, f.coords)) -
           compensator(levy, f, eps);

  check_covered(theta, levy, f.coords);
  const std::size_t k = f.coords.size();
  const auto& comps = levy.spec().components;
  double sum = 0.0;
  Eigen::VectorXd x(k);
  for (const auto& p : theta.points) {
    const auto& dk = std::get<DissipativeKernel>(comps[p.component]);
    const GroupElement tinv = inverse(levy.group(), p.location);
    for (std::size_t i = 0; i < k; ++i)
      x[i] = p.mark * dk.kernel.coeff(group_op(levy.group(), tinv, f.coords[i]));
    const double fv = f(x);
    if (std::abs(fv) > eps) sum += fv;
  }
  for (const auto& a : theta.global_atoms) {
    x.setConstant(a.value);
    const double fv = f(x);
    if (std::abs(fv) > eps)
      for (std::int64_t i = 0; i < a.multiplicity; ++i) sum += fv;
  }
  return sum - compensator(levy, f, eps);
}

std::complex<double> analytic_log_charfn(const ValidatedLevy& levy,
                                         const CylinderFunction& f, double t) {
  const FinDimLevy marg = coordinate_marginal(levy, f.coords);
  std::complex<double> out = 0.0;
  for (const auto& [v, mass] : marg.atoms) {
    const double fv = f(v);
    std::complex<double> term =
        std::complex<double>(std::cos(t * fv) - 1.0, std::sin(t * fv));
    if (std::abs(fv) <= 1.0) term -= std::complex<double>(0.0, t * fv);
    out += mass * term;
  }
  return out;
}

double truncation_bias_bound(const ValidatedLevy& levy,
                             const CylinderFunction& f, double eps) {
  const FinDimLevy marg = coordinate_marginal(levy, f.coords);
  double out = 0.0;
  for (const auto& [v, mass] : marg.atoms) {
    const double fv = f(v);
    if (std::abs(fv) <= eps) out += mass * fv * fv;
  }
  return out;
}

}  // namespace idfield
