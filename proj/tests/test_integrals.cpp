#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <complex>

#include "idfield/errors.hpp"
#include "idfield/integrals.hpp"
#include "zoo.hpp"

using namespace idfield;
using zoo::el;

namespace {

PointConfiguration hand_config(std::vector<LocatedPoint> points,
                               std::vector<GlobalAtom> atoms,
                               std::int64_t lo, std::int64_t hi) {
  PointConfiguration theta;
  theta.window = folner_window(zoo::z(), 0);
  theta.region.box = {{lo, hi}};
  theta.points = std::move(points);
  theta.global_atoms = std::move(atoms);
  return theta;
}

}  // namespace

TEST_CASE("compensator on atom marginals") {
  const ValidatedLevy e1 = validate_levy(zoo::e1_levy());
  const CylinderFunction xi0 = CylinderFunction::projection(el(0));
  // |2.0| > 1: the indicator band is empty for every eps.
  CHECK(compensator(e1, xi0, 0.01) == 0.0);
  CHECK(compensator(e1, xi0, 1.0) == 0.0);

  const ValidatedLevy e2 = validate_levy(zoo::e2_levy());
  // Marginal atoms 1.0 and 0.5 (mass 1 each), both inside [eps, 1].
  CHECK(compensator(e2, xi0, 0.1) == doctest::Approx(1.5).epsilon(1e-15));
  // eps = 0.6 drops the 0.5 atom.
  CHECK(compensator(e2, xi0, 0.6) == doctest::Approx(1.0).epsilon(1e-15));
}

TEST_CASE("compensator boundary convention is inclusive on both ends") {
  LevySpec s;
  s.group = zoo::z();
  s.components.push_back(DissipativeKernel{
      Kernel::from(zoo::z(), {{el(0), 1.0}}),
      DiscreteAtoms{{{1.0, 0.5}, {0.4, 0.5}}}, 1.0});
  const ValidatedLevy v = validate_levy(s);
  const CylinderFunction xi0 = CylinderFunction::projection(el(0));
  // At eps = 1.0 only the boundary atom |f| = 1 contributes, inclusively.
  CHECK(compensator(v, xi0, 1.0) == doctest::Approx(0.5).epsilon(1e-15));
  // At eps = 0.4 the lower boundary is inclusive too.
  CHECK(compensator(v, xi0, 0.4) ==
        doctest::Approx(0.5 * 1.0 + 0.5 * 0.4).epsilon(1e-15));
}

TEST_CASE("compensator eps domain") {
  const ValidatedLevy e2 = validate_levy(zoo::e2_levy());
  const CylinderFunction xi0 = CylinderFunction::projection(el(0));
  CHECK_THROWS_AS(compensator(e2, xi0, 0.0), InvalidSpec);
  CHECK_THROWS_AS(compensator(e2, xi0, 1.5), InvalidSpec);
}

TEST_CASE("stochastic integral on hand-built configurations") {
  const ValidatedLevy e1 = validate_levy(zoo::e1_levy());
  const CylinderFunction xi0 = CylinderFunction::projection(el(0));
  // Empty configuration: sum 0, compensator 0.
  CHECK(stochastic_integral(hand_config({}, {}, -1, 1), xi0, e1, 0.01) == 0.0);
  // One global atom c = 2: single-point sum, zero compensator.
  CHECK(stochastic_integral(hand_config({}, {GlobalAtom{2.0, 1, 0}}, -1, 1),
                            xi0, e1, 0.01) == 2.0);

  const ValidatedLevy e2 = validate_levy(zoo::e2_levy());
  // Points at t = 0 and t = -1 with unit marks: contributions 1.0 and 0.5,
  // minus the compensator 1.5.
  const PointConfiguration theta = hand_config(
      {LocatedPoint{el(0), 1.0, 0}, LocatedPoint{el(-1), 1.0, 0}}, {}, -1, 0);
  CHECK(stochastic_integral(theta, xi0, e2, 0.1) == 0.0);
  // eps = 0.6 drops the 0.5 contribution on both sides: 1.0 - 1.0 = 0.
  CHECK(stochastic_integral(theta, xi0, e2, 0.6) == 0.0);
}

TEST_CASE("analytic log characteristic functional") {
  LevySpec s;
  s.group = zoo::z();
  s.components.push_back(FixedPointAtoms{{{1.0, 1.0}}});
  const ValidatedLevy v = validate_levy(s);
  const CylinderFunction xi0 = CylinderFunction::projection(el(0));

  const double pi = 3.14159265358979323846;
  const std::complex<double> at_pi = analytic_log_charfn(v, xi0, pi);
  // One atom at value 1, mass 1: psi(t) = e^{it} - 1 - it; at pi: (-2, -pi).
  CHECK(at_pi.real() == doctest::Approx(-2.0).epsilon(1e-15));
  CHECK(at_pi.imag() == doctest::Approx(-pi).epsilon(1e-15));

  CHECK(analytic_log_charfn(v, xi0, 0.0) == std::complex<double>(0.0, 0.0));

  LevySpec zero;
  zero.group = zoo::z();
  const ValidatedLevy vz = validate_levy(zero);
  for (double t : {-3.0, 0.0, 2.5})
    CHECK(analytic_log_charfn(vz, xi0, t) == std::complex<double>(0.0, 0.0));

  // Real part nonpositive everywhere.
  const ValidatedLevy mix = validate_levy(zoo::e1e2_levy());
  for (double t = -5.0; t <= 5.0; t += 0.5)
    CHECK(analytic_log_charfn(mix, xi0, t).real() <= 1e-15);
}

TEST_CASE("log charfn is additive over mixture components") {
  const ValidatedLevy mix = validate_levy(zoo::e1e2_levy());
  const ValidatedLevy e1 = validate_levy(zoo::e1_levy());
  const ValidatedLevy e2 = validate_levy(zoo::e2_levy());
  const CylinderFunction xi0 = CylinderFunction::projection(el(0));
  for (double t = -5.0; t <= 5.0; t += 0.7) {
    const auto lhs = analytic_log_charfn(mix, xi0, t);
    const auto rhs = analytic_log_charfn(e1, xi0, t) +
                     analytic_log_charfn(e2, xi0, t);
    CHECK(std::abs(lhs - rhs) <= 1e-12);
  }
}

TEST_CASE("pathwise equivariance is exact") {
  const ValidatedLevy e2 = validate_levy(zoo::e2_levy());
  const FolnerWindow w = folner_window(zoo::z(), 8);
  for (std::int64_t r = 0; r < 100; ++r) {
    RngStream rng(50, r);
    const PointConfiguration theta = sample_point_config(e2, w, rng);
    for (std::int64_t shift = -5; shift <= 5; ++shift) {
      for (std::int64_t c : {0L, 2L, -2L}) {
        const CylinderFunction f = CylinderFunction::projection(el(c));
        const PointConfiguration moved = shift_config(theta, zoo::z(), el(shift));
        const double lhs = stochastic_integral(moved, f, e2, 0.1);
        const double rhs = stochastic_integral(
            theta, f.compose_shift(zoo::z(), el(shift)), e2, 0.1);
        CHECK(lhs == rhs);  // bit-level equality
      }
    }
  }
}

TEST_CASE("eps stability below the smallest atom") {
  const ValidatedLevy e2 = validate_levy(zoo::e2_levy());
  const CylinderFunction xi0 = CylinderFunction::projection(el(0));
  const FolnerWindow w = folner_window(zoo::z(), 2);
  for (std::int64_t r = 0; r < 50; ++r) {
    RngStream rng(51, r);
    const PointConfiguration theta = sample_point_config(e2, w, rng);
    const double a = stochastic_integral(theta, xi0, e2, 0.01);
    const double b = stochastic_integral(theta, xi0, e2, 0.1);
    const double c = stochastic_integral(theta, xi0, e2, 0.49);
    CHECK(a == b);
    CHECK(b == c);
  }
}

TEST_CASE("window underflow on uncovered coordinates") {
  const ValidatedLevy e2 = validate_levy(zoo::e2_levy());
  RngStream rng(52, 0);
  const PointConfiguration theta =
      sample_point_config(e2, folner_window(zoo::z(), 2), rng);
  CHECK_THROWS_AS(stochastic_integral(
                      theta, CylinderFunction::projection(el(10)), e2, 0.1),
                  WindowUnderflow);
}

TEST_CASE("indicator integrals use the summed configuration") {
  LevySpec s;
  s.group = zoo::z();
  s.components.push_back(DissipativeKernel{
      Kernel::from(zoo::z(), {{el(0), 1.0}}), zoo::unit_marks(), 1.0});
  const ValidatedLevy v = validate_levy(s);
  const CylinderFunction box = CylinderFunction::indicator(
      {el(0)}, Eigen::VectorXd::Constant(1, 0.9),
      Eigen::VectorXd::Constant(1, 1.1));
  // Marginal has one atom (1.0, mass 1) inside the box: compensator 1.
  const PointConfiguration two = hand_config(
      {LocatedPoint{el(0), 1.0, 0}, LocatedPoint{el(0), 1.0, 0}}, {}, 0, 0);
  // Summed value 2.0 leaves the box: 0 - 1.
  CHECK(stochastic_integral(two, box, v, 0.5) == -1.0);
  const PointConfiguration one =
      hand_config({LocatedPoint{el(0), 1.0, 0}}, {}, 0, 0);
  CHECK(stochastic_integral(one, box, v, 0.5) == 0.0);
}

TEST_CASE("truncation bias bound") {
  LevySpec s;
  s.group = zoo::z();
  s.components.push_back(DissipativeKernel{
      Kernel::from(zoo::z(), {{el(0), 1.0}}), TwoSidedPareto{1.5, 1.0, 0.05},
      1.0});
  const ValidatedLevy v = validate_levy(s);
  const CylinderFunction xi0 = CylinderFunction::projection(el(0));
  const double bias = truncation_bias_bound(v, xi0, 0.3);
  double oracle = 0.0;
  for (const auto& [node, w] :
       mark_quadrature(TwoSidedPareto{1.5, 1.0, 0.05}, v.quadrature()))
    if (std::abs(node) <= 0.3) oracle += w * node * node;
  CHECK(bias == doctest::Approx(oracle).epsilon(1e-12));
  CHECK(bias > 0.0);
  CHECK(truncation_bias_bound(validate_levy(zoo::e2_levy()), xi0, 0.3) == 0.0);
}

TEST_CASE("monte carlo charfn matches the analytic exponent") {
  const ValidatedLevy e2 = validate_levy(zoo::e2_levy());
  const CylinderFunction xi0 = CylinderFunction::projection(el(0));
  const FolnerWindow w = folner_window(zoo::z(), 0);
  const std::int64_t n = 40000;
  std::vector<double> xs(n);
  for (std::int64_t r = 0; r < n; ++r) {
    RngStream rng(53, r);
    const PointConfiguration theta = sample_point_config(e2, w, rng);
    xs[r] = stochastic_integral(theta, xi0, e2, 0.1);
  }
  for (double t : {-4.0, -1.0, 0.5, 3.0}) {
    std::complex<double> emp = 0.0;
    for (double x : xs) emp += std::complex<double>(std::cos(t * x), std::sin(t * x));
    emp /= double(n);
    const std::complex<double> analytic = std::exp(analytic_log_charfn(e2, xi0, t));
    CHECK(std::abs(emp - analytic) <= 7.0 / std::sqrt(double(n)));
  }
}
