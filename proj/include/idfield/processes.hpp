#ifndef IDFIELD_PROCESSES_HPP
#define IDFIELD_PROCESSES_HPP

#include <complex>
#include <memory>
#include <optional>

#include "idfield/integrals.hpp"

namespace idfield {

// Centered Gaussian stationary field as a finite moving average of i.i.d.
// standard normals: Z_g = sum_h k(h) W_{g h^{-1}}. Exactly stationary, with
// covariance rho(u) = sum_h k(h) k(hu) in closed form.
struct GaussianSpec {
  Kernel kernel;
};

double gaussian_covariance(const GroupSpec& spec, const GaussianSpec& gauss,
                           const GroupElement& lag);

struct IdpSpec {
  LevySpec levy;
  double drift = 0.0;
};

struct ValidatedIdp {
  ValidatedLevy levy;
  double drift = 0.0;
  NullityVerdict nullity;  // recorded at build time
};

struct LeafModel {
  std::optional<GaussianSpec> gaussian;
  std::optional<ValidatedIdp> idp;
};

// Process model: a combinator tree of leaves. Leaf coordinates are
// real-valued; Pair nodes concatenate independent fields into vector-valued
// coordinates, Sum nodes add independent fields of equal dimension.
class ProcessModel {
public:
  enum class Type { Leaf, Sum, Pair };

  static ProcessModel leaf(GroupSpec group, std::optional<GaussianSpec> gaussian,
                           std::optional<IdpSpec> idp,
                           QuadratureOptions quad = {});

  Type type() const { return type_; }
  const GroupSpec& group() const { return group_; }
  int dim() const { return dim_; }
  const LeafModel& leaf_model() const { return *leaf_; }
  const ProcessModel& left() const { return *left_; }
  const ProcessModel& right() const { return *right_; }

  // All leaves in preorder (the stream-assignment order of simulate_trace).
  std::vector<const LeafModel*> leaves() const;

  friend ProcessModel combine_sum(const ProcessModel& a, const ProcessModel& b);
  friend ProcessModel combine_pair(const ProcessModel& a, const ProcessModel& b);

private:
  ProcessModel() = default;
  GroupSpec group_;
  Type type_ = Type::Leaf;
  int dim_ = 1;
  std::shared_ptr<const LeafModel> leaf_;
  std::shared_ptr<const ProcessModel> left_, right_;
};

// Independent sum X (+) Y and independent pairing X (x) Y.
ProcessModel combine_sum(const ProcessModel& a, const ProcessModel& b);
ProcessModel combine_pair(const ProcessModel& a, const ProcessModel& b);

// A simulated sample path restricted to a window.
struct Trace {
  FolnerWindow window;
  Eigen::MatrixXd values;  // |window| rows, model.dim() columns
  std::uint64_t seed = 0, stream = 0;

  // Row index of a window element; throws WindowUnderflow outside.
  Eigen::Index index_of(const GroupSpec& spec, const GroupElement& g) const;
  Eigen::RowVectorXd at(const GroupSpec& spec, const GroupElement& g) const {
    return values.row(index_of(spec, g));
  }
};

// One shared point configuration (and one shared Gaussian noise field) per
// leaf: every X_g is read off the same configuration through shifted
// integrands, so pathwise equivariance is exact.
Trace simulate_trace(const ProcessModel& model, const FolnerWindow& window,
                     const RngStream& rng, double eps);

// Exact finite-dimensional log-characteristic function at coordinates
// (g_1,...,g_k): tvec is laid out coordinate-major, dim entries per
// coordinate. The modulus of its exponential is positive everywhere.
std::complex<double> marginal_log_charfn(const ProcessModel& model,
                                         const std::vector<GroupElement>& coords,
                                         const Eigen::VectorXd& tvec);
std::complex<double> marginal_charfn(const ProcessModel& model,
                                     const std::vector<GroupElement>& coords,
                                     const Eigen::VectorXd& tvec);

struct MonteCarloEstimate {
  double value = 0.0;
  double std_error = 0.0;
  std::int64_t samples = 0;
};

// Monte Carlo estimate of the canonical pseudo-metric
// d(g,h) = E[|X_g - X_h| ^ 1] (Euclidean norm for vector coordinates),
// evaluated on shared traces so d(g,g) = 0 exactly.
MonteCarloEstimate canonical_metric(const ProcessModel& model,
                                    const GroupElement& g, const GroupElement& h,
                                    std::int64_t samples, const RngStream& rng,
                                    double eps);

}  // namespace idfield

#endif
