#ifndef IDFIELD_ERGODICITY_HPP
#define IDFIELD_ERGODICITY_HPP

#include <functional>
#include <string>

#include "idfield/processes.hpp"

namespace idfield {

// Bounded test function of finitely many coordinates. The value matrix has
// one row per coordinate and model.dim() columns (pair models expose their
// vector-valued coordinates directly).
struct Observable {
  std::vector<GroupElement> coords;
  std::function<double(const Eigen::MatrixXd&)> map;
  double bound = 1.0;
  std::string description;

  // Evaluation at translated positions: obs applied to (x_{g^{-1}c})_c.
  double eval_shifted(const GroupSpec& spec, const Trace& trace,
                      const GroupElement& g) const;
  double eval(const GroupSpec& spec, const Trace& trace) const;
};

// Indicator of a per-coordinate box (dim-1 models).
Observable obs_indicator_box(std::vector<GroupElement> coords,
                             Eigen::VectorXd lo, Eigen::VectorXd hi);
// Coordinate value clamped to [-clip, clip].
Observable obs_clipped_coordinate(GroupElement coord, double clip);
// cos(a * x_coord), bounded by 1.
Observable obs_cosine(GroupElement coord, double a);
// Product observable on a pair model: a reads the left block of columns,
// b the right block.
Observable obs_product(const Observable& a, const Observable& b, int left_dim,
                       int right_dim);

enum class Verdict { ConsistentWithErgodic, InconsistentWithErgodic, Inconclusive };
const char* verdict_name(Verdict v);

struct VerdictBands {
  double consistent_se = 4.0;    // |gap| <= consistent_se * SE at largest radius
  double inconsistent_se = 6.0;  // |gap| >= inconsistent_se * SE at the two
                                 // largest radii
};

struct ErgodicOptions {
  std::vector<std::int64_t> radii;
  std::int64_t replicas = 200;
  double eps = 1e-3;
  VerdictBands bands;
};

struct RadiusStats {
  std::int64_t radius = 0;
  double average = 0.0;    // A_N
  double gap = 0.0;        // A_N - Ef * Eh
  double std_error = 0.0;  // of the gap
};

struct ErgodicityReport {
  std::vector<RadiusStats> per_radius;
  double mean_f = 0.0, mean_h = 0.0;
  Verdict verdict = Verdict::Inconclusive;
  std::int64_t replicas = 0;
  std::uint64_t seed = 0, stream = 0;
};

// Cesàro statistic A_N = (1/|F_N|) sum_{g in F_N} E[f o R_g * h] against
// E[f] E[h], across radii, n independent traces.
ErgodicityReport ergodic_average(const ProcessModel& model, const Observable& f,
                                 const Observable& h, const ErgodicOptions& opts,
                                 const RngStream& rng);

// ergodic_average on X (x) X with the product observables f(x)f(f-copy) /
// h(x)h(h-copy).
ErgodicityReport weak_mixing_report(const ProcessModel& model,
                                    const Observable& f, const Observable& h,
                                    const ErgodicOptions& opts,
                                    const RngStream& rng);

// Worst verdict over several observable-pair reports (Inconsistent beats
// Inconclusive beats Consistent).
Verdict combine_verdicts(const std::vector<Verdict>& vs);

// Monte Carlo estimate of P(R_g^{-1}(E) symdiff E) for an indicator
// cylinder event E; exactly 0 at the identity.
MonteCarloEstimate symm_diff_functional(const ProcessModel& model,
                                        const CylinderFunction& event,
                                        const GroupElement& g,
                                        std::int64_t samples,
                                        const RngStream& rng, double eps);

// tau(g) = log E e^{i(X_g - X_e)} - log E e^{iX_g} - log E e^{-iX_e},
// evaluated analytically. Atom-aligned summation makes tau(g) exactly zero
// beyond the kernel width of a dissipative model.
std::complex<double> codifference(const ProcessModel& model,
                                  const GroupElement& g);

struct CodifferenceMc {
  std::complex<double> value;
  double std_error = 0.0;  // pooled over real/imag batch means
};
CodifferenceMc codifference_mc(const ProcessModel& model, const GroupElement& g,
                               std::int64_t samples, int batches,
                               const RngStream& rng, double eps);

// ---------------------------------------------------------------------------
// Invariant-event probe (the quantitative heart of non-ergodicity)
// ---------------------------------------------------------------------------

struct ProbeOptions {
  std::vector<std::int64_t> radii;
  std::int64_t replicas = 2000;
  double eps = 1e-3;
  double tol = 0.01;    // lower slack around e^{-lambda}
  double delta = 0.01;  // distance from 1
  double constancy_tol = 1e-9;
};

struct ProbeRadiusStats {
  std::int64_t radius = 0;
  double p_witness_constant = 0.0;  // P(X' trace == b - c_eps on F_N)
  double se_witness = 0.0;
  double p_full_constant = 0.0;     // P(full trace constant on F_N), reported
  double se_full = 0.0;
};

struct InvariantProbeReport {
  double lambda = 0.0;             // witness mass
  double reference_constant = 0.0; // b - c_eps
  double floor = 0.0;              // e^{-lambda}
  std::vector<ProbeRadiusStats> per_radius;
  double limit_estimate = 0.0;     // witness-constancy at the largest radius
  bool within_band = false;        // [e^{-lambda} - tol, 1 - delta]
  std::int64_t replicas = 0;
};

// Splits the model's Lévy measure along the non-nullity witness, simulates
// the witnessed-part process X' = I_{l'} + b and estimates the probability
// that its trace is identically b - c_eps; the full-model constancy
// probability is reported alongside. Throws NullModel without a witness.
InvariantProbeReport invariant_event_probe(const ProcessModel& model,
                                           const ProbeOptions& opts,
                                           const RngStream& rng);

// ---------------------------------------------------------------------------
// Mixture decomposition (convex-combination identity)
// ---------------------------------------------------------------------------

struct DecomposeOptions {
  std::vector<double> tgrid;
  std::int64_t replicas = 100000;
  double eps = 1e-3;
};

struct DecomposeRow {
  double t = 0.0;
  std::complex<double> mix_analytic;  // phi_{A (+) B}
  std::complex<double> phi1_mc, phi2_mc;      // conditional branches
  std::complex<double> phi1_exact, phi2_exact;
  double residual = 0.0;  // |mix - (p phi1_mc + (1-p) phi2_mc)|
};

struct DecomposeReport {
  double p_event = 0.0;  // P(E) = e^{-lambda}
  std::vector<DecomposeRow> rows;
  double max_residual = 0.0;
  double witness_t = 0.0;       // argmax |phi1 - phi2| / SE
  double witness_gap = 0.0;
  double witness_se = 0.0;
  std::int64_t n_event = 0, n_complement = 0;
};

// Checks phi_{A(+)B} = P(E) phi_{(A|E)(+)B} + (1-P(E)) phi_{(A|E^c)(+)B} on
// the grid, conditioning on A's empty-witness event (branch bookkeeping for
// Monte Carlo, exact complex arithmetic for the analytic branches), and
// exhibits a witness t where the branch laws separate. A must be a single
// leaf with a non-null IDP part; throws NoInvariantEvent otherwise.
DecomposeReport mixture_decomposition_check(const ProcessModel& model_a,
                                            const ProcessModel& model_b,
                                            const DecomposeOptions& opts,
                                            const RngStream& rng);

// Merged IDP data of a Sum tree of dim-1 leaves: all Lévy components in one
// spec, drifts added. Gaussian parts are ignored by the merge (callers that
// need them keep the full model).
std::pair<LevySpec, double> merged_idp(const ProcessModel& model);

}  // namespace idfield

#endif
