#pragma once

#include <Eigen/Dense>
#include <string>
#include <vector>

#include "tomokit/core.hpp"
#include "tomokit/scaling.hpp"
#include "tomokit/tomography.hpp"
#include "tomokit/uncertainty.hpp"
#include "tomokit/weyl.hpp"

namespace tomokit {

enum class Quadrant { both, classical_only, quantum_only, neither };

inline const char* quadrant_name(Quadrant q) {
  switch (q) {
    case Quadrant::both: return "both";
    case Quadrant::classical_only: return "classical-only";
    case Quadrant::quantum_only: return "quantum-only";
    default: return "neither";
  }
}

struct AdmissibilityReport {
  bool classical_admissible;  // nonnegative normalized phase-space density
  bool quantum_admissible;    // quantized operator positive semidefinite
  UncertaintyVerdict uncertainty_verdict;
  double min_symbol_value;    // min of the density in natural (hbar=1) units
  double min_eigenvalue;
  double operator_trace;
  double truncation_l1;
  bool truncation_warning;
  Quadrant quadrant;
  double hbar;
};

struct ClassifyOptions {
  int dim = 64;
  int grid_n = 257;             // sampling of analytic Gaussian inputs
  double k_sigma = 8.0;         // window half-extent in standard deviations
  double norm_tol = 1e-3;
  double negativity_floor = 1e-9;
  double eig_tol = 1e-9;
  double truncation_threshold = 1e-2;
};

/// Exact change to natural units q -> q / sqrt(hbar), p -> p / sqrt(hbar):
/// the window is stretched and the density rescaled with no interpolation.
/// Dispersions map as sigma -> sigma / hbar, so the hbar = 1 machinery
/// applies unchanged.
inline PhaseGrid natural_units_density(const PhaseGrid& g, double hbar) {
  if (hbar <= 0.0) throw error("natural_units_density: hbar must be positive");
  double s = std::sqrt(hbar);
  GridSpec spec = g.spec();
  spec.q_min /= s;
  spec.q_max /= s;
  spec.p_min /= s;
  spec.p_max /= s;
  return PhaseGrid(spec, hbar * g.density_values(), GridKind::density);
}

namespace detail {

inline AdmissibilityReport classify_natural(const PhaseGrid& f_nat, const Moments& physical,
                                            double hbar, const ClassifyOptions& opt) {
  AdmissibilityReport rep{};
  rep.hbar = hbar;
  rep.min_symbol_value = f_nat.values().minCoeff();

  double mass = f_nat.mass();
  double floor = -opt.negativity_floor * std::max(1.0, f_nat.values().maxCoeff());
  rep.classical_admissible =
      rep.min_symbol_value >= floor && std::abs(mass - 1.0) <= opt.norm_tol;

  PhaseGrid w_nat(f_nat.spec(), two_pi * f_nat.values(), GridKind::wigner);
  OperatorMatrix op = symbol_to_matrix(w_nat, opt.dim);
  Spectrum spec = spectral_decompose(op);
  rep.min_eigenvalue = spec.eigenvalues.minCoeff();
  rep.operator_trace = op.trace.real();
  double scale = std::max(1.0, spec.eigenvalues.cwiseAbs().maxCoeff());
  rep.quantum_admissible = rep.min_eigenvalue >= -opt.eig_tol * scale;

  rep.truncation_l1 = truncation_leakage(w_nat, op);
  rep.truncation_warning = rep.truncation_l1 > opt.truncation_threshold;

  rep.uncertainty_verdict = check(physical, hbar);

  if (rep.classical_admissible && rep.quantum_admissible)
    rep.quadrant = Quadrant::both;
  else if (rep.classical_admissible)
    rep.quadrant = Quadrant::classical_only;
  else if (rep.quantum_admissible)
    rep.quadrant = Quadrant::quantum_only;
  else
    rep.quadrant = Quadrant::neither;
  return rep;
}

}  // namespace detail

/// Joint classical/quantum admissibility classification of a sampled state.
/// The classical test checks the phase-space density contract; the quantum
/// test quantizes the symbol (in natural units) and inspects the operator
/// spectrum. The uncertainty verdict on the moments is reported as the
/// necessary condition it is.
inline AdmissibilityReport classify_state(const PhaseGrid& g, double hbar,
                                          ClassifyOptions opt = {}) {
  Moments physical = moments_of_grid(g, opt.norm_tol);
  PhaseGrid f_nat = natural_units_density(g, hbar);
  return detail::classify_natural(f_nat, physical, hbar, opt);
}

/// Window for quantizing a Gaussian state. Besides holding k standard
/// deviations of the state, the position axis must cover the offset spread of
/// the state's position kernel, which is reciprocal to the momentum width
/// (and vice versa); squeezed states need wide windows.
inline GridSpec quantization_window(const GaussianState& state, int n, double k = 8.0) {
  double l = std::max(std::abs(state.mean[0]) + k * std::sqrt(state.sigma(0, 0)),
                      std::abs(state.mean[1]) + k * std::sqrt(state.sigma(1, 1)));
  l = std::max(l, 0.5 * k / std::sqrt(state.sigma(0, 0)));
  l = std::max(l, 0.5 * k / std::sqrt(state.sigma(1, 1)));
  return GridSpec::symmetric(l, l, n, n);
}

inline AdmissibilityReport classify_state(const GaussianState& state, double hbar,
                                          ClassifyOptions opt = {}) {
  if (hbar <= 0.0) throw error("classify_state: hbar must be positive");
  GaussianState natural(state.n_modes, state.mean / std::sqrt(hbar), state.sigma / hbar);
  PhaseGrid f_nat = make_gaussian_grid(
      natural, quantization_window(natural, opt.grid_n, opt.k_sigma), GridKind::density);
  return detail::classify_natural(f_nat, state.moments(), hbar, opt);
}

/// Factorized quantum (x) classical state at the tomogram level. The quantum
/// slot must satisfy the uncertainty relation; the classical slot only has to
/// be a valid probability density.
class HybridState {
 public:
  HybridState(Tomogram quantum, Tomogram classical, double hbar)
      : quantum_(std::move(quantum)), classical_(std::move(classical)), hbar_(hbar) {}

  const Tomogram& quantum_part() const { return quantum_; }
  const Tomogram& classical_part() const { return classical_; }
  double hbar() const { return hbar_; }

  double combined(const Frame& f1, double x1, const Frame& f2, double x2) const {
    return tomogram_value(quantum_, f1, x1) * tomogram_value(classical_, f2, x2);
  }

  /// Integral of the combined tomogram over the classical variable at fixed
  /// quantum coordinate; equals omega_q(x1) times the classical slice mass.
  double marginal_over_classical(const Frame& f1, double x1, const Frame& f2,
                                 int quad_points = 4001) const {
    return tomogram_value(quantum_, f1, x1) * slice_mass(classical_, f2, quad_points);
  }

  /// Product of the two slice masses; 1 for a normalized hybrid.
  double normalization(const Frame& f1, const Frame& f2, int quad_points = 4001) const {
    return slice_mass(quantum_, f1, quad_points) * slice_mass(classical_, f2, quad_points);
  }

  static double slice_mass(const Tomogram& t, const Frame& f, int n = 4001) {
    if (t.is_analytic()) {
      const auto& g = t.analytic();
      double s = std::sqrt(g.var_x(f)), m = g.mean_x(f);
      double lo = m - 14 * s, h = 28 * s / (n - 1);
      double acc = 0.0;
      for (int k = 0; k < n; ++k)
        acc += detail::trapezoid_weight(k, n, h) * g.value(f, lo + k * h);
      return acc;
    }
    auto idx = t.find_frame(f);
    if (!idx) throw frame_error("hybrid: tomogram does not contain the requested frame");
    return t.sampled().slice_integral(*idx);
  }

  static double tomogram_value(const Tomogram& t, const Frame& f, double x) {
    if (t.is_analytic()) return t.analytic().value(f, x);
    auto idx = t.find_frame(f);
    if (!idx) throw frame_error("hybrid: tomogram does not contain the requested frame");
    return t.sampled().value(*idx, x);
  }

 private:
  Tomogram quantum_;
  Tomogram classical_;
  double hbar_;
};

/// Builds the factorized hybrid after gating both slots: the quantum
/// tomogram's moments must pass the uncertainty check, the classical tomogram
/// must be a normalized nonnegative density.
inline HybridState hybrid_factorized(const Tomogram& q_tomo, const Tomogram& cl_tomo,
                                     double hbar = 1.0) {
  Moments mq = tomogram_moments(q_tomo);
  UncertaintyVerdict uv = check(mq, hbar);
  if (!uv.passes)
    throw admissibility_error(
        "hybrid_factorized: quantum slot violates the uncertainty relation (margin " +
        std::to_string(uv.sr_margin) + ")");

  TomogramCheck cc = check_tomogram(cl_tomo);
  double cl_tol = cl_tomo.is_analytic() ? 1e-6 : 1e-3;
  if (cc.max_normalization_residual > cl_tol)
    throw normalization_error("hybrid_factorized: classical slot not normalized",
                              1.0 + cc.max_normalization_residual);
  if (!cc.negative_values.empty())
    throw admissibility_error("hybrid_factorized: classical slot has negative values");

  TomogramCheck qc = check_tomogram(q_tomo);
  double q_tol = q_tomo.is_analytic() ? 1e-6 : 1e-3;
  if (qc.max_normalization_residual > q_tol)
    throw normalization_error("hybrid_factorized: quantum slot not normalized",
                              1.0 + qc.max_normalization_residual);

  return HybridState(q_tomo, cl_tomo, hbar);
}

/// Density operator of the factorized pair (Kronecker product).
inline OperatorMatrix hybrid_density_operator(const OperatorMatrix& rho_q,
                                              const OperatorMatrix& rho_cl) {
  int dq = rho_q.dim, dc = rho_cl.dim;
  Eigen::MatrixXcd out(dq * dc, dq * dc);
  for (int i = 0; i < dq; ++i)
    for (int j = 0; j < dq; ++j)
      out.block(i * dc, j * dc, dc, dc) = rho_q.entries(i, j) * rho_cl.entries;
  return OperatorMatrix::from(std::move(out));
}

struct NonlimitRow {
  double hbar;
  AdmissibilityReport classical_witness;  // isotropic Gaussian, d = hbar^2/8
  AdmissibilityReport quantum_witness;    // first excited oscillator state
  bool classical_only_verified;
  bool quantum_only_verified;
};

struct NonlimitReport {
  std::vector<NonlimitRow> rows;
  bool sets_never_coincide;  // both witness families nonempty at every hbar
};

/// For each Planck parameter, exhibits a state admissible only classically
/// (a squeezed-determinant Gaussian) and one admissible only quantum
/// mechanically (the first excited oscillator state), both verified by the
/// classifier. Nonempty witness sets at every hbar mean the two state sets
/// never coincide, however small hbar becomes.
inline NonlimitReport nonlimit_demonstration(const std::vector<double>& hbars,
                                             ClassifyOptions opt = {}) {
  if (hbars.empty()) throw error("nonlimit_demonstration: empty hbar list");
  for (size_t i = 0; i < hbars.size(); ++i) {
    if (hbars[i] <= 0.0) throw error("nonlimit_demonstration: hbar must be positive");
    if (i > 0 && hbars[i] >= hbars[i - 1])
      throw error("nonlimit_demonstration: hbar list must be strictly descending");
  }
  NonlimitReport rep;
  rep.sets_never_coincide = true;
  for (double h : hbars) {
    double s = h / (2.0 * std::sqrt(2.0));  // mode determinant h^2/8 < h^2/4
    GaussianState squeezed = GaussianState::single_mode(s, s, 0.0);
    AdmissibilityReport cw = classify_state(squeezed, h, opt);

    double half = 8.0 * std::sqrt(h);
    PhaseGrid fock1 = fock_wigner_grid(1, GridSpec::symmetric(half, half, opt.grid_n, opt.grid_n), h);
    AdmissibilityReport qw = classify_state(fock1, h, opt);

    NonlimitRow row{h, cw, qw, cw.quadrant == Quadrant::classical_only,
                    qw.quadrant == Quadrant::quantum_only};
    rep.sets_never_coincide =
        rep.sets_never_coincide && row.classical_only_verified && row.quantum_only_verified;
    rep.rows.push_back(std::move(row));
  }
  return rep;
}

struct GroupSemigroupRow {
  ScalingVerdict verdict;
  bool inside_cross;  // scaled state fails the quantum check
};

struct GroupSemigroupReport {
  std::vector<GroupSemigroupRow> rows;
  int classical_admissible_count = 0;
  int quantum_admissible_count = 0;
  int universal_count = 0;
};

/// Per-parameter comparison of the classical scaling group against the
/// quantum scaling semigroup for a given state.
inline GroupSemigroupReport group_vs_semigroup_report(const Moments& m, double hbar,
                                                      const std::vector<ScaleParams>& params) {
  GroupSemigroupReport rep;
  for (const auto& s : params) {
    ScalingVerdict v = classify_scaling(m, s, hbar);
    rep.classical_admissible_count += v.classical_admissible ? 1 : 0;
    rep.quantum_admissible_count += v.quantum_admissible_for_state ? 1 : 0;
    rep.universal_count += v.universal_quantum_admissible ? 1 : 0;
    rep.rows.push_back({v, !v.quantum_admissible_for_state});
  }
  return rep;
}

}  // namespace tomokit
