#pragma once

#include <Eigen/Dense>
#include <array>
#include <vector>

#include "tomokit/core.hpp"
#include "tomokit/tomography.hpp"
#include "tomokit/uncertainty.hpp"

namespace tomokit {

struct ScalingVerdict {
  ScaleParams params;
  bool classical_admissible;          // every nonzero parameter pair qualifies
  bool quantum_admissible_for_state;  // scaled moments still pass the uncertainty check
  bool universal_quantum_admissible;  // |lambda_q lambda_p| <= 1 in every mode
  double margin;                      // worst-mode scaled determinant minus hbar^2/4
};

/// Scaled density f_s(q, p) = |lambda_q lambda_p| f(lambda_q q, lambda_p p),
/// resampled onto the same window by bilinear interpolation with zero
/// extension. Errors out if more than mass_tol of the mass leaves the window.
inline PhaseGrid scale_density(const PhaseGrid& g, const ScaleParams& s,
                               double mass_tol = 1e-4) {
  if (s.n_modes() != 1) throw error("scale_density: single-mode grids only");
  double lq = s.lambda_q[0], lp = s.lambda_p[0];
  double n = std::abs(lq * lp);
  Eigen::MatrixXd v(g.n_q(), g.n_p());
  for (int i = 0; i < g.n_q(); ++i) {
    double q = lq * g.q_at(i);
    for (int j = 0; j < g.n_p(); ++j) v(i, j) = n * g.sample(q, lp * g.p_at(j));
  }
  PhaseGrid out = g.with_values(std::move(v));
  if (g.kind() != GridKind::observable) {
    double lost = g.mass() - out.mass();
    if (std::abs(lost) > mass_tol)
      throw truncation_error("scale_density: scaled support left the window", lost);
  }
  return out;
}

/// Exact moment transform under scaling: variances divide by lambda^2, the
/// covariance by lambda_q lambda_p, means by the respective lambda.
inline Moments scale_moments(const Moments& m, const ScaleParams& s) {
  int n = m.n_modes();
  if (s.n_modes() != n) throw error("scale_moments: mode count mismatch");
  Eigen::VectorXd inv(2 * n);
  for (int k = 0; k < n; ++k) {
    inv[k] = 1.0 / s.lambda_q[k];
    inv[n + k] = 1.0 / s.lambda_p[k];
  }
  Eigen::VectorXd mean = m.mean.cwiseProduct(inv);
  Eigen::MatrixXd sigma = inv.asDiagonal() * m.sigma * inv.asDiagonal();
  return Moments(std::move(mean), std::move(sigma));
}

inline GaussianState scale_gaussian(const GaussianState& state, const ScaleParams& s) {
  Moments m = scale_moments(state.moments(), s);
  return GaussianState(state.n_modes, m.mean, m.sigma);
}

/// Scaling transform at the tomogram level: omega_s(X, mu, nu) =
/// omega(X, mu/lambda_q, nu/lambda_p). For the sampled representation this is
/// a pure frame relabeling (mu, nu) -> (lambda_q mu, lambda_p nu); the X
/// marginals are untouched. The analytic representation maps to the scaled
/// Gaussian's tomogram, which is the same statement in closed form.
inline Tomogram scale_tomogram(const Tomogram& t, const ScaleParams& s) {
  if (s.n_modes() != 1) throw error("scale_tomogram: single-mode tomograms only");
  double lq = s.lambda_q[0], lp = s.lambda_p[0];
  if (t.is_analytic()) {
    const auto& g = t.analytic();
    Moments m = scale_moments(Moments(g.mean, g.sigma), s);
    return Tomogram(GaussianTomogram{m.mean.head<2>(), m.sigma.topLeftCorner<2, 2>()});
  }
  SampledTomogram out = t.sampled();
  for (auto& f : out.frames) {
    if (!std::isfinite(lq * f.mu) || !std::isfinite(lp * f.nu) ||
        (lq * f.mu == 0.0 && lp * f.nu == 0.0))
      throw frame_error("scale_tomogram: remapped frame degenerates");
    f = Frame(lq * f.mu, lp * f.nu);
  }
  return Tomogram(std::move(out));
}

/// Group-vs-semigroup classification of a scaling parameter set against a
/// state's moments. Classically every nonzero parameter pair is admissible;
/// quantum admissibility of the scaled state is decided by the uncertainty
/// check on the scaled moments, and universal admissibility (holding for
/// every uncertainty-respecting state) requires |lambda_q lambda_p| <= 1 per
/// mode, since scaling by s maps the uncertainty test at hbar to the test at
/// hbar * |lambda_q lambda_p|.
inline ScalingVerdict classify_scaling(const Moments& m, const ScaleParams& s, double hbar) {
  if (hbar <= 0.0) throw error("classify_scaling: hbar must be positive");
  Moments scaled = scale_moments(m, s);
  UncertaintyVerdict uv = check(scaled, hbar);
  bool universal = true;
  for (int k = 0; k < s.n_modes(); ++k)
    if (s.mode_product(k) > 1.0) universal = false;
  double margin = std::numeric_limits<double>::infinity();
  for (int k = 0; k < s.n_modes(); ++k)
    margin = std::min(margin, scaled.mode_det(k) - hbar * hbar / 4.0);
  return ScalingVerdict{s, true, uv.passes, universal, margin};
}

/// Boundary of the scaling-admissibility region in the (lambda_q, lambda_p)
/// plane, referenced to the unit-oscillator ground state: four hyperbola
/// branches |lambda_q lambda_p| = hbar, one per quadrant. The classical
/// counterpart has zero thickness and degenerates to the coordinate axes,
/// which are returned alongside.
struct CrossBoundary {
  double boundary_constant;
  std::array<std::vector<std::pair<double, double>>, 4> quantum_branches;
  std::array<std::vector<std::pair<double, double>>, 2> classical_axes;
};

inline CrossBoundary quantum_cross(double hbar, int samples, double lambda_min = 0.125,
                                   double lambda_max = 8.0) {
  if (hbar <= 0.0) throw error("quantum_cross: hbar must be positive");
  if (samples < 2) throw error("quantum_cross: need at least 2 samples per branch");
  CrossBoundary cb;
  cb.boundary_constant = hbar;
  double ratio = std::pow(lambda_max / lambda_min, 1.0 / (samples - 1));
  const double sq[4] = {1.0, 1.0, -1.0, -1.0};
  const double sp[4] = {1.0, -1.0, 1.0, -1.0};
  for (int b = 0; b < 4; ++b) {
    cb.quantum_branches[b].reserve(samples);
    double lq = lambda_min;
    for (int k = 0; k < samples; ++k, lq *= ratio)
      cb.quantum_branches[b].push_back({sq[b] * lq, sp[b] * hbar / lq});
  }
  for (int k = 0; k < samples; ++k) {
    double l = -lambda_max + 2.0 * lambda_max * k / (samples - 1);
    cb.classical_axes[0].push_back({l, 0.0});
    cb.classical_axes[1].push_back({0.0, l});
  }
  return cb;
}

}  // namespace tomokit
