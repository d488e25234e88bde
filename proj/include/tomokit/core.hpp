#pragma once

#include <Eigen/Dense>
#include <cmath>
#include <utility>

#include "tomokit/common.hpp"

namespace tomokit {

/// What the samples of a PhaseGrid mean.
///  density    -- classical probability density f(q,p), integral 1
///  wigner     -- Wigner function W(q,p), integral 2*pi, may be negative
///  observable -- arbitrary phase-space function A(q,p), no normalization
enum class GridKind { density, wigner, observable };

struct GridSpec {
  double q_min = -8.0, q_max = 8.0;
  double p_min = -8.0, p_max = 8.0;
  int n_q = 256, n_p = 256;

  static GridSpec standard() { return {}; }
  static GridSpec symmetric(double q_half, double p_half, int nq, int np) {
    return {-q_half, q_half, -p_half, p_half, nq, np};
  }
};

/// Uniform rectangular sampling of a phase-space function. Values are stored
/// row-major with q as the slow (row) index.
class PhaseGrid {
 public:
  PhaseGrid(GridSpec spec, Eigen::MatrixXd values, GridKind kind = GridKind::density)
      : spec_(spec), values_(std::move(values)), kind_(kind) {
    if (!(spec_.q_max > spec_.q_min) || !(spec_.p_max > spec_.p_min))
      throw error("PhaseGrid: window must have positive extent");
    if (spec_.n_q < 2 || spec_.n_p < 2) throw error("PhaseGrid: need at least 2 samples per axis");
    if (values_.rows() != spec_.n_q || values_.cols() != spec_.n_p)
      throw error("PhaseGrid: value matrix shape does not match spec");
    if (!values_.allFinite()) throw error("PhaseGrid: non-finite sample values");
  }

  const GridSpec& spec() const { return spec_; }
  GridKind kind() const { return kind_; }
  const Eigen::MatrixXd& values() const { return values_; }
  int n_q() const { return spec_.n_q; }
  int n_p() const { return spec_.n_p; }
  double dq() const { return (spec_.q_max - spec_.q_min) / (spec_.n_q - 1); }
  double dp() const { return (spec_.p_max - spec_.p_min) / (spec_.n_p - 1); }
  double q_at(int i) const { return spec_.q_min + i * dq(); }
  double p_at(int j) const { return spec_.p_min + j * dp(); }

  /// Raw trapezoidal integral of the stored samples.
  double integral() const {
    double acc = 0.0;
    for (int i = 0; i < n_q(); ++i) {
      double wi = detail::trapezoid_weight(i, n_q(), dq());
      for (int j = 0; j < n_p(); ++j)
        acc += wi * detail::trapezoid_weight(j, n_p(), dp()) * values_(i, j);
    }
    return acc;
  }

  /// Integral in the probability convention: for wigner grids the samples
  /// carry an extra 2*pi relative to a density.
  double mass() const { return kind_ == GridKind::wigner ? integral() / two_pi : integral(); }

  /// Density-convention samples (f rather than W).
  Eigen::MatrixXd density_values() const {
    return kind_ == GridKind::wigner ? Eigen::MatrixXd(values_ / two_pi) : values_;
  }

  /// Bilinear interpolation; zero outside the window.
  double sample(double q, double p) const {
    double tq = (q - spec_.q_min) / dq();
    double tp = (p - spec_.p_min) / dp();
    if (tq < 0.0 || tp < 0.0 || tq > spec_.n_q - 1 || tp > spec_.n_p - 1) return 0.0;
    int i = std::min(static_cast<int>(tq), spec_.n_q - 2);
    int j = std::min(static_cast<int>(tp), spec_.n_p - 2);
    double a = tq - i, b = tp - j;
    return (1 - a) * (1 - b) * values_(i, j) + a * (1 - b) * values_(i + 1, j) +
           (1 - a) * b * values_(i, j + 1) + a * b * values_(i + 1, j + 1);
  }

  PhaseGrid with_values(Eigen::MatrixXd v) const { return PhaseGrid(spec_, std::move(v), kind_); }
  PhaseGrid with_kind(GridKind k) const { return PhaseGrid(spec_, values_, k); }

 private:
  GridSpec spec_;
  Eigen::MatrixXd values_;
  GridKind kind_;
};

/// Checks the classical-density contract: nonnegative samples and unit mass.
inline void validate_density(const PhaseGrid& g, double norm_tol = 1e-6,
                             double negativity_floor = 1e-9) {
  double floor = -negativity_floor * std::max(1.0, g.values().maxCoeff());
  if (g.values().minCoeff() < floor)
    throw error("classical density has negative samples (min " +
                std::to_string(g.values().minCoeff()) + ")");
  double m = g.mass();
  if (std::abs(m - 1.0) > norm_tol) throw normalization_error("density not normalized", m);
}

/// Reference frame in phase space: the measured coordinate is X = mu*q + nu*p.
struct Frame {
  double mu;
  double nu;

  Frame(double mu_, double nu_) : mu(mu_), nu(nu_) {
    if (!std::isfinite(mu) || !std::isfinite(nu)) throw frame_error("frame must be finite");
    if (mu == 0.0 && nu == 0.0) throw frame_error("frame (0, 0) is degenerate");
  }
  double norm() const { return std::hypot(mu, nu); }
  double angle() const { return std::atan2(nu, mu); }
};

/// mu = e^lambda cos(theta), nu = e^{-lambda} sin(theta).
inline Frame frame_from_polar(double lambda, double theta) {
  if (!std::isfinite(lambda) || !std::isfinite(theta))
    throw frame_error("polar frame parameters must be finite");
  return Frame(std::exp(lambda) * std::cos(theta), std::exp(-lambda) * std::sin(theta));
}

/// Independent axis scalings, one pair per mode. Every component is nonzero;
/// composition is the componentwise product.
struct ScaleParams {
  Eigen::VectorXd lambda_q;
  Eigen::VectorXd lambda_p;

  ScaleParams(double lq, double lp) : ScaleParams(Eigen::VectorXd::Constant(1, lq),
                                                  Eigen::VectorXd::Constant(1, lp)) {}
  ScaleParams(Eigen::VectorXd lq, Eigen::VectorXd lp)
      : lambda_q(std::move(lq)), lambda_p(std::move(lp)) {
    if (lambda_q.size() != lambda_p.size() || lambda_q.size() < 1)
      throw error("ScaleParams: mismatched mode counts");
    for (int s = 0; s < lambda_q.size(); ++s) {
      if (lambda_q[s] == 0.0 || lambda_p[s] == 0.0 || !std::isfinite(lambda_q[s]) ||
          !std::isfinite(lambda_p[s]))
        throw error("ScaleParams: components must be nonzero finite reals");
    }
  }

  int n_modes() const { return static_cast<int>(lambda_q.size()); }
  static ScaleParams identity(int n_modes = 1) {
    return ScaleParams(Eigen::VectorXd::Ones(n_modes), Eigen::VectorXd::Ones(n_modes));
  }
  ScaleParams compose(const ScaleParams& other) const {
    if (other.n_modes() != n_modes()) throw error("ScaleParams: mode count mismatch");
    return ScaleParams(lambda_q.cwiseProduct(other.lambda_q),
                       lambda_p.cwiseProduct(other.lambda_p));
  }
  ScaleParams inverse() const {
    return ScaleParams(lambda_q.cwiseInverse(), lambda_p.cwiseInverse());
  }
  /// |lambda_q lambda_p| for one mode.
  double mode_product(int s) const { return std::abs(lambda_q[s] * lambda_p[s]); }
};

/// First and second moments of a state: mean vector (q_1..q_n, p_1..p_n),
/// dispersion matrix, and its determinant/trace summaries.
struct Moments {
  Eigen::VectorXd mean;
  Eigen::MatrixXd sigma;
  double d;
  double t;

  Moments(Eigen::VectorXd mean_, Eigen::MatrixXd sigma_)
      : mean(std::move(mean_)), sigma(std::move(sigma_)) {
    const auto n2 = sigma.rows();
    if (n2 < 2 || n2 % 2 != 0 || sigma.cols() != n2 || mean.size() != n2)
      throw error("Moments: need a 2n x 2n dispersion matrix and matching mean");
    if (!sigma.isApprox(sigma.transpose(), 1e-12))
      throw error("Moments: dispersion matrix must be symmetric");
    d = sigma.determinant();
    t = sigma.trace();
  }

  int n_modes() const { return static_cast<int>(sigma.rows()) / 2; }
  double sigma_qq(int s = 0) const { return sigma(s, s); }
  double sigma_pp(int s = 0) const { return sigma(n_modes() + s, n_modes() + s); }
  double sigma_qp(int s = 0) const { return sigma(s, n_modes() + s); }
  /// Determinant of one mode's 2x2 dispersion block.
  double mode_det(int s = 0) const {
    return sigma_qq(s) * sigma_pp(s) - sigma_qp(s) * sigma_qp(s);
  }

  static Moments single_mode(double qq, double pp, double qp, double mean_q = 0.0,
                             double mean_p = 0.0) {
    Eigen::Vector2d mu(mean_q, mean_p);
    Eigen::Matrix2d s;
    s << qq, qp, qp, pp;
    return Moments(mu, s);
  }
};

/// Gaussian state: exact analytic carrier for every transform in the library.
struct GaussianState {
  int n_modes;
  Eigen::VectorXd mean;
  Eigen::MatrixXd sigma;

  GaussianState(int n, Eigen::VectorXd mean_, Eigen::MatrixXd sigma_)
      : n_modes(n), mean(std::move(mean_)), sigma(std::move(sigma_)) {
    if (n < 1 || mean.size() != 2 * n || sigma.rows() != 2 * n || sigma.cols() != 2 * n)
      throw error("GaussianState: dimension mismatch");
    if (!sigma.isApprox(sigma.transpose(), 1e-12))
      throw error("GaussianState: dispersion matrix must be symmetric");
    for (int i = 0; i < 2 * n; ++i)
      if (sigma(i, i) < 0.0) throw error("GaussianState: negative variance");
    Moments m(mean, sigma);  // computes det/trace with the same checks
    if (m.d < 0.0 || m.t < 0.0) throw error("GaussianState: indefinite dispersion matrix");
  }

  static GaussianState single_mode(double qq, double pp, double qp, double mean_q = 0.0,
                                   double mean_p = 0.0) {
    Eigen::Vector2d mu(mean_q, mean_p);
    Eigen::Matrix2d s;
    s << qq, qp, qp, pp;
    return GaussianState(1, mu, s);
  }
  /// Ground state of the unit oscillator at the given Planck parameter.
  static GaussianState vacuum(double hbar = 1.0) {
    return single_mode(hbar / 2.0, hbar / 2.0, 0.0);
  }

  Moments moments() const { return Moments(mean, sigma); }
};

/// Samples the normal density of a single-mode Gaussian state.
inline PhaseGrid make_gaussian_grid(const GaussianState& state, GridSpec spec,
                                    GridKind kind = GridKind::density) {
  if (state.n_modes != 1) throw error("make_gaussian_grid: single-mode only");
  Eigen::Matrix2d s = state.sigma;
  double det = s.determinant();
  if (det <= 0.0) throw error("make_gaussian_grid: singular dispersion matrix");
  Eigen::Matrix2d inv = s.inverse();
  double norm = 1.0 / (two_pi * std::sqrt(det));
  if (kind == GridKind::wigner) norm *= two_pi;
  Eigen::MatrixXd v(spec.n_q, spec.n_p);
  double dq = (spec.q_max - spec.q_min) / (spec.n_q - 1);
  double dp = (spec.p_max - spec.p_min) / (spec.n_p - 1);
  for (int i = 0; i < spec.n_q; ++i) {
    double x = spec.q_min + i * dq - state.mean[0];
    for (int j = 0; j < spec.n_p; ++j) {
      double y = spec.p_min + j * dp - state.mean[1];
      double quad = inv(0, 0) * x * x + 2.0 * inv(0, 1) * x * y + inv(1, 1) * y * y;
      v(i, j) = norm * std::exp(-0.5 * quad);
    }
  }
  return PhaseGrid(spec, std::move(v), kind);
}

/// Window that keeps k standard deviations of the state inside, rounded out
/// to a symmetric box.
inline GridSpec window_for(const GaussianState& state, int n = 257, double k = 8.0) {
  double lq = std::abs(state.mean[0]) + k * std::sqrt(state.sigma(0, 0));
  double lp = std::abs(state.mean[1]) + k * std::sqrt(state.sigma(1, 1));
  double l = std::max(lq, lp);
  return GridSpec::symmetric(l, l, n, n);
}

/// Means and dispersion matrix of a sampled density via trapezoidal
/// quadrature. The grid must carry unit mass within tolerance.
inline Moments moments_of_grid(const PhaseGrid& g, double norm_tol = 1e-6) {
  double m = g.mass();
  if (std::abs(m - 1.0) > norm_tol)
    throw normalization_error("moments_of_grid: grid not normalized", m);
  Eigen::MatrixXd f = g.density_values();
  double mq = 0, mp = 0;
  for (int i = 0; i < g.n_q(); ++i) {
    double wi = detail::trapezoid_weight(i, g.n_q(), g.dq());
    double q = g.q_at(i);
    for (int j = 0; j < g.n_p(); ++j) {
      double w = wi * detail::trapezoid_weight(j, g.n_p(), g.dp()) * f(i, j);
      mq += w * q;
      mp += w * g.p_at(j);
    }
  }
  mq /= m;
  mp /= m;
  double qq = 0, pp = 0, qp = 0;
  for (int i = 0; i < g.n_q(); ++i) {
    double wi = detail::trapezoid_weight(i, g.n_q(), g.dq());
    double x = g.q_at(i) - mq;
    for (int j = 0; j < g.n_p(); ++j) {
      double w = wi * detail::trapezoid_weight(j, g.n_p(), g.dp()) * f(i, j);
      double y = g.p_at(j) - mp;
      qq += w * x * x;
      pp += w * y * y;
      qp += w * x * y;
    }
  }
  return Moments::single_mode(qq / m, pp / m, qp / m, mq, mp);
}

/// Time reversal f(q, p) -> f(q, -p). Exact sample reversal when the momentum
/// range is symmetric; otherwise resamples onto the symmetrized window if
/// allowed.
inline PhaseGrid reflect_time(const PhaseGrid& g, bool allow_resample = false) {
  const auto& s = g.spec();
  double scale = std::max(std::abs(s.p_min), std::abs(s.p_max));
  if (std::abs(s.p_min + s.p_max) <= 1e-12 * scale)
    return g.with_values(g.values().rowwise().reverse());
  if (!allow_resample)
    throw error("reflect_time: momentum range is not symmetric (pass allow_resample)");
  GridSpec t = s;
  t.p_min = -scale;
  t.p_max = scale;
  Eigen::MatrixXd v(t.n_q, t.n_p);
  double dp = (t.p_max - t.p_min) / (t.n_p - 1);
  for (int i = 0; i < t.n_q; ++i)
    for (int j = 0; j < t.n_p; ++j)
      v(i, j) = g.sample(s.q_min + i * g.dq(), -(t.p_min + j * dp));
  return PhaseGrid(t, std::move(v), g.kind());
}

/// Parity f(q, p) -> f(-q, p); same contract as reflect_time along q.
inline PhaseGrid reflect_parity(const PhaseGrid& g, bool allow_resample = false) {
  const auto& s = g.spec();
  double scale = std::max(std::abs(s.q_min), std::abs(s.q_max));
  if (std::abs(s.q_min + s.q_max) <= 1e-12 * scale)
    return g.with_values(g.values().colwise().reverse());
  if (!allow_resample)
    throw error("reflect_parity: position range is not symmetric (pass allow_resample)");
  GridSpec t = s;
  t.q_min = -scale;
  t.q_max = scale;
  Eigen::MatrixXd v(t.n_q, t.n_p);
  double dq = (t.q_max - t.q_min) / (t.n_q - 1);
  for (int i = 0; i < t.n_q; ++i)
    for (int j = 0; j < t.n_p; ++j)
      v(i, j) = g.sample(-(t.q_min + i * dq), s.p_min + j * g.dp());
  return PhaseGrid(t, std::move(v), g.kind());
}

enum class ShiftMode {
  translate_window,  // move the window with the data; exact
  resample           // keep the window; bilinear resampling with a mass check
};

/// Origin shift f(q, p) -> f(q + q0, p + p0); means move by (-q0, -p0).
inline PhaseGrid shift(const PhaseGrid& g, double q0, double p0,
                       ShiftMode mode = ShiftMode::translate_window,
                       double mass_tol = 1e-4) {
  if (mode == ShiftMode::translate_window) {
    GridSpec t = g.spec();
    t.q_min -= q0;
    t.q_max -= q0;
    t.p_min -= p0;
    t.p_max -= p0;
    return PhaseGrid(t, g.values(), g.kind());
  }
  Eigen::MatrixXd v(g.n_q(), g.n_p());
  for (int i = 0; i < g.n_q(); ++i)
    for (int j = 0; j < g.n_p(); ++j) v(i, j) = g.sample(g.q_at(i) + q0, g.p_at(j) + p0);
  PhaseGrid out = g.with_values(std::move(v));
  if (g.kind() != GridKind::observable) {
    double lost = g.mass() - out.mass();
    if (std::abs(lost) > mass_tol)
      throw truncation_error("shift: support clipped by the window", lost);
  }
  return out;
}

}  // namespace tomokit
