#pragma once

#include <Eigen/Dense>
#include <algorithm>
#include <complex>
#include <optional>
#include <variant>
#include <vector>

#include "tomokit/core.hpp"

namespace tomokit {

/// Tomogram of a single-mode Gaussian state in closed form. For a frame
/// (mu, nu) the marginal of X = mu q + nu p is a normal density with
///   mean = mu <q> + nu <p>,  var = mu^2 s_qq + 2 mu nu s_qp + nu^2 s_pp.
struct GaussianTomogram {
  Eigen::Vector2d mean;
  Eigen::Matrix2d sigma;

  double mean_x(const Frame& f) const { return f.mu * mean[0] + f.nu * mean[1]; }
  double var_x(const Frame& f) const {
    return f.mu * f.mu * sigma(0, 0) + 2.0 * f.mu * f.nu * sigma(0, 1) +
           f.nu * f.nu * sigma(1, 1);
  }
  double value(const Frame& f, double x) const {
    double v = var_x(f);
    double z = x - mean_x(f);
    return std::exp(-0.5 * z * z / v) / std::sqrt(two_pi * v);
  }
};

/// Tomogram sampled on a shared X axis, one row of values per frame.
struct SampledTomogram {
  std::vector<Frame> frames;
  double x_min, x_max;
  int n_x;
  Eigen::MatrixXd values;  // frames x n_x

  double dx() const { return (x_max - x_min) / (n_x - 1); }
  double x_at(int k) const { return x_min + k * dx(); }

  /// Linear interpolation along X within one frame row; zero outside.
  double value(int frame_idx, double x) const {
    double t = (x - x_min) / dx();
    if (t < 0.0 || t > n_x - 1) return 0.0;
    int k = std::min(static_cast<int>(t), n_x - 2);
    double a = t - k;
    return (1 - a) * values(frame_idx, k) + a * values(frame_idx, k + 1);
  }

  /// Four-point Lagrange interpolation, used where second-order accuracy is
  /// not enough; falls back to linear at the row ends.
  double value_cubic(int frame_idx, double x) const {
    double t = (x - x_min) / dx();
    if (t < 0.0 || t > n_x - 1) return 0.0;
    int k = static_cast<int>(t);
    if (k < 1 || k > n_x - 3) return value(frame_idx, x);
    double a = t - k;
    double wm = -a * (a - 1) * (a - 2) / 6.0;
    double w0 = (a + 1) * (a - 1) * (a - 2) / 2.0;
    double w1 = -(a + 1) * a * (a - 2) / 2.0;
    double w2 = (a + 1) * a * (a - 1) / 6.0;
    return wm * values(frame_idx, k - 1) + w0 * values(frame_idx, k) +
           w1 * values(frame_idx, k + 1) + w2 * values(frame_idx, k + 2);
  }

  double slice_integral(int frame_idx) const {
    double acc = 0.0;
    for (int k = 0; k < n_x; ++k)
      acc += detail::trapezoid_weight(k, n_x, dx()) * values(frame_idx, k);
    return acc;
  }

  std::pair<double, double> slice_mean_var(int frame_idx) const {
    double m0 = 0, m1 = 0;
    for (int k = 0; k < n_x; ++k) {
      double w = detail::trapezoid_weight(k, n_x, dx()) * values(frame_idx, k);
      m0 += w;
      m1 += w * x_at(k);
    }
    double mean = m1 / m0;
    double m2 = 0;
    for (int k = 0; k < n_x; ++k) {
      double w = detail::trapezoid_weight(k, n_x, dx()) * values(frame_idx, k);
      double z = x_at(k) - mean;
      m2 += w * z * z;
    }
    return {mean, m2 / m0};
  }
};

class Tomogram {
 public:
  explicit Tomogram(GaussianTomogram g) : repr_(std::move(g)) {}
  explicit Tomogram(SampledTomogram s) : repr_(std::move(s)) {}

  bool is_analytic() const { return std::holds_alternative<GaussianTomogram>(repr_); }
  const GaussianTomogram& analytic() const { return std::get<GaussianTomogram>(repr_); }
  const SampledTomogram& sampled() const { return std::get<SampledTomogram>(repr_); }
  SampledTomogram& sampled() { return std::get<SampledTomogram>(repr_); }

  /// Index of a stored frame matching (mu, nu) within tolerance.
  std::optional<int> find_frame(const Frame& f, double tol = 1e-9) const {
    if (is_analytic()) return std::nullopt;
    const auto& s = sampled();
    for (size_t i = 0; i < s.frames.size(); ++i)
      if (std::abs(s.frames[i].mu - f.mu) <= tol && std::abs(s.frames[i].nu - f.nu) <= tol)
        return static_cast<int>(i);
    return std::nullopt;
  }

  /// Mean and variance of X in the given frame. Exact for the analytic
  /// representation; quadrature over the stored row otherwise.
  std::pair<double, double> mean_var(const Frame& f) const {
    if (is_analytic()) return {analytic().mean_x(f), analytic().var_x(f)};
    auto idx = find_frame(f);
    if (!idx) throw frame_error("tomogram does not contain the requested frame");
    return sampled().slice_mean_var(*idx);
  }

 private:
  std::variant<GaussianTomogram, SampledTomogram> repr_;
};

inline std::pair<double, double> tomogram_of_gaussian(const GaussianState& state,
                                                      const Frame& f) {
  if (state.n_modes != 1) throw error("tomogram_of_gaussian: single-mode only");
  GaussianTomogram t{state.mean.head<2>(), state.sigma.topLeftCorner<2, 2>()};
  return {t.mean_x(f), t.var_x(f)};
}

inline Tomogram analytic_tomogram(const GaussianState& state) {
  if (state.n_modes != 1) throw error("analytic_tomogram: single-mode only");
  return Tomogram(GaussianTomogram{state.mean.head<2>(), state.sigma.topLeftCorner<2, 2>()});
}

/// Multimode Gaussian tomogram with one frame per mode: returns the mean
/// vector and covariance of (X_1 .. X_n).
inline std::pair<Eigen::VectorXd, Eigen::MatrixXd> tomogram_of_gaussian_multimode(
    const GaussianState& state, const std::vector<Frame>& per_mode) {
  int n = state.n_modes;
  if (static_cast<int>(per_mode.size()) != n)
    throw error("tomogram_of_gaussian_multimode: one frame per mode required");
  Eigen::MatrixXd c = Eigen::MatrixXd::Zero(n, 2 * n);
  for (int s = 0; s < n; ++s) {
    c(s, s) = per_mode[s].mu;
    c(s, n + s) = per_mode[s].nu;
  }
  return {c * state.mean, c * state.sigma * c.transpose()};
}

/// Forward tomographic transform of a sampled density: for each frame, the
/// mass of every grid cell is spread over the X-interval that the cell's
/// footprint projects onto (width |mu| dq + |nu| dp around mu q + nu p) and
/// split across the overlapped bins. Mass is conserved exactly, and the
/// projected sample lattice never degenerates into a bare point comb, which
/// would beat against the bin grid for rational-slope frames. Wigner grids
/// carry the 1/(2 pi) quantum normalization.
inline Tomogram tomogram_of_grid(const PhaseGrid& g, const std::vector<Frame>& frames,
                                 int n_x = 256, double norm_tol = 1e-3) {
  if (frames.empty()) throw frame_error("tomogram_of_grid: no frames given");
  double mass = g.mass();
  if (std::abs(mass - 1.0) > norm_tol)
    throw normalization_error("tomogram_of_grid: input grid not normalized", mass);

  const auto& spec = g.spec();
  double l = std::max({std::abs(spec.q_min), std::abs(spec.q_max), std::abs(spec.p_min),
                       std::abs(spec.p_max)});
  double r_max = 0.0;
  for (const auto& f : frames) r_max = std::max(r_max, f.norm());
  double x_half = l * r_max;
  double dx = 2.0 * x_half / (n_x - 1);

  Eigen::MatrixXd f_density = g.density_values();
  Eigen::MatrixXd out = Eigen::MatrixXd::Zero(static_cast<int>(frames.size()), n_x);

  for (size_t m = 0; m < frames.size(); ++m) {
    const Frame& fr = frames[m];
    // half-width of a cell's X-projection, in bin units
    double w = 0.5 * (std::abs(fr.mu) * g.dq() + std::abs(fr.nu) * g.dp()) / dx;
    for (int i = 0; i < g.n_q(); ++i) {
      double wi = detail::trapezoid_weight(i, g.n_q(), g.dq());
      double xq = fr.mu * g.q_at(i);
      for (int j = 0; j < g.n_p(); ++j) {
        double cell = wi * detail::trapezoid_weight(j, g.n_p(), g.dp()) * f_density(i, j);
        if (cell == 0.0) continue;
        double t = (xq + fr.nu * g.p_at(j) + x_half) / dx;
        // bins are cells [k - 1/2, k + 1/2] around the nodes
        int k0 = std::max(0, static_cast<int>(std::floor(t - w + 0.5)));
        int k1 = std::min(n_x - 1, static_cast<int>(std::floor(t + w + 0.5)));
        if (k0 > k1) {  // fully outside: clip into the nearest end bin
          out(m, t < 0.0 ? 0 : n_x - 1) += cell;
          continue;
        }
        double deposited = 0.0;
        for (int k = k0; k <= k1; ++k) {
          double lo = std::max(t - w, k - 0.5);
          double hi = std::min(t + w, k + 0.5);
          if (hi <= lo) continue;
          double frac = (hi - lo) / (2.0 * w);
          out(m, k) += cell * frac;
          deposited += frac;
        }
        // clipped overhang keeps the total mass in the end bins
        if (deposited < 1.0) out(m, t < n_x / 2.0 ? k0 : k1) += cell * (1.0 - deposited);
      }
    }
  }
  out /= dx;
  return Tomogram(SampledTomogram{frames, -x_half, x_half, n_x, std::move(out)});
}

/// Dispersion matrix recovered from a tomogram through the quadratic form
/// var_X(mu, nu) = mu^2 s_qq + 2 mu nu s_qp + nu^2 s_pp evaluated at the
/// frames (1,0), (0,1) and (1,1).
inline Moments tomogram_moments(const Tomogram& t) {
  Frame fq(1, 0), fp(0, 1), fd(1, 1);
  auto [mq, vq] = t.mean_var(fq);
  auto [mp, vp] = t.mean_var(fp);
  auto [md, vd] = t.mean_var(fd);
  (void)md;
  return Moments::single_mode(vq, vp, 0.5 * (vd - vq - vp), mq, mp);
}

struct HomogeneityFinding {
  int frame_a, frame_b;
  double lambda;
  double residual;
};

struct TomogramCheck {
  std::vector<double> normalization_residuals;
  std::vector<HomogeneityFinding> homogeneity;
  std::vector<std::pair<int, double>> negative_values;  // (frame, min value)
  double max_normalization_residual = 0.0;
  double max_homogeneity_residual = 0.0;
};

/// Normalization, homogeneity and nonnegativity report. Findings are
/// returned, never thrown.
inline TomogramCheck check_tomogram(const Tomogram& t, double neg_tol = 1e-12) {
  TomogramCheck rep;
  if (t.is_analytic()) {
    // Closed-form Gaussian slices: probe a spread of frames and scalings.
    const auto& g = t.analytic();
    std::vector<Frame> probes;
    for (int k = 0; k < 8; ++k)
      probes.push_back(Frame(std::cos(k * pi / 8.0 + 0.1), std::sin(k * pi / 8.0 + 0.1)));
    for (const auto& f : probes) {
      double s = std::sqrt(g.var_x(f));
      double m = g.mean_x(f);
      int n = 4001;
      double lo = m - 12 * s, hi = m + 12 * s, h = (hi - lo) / (n - 1);
      double acc = 0.0;
      for (int k = 0; k < n; ++k)
        acc += detail::trapezoid_weight(k, n, h) * g.value(f, lo + k * h);
      rep.normalization_residuals.push_back(std::abs(acc - 1.0));
      for (double lambda : {2.0, -2.0, 0.5, -0.5}) {
        Frame fl(lambda * f.mu, lambda * f.nu);
        double res = 0.0;
        for (double x : {m - 2 * s, m, m + s}) {
          res = std::max(res,
                         std::abs(g.value(fl, lambda * x) * std::abs(lambda) - g.value(f, x)));
        }
        rep.homogeneity.push_back({-1, -1, lambda, res});
      }
    }
  } else {
    const auto& s = t.sampled();
    for (size_t i = 0; i < s.frames.size(); ++i) {
      rep.normalization_residuals.push_back(
          std::abs(s.slice_integral(static_cast<int>(i)) - 1.0));
      double mn = s.values.row(static_cast<int>(i)).minCoeff();
      if (mn < -neg_tol) rep.negative_values.push_back({static_cast<int>(i), mn});
    }
    // Pairs of frames related by a scalar factor. The residual is relative to
    // the source slice's peak so it is insensitive to the slice's scale.
    for (size_t a = 0; a < s.frames.size(); ++a) {
      double peak = std::max(s.values.row(static_cast<int>(a)).cwiseAbs().maxCoeff(), 1e-300);
      for (size_t b = 0; b < s.frames.size(); ++b) {
        if (a == b) continue;
        const Frame &fa = s.frames[a], &fb = s.frames[b];
        double lambda;
        if (fa.mu != 0.0)
          lambda = fb.mu / fa.mu;
        else
          lambda = fb.nu / fa.nu;
        if (std::abs(fb.mu - lambda * fa.mu) > 1e-9 * (1 + std::abs(fb.mu)) ||
            std::abs(fb.nu - lambda * fa.nu) > 1e-9 * (1 + std::abs(fb.nu)))
          continue;
        double res = 0.0;
        for (int k = 0; k < s.n_x; ++k) {
          double x = s.x_at(k);
          if (std::abs(lambda * x) > std::max(std::abs(s.x_min), std::abs(s.x_max))) continue;
          res = std::max(res, std::abs(s.value_cubic(static_cast<int>(b), lambda * x) *
                                           std::abs(lambda) -
                                       s.values(static_cast<int>(a), k)) /
                                  peak);
        }
        rep.homogeneity.push_back({static_cast<int>(a), static_cast<int>(b), lambda, res});
      }
    }
  }
  for (double r : rep.normalization_residuals)
    rep.max_normalization_residual = std::max(rep.max_normalization_residual, r);
  for (const auto& h : rep.homogeneity)
    rep.max_homogeneity_residual = std::max(rep.max_homogeneity_residual, h.residual);
  return rep;
}

struct InversionOptions {
  GridSpec out = GridSpec::standard();
  int n_radial = 0;          // signed radial samples per angle; 0 = auto
  int n_k = 0;               // Cartesian k-grid side; 0 = auto
  double k_max = 0.0;        // 0 = auto from the X sampling
  double max_angle_gap = pi / 8.0;
};

namespace detail {

struct Ray {
  double theta;    // folded to [0, pi)
  int frame_idx;
  double scale;    // signed r: X = scale * Y with Y the unit-frame coordinate
};

}  // namespace detail

/// Inverse tomographic transform. The analytic Gaussian path is exact; the
/// sampled path reconstructs through the characteristic function: a 1D
/// Fourier transform of each X slice gives the state's characteristic
/// function along a ray, rays are interpolated onto a Cartesian k-grid, and
/// an inverse 2D Fourier quadrature produces the density.
inline PhaseGrid invert_tomogram(const Tomogram& t, InversionOptions opts = {}) {
  if (t.is_analytic()) {
    const auto& g = t.analytic();
    GaussianState state(1, g.mean, g.sigma);
    return make_gaussian_grid(state, opts.out, GridKind::density);
  }

  const auto& s = t.sampled();
  std::vector<detail::Ray> rays;
  rays.reserve(s.frames.size());
  for (size_t i = 0; i < s.frames.size(); ++i) {
    const Frame& f = s.frames[i];
    double theta = f.angle();
    double scale = f.norm();
    if (theta < 0.0) {
      theta += pi;
      scale = -scale;
    }
    if (theta >= pi) {  // angle() == pi exactly
      theta -= pi;
      scale = -scale;
    }
    rays.push_back({theta, static_cast<int>(i), scale});
  }
  std::sort(rays.begin(), rays.end(),
            [](const detail::Ray& a, const detail::Ray& b) { return a.theta < b.theta; });
  for (size_t i = 0; i < rays.size(); ++i) {
    double next = (i + 1 < rays.size()) ? rays[i + 1].theta : rays[0].theta + pi;
    if (next - rays[i].theta > opts.max_angle_gap)
      throw coverage_error("invert_tomogram: angular gap " +
                           std::to_string(next - rays[i].theta) + " rad exceeds limit");
  }

  // Radial characteristic function per ray, on a signed radial grid. The
  // k-space extent defaults to half the slices' Nyquist limit: close to the
  // limit a binned slice's transform is dominated by bin-granularity noise
  // rather than signal. Radii beyond the limit itself are zeroed outright.
  double r_min = std::numeric_limits<double>::infinity();
  for (const auto& ray : rays) r_min = std::min(r_min, std::abs(ray.scale));
  double k_cart = opts.k_max > 0.0 ? opts.k_max : 0.5 * pi * r_min / s.dx();
  double k_rad = k_cart * std::sqrt(2.0);
  int n_r = opts.n_radial > 0 ? opts.n_radial : 8 * s.n_x + 1;
  if (n_r % 2 == 0) ++n_r;
  int n_ang = static_cast<int>(rays.size());
  double dr = 2.0 * k_rad / (n_r - 1);
  double nyquist = pi / s.dx();

  Eigen::MatrixXcd radial(n_ang, n_r);
  Eigen::VectorXd xw(s.n_x);
  for (int k = 0; k < s.n_x; ++k) xw[k] = detail::trapezoid_weight(k, s.n_x, s.dx());
  for (int m = 0; m < n_ang; ++m) {
    const auto& ray = rays[m];
    const auto row = s.values.row(ray.frame_idx);
    for (int a = 0; a < n_r; ++a) {
      double kappa = (-k_rad + a * dr) / ray.scale;
      if (std::abs(kappa) > nyquist) {
        radial(m, a) = 0.0;
        continue;
      }
      std::complex<double> acc(0.0, 0.0);
      for (int k = 0; k < s.n_x; ++k)
        acc += xw[k] * row[k] * std::polar(1.0, kappa * s.x_at(k));
      radial(m, a) = acc;
    }
  }

  // Polar -> Cartesian characteristic function by bilinear interpolation in
  // (theta, signed radius); theta wraps with period pi and a radius flip.
  int n_k = opts.n_k > 0 ? opts.n_k : std::max(256, 5 * s.n_x / 4);
  double dk = 2.0 * k_cart / (n_k - 1);
  Eigen::MatrixXcd cart(n_k, n_k);
  auto radial_at = [&](int m, double rho) -> std::complex<double> {
    double u = (rho + k_rad) / dr;
    int a = std::clamp(static_cast<int>(u), 0, n_r - 2);
    double w = u - a;
    return (1.0 - w) * radial(m, a) + w * radial(m, a + 1);
  };
  for (int ia = 0; ia < n_k; ++ia) {
    double ka = -k_cart + ia * dk;
    for (int ib = 0; ib < n_k; ++ib) {
      double kb = -k_cart + ib * dk;
      double rho = std::hypot(ka, kb);
      double phi = std::atan2(kb, ka);
      if (phi < 0.0) {
        phi += pi;
        rho = -rho;
      }
      if (phi >= pi) {
        phi -= pi;
        rho = -rho;
      }
      // bracketing rays around phi
      int hi = static_cast<int>(
          std::lower_bound(rays.begin(), rays.end(), phi,
                           [](const detail::Ray& r, double v) { return r.theta < v; }) -
          rays.begin());
      int lo = hi - 1;
      double th_lo, th_hi;
      double sign_lo = 1.0, sign_hi = 1.0;
      if (lo < 0) {
        lo = n_ang - 1;
        th_lo = rays[lo].theta - pi;
        sign_lo = -1.0;
      } else {
        th_lo = rays[lo].theta;
      }
      if (hi >= n_ang) {
        hi = 0;
        th_hi = rays[hi].theta + pi;
        sign_hi = -1.0;
      } else {
        th_hi = rays[hi].theta;
      }
      double w = (th_hi > th_lo) ? (phi - th_lo) / (th_hi - th_lo) : 0.0;
      cart(ia, ib) = (1.0 - w) * radial_at(lo, sign_lo * rho) +
                     w * radial_at(hi, sign_hi * rho);
    }
  }

  // Inverse 2D Fourier quadrature onto the output grid.
  const GridSpec& o = opts.out;
  double dq = (o.q_max - o.q_min) / (o.n_q - 1);
  double dp = (o.p_max - o.p_min) / (o.n_p - 1);
  Eigen::MatrixXcd eq(o.n_q, n_k), ep(n_k, o.n_p);
  for (int i = 0; i < o.n_q; ++i)
    for (int a = 0; a < n_k; ++a) {
      double ka = -k_cart + a * dk;
      eq(i, a) = std::polar(detail::trapezoid_weight(a, n_k, dk), -ka * (o.q_min + i * dq));
    }
  for (int b = 0; b < n_k; ++b)
    for (int j = 0; j < o.n_p; ++j) {
      double kb = -k_cart + b * dk;
      ep(b, j) = std::polar(detail::trapezoid_weight(b, n_k, dk), -kb * (o.p_min + j * dp));
    }
  Eigen::MatrixXd f = ((eq * cart * ep) / (two_pi * two_pi)).real();

  PhaseGrid out(o, std::move(f), GridKind::density);
  double mass = out.mass();
  if (std::abs(mass) < 1e-6)
    throw error("invert_tomogram: reconstruction carries no mass");
  return out.with_values(out.values() / mass);
}

}  // namespace tomokit
