#pragma once

#include <Eigen/Dense>
#include <Eigen/Eigenvalues>
#include <complex>
#include <vector>

#include "tomokit/core.hpp"

namespace tomokit {

using Complex = std::complex<double>;

/// Oscillator eigenfunctions (Hermite functions) of the unit oscillator,
/// evaluated by the stable three-term recurrence. Row n of the result holds
/// psi_n at the given abscissas.
inline Eigen::MatrixXd hermite_functions(int count, const Eigen::VectorXd& x) {
  if (count < 1) throw error("hermite_functions: count must be positive");
  const int n = static_cast<int>(x.size());
  Eigen::MatrixXd psi(count, n);
  const double norm0 = std::pow(pi, -0.25);
  for (int i = 0; i < n; ++i) psi(0, i) = norm0 * std::exp(-0.5 * x[i] * x[i]);
  if (count > 1)
    for (int i = 0; i < n; ++i) psi(1, i) = std::sqrt(2.0) * x[i] * psi(0, i);
  for (int k = 2; k < count; ++k) {
    double a = std::sqrt(2.0 / k), b = std::sqrt((k - 1.0) / k);
    for (int i = 0; i < n; ++i) psi(k, i) = a * x[i] * psi(k - 1, i) - b * psi(k - 2, i);
  }
  return psi;
}

inline double hermite_function(int n, double x) {
  Eigen::VectorXd xs(1);
  xs[0] = x;
  return hermite_functions(n + 1, xs)(n, 0);
}

/// Complex operator matrix in the truncated oscillator basis.
struct OperatorMatrix {
  int dim;
  Eigen::MatrixXcd entries;
  bool hermitian;
  Complex trace;

  static OperatorMatrix from(Eigen::MatrixXcd m, double herm_tol = 1e-12) {
    if (m.rows() != m.cols() || m.rows() < 1) throw error("OperatorMatrix: square matrix required");
    double scale = std::max(1.0, m.cwiseAbs().maxCoeff());
    bool herm =
        (m - m.adjoint()).cwiseAbs().maxCoeff() <= herm_tol * scale;
    Complex tr = m.trace();
    int d = static_cast<int>(m.rows());
    return OperatorMatrix{d, std::move(m), herm, tr};
  }
};

/// Matrix of the position operator, <m|q|m+1> = sqrt((m+1)/2).
inline OperatorMatrix position_operator(int dim) {
  Eigen::MatrixXcd q = Eigen::MatrixXcd::Zero(dim, dim);
  for (int m = 0; m + 1 < dim; ++m) {
    double v = std::sqrt((m + 1) / 2.0);
    q(m, m + 1) = v;
    q(m + 1, m) = v;
  }
  return OperatorMatrix::from(std::move(q));
}

/// Matrix of the momentum operator, <m+1|p|m> = i sqrt((m+1)/2).
inline OperatorMatrix momentum_operator(int dim) {
  Eigen::MatrixXcd p = Eigen::MatrixXcd::Zero(dim, dim);
  for (int m = 0; m + 1 < dim; ++m) {
    double v = std::sqrt((m + 1) / 2.0);
    p(m, m + 1) = Complex(0.0, -v);
    p(m + 1, m) = Complex(0.0, v);
  }
  return OperatorMatrix::from(std::move(p));
}

/// Phase-space samples of a complex symbol (star products of real symbols
/// are complex in general).
struct ComplexSymbol {
  GridSpec spec;
  Eigen::MatrixXcd values;

  PhaseGrid real_part(GridKind kind = GridKind::observable) const {
    return PhaseGrid(spec, values.real(), kind);
  }
  PhaseGrid imag_part(GridKind kind = GridKind::observable) const {
    return PhaseGrid(spec, values.imag(), kind);
  }
};

/// Samples in the Weyl-symbol convention: a classical density enters the
/// quantization maps as W = 2 pi f, so that its operator has unit trace.
inline Eigen::MatrixXd symbol_values(const PhaseGrid& g) {
  return g.kind() == GridKind::density ? Eigen::MatrixXd(two_pi * g.values()) : g.values();
}

/// Position-representation kernel A(x, x') of a symbol, sampled on the
/// even-index subgrid of the symbol's q axis. Using every other grid point
/// as the kernel axis places each midpoint (x + x')/2 exactly on an original
/// grid node, so no interpolation of the symbol is ever needed.
struct PositionKernel {
  Eigen::VectorXd x;        // kernel axis (spacing = 2 dq of the symbol grid)
  double spacing;
  Eigen::MatrixXcd values;  // values(i, j) = A(x[i], x[j])
};

namespace detail {

/// A(x, x') = (1/2pi) Int W((x+x')/2, p) e^{i p (x - x')} dp on the subgrid.
inline PositionKernel kernel_from_symbol_values(const Eigen::MatrixXd& w, const GridSpec& s) {
  const int nq = s.n_q, np = s.n_p;
  const double dq = (s.q_max - s.q_min) / (nq - 1);
  const double dp = (s.p_max - s.p_min) / (np - 1);
  const int nx = (nq + 1) / 2;  // subgrid size; last index 2(nx-1) <= nq-1
  const double h = 2.0 * dq;
  const int nd = 2 * nx - 1;  // offsets u_d = (d - nx + 1) * h

  Eigen::MatrixXcd phase(np, nd);
  for (int j = 0; j < np; ++j) {
    double p = s.p_min + j * dp;
    double wj = trapezoid_weight(j, np, dp) / two_pi;
    for (int d = 0; d < nd; ++d) phase(j, d) = std::polar(wj, p * (d - nx + 1) * h);
  }
  // table(m, d): midpoint q_m (original grid), offset u_d
  Eigen::MatrixXcd table = w.topRows(2 * nx - 1).cast<Complex>() * phase;

  PositionKernel kernel;
  kernel.x.resize(nx);
  for (int i = 0; i < nx; ++i) kernel.x[i] = s.q_min + 2 * i * dq;
  kernel.spacing = h;
  kernel.values.resize(nx, nx);
  for (int i = 0; i < nx; ++i)
    for (int j = 0; j < nx; ++j) kernel.values(i, j) = table(i + j, i - j + nx - 1);
  return kernel;
}

/// Weyl symbol from a position-representation kernel on a symmetric x grid:
/// W(q, p) = Int K(q + u/2, q - u/2) e^{-i p u} du, with u on the even-offset
/// sublattice (spacing 2 dx) at each output point.
inline Eigen::MatrixXcd symbol_from_kernel(const Eigen::MatrixXcd& kernel, const GridSpec& s) {
  const int nq = s.n_q, np = s.n_p;
  if (kernel.rows() != nq || kernel.cols() != nq)
    throw error("symbol_from_kernel: kernel shape does not match grid");
  const double dq = (s.q_max - s.q_min) / (nq - 1);
  const double dp = (s.p_max - s.p_min) / (np - 1);
  const int ne = 2 * nq - 1;  // offsets e in [-(nq-1), nq-1]

  Eigen::MatrixXcd gathered = Eigen::MatrixXcd::Zero(nq, ne);
  for (int r = 0; r < nq; ++r) {
    int emax = std::min(r, nq - 1 - r);
    for (int e = -emax; e <= emax; ++e) gathered(r, e + nq - 1) = kernel(r + e, r - e);
  }
  Eigen::MatrixXcd phase(ne, np);
  for (int e = 0; e < ne; ++e) {
    double u = 2.0 * (e - nq + 1) * dq;
    for (int j = 0; j < np; ++j)
      phase(e, j) = std::polar(2.0 * dq, -(s.p_min + j * dp) * u);
  }
  return gathered * phase;
}

}  // namespace detail

/// Position-representation kernel of a phase-space symbol (inverse Weyl map
/// before basis projection). Exposed for the position-kernel star product.
inline PositionKernel kernel_from_symbol(const PhaseGrid& g) {
  return detail::kernel_from_symbol_values(symbol_values(g), g.spec());
}

/// Weyl quantization onto a truncated oscillator basis: kernel from the
/// symbol, then double projection integrals onto Hermite functions. The
/// Hermitian part is enforced (real symbols give Hermitian operators).
inline OperatorMatrix symbol_to_matrix(const PhaseGrid& g, int dim) {
  if (dim < 1) throw error("symbol_to_matrix: dim must be positive");
  PositionKernel kernel = kernel_from_symbol(g);
  const int nx = static_cast<int>(kernel.x.size());
  Eigen::MatrixXd psi = hermite_functions(dim, kernel.x);
  Eigen::VectorXd w(nx);
  for (int i = 0; i < nx; ++i) w[i] = detail::trapezoid_weight(i, nx, kernel.spacing);
  Eigen::MatrixXd pw = psi * w.asDiagonal();
  Eigen::MatrixXcd m = pw.cast<Complex>() * kernel.values * pw.transpose().cast<Complex>();
  m = 0.5 * (m + m.adjoint()).eval();
  return OperatorMatrix::from(std::move(m));
}

/// Weyl symbol of an operator in the truncated basis, sampled on a grid.
inline ComplexSymbol matrix_to_symbol_complex(const OperatorMatrix& a, GridSpec spec) {
  Eigen::VectorXd x(spec.n_q);
  double dq = (spec.q_max - spec.q_min) / (spec.n_q - 1);
  for (int i = 0; i < spec.n_q; ++i) x[i] = spec.q_min + i * dq;
  Eigen::MatrixXd psi = hermite_functions(a.dim, x);
  Eigen::MatrixXcd kernel =
      psi.transpose().cast<Complex>() * a.entries * psi.cast<Complex>();
  return ComplexSymbol{spec, detail::symbol_from_kernel(kernel, spec)};
}

inline PhaseGrid matrix_to_symbol(const OperatorMatrix& a, GridSpec spec,
                                  GridKind kind = GridKind::observable) {
  ComplexSymbol cs = matrix_to_symbol_complex(a, spec);
  if (a.hermitian) {
    double imax = cs.values.imag().cwiseAbs().maxCoeff();
    double scale = std::max(1.0, cs.values.real().cwiseAbs().maxCoeff());
    if (imax > 1e-10 * scale)
      throw hermiticity_error("matrix_to_symbol: Hermitian operator gave a complex symbol");
  }
  return PhaseGrid(spec, cs.values.real(), kind);
}

/// Wigner function of a density matrix given in position representation on a
/// symmetric square x grid.
inline PhaseGrid wigner_of_density(const Eigen::MatrixXcd& rho, GridSpec spec,
                                   double herm_tol = 1e-9) {
  double scale = std::max(1.0, rho.cwiseAbs().maxCoeff());
  if ((rho - rho.adjoint()).cwiseAbs().maxCoeff() > herm_tol * scale)
    throw hermiticity_error("wigner_of_density: kernel is not Hermitian");
  Eigen::MatrixXcd w = detail::symbol_from_kernel(rho, spec);
  double imax = w.imag().cwiseAbs().maxCoeff();
  if (imax > 1e-10 * std::max(1.0, w.real().cwiseAbs().maxCoeff()))
    throw hermiticity_error("wigner_of_density: Wigner samples came out complex");
  return PhaseGrid(spec, w.real(), GridKind::wigner);
}

/// Quadratic form Int psi*(x) W((x+x')/2, p) e^{i p (x-x')} psi(x') dp dx dx',
/// nonnegative for every normalized psi iff the symbol is a valid quantum
/// state; equals 2 pi <psi| A |psi> for the quantized operator A. psi is
/// sampled on the grid's q axis.
inline double positivity_functional(const PhaseGrid& w, const Eigen::VectorXd& psi,
                                    double norm_tol = 1e-3) {
  if (psi.size() != w.n_q())
    throw error("positivity_functional: psi must be sampled on the grid's q axis");
  PositionKernel kernel = kernel_from_symbol(w);
  const int nx = static_cast<int>(kernel.x.size());
  Eigen::VectorXd sub(nx), wq(nx);
  for (int i = 0; i < nx; ++i) {
    sub[i] = psi[2 * i];  // kernel axis = even-index subgrid of the q axis
    wq[i] = detail::trapezoid_weight(i, nx, kernel.spacing);
  }
  double nrm = sub.cwiseAbs2().dot(wq);
  if (std::abs(nrm - 1.0) > norm_tol)
    throw normalization_error("positivity_functional: psi not normalized", nrm);
  Eigen::VectorXcd pw = sub.cwiseProduct(wq).cast<Complex>();
  Complex val = two_pi * pw.adjoint() * (kernel.values * pw);
  return val.real();
}

/// Eigendecomposition of a Hermitian operator, eigenvalues ordered by
/// descending absolute value. The negative entries are the state's
/// negative-probability weights.
struct Spectrum {
  Eigen::VectorXd eigenvalues;
  Eigen::MatrixXcd eigenvectors;  // column k pairs with eigenvalues[k]
};

inline Spectrum spectral_decompose(const OperatorMatrix& a) {
  if (!a.hermitian) throw hermiticity_error("spectral_decompose: operator is not Hermitian");
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(a.entries);
  if (es.info() != Eigen::Success) throw error("spectral_decompose: eigensolver failed");
  const int d = a.dim;
  std::vector<int> order(d);
  for (int i = 0; i < d; ++i) order[i] = i;
  std::sort(order.begin(), order.end(), [&](int i, int j) {
    return std::abs(es.eigenvalues()[i]) > std::abs(es.eigenvalues()[j]);
  });
  Spectrum s;
  s.eigenvalues.resize(d);
  s.eigenvectors.resize(d, d);
  for (int k = 0; k < d; ++k) {
    s.eigenvalues[k] = es.eigenvalues()[order[k]];
    s.eigenvectors.col(k) = es.eigenvectors().col(order[k]);
  }
  return s;
}

/// L1 distance between a symbol and the reassembly of its quantization,
/// normalized by the symbol's own L1 mass. Large values flag basis
/// truncation.
inline double truncation_leakage(const PhaseGrid& g, const OperatorMatrix& op) {
  ComplexSymbol back = matrix_to_symbol_complex(op, g.spec());
  Eigen::MatrixXd ref = symbol_values(g);
  double num = 0.0, den = 0.0;
  for (int i = 0; i < g.n_q(); ++i) {
    double wi = detail::trapezoid_weight(i, g.n_q(), g.dq());
    for (int j = 0; j < g.n_p(); ++j) {
      double w = wi * detail::trapezoid_weight(j, g.n_p(), g.dp());
      num += w * std::abs(back.values(i, j) - ref(i, j));
      den += w * std::abs(ref(i, j));
    }
  }
  return den > 0.0 ? num / den : num;
}

// ---------------------------------------------------------------------------
// Star products

/// Integral kernel of the noncommutative product of Weyl symbols, with
/// (q3, p3) identified with the output point:
/// K = (1/pi^2) exp{2i [q1 (p2 - p) + q2 (p - p1) + q (p1 - p2)]}.
inline Complex moyal_kernel(double q1, double p1, double q2, double p2, double q, double p) {
  double phase = 2.0 * (q1 * (p2 - p) + q2 * (p - p1) + q * (p1 - p2));
  return std::polar(1.0 / (pi * pi), phase);
}

namespace detail {

/// Fourth-order central first derivative along rows (q axis), with replicated
/// end stencils. Exact for polynomials through degree 4.
inline Eigen::MatrixXcd d_dq(const Eigen::MatrixXcd& m, double h) {
  const int nq = static_cast<int>(m.rows());
  Eigen::MatrixXcd out(nq, m.cols());
  for (int i = 0; i < nq; ++i) {
    int c = std::clamp(i, 2, nq - 3);
    out.row(i) = (-m.row(c + 2) + 8.0 * m.row(c + 1) - 8.0 * m.row(c - 1) + m.row(c - 2)) /
                 (12.0 * h);
  }
  return out;
}

inline Eigen::MatrixXcd d_dp(const Eigen::MatrixXcd& m, double h) {
  const int np = static_cast<int>(m.cols());
  Eigen::MatrixXcd out(m.rows(), np);
  for (int j = 0; j < np; ++j) {
    int c = std::clamp(j, 2, np - 3);
    out.col(j) = (-m.col(c + 2) + 8.0 * m.col(c + 1) - 8.0 * m.col(c - 1) + m.col(c - 2)) /
                 (12.0 * h);
  }
  return out;
}

/// All mixed partials d^a_q d^b_p up to total order `order`, indexed [a][b].
inline std::vector<std::vector<Eigen::MatrixXcd>> mixed_partials(const Eigen::MatrixXcd& m,
                                                                 double dq, double dp,
                                                                 int order) {
  std::vector<std::vector<Eigen::MatrixXcd>> tab(order + 1);
  tab[0].push_back(m);
  for (int b = 1; b <= order; ++b) tab[0].push_back(d_dp(tab[0][b - 1], dp));
  for (int a = 1; a <= order; ++a) {
    tab[a].reserve(order - a + 1);
    for (int b = 0; b <= order - a; ++b) tab[a].push_back(d_dq(tab[a - 1][b], dq));
  }
  return tab;
}

}  // namespace detail

struct MoyalOptions {
  int order = 8;      // truncation order of the bidifferential series
  double hbar = 1.0;
};

namespace detail {

inline void require_same_window(const GridSpec& s, const GridSpec& t, const char* who) {
  if (s.q_min != t.q_min || s.q_max != t.q_max || s.p_min != t.p_min || s.p_max != t.p_max ||
      s.n_q != t.n_q || s.n_p != t.n_p)
    throw grid_mismatch_error(std::string(who) + ": operands live on different windows");
}

}  // namespace detail

/// Moyal star product of two sampled symbols, evaluated through the
/// bidifferential series
///   A * B = sum_n (i hbar / 2)^n / n! sum_k (-1)^k C(n,k)
///           (d_q^{n-k} d_p^k A) (d_q^k d_p^{n-k} B).
/// The series terminates for polynomial symbols, where the result is exact
/// up to the finite-difference degree, and converges for smooth symbols that
/// are broad on the scale of hbar. Equivalent to the integral-kernel form of
/// the product on that domain.
inline ComplexSymbol star_moyal(const ComplexSymbol& a, const ComplexSymbol& b,
                                MoyalOptions opt = {}) {
  detail::require_same_window(a.spec, b.spec, "star_moyal");
  const GridSpec& s = a.spec;
  double dq = (s.q_max - s.q_min) / (s.n_q - 1);
  double dp = (s.p_max - s.p_min) / (s.n_p - 1);
  auto da = detail::mixed_partials(a.values, dq, dp, opt.order);
  auto db = detail::mixed_partials(b.values, dq, dp, opt.order);

  Eigen::MatrixXcd acc = Eigen::MatrixXcd::Zero(s.n_q, s.n_p);
  Complex ih2(0.0, opt.hbar / 2.0);
  Complex pref(1.0, 0.0);
  double factorial = 1.0;
  for (int n = 0; n <= opt.order; ++n) {
    if (n > 0) {
      pref *= ih2;
      factorial *= n;
    }
    double binom = 1.0;
    for (int k = 0; k <= n; ++k) {
      double sign = (k % 2 == 0) ? 1.0 : -1.0;
      acc += (pref * sign * binom / factorial) *
             da[n - k][k].cwiseProduct(db[k][n - k]);
      binom = binom * (n - k) / (k + 1.0);
    }
  }
  return ComplexSymbol{s, std::move(acc)};
}

inline ComplexSymbol as_complex_symbol(const PhaseGrid& g) {
  return ComplexSymbol{g.spec(), symbol_values(g).cast<Complex>()};
}

inline ComplexSymbol star_moyal(const PhaseGrid& a, const PhaseGrid& b, MoyalOptions opt = {}) {
  return star_moyal(as_complex_symbol(a), as_complex_symbol(b), opt);
}

/// Star product through the truncated-basis operator route: quantize both
/// symbols, multiply the matrices, map back. Reliable for integrable symbols
/// concentrated well inside the window; basis truncation distorts unbounded
/// symbols such as bare polynomials.
inline ComplexSymbol star_moyal_via_operators(const PhaseGrid& a, const PhaseGrid& b, int dim) {
  OperatorMatrix ma = symbol_to_matrix(a, dim);
  OperatorMatrix mb = symbol_to_matrix(b, dim);
  OperatorMatrix prod = OperatorMatrix::from(ma.entries * mb.entries);
  return matrix_to_symbol_complex(prod, a.spec());
}

/// Commutative star product of classical observables: the operator whose
/// Weyl symbol is the pointwise product of the operand symbols.
inline OperatorMatrix star_classical(const PhaseGrid& a, const PhaseGrid& b, int dim) {
  detail::require_same_window(a.spec(), b.spec(), "star_classical");
  Eigen::MatrixXd prod = symbol_values(a).cwiseProduct(symbol_values(b));
  return symbol_to_matrix(PhaseGrid(a.spec(), std::move(prod), GridKind::observable), dim);
}

inline OperatorMatrix star_classical(const OperatorMatrix& a, const OperatorMatrix& b,
                                     GridSpec spec) {
  PhaseGrid wa = matrix_to_symbol(a, spec);
  PhaseGrid wb = matrix_to_symbol(b, spec);
  return star_classical(wa, wb, std::max(a.dim, b.dim));
}

// ---------------------------------------------------------------------------
// Reference states

/// Wigner function of the n-th oscillator number state at the given Planck
/// parameter, in the 2 pi f storage convention: the stored samples integrate
/// to 2 pi over phase space.
inline PhaseGrid fock_wigner_grid(int n, GridSpec spec, double hbar = 1.0) {
  if (n < 0) throw error("fock_wigner_grid: level must be nonnegative");
  if (hbar <= 0.0) throw error("fock_wigner_grid: hbar must be positive");
  Eigen::MatrixXd v(spec.n_q, spec.n_p);
  double dq = (spec.q_max - spec.q_min) / (spec.n_q - 1);
  double dp = (spec.p_max - spec.p_min) / (spec.n_p - 1);
  double sign = (n % 2 == 0) ? 2.0 : -2.0;
  for (int i = 0; i < spec.n_q; ++i) {
    double q = spec.q_min + i * dq;
    for (int j = 0; j < spec.n_p; ++j) {
      double p = spec.p_min + j * dp;
      double y = (q * q + p * p) / hbar;
      double l2 = 1.0, l1 = 1.0 - 2.0 * y;  // Laguerre L_0, L_1 at 2y
      double l = (n == 0) ? l2 : l1;
      for (int k = 2; k <= n; ++k) {
        double lk = ((2.0 * k - 1.0 - 2.0 * y) * l1 - (k - 1.0) * l2) / k;
        l2 = l1;
        l1 = lk;
        l = lk;
      }
      v(i, j) = sign * l * std::exp(-y) / hbar;
    }
  }
  return PhaseGrid(spec, std::move(v), GridKind::wigner);
}

/// Position-representation projector kernel of the n-th number state.
inline Eigen::MatrixXcd fock_density_kernel(int n, const Eigen::VectorXd& x) {
  Eigen::MatrixXd psi = hermite_functions(n + 1, x);
  Eigen::VectorXd pn = psi.row(n);
  return (pn * pn.transpose()).cast<Complex>();
}

}  // namespace tomokit
