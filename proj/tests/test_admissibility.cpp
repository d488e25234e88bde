#include <catch2/catch.hpp>

#include "tomokit/admissibility.hpp"

using namespace tomokit;
using Catch::Detail::Approx;

namespace {

ClassifyOptions fast_opts() {
  ClassifyOptions o;
  o.grid_n = 193;
  o.dim = 48;
  return o;
}

}  // namespace

TEST_CASE("the vacuum lies in both state sets") {
  auto rep = classify_state(GaussianState::vacuum(), 1.0, fast_opts());
  CHECK(rep.classical_admissible);
  CHECK(rep.quantum_admissible);
  CHECK(rep.quadrant == Quadrant::both);
  CHECK(rep.uncertainty_verdict.passes);
  CHECK(rep.min_symbol_value >= 0.0);
  CHECK(rep.operator_trace == Approx(1.0).margin(1e-6));
}

TEST_CASE("a squeezed classical Gaussian is classical-only") {
  auto rep = classify_state(GaussianState::single_mode(0.1, 0.1, 0.0), 1.0);
  CHECK(rep.classical_admissible);
  CHECK_FALSE(rep.quantum_admissible);
  CHECK(rep.quadrant == Quadrant::classical_only);
  CHECK_FALSE(rep.uncertainty_verdict.passes);
  CHECK(rep.min_eigenvalue == Approx(-10.0 / 9.0).margin(1e-3));
}

TEST_CASE("the first excited state is quantum-only") {
  GridSpec spec = GridSpec::symmetric(8, 8, 257, 257);
  auto rep = classify_state(fock_wigner_grid(1, spec), 1.0);
  CHECK_FALSE(rep.classical_admissible);
  CHECK(rep.quantum_admissible);
  CHECK(rep.quadrant == Quadrant::quantum_only);
  CHECK(rep.min_symbol_value == Approx(-1.0 / pi).margin(1e-6));
  CHECK(rep.min_eigenvalue > -1e-9);
}

TEST_CASE("scaling the first excited state out of admissibility lands in neither") {
  GridSpec spec = GridSpec::standard();
  PhaseGrid w = fock_wigner_grid(1, spec);
  PhaseGrid scaled = scale_density(w, ScaleParams(3.0, 3.0));
  auto rep = classify_state(scaled, 1.0);
  CHECK_FALSE(rep.classical_admissible);
  CHECK_FALSE(rep.quantum_admissible);
  CHECK(rep.quadrant == Quadrant::neither);
  Moments m = moments_of_grid(scaled, 1e-3);
  CHECK(m.d == Approx(1.0 / 36.0).margin(1e-3));
}

TEST_CASE("a mildly squeezed Gaussian becomes quantum admissible as hbar decreases") {
  auto state = GaussianState::single_mode(0.4, 0.4, 0.0);  // d = 0.16
  auto at1 = classify_state(state, 1.0, fast_opts());
  CHECK(at1.quadrant == Quadrant::classical_only);
  auto at_half = classify_state(state, 0.5, fast_opts());  // bound d >= 0.0625
  CHECK(at_half.quadrant == Quadrant::both);
}

TEST_CASE("every classified state lands in exactly one quadrant") {
  std::vector<AdmissibilityReport> reps;
  reps.push_back(classify_state(GaussianState::vacuum(), 1.0, fast_opts()));
  reps.push_back(classify_state(GaussianState::single_mode(0.1, 0.1, 0.0), 1.0, fast_opts()));
  reps.push_back(classify_state(fock_wigner_grid(1, GridSpec::standard()), 1.0, fast_opts()));
  for (const auto& r : reps) {
    int memberships = (r.classical_admissible ? 1 : 0) + (r.quantum_admissible ? 1 : 0);
    switch (r.quadrant) {
      case Quadrant::both: CHECK(memberships == 2); break;
      case Quadrant::neither: CHECK(memberships == 0); break;
      default: CHECK(memberships == 1); break;
    }
    if (r.quantum_admissible) CHECK(r.uncertainty_verdict.passes);
  }
}

TEST_CASE("factorized hybrid states") {
  Tomogram vac = analytic_tomogram(GaussianState::vacuum());
  Tomogram squeezed = analytic_tomogram(GaussianState::single_mode(0.1, 0.1, 0.0));

  SECTION("vacuum (x) squeezed classical is a valid hybrid") {
    HybridState h = hybrid_factorized(vac, squeezed, 1.0);
    Frame f1(1, 0), f2(0.6, 0.8);
    CHECK(h.normalization(f1, f2) == Approx(1.0).margin(1e-10));
    // marginalizing out the classical coordinate returns the quantum slice
    for (double x : {-1.0, 0.0, 0.7}) {
      double marg = h.marginal_over_classical(f1, x, f2);
      CHECK(marg == Approx(vac.analytic().value(f1, x)).margin(1e-10));
    }
  }
  SECTION("the combined tomogram factorizes") {
    HybridState h = hybrid_factorized(vac, squeezed, 1.0);
    Frame f1(0.8, -0.6), f2(1, 0);
    double v = h.combined(f1, 0.3, f2, -0.1);
    CHECK(v == Approx(vac.analytic().value(f1, 0.3) *
                      squeezed.analytic().value(f2, -0.1)));
  }
  SECTION("an uncertainty violator is rejected from the quantum slot") {
    CHECK_THROWS_AS(hybrid_factorized(squeezed, vac, 1.0), admissibility_error);
  }
  SECTION("a non-normalized classical slot is rejected") {
    auto g = make_gaussian_grid(GaussianState::vacuum(), GridSpec::standard());
    Tomogram t = tomogram_of_grid(g, {Frame(1, 0)});
    t.sampled().values *= 1.1;
    CHECK_THROWS_AS(hybrid_factorized(vac, t, 1.0), error);
  }
  SECTION("vacuum (x) vacuum matches the two-mode product state") {
    HybridState h = hybrid_factorized(vac, vac, 1.0);
    Eigen::VectorXd mean = Eigen::VectorXd::Zero(4);
    Eigen::MatrixXd sigma = 0.5 * Eigen::MatrixXd::Identity(4, 4);
    GaussianState two(2, mean, sigma);
    std::vector<Frame> per_mode = {Frame(1, 0), Frame(0, 1)};
    auto [mx, cov] = tomogram_of_gaussian_multimode(two, per_mode);
    double direct = h.combined(per_mode[0], 0.4, per_mode[1], -0.2);
    double ref = std::exp(-0.5 * (0.4 * 0.4 / cov(0, 0) + 0.2 * 0.2 / cov(1, 1))) /
                 (two_pi * std::sqrt(cov(0, 0) * cov(1, 1)));
    CHECK(direct == Approx(ref).margin(1e-12));
  }
}

TEST_CASE("hybrid density operator is the Kronecker product with product spectrum") {
  GridSpec spec = GridSpec::standard();
  auto wq = make_gaussian_grid(GaussianState::vacuum(), spec, GridKind::wigner);
  auto fcl = make_gaussian_grid(GaussianState::single_mode(0.1, 0.1, 0.0),
                                GridSpec::symmetric(4, 4, 257, 257));
  OperatorMatrix rq = symbol_to_matrix(wq, 8);
  OperatorMatrix rcl = symbol_to_matrix(fcl, 8);
  OperatorMatrix rho = hybrid_density_operator(rq, rcl);
  CHECK(rho.dim == 64);
  CHECK(rho.trace.real() == Approx(rq.trace.real() * rcl.trace.real()).margin(1e-9));
  Spectrum s = spectral_decompose(rho);
  // the classical slot's negativity survives in the combined operator
  CHECK(s.eigenvalues.minCoeff() < -1.0);
  CHECK(s.eigenvalues[0] == Approx(5.0 / 3.0).margin(1e-3));
}

TEST_CASE("non-limit demonstration finds both witnesses at every hbar") {
  NonlimitReport rep = nonlimit_demonstration({1.0, 0.1, 0.01}, fast_opts());
  REQUIRE(rep.rows.size() == 3);
  for (const auto& row : rep.rows) {
    CHECK(row.classical_only_verified);
    CHECK(row.quantum_only_verified);
    CHECK(row.classical_witness.min_eigenvalue < 0.0);
    CHECK(row.quantum_witness.min_symbol_value < 0.0);
    CHECK(row.quantum_witness.min_eigenvalue > -1e-9);
  }
  CHECK(rep.sets_never_coincide);

  CHECK_THROWS_AS(nonlimit_demonstration({}), error);
  CHECK_THROWS_AS(nonlimit_demonstration({0.1, 1.0}), error);
  CHECK_THROWS_AS(nonlimit_demonstration({1.0, -0.5}), error);
}

TEST_CASE("group versus semigroup report") {
  Moments vacuum = Moments::single_mode(0.5, 0.5, 0.0);
  std::vector<ScaleParams> params = {
      ScaleParams(1.0, 1.0), ScaleParams(2.0, 2.0), ScaleParams(0.5, 0.5),
      ScaleParams(-1.0, 1.0), ScaleParams(4.0, 0.2)};
  GroupSemigroupReport rep = group_vs_semigroup_report(vacuum, 1.0, params);
  REQUIRE(rep.rows.size() == params.size());
  CHECK(rep.classical_admissible_count == 5);
  CHECK(rep.rows[0].verdict.quantum_admissible_for_state);  // identity
  CHECK_FALSE(rep.rows[1].verdict.quantum_admissible_for_state);  // |ll| = 4
  CHECK(rep.rows[1].inside_cross);
  CHECK(rep.rows[2].verdict.quantum_admissible_for_state);  // |ll| = 1/4
  CHECK(rep.rows[2].verdict.universal_quantum_admissible);
  CHECK(rep.rows[3].verdict.universal_quantum_admissible);
  CHECK(rep.quantum_admissible_count == 4);
}
