#include <catch2/catch.hpp>
#include <random>

#include "test_helpers.hpp"
#include "tomokit/scaling.hpp"

using namespace tomokit;
using Catch::Detail::Approx;

TEST_CASE("scale_density basics") {
  GridSpec spec = GridSpec::standard();
  auto g = make_gaussian_grid(GaussianState::vacuum(), spec);

  SECTION("unit parameters are the identity") {
    auto s = scale_density(g, ScaleParams(1.0, 1.0));
    CHECK((s.values() - g.values()).cwiseAbs().maxCoeff() < 1e-12);
  }
  SECTION("(-1, -1) is the full inversion f(-q, -p)") {
    auto state = GaussianState::single_mode(0.5, 0.5, 0.0, 1.0, -0.5);
    auto h = make_gaussian_grid(state, spec);
    auto s = scale_density(h, ScaleParams(-1.0, -1.0));
    auto inv = reflect_time(reflect_parity(h));
    CHECK((s.values() - inv.values()).cwiseAbs().maxCoeff() < 1e-9);
  }
  SECTION("variances divide by lambda^2") {
    auto s = scale_density(g, ScaleParams(2.0, 1.0));
    Moments m = moments_of_grid(s, 1e-3);
    CHECK(m.sigma_qq() == Approx(1.0 / 8.0).margin(1e-3));
    CHECK(m.sigma_pp() == Approx(1.0 / 2.0).margin(1e-3));
  }
  SECTION("mass pushed outside the window raises a truncation error") {
    CHECK_THROWS_AS(scale_density(g, ScaleParams(0.1, 0.1)), truncation_error);
  }
}

TEST_CASE("scale_moments is the exact arithmetic transform") {
  SECTION("isotropic contraction") {
    Moments m = Moments::single_mode(0.5, 0.5, 0.0);
    Moments s = scale_moments(m, ScaleParams(2.0, 2.0));
    CHECK(s.sigma_qq() == Approx(1.0 / 8.0));
    CHECK(s.sigma_pp() == Approx(1.0 / 8.0));
    CHECK(s.d == Approx(1.0 / 64.0));
    CHECK(s.t == Approx(0.25));
  }
  SECTION("sign flips cancel in second moments") {
    Moments m = Moments::single_mode(0.7, 1.1, 0.2, 0.4, -0.6);
    Moments s = scale_moments(m, ScaleParams(-1.0, -1.0));
    CHECK(s.sigma == m.sigma);
    CHECK(s.mean[0] == Approx(-0.4));
    CHECK(s.mean[1] == Approx(0.6));
  }
  SECTION("covariance picks up 1/(lambda_q lambda_p)") {
    Moments m = Moments::single_mode(1.0, 1.0, 0.2);
    Moments s = scale_moments(m, ScaleParams(2.0, 5.0));
    CHECK(s.sigma_qp() == Approx(0.02));
  }
}

TEST_CASE("scale_moments is an exact group action") {
  std::mt19937 rng(29);
  std::uniform_real_distribution<double> lam(0.3, 2.5);
  std::bernoulli_distribution flip(0.5);
  for (int it = 0; it < 200; ++it) {
    Eigen::Matrix2d s = test_helpers::random_sigma(rng);
    Moments m = Moments::single_mode(s(0, 0), s(1, 1), s(0, 1), 0.3, -0.2);
    auto draw = [&] {
      return ScaleParams((flip(rng) ? -1 : 1) * lam(rng), (flip(rng) ? -1 : 1) * lam(rng));
    };
    ScaleParams s1 = draw(), s2 = draw();
    Moments seq = scale_moments(scale_moments(m, s1), s2);
    Moments combined = scale_moments(m, s1.compose(s2));
    double scale = 1.0 + combined.sigma.cwiseAbs().maxCoeff();
    CHECK((seq.sigma - combined.sigma).cwiseAbs().maxCoeff() < 1e-14 * scale);
    CHECK((seq.mean - combined.mean).cwiseAbs().maxCoeff() < 1e-14 * scale);
  }
}

TEST_CASE("determinant identity d_s |lambda_q lambda_p|^2 = d holds to machine precision") {
  std::mt19937 rng(31);
  std::uniform_real_distribution<double> lam(0.2, 4.0);
  std::bernoulli_distribution flip(0.5);
  for (int it = 0; it < 1000; ++it) {
    Eigen::Matrix2d s = test_helpers::random_sigma(rng);
    Moments m = Moments::single_mode(s(0, 0), s(1, 1), s(0, 1));
    ScaleParams sp((flip(rng) ? -1 : 1) * lam(rng), (flip(rng) ? -1 : 1) * lam(rng));
    Moments ms = scale_moments(m, sp);
    double prod = sp.mode_product(0);
    CHECK(ms.d * prod * prod == Approx(m.d).epsilon(1e-12));
  }
}

TEST_CASE("two-parameter group law on densities within interpolation tolerance") {
  GridSpec spec = GridSpec::symmetric(8, 8, 512, 512);
  auto g = make_gaussian_grid(GaussianState::vacuum(), spec);
  ScaleParams s1(1.25, 1.1), s2(1.1, 1.25);
  auto seq = scale_density(scale_density(g, s1), s2);
  auto combined = scale_density(g, s1.compose(s2));
  CHECK((seq.values() - combined.values()).cwiseAbs().maxCoeff() < 1e-3);
}

TEST_CASE("scale_tomogram remaps frames only") {
  auto state = GaussianState::single_mode(0.5, 0.5, 0.0);

  SECTION("identity") {
    Tomogram t = analytic_tomogram(state);
    Tomogram s = scale_tomogram(t, ScaleParams(1.0, 1.0));
    CHECK(s.mean_var(Frame(1, 0)).second == Approx(0.5));
  }
  SECTION("analytic remap reproduces the scaled quadratic form") {
    Tomogram t = analytic_tomogram(state);
    Tomogram s = scale_tomogram(t, ScaleParams(2.0, 1.0));
    // sigma_XX at (1,0) after scaling equals sigma_XX(1/2, 0) = sigma_qq / 4
    CHECK(s.mean_var(Frame(1, 0)).second == Approx(0.5 / 4.0));
    CHECK(s.mean_var(Frame(0, 1)).second == Approx(0.5));
  }
  SECTION("sampled values are untouched, frames relabeled") {
    auto g = make_gaussian_grid(state, GridSpec::standard());
    Tomogram t = tomogram_of_grid(g, {Frame(1, 0), Frame(0, 1)});
    Tomogram s = scale_tomogram(t, ScaleParams(2.0, 3.0));
    CHECK(s.sampled().frames[0].mu == Approx(2.0));
    CHECK(s.sampled().frames[1].nu == Approx(3.0));
    CHECK((s.sampled().values - t.sampled().values).cwiseAbs().maxCoeff() == 0.0);
  }
  SECTION("grid oracle: scaled density's tomogram agrees at the remapped frame") {
    auto g = make_gaussian_grid(state, GridSpec::standard());
    auto gs = scale_density(g, ScaleParams(2.0, 1.0));
    Tomogram direct = tomogram_of_grid(gs, {Frame(1, 0)});
    auto [mean, var] = direct.sampled().slice_mean_var(0);
    CHECK(var == Approx(0.125).margin(2e-3));
  }
}

TEST_CASE("commuting square: scaling then tomography equals tomography then remap") {
  GridSpec spec = GridSpec::symmetric(8, 8, 512, 512);
  auto g = make_gaussian_grid(GaussianState::single_mode(0.6, 0.8, 0.15), spec);
  ScaleParams s(2.0, 1.25);
  // angles chosen so neither the base nor the remapped frames hug an axis,
  // where binned slices pick up lattice-projection noise
  std::vector<Frame> frames;
  for (double th : {0.5, 0.8, 1.1, 1.3, 2.0, 2.4})
    frames.emplace_back(std::cos(th), std::sin(th));
  Tomogram via_remap = scale_tomogram(tomogram_of_grid(g, frames, 512), s);
  std::vector<Frame> remapped = via_remap.sampled().frames;
  Tomogram direct = tomogram_of_grid(scale_density(g, s), remapped, 512);

  double worst = 0.0;
  const auto& a = via_remap.sampled();
  const auto& b = direct.sampled();
  for (size_t m = 0; m < remapped.size(); ++m) {
    for (int k = 0; k < a.n_x; ++k) {
      double x = a.x_at(k);
      if (std::abs(x) > 0.9 * std::abs(b.x_max)) continue;
      worst = std::max(worst, std::abs(a.values(static_cast<int>(m), k) -
                                       b.value(static_cast<int>(m), x)));
    }
  }
  CHECK(worst < 1e-3);
}

TEST_CASE("classify_scaling separates the group from the semigroup") {
  Moments vacuum = Moments::single_mode(0.5, 0.5, 0.0);

  SECTION("identity parameters saturate") {
    auto v = classify_scaling(vacuum, ScaleParams(1.0, 1.0), 1.0);
    CHECK(v.classical_admissible);
    CHECK(v.quantum_admissible_for_state);
    CHECK(v.universal_quantum_admissible);
    CHECK(std::abs(v.margin) < 1e-15);
  }
  SECTION("contraction breaks the vacuum") {
    auto v = classify_scaling(vacuum, ScaleParams(2.0, 2.0), 1.0);
    CHECK(v.classical_admissible);
    CHECK_FALSE(v.quantum_admissible_for_state);
    CHECK_FALSE(v.universal_quantum_admissible);
    CHECK(v.margin == Approx(-15.0 / 64.0).margin(1e-12));
  }
  SECTION("a hot state survives the same contraction, not universally") {
    Moments thermal = Moments::single_mode(5.0, 5.0, 0.0);
    auto v = classify_scaling(thermal, ScaleParams(2.0, 2.0), 1.0);
    CHECK(v.quantum_admissible_for_state);
    CHECK_FALSE(v.universal_quantum_admissible);
    CHECK(v.margin == Approx(25.0 / 16.0 - 0.25).margin(1e-12));
  }
  SECTION("unit parameters reproduce the plain uncertainty verdict") {
    std::mt19937 rng(37);
    std::uniform_real_distribution<double> scale(0.05, 2.0);
    for (int it = 0; it < 100; ++it) {
      Eigen::Matrix2d s = scale(rng) * test_helpers::random_sigma(rng);
      Moments m = Moments::single_mode(s(0, 0), s(1, 1), s(0, 1));
      auto v = classify_scaling(m, ScaleParams::identity(), 1.0);
      CHECK(v.quantum_admissible_for_state == check(m, 1.0).passes);
    }
  }
}

TEST_CASE("semigroup closure of universally admissible parameters") {
  Moments vacuum = Moments::single_mode(0.5, 0.5, 0.0);
  std::mt19937 rng(41);
  std::uniform_real_distribution<double> lq(0.3, 1.8), u(0.05, 1.0);
  std::bernoulli_distribution flip(0.5);
  for (int it = 0; it < 1000; ++it) {
    auto draw = [&] {
      double a = (flip(rng) ? -1 : 1) * lq(rng);
      double b = (flip(rng) ? -1 : 1) * u(rng) / std::abs(a);
      return ScaleParams(a, b);
    };
    ScaleParams s1 = draw(), s2 = draw();
    REQUIRE(classify_scaling(vacuum, s1, 1.0).universal_quantum_admissible);
    REQUIRE(classify_scaling(vacuum, s2, 1.0).universal_quantum_admissible);
    CHECK(classify_scaling(vacuum, s1.compose(s2), 1.0).universal_quantum_admissible);
  }
}

TEST_CASE("quantum cross boundary") {
  SECTION("at hbar = 1 the branches satisfy lambda_p = +/- 1 / lambda_q") {
    CrossBoundary cb = quantum_cross(1.0, 33);
    for (const auto& branch : cb.quantum_branches) {
      REQUIRE(branch.size() == 33);
      for (auto [lq, lp] : branch)
        CHECK(std::abs(std::abs(lq * lp) - 1.0) < 1e-12);
    }
  }
  SECTION("the boundary constant shrinks proportionally to hbar") {
    for (double h : {1.0, 0.1, 0.01}) {
      CrossBoundary cb = quantum_cross(h, 9);
      CHECK(cb.boundary_constant == Approx(h));
      for (const auto& branch : cb.quantum_branches)
        for (auto [lq, lp] : branch)
          CHECK(std::abs(std::abs(lq * lp) - h) < 1e-12);
    }
  }
  SECTION("the classical cross is the degenerate pair of axes") {
    CrossBoundary cb = quantum_cross(1.0, 9);
    for (auto [lq, lp] : cb.classical_axes[0]) CHECK(lp == 0.0);
    for (auto [lq, lp] : cb.classical_axes[1]) CHECK(lq == 0.0);
  }
  SECTION("parameter validation") {
    CHECK_THROWS_AS(quantum_cross(0.0, 9), error);
    CHECK_THROWS_AS(quantum_cross(1.0, 1), error);
  }
}
