#include <cmath>
#include <random>

#include <Eigen/Dense>

#include "catch_amalgamated.hpp"
#include "srcdisc/discrimination.hpp"

using namespace srcdisc;

namespace {

// Eigenvalue-sign forbidden test straight on Omega, independent of the
// closed-form certificate.
bool eigen_sign_forbidden(const ScenarioParams& params) {
  const auto pair = build_states(params);
  const Eigen::MatrixXd omega = params.p2() * pair.rho2.mat - params.p1 * pair.rho1.mat;
  const Eigen::VectorXd ev = symmetric_eigenvalues(omega);
  return ev.minCoeff() >= -kSignTol || ev.maxCoeff() <= kSignTol;
}

}  // namespace

TEST_CASE("trace_norm_symmetric basics") {
  CHECK(trace_norm_symmetric(Eigen::MatrixXd::Identity(2, 2)) == Catch::Approx(2.0));
  Eigen::MatrixXd d = Eigen::MatrixXd::Zero(2, 2);
  d(0, 0) = 0.5;
  d(1, 1) = -0.5;
  CHECK(trace_norm_symmetric(d) == Catch::Approx(1.0));

  // Orthogonal-sources limit at equal priors and weights: Omega is
  // diag(q-1, 1-q)/2 with eigenvalues -0.25 and 0.25.
  const auto pair = build_states({Scenario::Asymmetric, 60.0, 0.5, 0.5});
  const Eigen::MatrixXd omega = 0.5 * pair.rho2.mat - 0.5 * pair.rho1.mat;
  CHECK(trace_norm_symmetric(omega) == Catch::Approx(0.5).margin(1e-12));

  Eigen::MatrixXd bad(2, 2);
  bad << 0.0, 1.0, 0.0, 0.0;
  CHECK_THROWS_AS(trace_norm_symmetric(bad), std::invalid_argument);
  Eigen::MatrixXd nonfinite = Eigen::MatrixXd::Constant(2, 2, std::nan(""));
  CHECK_THROWS_AS(trace_norm_symmetric(nonfinite), std::invalid_argument);
}

TEST_CASE("direct_guess") {
  CHECK(direct_guess(0.5) == 0.5);
  CHECK(direct_guess(0.3) == Catch::Approx(0.3));
  CHECK(direct_guess(1.0) == 0.0);
  CHECK_THROWS_AS(direct_guess(1.2), std::invalid_argument);
  CHECK_THROWS_AS(direct_guess(-0.1), std::invalid_argument);
}

TEST_CASE("helstrom_one_shot reference points") {
  // Identical states: the trace norm collapses to |P2 - P1|.
  for (Scenario kind : {Scenario::Asymmetric, Scenario::Symmetric}) {
    const auto rep = helstrom_one_shot({kind, 0.0, 0.4, 0.3});
    CHECK(rep.e_min == Catch::Approx(0.3).margin(1e-12));
    CHECK(rep.e_guess == Catch::Approx(0.3).margin(1e-15));
    CHECK(rep.forbidden);
  }

  // Orthogonal sources at equal priors and weights.
  const auto far = helstrom_one_shot({Scenario::Asymmetric, 60.0, 0.5, 0.5});
  CHECK(far.e_min == Catch::Approx(0.25).margin(1e-12));
  CHECK_FALSE(far.forbidden);

  // Inside the closed-form forbidden region (p1 < q/(1+q) = 1/3) the bound
  // equals direct guessing at every separation.
  for (double k : {0.3, 1.0, 2.0, 5.0}) {
    const auto rep = helstrom_one_shot({Scenario::Asymmetric, k, 0.5, 0.2});
    CHECK(rep.e_min == Catch::Approx(0.2).margin(1e-12));
    CHECK(rep.forbidden);
    CHECK(rep.advantage == Catch::Approx(1.0).margin(1e-10));
  }
}

TEST_CASE("bound report internal consistency") {
  std::mt19937_64 rng(23);
  std::uniform_real_distribution<double> uk(0.0, 5.0);
  std::uniform_real_distribution<double> u01(0.0, 1.0);
  for (int i = 0; i < 300; ++i) {
    const Scenario kind = (i % 2 == 0) ? Scenario::Asymmetric : Scenario::Symmetric;
    const ScenarioParams params{kind, uk(rng), u01(rng), u01(rng)};
    const auto rep = helstrom_one_shot(params);
    CAPTURE(params.k, params.q, params.p1, static_cast<int>(kind));

    CHECK(rep.e_min <= rep.e_guess + 1e-12);
    double abs_sum = 0.0;
    for (std::size_t j = 0; j < rep.spectrum.size(); ++j) {
      abs_sum += rep.multiplicity[j] * std::abs(rep.spectrum[j]);
      if (j) CHECK(rep.spectrum[j] <= rep.spectrum[j - 1]);
    }
    CHECK(rep.e_min == Catch::Approx(0.5 * (1.0 - abs_sum)).margin(1e-12));
    const bool one_sign = rep.spectrum.back() >= -kSignTol ||
                          rep.spectrum.front() <= kSignTol;
    CHECK(rep.forbidden == one_sign);
    CHECK(rep.advantage >= 1.0 - 1e-10);

    // Relabeling symmetry: swapping the hypotheses and the prior flips the
    // sign of Omega, which cannot change the trace norm.
    const auto pair = build_states(params);
    const Eigen::MatrixXd omega =
        params.p2() * pair.rho2.mat - params.p1 * pair.rho1.mat;
    const Eigen::MatrixXd swapped = -omega;
    CHECK(trace_norm_symmetric(omega) ==
          Catch::Approx(trace_norm_symmetric(swapped)).margin(1e-13));
  }
}

TEST_CASE("asymmetric forbidden certificate matches the eigenvalue test") {
  CHECK(certify_forbidden_asymmetric({Scenario::Asymmetric, 1.0, 0.5, 0.33}));
  CHECK_FALSE(certify_forbidden_asymmetric({Scenario::Asymmetric, 1.0, 0.5, 0.34}));
  // q = 0: the threshold is 0, so no p1 > 0 is forbidden.
  CHECK_FALSE(certify_forbidden_asymmetric({Scenario::Asymmetric, 1.0, 0.0, 0.01}));
  CHECK_THROWS_AS(certify_forbidden_asymmetric({Scenario::Symmetric, 1.0, 0.5, 0.5}),
                  std::invalid_argument);

  // Dense random agreement sweep.
  std::mt19937_64 rng(29);
  std::uniform_real_distribution<double> uk(0.01, 5.0);
  std::uniform_real_distribution<double> u01(0.001, 0.999);
  int checked = 0;
  for (int i = 0; i < 10000; ++i) {
    const ScenarioParams params{Scenario::Asymmetric, uk(rng), u01(rng), u01(rng)};
    // Keep clear of the degenerate boundary where the tie convention rules.
    if (std::abs(params.p1 - params.q / (1 + params.q)) < 1e-6) continue;
    CAPTURE(params.k, params.q, params.p1);
    REQUIRE(certify_forbidden_asymmetric(params) == eigen_sign_forbidden(params));
    ++checked;
  }
  CHECK(checked > 9900);
}

TEST_CASE("sign flip of the smallest eigenvalue at the q = 0.9 threshold") {
  const double threshold = 0.9 / 1.9;
  const ScenarioParams base{Scenario::Asymmetric, 1.0, 0.9, 0.5};
  double last_forbidden = 0.0;
  for (int i = -500; i <= 500; ++i) {
    ScenarioParams params = base;
    params.p1 = threshold + i * 1e-4;
    if (eigen_sign_forbidden(params)) last_forbidden = params.p1;
  }
  CHECK(std::abs(last_forbidden - threshold) <= 1e-4 + 1e-12);
}

TEST_CASE("symmetric scenario certifies no forbidden region") {
  const double single_k[] = {1.0};
  const double single_q[] = {0.5};
  const double single_p[] = {0.5};
  const auto one = certify_no_forbidden_symmetric(single_k, single_q, single_p);
  CHECK(one.max_det < 0.0);
  CHECK(one.clean());

  // Coincident-source limit: Omega goes rank-deficient and det tends to 0
  // from below.
  const double tiny_k[] = {1e-3};
  const auto tiny = certify_no_forbidden_symmetric(tiny_k, single_q, single_p);
  CHECK(tiny.max_det < 0.0);
  CHECK(tiny.max_det > -1e-6);

  std::vector<double> ks, qs, ps;
  for (int i = 0; i < 12; ++i) ks.push_back(0.1 + 4.9 * i / 11.0);
  for (int i = 0; i < 12; ++i) qs.push_back(0.01 + 0.98 * i / 11.0);
  for (int i = 0; i < 12; ++i) ps.push_back(0.01 + 0.98 * i / 11.0);
  const auto grid = certify_no_forbidden_symmetric(ks, qs, ps);
  CHECK(grid.clean());
  CHECK(grid.total_points == 12 * 12 * 12);

  CHECK_THROWS_AS(certify_no_forbidden_symmetric({}, single_q, single_p),
                  std::invalid_argument);
}

TEST_CASE("advantage sweep: threshold claims and monotonicity in k") {
  // q = 0.9 asymmetric, sub-Rayleigh grid: advantage stays under 5%.
  std::vector<ScenarioParams> grid;
  for (int i = 0; i < 20; ++i)
    for (int j = 1; j < 20; ++j)
      grid.push_back({Scenario::Asymmetric, 0.02 + 0.98 * i / 19.0, 0.9, j / 20.0});
  for (const auto& pt : advantage_sweep(grid, 2)) {
    if (!pt.bound.forbidden) CHECK(pt.bound.advantage < 1.05);
  }

  // Tiny separation: negligible advantage in both scenarios.
  grid.clear();
  for (int i = 1; i < 25; ++i)
    for (int j = 1; j < 25; ++j)
      grid.push_back({Scenario::Asymmetric, 0.01, i / 25.0, j / 25.0});
  for (const auto& pt : advantage_sweep(grid, 2))
    CHECK(pt.bound.advantage < 1.005);

  grid.clear();
  for (int i = 1; i < 25; ++i)
    for (int j = 1; j < 25; ++j)
      grid.push_back({Scenario::Symmetric, 0.01, i / 25.0, j / 25.0});
  for (const auto& pt : advantage_sweep(grid, 2))
    CHECK(pt.bound.advantage < 1.0025);

  // Advantage is non-decreasing in k at fixed (q, p1).
  for (Scenario kind : {Scenario::Asymmetric, Scenario::Symmetric}) {
    for (double p1 : {0.45, 0.6, 0.8}) {
      double previous = 0.0;
      for (int i = 1; i <= 40; ++i) {
        const auto rep = helstrom_one_shot({kind, 0.1 * i, 0.5, p1});
        CHECK(rep.advantage >= previous - 1e-9);
        previous = rep.advantage;
      }
    }
  }
}

TEST_CASE("advantage sweep determinism across worker counts") {
  std::vector<ScenarioParams> grid;
  for (int i = 0; i < 8; ++i)
    for (int j = 1; j < 8; ++j)
      grid.push_back({Scenario::Symmetric, 0.2 + i * 0.3, 0.35, j / 8.0});
  const auto a = advantage_sweep(grid, 1);
  const auto b = advantage_sweep(grid, 4);
  REQUIRE(a.size() == b.size());
  for (std::size_t i = 0; i < a.size(); ++i) {
    CHECK(a[i].bound.e_min == b[i].bound.e_min);
    CHECK(a[i].bound.advantage == b[i].bound.advantage);
  }
  CHECK_THROWS_AS(advantage_sweep({}, 1), std::invalid_argument);
}
