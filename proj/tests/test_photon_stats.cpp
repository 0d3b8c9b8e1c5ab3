#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <complex>
#include <map>
#include <numbers>
#include <vector>

#include "turbmimo/photon_stats.hpp"
#include "turbmimo/rng.hpp"

#include "fock_oracle.hpp"

using namespace turbmimo;
using namespace testutil;


TEST_CASE("ryser permanent equals the permutation sum") {
  for (int n = 2; n <= 7; ++n) {
    const Eigen::MatrixXcd a = random_matrix(n, mix64(1000 + n));
    const std::complex<double> want = permutation_sum_permanent(a);
    const std::complex<double> got = permanent(a);
    CHECK(std::abs(got - want) / std::abs(want) < 1e-10);
  }
}

TEST_CASE("permanent special cases") {
  CHECK(std::abs(permanent(Eigen::MatrixXcd::Identity(5, 5)) - 1.0) < 1e-12);
  // all-ones permanent is n!
  CHECK(std::abs(permanent(Eigen::MatrixXcd::Ones(5, 5)) - 120.0) < 1e-9);
  CHECK_THROWS_AS(permanent(Eigen::MatrixXcd::Ones(2, 3)), std::invalid_argument);
  CHECK_THROWS_AS(permanent(Eigen::MatrixXcd::Ones(13, 13)), std::invalid_argument);
}

TEST_CASE("unitary dilation embeds subunitaries") {
  const Eigen::MatrixXcd t = random_subunitary(4, mix64(77), 0.9);
  const Eigen::MatrixXcd d = unitary_dilation(t);
  REQUIRE(d.rows() == 8);
  CHECK((d.topLeftCorner(4, 4) - t).norm() < 1e-12);
  CHECK((d.adjoint() * d - Eigen::MatrixXcd::Identity(8, 8)).norm() < 1e-10);
  CHECK((d * d.adjoint() - Eigen::MatrixXcd::Identity(8, 8)).norm() < 1e-10);

  // singular values above one (beyond rounding slack) must be rejected
  CHECK_THROWS_AS(unitary_dilation(1.1 * Eigen::MatrixXcd::Identity(2, 2)),
                  std::invalid_argument);
}

TEST_CASE("identity channel statistics") {
  const Eigen::MatrixXcd t = Eigen::MatrixXcd::Identity(3, 3);
  for (const OutcomeStats& st : {indistinguishable_stats(t), distinguishable_stats(t)}) {
    CHECK(st.p_all_kept == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(st.p_collision_given_kept == doctest::Approx(0.0));
    CHECK(st.p_collision == doctest::Approx(0.0));
    CHECK(st.conditional_defined);
  }
}

TEST_CASE("uniform loss factors out") {
  const double eta = 0.36;
  const Eigen::MatrixXcd t = std::sqrt(eta) * Eigen::MatrixXcd::Identity(3, 3);
  const OutcomeStats si = indistinguishable_stats(t);
  const OutcomeStats sd = distinguishable_stats(t);
  CHECK(si.p_all_kept == doctest::Approx(std::pow(eta, 3)).epsilon(1e-10));
  CHECK(sd.p_all_kept == doctest::Approx(std::pow(eta, 3)).epsilon(1e-10));
  CHECK(si.p_collision == doctest::Approx(0.0));
  CHECK(sd.p_collision == doctest::Approx(0.0));
}

TEST_CASE("hong-ou-mandel bunching") {
  Eigen::MatrixXcd t(2, 2);
  const double s = 1.0 / std::numbers::sqrt2;
  t << s, s, s, -s;
  const OutcomeStats si = indistinguishable_stats(t);
  CHECK(si.p_all_kept == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(si.p_collision_given_kept == doctest::Approx(1.0).epsilon(1e-10));
  const OutcomeStats sd = distinguishable_stats(t);
  CHECK(sd.p_collision_given_kept == doctest::Approx(0.5).epsilon(1e-10));
}

TEST_CASE("indistinguishable statistics match brute-force fock evolution") {
  for (int n : {2, 3}) {
    for (int draw = 0; draw < 4; ++draw) {
      const Eigen::MatrixXcd t =
          random_subunitary(n, mix64(5000 + 10 * n + draw), 0.85 + 0.03 * draw);
      const OutcomeStats st = indistinguishable_stats(t);
      const FockOutcome want = fock_bruteforce(unitary_dilation(t), n, n);
      CHECK(want.total == doctest::Approx(1.0).epsilon(1e-10));
      CHECK(st.p_all_kept == doctest::Approx(want.p_all_kept).epsilon(1e-8));
      CHECK(st.p_collision_given_kept ==
            doctest::Approx(want.p_coll_given_kept).epsilon(1e-8));
      CHECK(st.p_collision == doctest::Approx(want.p_coll).epsilon(1e-8));
    }
  }
}

TEST_CASE("distinguishable statistics match independent-landing enumeration") {
  for (int n : {2, 3}) {
    const Eigen::MatrixXcd t = random_subunitary(n, mix64(6000 + n), 0.9);

    // brute force: photon m lands on kept port r with |t(r,m)|^2, or in the
    // bath with the leftover probability; enumerate (n+1)^n landings
    const int branches = n + 1;
    double p_all = 0.0, p_coll_joint = 0.0, p_coll_any = 0.0;
    std::vector<int> landing(n, 0);
    for (;;) {
      double p = 1.0;
      std::vector<int> occ(n, 0);
      bool kept = true;
      for (int m = 0; m < n; ++m) {
        if (landing[m] < n) {
          p *= std::norm(t(landing[m], m));
          ++occ[landing[m]];
        } else {
          double eps = 1.0;
          for (int r = 0; r < n; ++r) eps -= std::norm(t(r, m));
          p *= std::max(0.0, eps);
          kept = false;
        }
      }
      const bool coll = std::any_of(occ.begin(), occ.end(), [](int c) { return c >= 2; });
      if (kept) p_all += p;
      if (kept && coll) p_coll_joint += p;
      if (coll) p_coll_any += p;

      int pos = n - 1;
      while (pos >= 0 && landing[pos] == branches - 1) landing[pos--] = 0;
      if (pos < 0) break;
      ++landing[pos];
    }

    const OutcomeStats st = distinguishable_stats(t);
    CHECK(st.p_all_kept == doctest::Approx(p_all).epsilon(1e-10));
    CHECK(st.p_collision_given_kept ==
          doctest::Approx(p_coll_joint / p_all).epsilon(1e-10));
    CHECK(st.p_collision == doctest::Approx(p_coll_any).epsilon(1e-10));
  }
}

TEST_CASE("fully lossy channel flags the undefined conditional") {
  const Eigen::MatrixXcd t = Eigen::MatrixXcd::Zero(2, 2);
  const OutcomeStats si = indistinguishable_stats(t);
  CHECK(si.p_all_kept == doctest::Approx(0.0));
  CHECK(!si.conditional_defined);
  CHECK(si.p_collision == doctest::Approx(0.0));
  const OutcomeStats sd = distinguishable_stats(t);
  CHECK(sd.p_all_kept == doctest::Approx(0.0));
  CHECK(!sd.conditional_defined);
}

TEST_CASE("kept-port statistics are invariant under bath details") {
  // scaling a column of the bath coupling cannot change kept statistics;
  // compare stats from t against stats from a manually padded dilation whose
  // bath block is permuted
  const Eigen::MatrixXcd t = random_subunitary(3, mix64(9001), 0.8);
  const OutcomeStats base = indistinguishable_stats(t);

  Eigen::MatrixXcd d = unitary_dilation(t);
  // permuting bath rows yields another valid dilation of the same t
  d.row(3).swap(d.row(5));
  const FockOutcome permuted = fock_bruteforce(d, 3, 3);
  CHECK(base.p_all_kept == doctest::Approx(permuted.p_all_kept).epsilon(1e-8));
  CHECK(base.p_collision == doctest::Approx(permuted.p_coll).epsilon(1e-8));
}
