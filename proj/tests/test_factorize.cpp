// Copyright 2026 the opspace authors
// SPDX-License-Identifier: Apache-2.0

#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "opspace/factorize.hpp"
#include "opspace/minnorm.hpp"
#include "opspace/models.hpp"

#include <cmath>

using namespace opspace;
using factorize::LinearMapCoeff;

namespace {

factorize::DistanceSearchParams quick_distance() {
  factorize::DistanceSearchParams p;
  p.restarts = 6;
  p.refine_iters = 30;
  p.lower.restarts = 6;
  p.lower.max_iters = 300;
  return p;
}

Presentation random_subspace(Index dim, Index d, std::uint64_t seed) {
  Rng rng(seed);
  std::vector<CMat> basis;
  for (Index i = 0; i < dim; ++i) basis.push_back(rng.gaussian_matrix(d, d));
  return Presentation(std::move(basis));
}

}  // namespace

TEST_CASE("cb_from_oh_exact basic values") {
  const Presentation oh3 = Presentation::oh_model(3);
  CHECK(factorize::cb_from_oh_exact({oh3, oh3, CMat::Identity(3, 3)}) ==
        doctest::Approx(1.0).epsilon(1e-12));
  CHECK(factorize::cb_from_oh_exact({oh3, models::row_space(3), CMat::Identity(3, 3)}) ==
        doctest::Approx(std::pow(3.0, 0.25)).epsilon(1e-10));
  CHECK(factorize::cb_from_oh_exact({oh3, models::column_space(3), CMat::Identity(3, 3)}) ==
        doctest::Approx(std::pow(3.0, 0.25)).epsilon(1e-10));
  // wrong source kind
  CHECK_THROWS_AS(
      factorize::cb_from_oh_exact({models::row_space(3), oh3, CMat::Identity(3, 3)}),
      std::invalid_argument);
}

TEST_CASE("cb_upper_into_oh") {
  const Presentation oh3 = Presentation::oh_model(3);
  const auto r = factorize::cb_upper_into_oh({models::row_space(3), oh3, CMat::Identity(3, 3)});
  CHECK(r.ok);
  CHECK(r.value <= 1.02 * std::pow(3.0, 0.25));

  // OH -> OH identity: exact cb is 1, certificate cap sqrt(n)
  const auto i3 = factorize::cb_upper_into_oh({oh3, oh3, CMat::Identity(3, 3)});
  CHECK(i3.ok);
  CHECK(i3.value <= std::sqrt(3.0) + 1e-9);
  CHECK(i3.value == doctest::Approx(1.0).epsilon(1e-9));

  // zero map
  const auto z = factorize::cb_upper_into_oh({models::row_space(3), oh3, CMat::Zero(3, 3)});
  CHECK(z.ok);
  CHECK(z.value == 0.0);

  CHECK_THROWS_AS(
      factorize::cb_upper_into_oh({oh3, models::row_space(3), CMat::Identity(3, 3)}),
      std::invalid_argument);
}

TEST_CASE("distance_to_oh: the OH model itself") {
  const auto rep = factorize::distance_to_oh(models::oh_space(3), quick_distance());
  CHECK(rep.product == doctest::Approx(1.0).epsilon(1e-9));
  CHECK(rep.product >= 1.0 - 1e-9);
  CHECK(rep.guarantee_sqrt_n == doctest::Approx(std::sqrt(3.0)));
}

TEST_CASE("distance_to_oh: row spaces stay within sqrt(n)") {
  for (Index n : {2, 3}) {
    const auto rep = factorize::distance_to_oh(models::row_space(n), quick_distance());
    CHECK(rep.product <= std::sqrt(double(n)) + 1e-6);
    CHECK(rep.product >= 1.0 - 1e-9);
    CHECK(rep.forward_upper * rep.backward_exact == doctest::Approx(rep.product).epsilon(1e-12));
    // replay: backward from the stored map
    Eigen::JacobiSVD<CMat> svd(rep.u.U, Eigen::ComputeThinU | Eigen::ComputeThinV);
    const CMat inv = svd.matrixV() * svd.singularValues().cwiseInverse().asDiagonal() *
                     svd.matrixU().adjoint();
    const double back =
        factorize::cb_from_oh_exact({Presentation::oh_model(n), models::row_space(n), inv});
    CHECK(back == doctest::Approx(rep.backward_exact).epsilon(1e-10));
  }
}

TEST_CASE("lewis_search fixed points") {
  const auto oh = factorize::lewis_search(models::oh_space(3), quick_distance());
  CHECK(oh.product == doctest::Approx(1.0).epsilon(1e-9));
  CHECK(oh.converged);

  const auto row = factorize::lewis_search(models::row_space(2), quick_distance());
  CHECK(row.product <= std::sqrt(2.0) + 1e-6);
  // homogeneous space: the whitened map stays proportional to the identity
  const CMat u = row.map.U / row.map.U(0, 0);
  CHECK((u - CMat::Identity(2, 2)).norm() < 1e-6);
}

TEST_CASE("distance_to_oh: random 2-dim subspaces of M_2 stay near sqrt(2)") {
  for (std::uint64_t seed : {11u, 22u, 33u}) {
    const Presentation e = random_subspace(2, 2, seed);
    const auto rep = factorize::distance_to_oh(e, quick_distance());
    CHECK(rep.product >= 1.0 - 1e-9);
    CHECK(rep.product <= std::sqrt(2.0) * 1.05);
  }
}

TEST_CASE("dual_norm_upper") {
  const Presentation oh3 = Presentation::oh_model(3);
  // identity factorization B = I gives sqrt(n)
  const auto id = factorize::dual_norm_upper({oh3, oh3, CMat::Identity(3, 3)});
  CHECK(id.value <= std::sqrt(3.0) + 1e-9);

  // homogeneity in the map
  const auto scaled = factorize::dual_norm_upper({oh3, oh3, 2.0 * CMat::Identity(3, 3)});
  CHECK(scaled.value == doctest::Approx(2.0 * id.value).epsilon(0.02));

  // OH_2 -> R_2 identity coefficients: optimum is 2^(3/4)
  const Presentation oh2 = Presentation::oh_model(2);
  const LinearMapCoeff v{oh2, models::row_space(2), CMat::Identity(2, 2)};
  const auto dual = factorize::dual_norm_upper(v);
  CHECK(dual.value <= std::pow(2.0, 0.75) + 1e-6);
  CHECK(dual.value >= factorize::cb_from_oh_exact(v) - 1e-9);

  // trace duality: n ≤ π̂(u) π̂*(u⁻¹) for the row Lewis position
  const auto cert = summing::pi2oh_upper_certificate(models::row_space(2), CMat::Identity(2, 2));
  CHECK(2.0 <= cert.C * dual.value * (1.0 + 0.02));

  CHECK_THROWS_AS(factorize::dual_norm_upper({models::row_space(2), oh2, CMat::Identity(2, 2)}),
                  std::invalid_argument);
}

TEST_CASE("project_onto: full matrix space gives the identity") {
  const Presentation m2 = matrix_space(2);
  summing::KMixture mix;
  mix.weights = {1.0};
  mix.atoms.emplace_back(CMat::Identity(2, 2) / std::sqrt(2.0),
                         CMat::Identity(2, 2) / std::sqrt(2.0));
  const auto P = factorize::project_onto(m2, mix);
  CHECK((P.U - CMat::Identity(4, 4)).norm() < 1e-12);
}

TEST_CASE("project_onto: span of the identity gives the normalized trace map") {
  const Presentation e = Presentation({CMat::Identity(2, 2)});
  summing::KMixture mix;
  mix.weights = {1.0};
  mix.atoms.emplace_back(CMat::Identity(2, 2) / std::sqrt(2.0),
                         CMat::Identity(2, 2) / std::sqrt(2.0));
  const auto P = factorize::project_onto(e, mix);
  // P(x) = tr(x)/2 in the coefficient of I
  CMat expect(1, 4);
  expect << 0.5, 0.0, 0.0, 0.5;
  CHECK((P.U - expect).norm() < 1e-12);
  summing::SearchParams sp;
  sp.restarts = 6;
  sp.max_iters = 300;
  CHECK(factorize::cb_lower_matrix_map(P, 2, sp) <= 1.0 + 1e-6);
}

TEST_CASE("project_onto: rows of M_2 via the optimal atom") {
  const Presentation r2 = embed_square(models::row_space(2));
  CMat e11 = CMat::Zero(2, 2);
  e11(0, 0) = 1.0;
  summing::KMixture mix;
  mix.weights = {1.0};
  mix.atoms.emplace_back(CMat::Identity(2, 2) / std::sqrt(2.0), e11);
  const auto P = factorize::project_onto(r2, mix);

  // idempotent with range exactly R_2
  CMat B(4, 2);
  for (Index i = 0; i < 2; ++i) B.col(i) = vec_rm(r2.basis(i));
  CHECK((P.U * B - CMat::Identity(2, 2)).norm() < 1e-12);  // P ∘ inclusion = id
  // P ∘ P = P through the coefficient composition
  const CMat PP = (B * P.U) * (B * P.U);
  CHECK((PP - B * P.U).norm() < 1e-12);

  summing::SearchParams sp;
  sp.restarts = 6;
  sp.max_iters = 300;
  for (int level = 1; level <= 3; ++level)
    CHECK(factorize::cb_lower_matrix_map(P, level, sp) <= std::sqrt(2.0) + 1e-6);
}

TEST_CASE("project_onto: degenerate functional is reported") {
  const Presentation r2 = embed_square(models::row_space(2));
  CMat e22 = CMat::Zero(2, 2);
  e22(1, 1) = 1.0;
  summing::KMixture mix;
  mix.weights = {1.0};
  mix.atoms.emplace_back(CMat::Identity(2, 2) / std::sqrt(2.0), e22);
  CHECK_THROWS_WITH_AS(factorize::project_onto(r2, mix),
                       doctest::Contains("nullity"), std::invalid_argument);
}

TEST_CASE("cb_lower_matrix_map: identity and transpose") {
  const Presentation m2 = matrix_space(2);
  summing::SearchParams sp;
  sp.restarts = 8;
  sp.max_iters = 400;

  const LinearMapCoeff id{m2, m2, CMat::Identity(4, 4)};
  CHECK(factorize::cb_lower_matrix_map(id, 1, sp) == doctest::Approx(1.0).epsilon(1e-9));
  CHECK(factorize::cb_lower_matrix_map(id, 3, sp) == doctest::Approx(1.0).epsilon(1e-9));

  // transpose swaps e12 and e21 in the canonical basis
  CMat T = CMat::Identity(4, 4);
  T(1, 1) = T(2, 2) = 0.0;
  T(1, 2) = T(2, 1) = 1.0;
  const LinearMapCoeff tr{m2, m2, T};
  const double l1 = factorize::cb_lower_matrix_map(tr, 1, sp);
  const double l2 = factorize::cb_lower_matrix_map(tr, 2, sp);
  CHECK(l2 >= 2.0 - 1e-3);
  CHECK(l2 >= l1 - 1e-9);  // nondecreasing in the level
}

TEST_CASE("pairwise distance through OH") {
  const auto rep =
      factorize::pairwise_distance(models::row_space(2), models::column_space(2), quick_distance());
  CHECK(rep.product_bound <= 2.0 + 1e-6);
  CHECK(rep.guarantee_n == 2.0);

  const auto same =
      factorize::pairwise_distance(models::row_space(2), models::row_space(2), quick_distance());
  CHECK(same.product_bound >= 1.0 - 1e-9);

  CHECK_THROWS_AS(
      factorize::pairwise_distance(models::row_space(2), models::row_space(3), quick_distance()),
      std::invalid_argument);
}
