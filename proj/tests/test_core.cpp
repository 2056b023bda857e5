// Copyright 2026 the opspace authors
// SPDX-License-Identifier: Apache-2.0

#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "opspace/core.hpp"

#include <cmath>

using namespace opspace;

namespace {

CMat unit_matrix(Index d1, Index d2, Index i, Index j) {
  CMat m = CMat::Zero(d1, d2);
  m(i, j) = 1.0;
  return m;
}

Presentation m2_diag_units() {
  return Presentation({unit_matrix(2, 2, 0, 0), unit_matrix(2, 2, 1, 1)});
}

Presentation row2() {
  return Presentation({unit_matrix(1, 2, 0, 0), unit_matrix(1, 2, 0, 1)}, SpaceLabel::row);
}

Presentation col2() {
  return Presentation({unit_matrix(2, 1, 0, 0), unit_matrix(2, 1, 1, 0)}, SpaceLabel::column);
}

CMat random_unitary(Rng& rng, Index n) {
  Eigen::HouseholderQR<CMat> qr(rng.gaussian_matrix(n, n));
  return qr.householderQ() * CMat::Identity(n, n);
}

}  // namespace

TEST_CASE("presentation validation") {
  CHECK_THROWS_AS(Presentation(std::vector<CMat>{}), std::invalid_argument);
  // dependent basis rejected
  CHECK_THROWS_AS(Presentation({unit_matrix(2, 2, 0, 0), unit_matrix(2, 2, 0, 0)}),
                  std::invalid_argument);
  // mixed shapes rejected
  CHECK_THROWS_AS(Presentation({unit_matrix(2, 2, 0, 0), unit_matrix(1, 2, 0, 0)}),
                  std::invalid_argument);
  // non-finite entries rejected
  CMat bad = unit_matrix(2, 2, 0, 0);
  bad(1, 1) = Complex(std::nan(""), 0.0);
  CHECK_THROWS_AS(Presentation({bad}), std::invalid_argument);
  // nearly dependent basis rejected by the Gram rank tolerance
  CMat almost = unit_matrix(2, 2, 0, 0);
  almost(0, 1) = 1e-12;
  CHECK_THROWS_AS(Presentation({unit_matrix(2, 2, 0, 0), almost}), std::invalid_argument);
}

TEST_CASE("oh model is coefficient-only") {
  const Presentation oh = Presentation::oh_model(3);
  CHECK(oh.dim() == 3);
  CHECK(oh.coefficient_only());
  CHECK_THROWS_AS(oh.basis(0), std::logic_error);
  CHECK_THROWS_AS(Presentation::oh_model(0), std::invalid_argument);
}

TEST_CASE("realize basis vectors and linearity") {
  const Presentation p = m2_diag_units();
  CVec e1(2);
  e1 << 1, 0;
  CHECK((realize(Element(p, e1)) - unit_matrix(2, 2, 0, 0)).norm() == 0.0);

  CVec zero = CVec::Zero(2);
  CHECK(realize(Element(p, zero)).norm() == 0.0);

  // coeffs (1,1) on (e11, e22) give the identity of M_2
  CVec ones(2);
  ones << 1, 1;
  CHECK((realize(Element(p, ones)) - CMat::Identity(2, 2)).norm() == 0.0);

  Rng rng(71);
  for (int rep = 0; rep < 10; ++rep) {
    const CVec a = rng.gaussian_vector(2), b = rng.gaussian_vector(2);
    const Complex al = rng.cgaussian(), be = rng.cgaussian();
    const CMat lhs = realize(Element(p, al * a + be * b));
    const CMat rhs = al * realize(Element(p, a)) + be * realize(Element(p, b));
    CHECK((lhs - rhs).norm() < 1e-14 * (1.0 + rhs.norm()));
  }
}

TEST_CASE("op_norm basics") {
  CHECK(op_norm(CMat::Identity(3, 3)) == doctest::Approx(1.0).epsilon(1e-14));
  CHECK(op_norm(unit_matrix(2, 2, 0, 1)) == doctest::Approx(1.0).epsilon(1e-14));
  CMat d = CMat::Zero(2, 2);
  d(0, 0) = 3.0;
  d(1, 1) = Complex(0, -4);
  CHECK(op_norm(d) == doctest::Approx(4.0).epsilon(1e-14));
}

TEST_CASE("gram_tuple coefficient matrix") {
  const Presentation p = m2_diag_units();

  // single element: C = c c†
  Rng rng(3);
  const CVec c = rng.gaussian_vector(2);
  CMat single(1, 2);
  single.row(0) = c.transpose();
  const PositiveTensor u = gram_tuple(TupleOfElements(p, single));
  CHECK((u.C - c * c.adjoint()).norm() < 1e-14);

  // canonical tuple: C = I
  const PositiveTensor uid = gram_tuple(TupleOfElements(p, CMat::Identity(2, 2)));
  CHECK((uid.C - CMat::Identity(2, 2)).norm() < 1e-14);

  // repeated element doubles
  CMat rep(2, 2);
  rep << 1, 0, 1, 0;
  const PositiveTensor urep = gram_tuple(TupleOfElements(p, rep));
  CMat expect(2, 2);
  expect << 2, 0, 0, 0;
  CHECK((urep.C - expect).norm() < 1e-14);

  // empty tuple: zero coefficient matrix, still positive
  const PositiveTensor uz = gram_tuple(TupleOfElements(p, CMat::Zero(0, 2)));
  CHECK(uz.C.norm() == 0.0);
  CHECK(is_positive(uz));
}

TEST_CASE("gram_tuple is PSD and unitary-mixing invariant") {
  const Presentation p = m2_diag_units();
  Rng rng(13);
  for (int rep = 0; rep < 20; ++rep) {
    const Index k = 1 + rep % 4;
    const CMat A = rng.gaussian_matrix(k, 2);
    const PositiveTensor u = gram_tuple(TupleOfElements(p, A));
    CHECK(is_positive(u));
    const CMat U = random_unitary(rng, k);
    const PositiveTensor v = gram_tuple(TupleOfElements(p, U * A));
    CHECK((u.C - v.C).norm() < 1e-12 * (1.0 + u.C.norm()));
  }
}

TEST_CASE("is_positive") {
  const Presentation p = m2_diag_units();
  CHECK(is_positive(PositiveTensor(p, CMat::Identity(2, 2))));
  CMat notherm(2, 2);
  notherm << 0, 1, 0, 0;
  CHECK_FALSE(is_positive(PositiveTensor(p, notherm)));
  CMat indef(2, 2);
  indef << 1, 0, 0, -1;
  CHECK_FALSE(is_positive(PositiveTensor(p, indef)));
}

TEST_CASE("direct_sum shapes and norms") {
  const Presentation rc = direct_sum(row2(), col2());
  CHECK(rc.d1() == 3);
  CHECK(rc.d2() == 3);
  CHECK(rc.dim() == 2);

  // padding with a zero space leaves operator norms unchanged
  const Presentation zero2 = Presentation::unchecked({CMat::Zero(1, 2), CMat::Zero(1, 2)});
  const Presentation padded = direct_sum(row2(), zero2);
  Rng rng(19);
  for (int rep = 0; rep < 10; ++rep) {
    const CVec c = rng.gaussian_vector(2);
    CHECK(op_norm(realize(Element(padded, c))) ==
          doctest::Approx(op_norm(realize(Element(row2(), c)))).epsilon(1e-12));
  }

  // R_2 ⊕ R_2: HS norm scales by √2, operator norm does not
  const Presentation rr = direct_sum(row2(), row2());
  const CVec c = rng.gaussian_vector(2);
  const CMat x = realize(Element(rr, c));
  const CMat x0 = realize(Element(row2(), c));
  CHECK(hs_norm(x) == doctest::Approx(std::sqrt(2.0) * hs_norm(x0)).epsilon(1e-12));
  CHECK(op_norm(x) == doctest::Approx(op_norm(x0)).epsilon(1e-12));

  CHECK_THROWS_AS(direct_sum(row2(), Presentation({unit_matrix(1, 1, 0, 0)})),
                  std::invalid_argument);
}

TEST_CASE("block diagonal operator norm is the max of the blocks") {
  Rng rng(29);
  for (int rep = 0; rep < 10; ++rep) {
    const CMat a = rng.gaussian_matrix(3, 2);
    const CMat b = rng.gaussian_matrix(2, 4);
    CMat blk = CMat::Zero(5, 6);
    blk.topLeftCorner(3, 2) = a;
    blk.bottomRightCorner(2, 4) = b;
    CHECK(op_norm(blk) ==
          doctest::Approx(std::max(op_norm(a), op_norm(b))).epsilon(1e-12));
  }
}

TEST_CASE("embed_square preserves operator norms") {
  const Presentation r = row2();
  const Presentation sq = embed_square(r);
  CHECK(sq.d1() == 2);
  CHECK(sq.d2() == 2);
  Rng rng(37);
  for (int rep = 0; rep < 10; ++rep) {
    const CVec c = rng.gaussian_vector(2);
    CHECK(op_norm(realize(Element(sq, c))) ==
          doctest::Approx(op_norm(realize(Element(r, c)))).epsilon(1e-12));
  }
}

TEST_CASE("matrix_space basis is the canonical one") {
  const Presentation m2 = matrix_space(2);
  CHECK(m2.dim() == 4);
  CHECK((m2.basis(1) - unit_matrix(2, 2, 0, 1)).norm() == 0.0);  // row-major order
  CHECK((m2.hs_gram() - CMat::Identity(4, 4)).norm() < 1e-14);
}

TEST_CASE("element and tuple validation") {
  const Presentation p = m2_diag_units();
  CHECK_THROWS_AS(Element(p, CVec::Zero(3)), std::invalid_argument);
  CHECK_THROWS_AS(TupleOfElements(p, CMat::Zero(2, 3)), std::invalid_argument);
  CHECK_THROWS_AS(PositiveTensor(p, CMat::Zero(3, 3)), std::invalid_argument);
}
