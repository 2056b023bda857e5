// Copyright 2026 the opspace authors
// SPDX-License-Identifier: Apache-2.0

#include "opspace/core.hpp"

#include <stdexcept>
#include <utility>

namespace opspace {

std::string to_string(SpaceLabel label) {
  switch (label) {
    case SpaceLabel::generic: return "generic";
    case SpaceLabel::row: return "row";
    case SpaceLabel::column: return "column";
    case SpaceLabel::oh: return "oh";
    case SpaceLabel::clifford: return "clifford";
  }
  return "generic";
}

SpaceLabel space_label_from_string(const std::string& s) {
  if (s == "generic") return SpaceLabel::generic;
  if (s == "row") return SpaceLabel::row;
  if (s == "column") return SpaceLabel::column;
  if (s == "oh") return SpaceLabel::oh;
  if (s == "clifford") return SpaceLabel::clifford;
  throw std::invalid_argument("unknown space label: " + s);
}

const Presentation::Data& Presentation::data() const {
  if (!data_) throw std::logic_error("Presentation: empty handle");
  return *data_;
}

std::shared_ptr<const Presentation::Data> Presentation::make_concrete(std::vector<CMat> basis,
                                                                      SpaceLabel label,
                                                                      bool check_independence) {
  if (basis.empty()) throw std::invalid_argument("presentation needs at least one basis matrix");
  auto d = std::make_shared<Data>();
  d->d1 = basis[0].rows();
  d->d2 = basis[0].cols();
  if (d->d1 <= 0 || d->d2 <= 0) throw std::invalid_argument("presentation: empty matrix shape");
  for (const CMat& b : basis) {
    if (b.rows() != d->d1 || b.cols() != d->d2)
      throw std::invalid_argument("presentation: basis matrices must share one shape");
    if (!all_finite(b)) throw std::invalid_argument("presentation: non-finite basis entry");
  }
  d->basis = std::move(basis);
  d->label = label;
  d->n = static_cast<Index>(d->basis.size());
  d->coefficient_only = false;
  CMat g(d->n, d->n);
  for (Index i = 0; i < d->n; ++i)
    for (Index j = 0; j < d->n; ++j) g(i, j) = (d->basis[j].adjoint() * d->basis[i]).trace();
  d->gram = g;
  if (check_independence) {
    Eigen::SelfAdjointEigenSolver<CMat> es(hermitian_part(g), Eigen::EigenvaluesOnly);
    const double lmin = es.eigenvalues()(0);
    const double lmax = es.eigenvalues()(d->n - 1);
    if (!(lmin > kBasisRankTol * lmax))
      throw std::invalid_argument("presentation: basis is numerically dependent");
  }
  return d;
}

Presentation::Presentation(std::vector<CMat> basis, SpaceLabel label)
    : data_(make_concrete(std::move(basis), label, true)) {}

Presentation Presentation::oh_model(Index n) {
  if (n < 1) throw std::invalid_argument("oh model needs dimension >= 1");
  auto d = std::make_shared<Data>();
  d->label = SpaceLabel::oh;
  d->n = n;
  d->coefficient_only = true;
  d->gram = CMat::Identity(n, n);
  return Presentation(std::move(d));
}

Presentation Presentation::unchecked(std::vector<CMat> basis, SpaceLabel label) {
  return Presentation(make_concrete(std::move(basis), label, false));
}

const CMat& Presentation::basis(Index i) const {
  const Data& d = data();
  if (d.coefficient_only)
    throw std::logic_error("oh model is coefficient-only: no matrix realization");
  if (i < 0 || i >= d.n) throw std::out_of_range("basis index");
  return d.basis[static_cast<std::size_t>(i)];
}

const std::vector<CMat>& Presentation::basis() const {
  const Data& d = data();
  if (d.coefficient_only)
    throw std::logic_error("oh model is coefficient-only: no matrix realization");
  return d.basis;
}

const CMat& Presentation::hs_gram() const { return data().gram; }

Element::Element(Presentation space_, CVec coeffs_)
    : space(std::move(space_)), coeffs(std::move(coeffs_)) {
  if (coeffs.size() != space.dim())
    throw std::invalid_argument("element: coefficient length != basis size");
}

TupleOfElements::TupleOfElements(Presentation space_, CMat A_)
    : space(std::move(space_)), A(std::move(A_)) {
  if (A.rows() > 0 && A.cols() != space.dim())
    throw std::invalid_argument("tuple: column count != basis size");
  if (A.rows() == 0) A.resize(0, space.dim());
  if (!all_finite(A)) throw std::invalid_argument("tuple: non-finite coefficient");
}

Element TupleOfElements::element(Index i) const {
  if (i < 0 || i >= size()) throw std::out_of_range("tuple index");
  return Element(space, A.row(i).transpose());
}

PositiveTensor::PositiveTensor(Presentation space_, CMat C_)
    : space(std::move(space_)), C(std::move(C_)) {
  if (C.rows() != space.dim() || C.cols() != space.dim())
    throw std::invalid_argument("positive tensor: coefficient matrix must be n×n");
}

CMat realize_coeffs(const Presentation& space, const CVec& coeffs) {
  if (coeffs.size() != space.dim())
    throw std::invalid_argument("realize: coefficient length != basis size");
  CMat m = CMat::Zero(space.d1(), space.d2());
  for (Index i = 0; i < space.dim(); ++i) m += coeffs(i) * space.basis(i);
  return m;
}

CMat realize(const Element& e) { return realize_coeffs(e.space, e.coeffs); }

double op_norm(const CMat& m) { return spectral_norm(m); }

PositiveTensor gram_tuple(const TupleOfElements& t) {
  // C_ij = Σ_m A_mi conj(A_mj), i.e. C = Aᵀ conj(A); PSD by construction.
  CMat C = t.A.transpose() * t.A.conjugate();
  if (t.size() == 0) C = CMat::Zero(t.space.dim(), t.space.dim());
  return PositiveTensor(t.space, std::move(C));
}

bool is_positive(const PositiveTensor& u) {
  const CMat& C = u.C;
  const double scale = C.norm();
  if ((C - C.adjoint()).norm() > 1e-10 * (1.0 + scale)) return false;
  const double lmin = min_hermitian_eigenvalue(C);
  const double tol = kPsdTol * (1.0 + std::abs(C.trace()));
  return lmin >= -tol;
}

Presentation embed_square(const Presentation& p) {
  if (p.coefficient_only()) throw std::invalid_argument("embed_square: needs a concrete presentation");
  const Index d = std::max(p.d1(), p.d2());
  if (p.d1() == d && p.d2() == d) return p;
  std::vector<CMat> basis;
  basis.reserve(static_cast<std::size_t>(p.dim()));
  for (Index i = 0; i < p.dim(); ++i) {
    CMat b = CMat::Zero(d, d);
    b.topLeftCorner(p.d1(), p.d2()) = p.basis(i);
    basis.push_back(std::move(b));
  }
  return Presentation::unchecked(std::move(basis), p.label());
}

Presentation matrix_space(Index d) {
  if (d < 1) throw std::invalid_argument("matrix_space: dimension must be >= 1");
  std::vector<CMat> basis;
  basis.reserve(static_cast<std::size_t>(d * d));
  for (Index i = 0; i < d; ++i)
    for (Index j = 0; j < d; ++j) {
      CMat b = CMat::Zero(d, d);
      b(i, j) = 1.0;
      basis.push_back(std::move(b));
    }
  return Presentation::unchecked(std::move(basis), SpaceLabel::generic);
}

Presentation direct_sum(const Presentation& p, const Presentation& q) {
  if (p.coefficient_only() || q.coefficient_only())
    throw std::invalid_argument("direct_sum: needs concrete presentations");
  if (p.dim() != q.dim())
    throw std::invalid_argument("direct_sum: presentations must have equal basis size");
  const Index d1 = p.d1() + q.d1();
  const Index d2 = p.d2() + q.d2();
  std::vector<CMat> basis;
  basis.reserve(static_cast<std::size_t>(p.dim()));
  for (Index i = 0; i < p.dim(); ++i) {
    CMat b = CMat::Zero(d1, d2);
    b.topLeftCorner(p.d1(), p.d2()) = p.basis(i);
    b.bottomRightCorner(q.d1(), q.d2()) = q.basis(i);
    basis.push_back(std::move(b));
  }
  return Presentation::unchecked(std::move(basis), SpaceLabel::generic);
}

}  // namespace opspace
