// Copyright 2026 the opspace authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include "opspace/linalg.hpp"

#include <memory>
#include <string>
#include <vector>

namespace opspace {

enum class SpaceLabel { generic, row, column, oh, clifford };

std::string to_string(SpaceLabel label);
SpaceLabel space_label_from_string(const std::string& s);

inline constexpr double kBasisRankTol = 1e-10;  // smallest Gram eigenvalue vs largest
inline constexpr double kPsdTol = 1e-10;        // scale-aware PSD slack

/// A finite-dimensional operator space presented by a linearly independent
/// list of concrete complex matrices, all of one shape.  The `oh` label may
/// also name a coefficient-only model with no concrete matrices; asking such
/// a space for matrices throws.
///
/// Immutable after construction; cheap to copy (shared payload).
class Presentation {
 public:
  Presentation() = default;

  /// Validates shapes, finiteness and linear independence (the HS Gram
  /// G_ij = tr(b_j† b_i) must have smallest eigenvalue > 1e-10 × largest).
  explicit Presentation(std::vector<CMat> basis, SpaceLabel label = SpaceLabel::generic);

  /// Coefficient-only model of OH_n.  All norms are computed from closed
  /// coefficient formulas; there is deliberately no matrix realization.
  static Presentation oh_model(Index n);

  /// Skips the independence check.  For degenerate constructions in tests
  /// (e.g. a zero space used as direct-sum padding).
  static Presentation unchecked(std::vector<CMat> basis, SpaceLabel label = SpaceLabel::generic);

  bool valid() const { return data_ != nullptr; }
  Index dim() const { return data().n; }
  Index d1() const { return data().d1; }
  Index d2() const { return data().d2; }
  bool coefficient_only() const { return data().coefficient_only; }
  SpaceLabel label() const { return data().label; }
  const CMat& basis(Index i) const;
  const std::vector<CMat>& basis() const;
  /// HS Gram matrix G_ij = tr(b_j† b_i).
  const CMat& hs_gram() const;

  struct Data {
    std::vector<CMat> basis;
    SpaceLabel label = SpaceLabel::generic;
    Index n = 0, d1 = 0, d2 = 0;
    bool coefficient_only = false;
    CMat gram;
  };

 private:
  explicit Presentation(std::shared_ptr<const Data> d) : data_(std::move(d)) {}
  static std::shared_ptr<const Data> make_concrete(std::vector<CMat> basis, SpaceLabel label,
                                                   bool check_independence);
  const Data& data() const;
  std::shared_ptr<const Data> data_;
};

struct Element {
  Element(Presentation space, CVec coeffs);
  Presentation space;
  CVec coeffs;
};

/// k elements of a presentation; row i of A holds the coefficients of x_i.
/// k = 0 (empty tuple) is legal everywhere and yields norm 0.
struct TupleOfElements {
  TupleOfElements() = default;  // empty handle, for aggregates filled later
  TupleOfElements(Presentation space, CMat A);
  Presentation space;
  CMat A;  // k×n

  Index size() const { return A.rows(); }
  Element element(Index i) const;
};

/// u = Σ_ij C_ij b_i ⊗ conj(b_j); u is positive iff C is Hermitian PSD.
struct PositiveTensor {
  PositiveTensor(Presentation space, CMat C);
  Presentation space;
  CMat C;  // n×n
};

CMat realize(const Element& e);
CMat realize_coeffs(const Presentation& space, const CVec& coeffs);

/// Largest singular value (the B(H) operator norm).
double op_norm(const CMat& m);

/// Coefficient matrix of Σ_i x_i ⊗ conj(x_i):  C_ij = Σ_m A_mi conj(A_mj).
PositiveTensor gram_tuple(const TupleOfElements& t);

/// Hermitian with min eigenvalue ≥ −1e-10 × (1 + |trace|).
bool is_positive(const PositiveTensor& u);

/// Paired block-diagonal sum: basis member i is diag(p.b_i, q.b_i).
Presentation direct_sum(const Presentation& p, const Presentation& q);

/// Pads a rectangular presentation into M_max(d1,d2) with zero blocks; all
/// operator and min tensor norms are unchanged by the embedding.
Presentation embed_square(const Presentation& p);

/// Full matrix space M_d with the canonical e_ij basis in row-major order.
Presentation matrix_space(Index d);

}  // namespace opspace
