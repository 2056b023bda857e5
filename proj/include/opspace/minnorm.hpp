// Copyright 2026 the opspace authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include "opspace/core.hpp"

#include <vector>

namespace opspace {

/// Matrix form of the completely positive map y ↦ Σ_i x_i y x_i† on
/// Hilbert-Schmidt space.  Under the global row-major vec convention
/// (vec(AYB) = (A ⊗ Bᵀ) vec(Y)) the matrix is M = Σ_i X_i ⊗ conj(X_i).
struct Superoperator {
  Index d1 = 0, d2 = 0;
  Index source_dim = 0;  // d2²
  Index target_dim = 0;  // d1²
  CMat M;                // target_dim × source_dim
  std::vector<CMat> mats;

  CMat apply(const CMat& y) const;          // Σ x_i y x_i†
  CMat apply_adjoint(const CMat& z) const;  // Σ x_i† z x_i
};

Superoperator build_superoperator(const TupleOfElements& t);

/// ‖Σ x_i ⊗ conj(x_i)‖ in E ⊗_min conj(E), computed as the largest singular
/// value of the superoperator matrix.  The coefficient-only OH model uses
/// the closed form σ_max(A)².  Empty tuples give 0.
double min_norm(const TupleOfElements& t);

struct PsdAscentParams {
  int restarts = 32;
  int max_iters = 2000;
  std::uint64_t seed = 0x0552d5eedULL;
  double improve_tol = 1e-9;
  int improve_window = 50;
};

struct PsdAscentResult {
  double value = 0.0;
  CMat y;  // d2×d2 PSD, unit HS norm
  CMat z;  // d1×d1 PSD, unit HS norm
};

/// Maximizes Re tr(Σ x_i y x_i† z) over PSD y, z of HS norm ≤ 1 by
/// alternating maximization (PSD cone projection + HS normalization) with
/// seeded restarts.  Works for rectangular shapes; the maximizers are the
/// Pietsch-type atom candidates.
PsdAscentResult min_norm_psd_ascent(const TupleOfElements& t, const PsdAscentParams& p = {});

/// All distinct near-optimal maximizer pairs found across the restarts
/// (values within rel_window of the best), best first.  The optimizer set is
/// often degenerate and a domination certificate may need several of them.
std::vector<PsdAscentResult> min_norm_psd_ascent_multi(const TupleOfElements& t,
                                                       const PsdAscentParams& p = {},
                                                       int max_results = 4,
                                                       double rel_window = 1e-3);

/// Positive-cone restriction of the min-norm supremum; agrees with
/// min_norm within optimization tolerance.  Requires a square shape.
double min_norm_psd_restricted(const TupleOfElements& t, const PsdAscentParams& p = {});

/// sqrt(min_norm): equals ‖Σ x_i ⊗ T_i‖ in E ⊗_min OH_k.
double oh_norm(const TupleOfElements& t);

/// Exact cb norm of u: OH_k → E, where row i of `images` holds the
/// coefficients of u(T_i).
double cb_norm_from_oh(const TupleOfElements& images);

}  // namespace opspace
