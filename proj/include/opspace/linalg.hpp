// Copyright 2026 the opspace authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <Eigen/Dense>

#include <complex>
#include <cstdint>

namespace opspace {

using Complex = std::complex<double>;
using CMat = Eigen::MatrixXcd;
using CVec = Eigen::VectorXcd;
using RVec = Eigen::VectorXd;
using Index = Eigen::Index;

/// Deterministic pseudo-random stream (splitmix64 + Box-Muller).  We roll our
/// own so that seeded runs produce identical output regardless of the
/// standard library's distribution implementations.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : state_(seed ? seed : 0x9e3779b97f4a7c15ULL) {}

  std::uint64_t next_u64();
  double uniform();   // [0, 1)
  double gaussian();  // standard normal
  Complex cgaussian();

  CMat gaussian_matrix(Index rows, Index cols);
  CVec gaussian_vector(Index n);
  /// Random PSD matrix g g† with unit Hilbert-Schmidt norm.
  CMat random_psd_unit(Index d);

  /// Derive an independent stream for a tagged sub-task.
  Rng fork(std::uint64_t tag) const;

 private:
  std::uint64_t state_;
  bool have_cached_ = false;
  double cached_ = 0.0;
};

bool all_finite(const CMat& m);

// Global vectorization convention: row-major, so vec(AYB) = (A ⊗ Bᵀ) vec(Y).
CVec vec_rm(const CMat& m);
CMat unvec_rm(const CVec& v, Index rows, Index cols);
CMat kron(const CMat& a, const CMat& b);

double hs_norm(const CMat& m);
Complex hs_inner(const CMat& a, const CMat& b);  // tr(a† b)

struct SingularTriple {
  double sigma = 0.0;
  CVec left;   // u with m v = sigma u
  CVec right;  // v
};

/// Largest singular value.  Full SVD below dimension 64, power iteration on
/// M†M above (relative tolerance 1e-12, at most 10000 iterations, seeded
/// deterministic start).
double spectral_norm(const CMat& m);

/// Largest singular value together with a singular pair.  `warm` seeds the
/// power iteration when the caller tracks a slowly moving matrix;
/// `prefer_power` skips the small-matrix SVD path (an ascent loop with a
/// good warm start converges in a handful of matvecs).
SingularTriple top_singular_triple(const CMat& m, const CVec* warm = nullptr,
                                   bool prefer_power = false);

/// Rotate the first nonzero component to the positive real axis.
void normalize_phase(CVec& v);

CMat hermitian_part(const CMat& m);
/// Nearest PSD matrix to the Hermitian part (negative eigenvalues clamped).
CMat psd_project(const CMat& m);
double min_hermitian_eigenvalue(const CMat& m);
CMat psd_sqrt(const CMat& m);
/// Inverse square root on the numerical range; eigenvalues below
/// rel_cutoff × λ_max are dropped.
CMat psd_inv_sqrt(const CMat& m, double rel_cutoff = 1e-12);

}  // namespace opspace
