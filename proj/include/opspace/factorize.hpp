// Copyright 2026 the opspace authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include "opspace/core.hpp"
#include "opspace/summing.hpp"

#include <vector>

namespace opspace::factorize {

/// A linear map in coefficient bases: x with coefficient column c maps to
/// the element of `target` with coefficients U c.
struct LinearMapCoeff {
  Presentation source;
  Presentation target;
  CMat U;  // target.dim() × source.dim()
};

void validate_map(const LinearMapCoeff& m);
/// Smallest singular value (invertibility tracking; square maps only).
double smallest_singular(const CMat& U);

/// Exact cb norm of a map out of the OH model (row i of the image tuple is
/// u(T_i)).
double cb_from_oh_exact(const LinearMapCoeff& m);

struct CbUpperResult {
  bool ok = false;
  double value = 0.0;
  summing::UpperCertificate certificate;
};

/// Sound upper bound on ‖m‖_cb for a map into the OH model, via the summing
/// certificate (cb ≤ π_(2,oh)); exact when the source is the OH model too.
CbUpperResult cb_upper_into_oh(const LinearMapCoeff& m,
                               const summing::CertificateOptions& copts = {});

struct DistanceSearchParams {
  int restarts = 16;
  int refine_iters = 60;
  std::uint64_t seed = 0xd157a9ceULL;
  summing::SearchParams lower{8, 600, 0x10e315ULL, 0.1, 1e-9, 50};
  summing::CertificateOptions cert{};
  int lewis_max_rounds = 10;
  double lewis_rel_tol = 1e-6;
};

struct DistanceReport {
  LinearMapCoeff u;  // E → OH_n, the best map found
  double forward_upper = 0.0;   // certified bound on ‖u‖_cb
  double backward_exact = 0.0;  // exact ‖u⁻¹‖_cb
  double product = 0.0;
  double guarantee_sqrt_n = 0.0;  // the general √n guarantee, for comparison
  summing::UpperCertificate certificate;
  bool lewis_converged = false;
};

/// Upper bound on d_cb(E, OH_n): searches invertible U minimizing
/// forward_upper × backward_exact over the identity coefficients, the Lewis
/// iterate, seeded random positions and a local refinement.
DistanceReport distance_to_oh(const Presentation& space, const DistanceSearchParams& p = {});

struct LewisResult {
  LinearMapCoeff map;  // E → OH_n
  bool converged = false;
  int rounds = 0;
  double product = 0.0;  // best product diagnostic along the iteration
  std::vector<double> history;
};

/// Alternating heuristic for a Lewis-type position: find the worst tuple of
/// the current Hilbertian structure, then whiten by the inverse square root
/// of its coefficient Gram.  Convergence is empirical, not asserted.
LewisResult lewis_search(const Presentation& space, const DistanceSearchParams& p = {});

struct FactorSearchParams {
  int restarts = 16;
  int refine_iters = 80;
  std::uint64_t seed = 0xfac7093ULL;
};

struct DualNormResult {
  double value = 0.0;  // ‖B‖_HS · ‖A‖_cb for the best found v = A ∘ B
  CMat B;              // OH_n → OH_n factor
  double b_hs = 0.0;
  double a_cb = 0.0;
};

/// Upper bound on π*_(2,oh)(v) for v out of the OH model, by searching the
/// factorization v = A ∘ B with B: OH_n → OH_n and A = v ∘ B⁻¹.
DualNormResult dual_norm_upper(const LinearMapCoeff& v, const FactorSearchParams& p = {});

/// The φ-orthogonal projection of M_d onto E for the mixture functional φ:
/// builds the φ-inner-product on M_d and returns the induced idempotent with
/// range exactly E.  Throws if φ degenerates on E (names the nullity).
LinearMapCoeff project_onto(const Presentation& space, const summing::KMixture& mixture);

/// Seeded nonconvex ascent over unit-norm w at amplification level L:
/// maximizes ‖(P ⊗ id_ML)(w)‖ / ‖w‖, a valid lower bound on ‖P‖_cb,
/// nondecreasing in L (levels ≤ L share seeds and carry bests forward).
double cb_lower_matrix_map(const LinearMapCoeff& P, int level,
                           const summing::SearchParams& p = {});

struct PairwiseReport {
  DistanceReport left;   // E → OH_n
  DistanceReport right;  // F → OH_n
  LinearMapCoeff iso;    // E → F through OH_n
  double product_bound = 0.0;
  double guarantee_n = 0.0;
};

/// Composes the two distance reports through OH_n: d_cb(E, F) ≤
/// product(E) × product(F), against the general guarantee n.
PairwiseReport pairwise_distance(const Presentation& e, const Presentation& f,
                                 const DistanceSearchParams& p = {});

}  // namespace opspace::factorize
