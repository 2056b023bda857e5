// Copyright 2026 the opspace authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include "opspace/core.hpp"
#include "opspace/summing.hpp"

#include <string>
#include <vector>

namespace opspace::models {

/// Hermitian unitary anticommuting generators by the Jordan-Wigner
/// construction in M_(2^ceil(n/2)):
///   u_(2k−1) = Z^(k−1) ⊗ X ⊗ I…,  u_(2k) = Z^(k−1) ⊗ Y ⊗ I….
std::vector<CMat> clifford_generators(Index n);

Presentation row_space(Index n);     // basis e_1i, shape (1, n)
Presentation column_space(Index n);  // basis e_i1, shape (n, 1)
Presentation oh_space(Index n);      // coefficient-only model
Presentation clifford_space(Index n);

struct ModelSpace {
  SpaceLabel kind = SpaceLabel::generic;
  Index n = 0;
  Presentation presentation;
};

ModelSpace make_model(SpaceLabel kind, Index n);
ModelSpace make_model(const std::string& kind, Index n);

/// Closed-form min tensor norm of the tuple with coefficient matrix A:
///   row / column → ‖A†A‖_F,   oh → σ_max(A)².
/// No closed form exists for Clifford spans; use the generic engine.
double closed_form_min_norm(SpaceLabel kind, const CMat& A);

struct CliffordIdentityReport {
  Index n = 0;
  Index ambient = 0;  // 2^ceil(n/2)
  double hermiticity_residual = 0.0;
  double square_residual = 0.0;          // max ‖u_i² − I‖
  double anticommutator_residual = 0.0;  // max over i≠j ‖u_i u_j + u_j u_i‖
  double sum_identity_residual = 0.0;    // ‖i(x)†i(x) + i(x)i(x)† − 2‖x‖²I‖ on samples
  double norm_lower_slack = 0.0;         // max(0, ‖x‖² − ‖i(x)‖²)
  double norm_upper_slack = 0.0;         // max(0, ‖i(x)‖² − 2‖x‖²)
  double trace_identity_residual = 0.0;  // max |τ(i(x)†i(x)) − ‖x‖²|

  bool pass(double tol = 1e-12) const;
};

/// Verifies the generator relations exactly and the sum/trace identities on
/// random coefficient vectors, with the normalized trace taken on the
/// actual ambient dimension.
CliffordIdentityReport clifford_identity_suite(Index n, int samples = 64,
                                               std::uint64_t seed = 0xc11ff0c3ULL);

struct RatioProbeReport {
  Index n = 0;
  int samples = 0;
  double min_ratio = 0.0;  // min of min_norm(tuple) / Σ‖a_j‖² observed
};

/// Minimizes min_norm(tuple)/Σ‖a_j‖² over tuples in the Clifford span by
/// seeded sampling plus descent (the descent phase reuses the summing
/// ascent on the inverted ratio).  The minimum must stay ≥ 1/2.
RatioProbeReport clifford_ratio_probe(Index n, int samples = 10000, bool with_descent = true,
                                      std::uint64_t seed = 0x9b0beULL,
                                      const summing::SearchParams& descent = {8, 400, 0x9b0beULL,
                                                                              0.1, 1e-9, 50});

struct CliffordSandwich {
  Index n = 0;
  double lower = 0.0;          // feasible tuple ratio
  double upper = 0.0;          // √2 × certified coefficient-map constant
  double coeff_map_C = 0.0;    // certified constant of E_n → OH_n coefficients
  double comparison_factor = 0.0;  // ≤ √2, backed by the identity suite
  summing::LowerWitness witness;
  summing::UpperCertificate certificate;
  CliffordIdentityReport identities;
};

/// Two-sided bound for the identity on the Clifford span: the lower bound is
/// a feasible tuple; the upper bound certifies the coefficient map into OH_n
/// and multiplies by √2, which controls the operator norm against the
/// Euclidean norm once the generator relations are verified.
CliffordSandwich clifford_pi2oh_sandwich(Index n, const summing::SearchParams& p = {},
                                         const summing::CertificateOptions& copts = {});

}  // namespace opspace::models
