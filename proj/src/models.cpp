// Copyright 2026 the opspace authors
// SPDX-License-Identifier: Apache-2.0

#include "opspace/models.hpp"

#include "opspace/minnorm.hpp"

#include <cmath>
#include <stdexcept>

namespace opspace::models {

namespace {

CMat pauli_x() {
  CMat m(2, 2);
  m << 0, 1, 1, 0;
  return m;
}

CMat pauli_y() {
  CMat m(2, 2);
  m << 0, Complex(0, -1), Complex(0, 1), 0;
  return m;
}

CMat pauli_z() {
  CMat m(2, 2);
  m << 1, 0, 0, -1;
  return m;
}

CMat site_operator(const CMat& op, Index site, Index m) {
  CMat out = CMat::Identity(1, 1);
  for (Index s = 0; s < m; ++s) {
    if (s < site)
      out = kron(out, pauli_z());
    else if (s == site)
      out = kron(out, op);
    else
      out = kron(out, CMat::Identity(2, 2));
  }
  return out;
}

}  // namespace

std::vector<CMat> clifford_generators(Index n) {
  if (n < 1) throw std::invalid_argument("clifford_generators: n must be >= 1");
  const Index m = (n + 1) / 2;
  std::vector<CMat> gens;
  gens.reserve(static_cast<std::size_t>(n));
  for (Index i = 0; i < n; ++i) {
    const Index site = i / 2;
    gens.push_back(site_operator((i % 2 == 0) ? pauli_x() : pauli_y(), site, m));
  }
  return gens;
}

Presentation row_space(Index n) {
  if (n < 1) throw std::invalid_argument("row_space: n must be >= 1");
  std::vector<CMat> basis;
  for (Index i = 0; i < n; ++i) {
    CMat b = CMat::Zero(1, n);
    b(0, i) = 1.0;
    basis.push_back(std::move(b));
  }
  return Presentation::unchecked(std::move(basis), SpaceLabel::row);
}

Presentation column_space(Index n) {
  if (n < 1) throw std::invalid_argument("column_space: n must be >= 1");
  std::vector<CMat> basis;
  for (Index i = 0; i < n; ++i) {
    CMat b = CMat::Zero(n, 1);
    b(i, 0) = 1.0;
    basis.push_back(std::move(b));
  }
  return Presentation::unchecked(std::move(basis), SpaceLabel::column);
}

Presentation oh_space(Index n) { return Presentation::oh_model(n); }

Presentation clifford_space(Index n) {
  return Presentation::unchecked(clifford_generators(n), SpaceLabel::clifford);
}

ModelSpace make_model(SpaceLabel kind, Index n) {
  switch (kind) {
    case SpaceLabel::row: return {kind, n, row_space(n)};
    case SpaceLabel::column: return {kind, n, column_space(n)};
    case SpaceLabel::oh: return {kind, n, oh_space(n)};
    case SpaceLabel::clifford: return {kind, n, clifford_space(n)};
    case SpaceLabel::generic: break;
  }
  throw std::invalid_argument("make_model: named models are row, column, oh, clifford");
}

ModelSpace make_model(const std::string& kind, Index n) {
  return make_model(space_label_from_string(kind), n);
}

double closed_form_min_norm(SpaceLabel kind, const CMat& A) {
  if (A.rows() == 0) return 0.0;
  switch (kind) {
    case SpaceLabel::row:
    case SpaceLabel::column:
      return (A.adjoint() * A).norm();
    case SpaceLabel::oh: {
      const double s = spectral_norm(A);
      return s * s;
    }
    default:
      break;
  }
  throw std::invalid_argument("closed_form_min_norm: no closed form for this model");
}

bool CliffordIdentityReport::pass(double tol) const {
  return hermiticity_residual <= tol && square_residual <= tol &&
         anticommutator_residual <= tol && sum_identity_residual <= tol &&
         norm_lower_slack <= 1e-9 && norm_upper_slack <= 1e-9 &&
         trace_identity_residual <= tol;
}

CliffordIdentityReport clifford_identity_suite(Index n, int samples, std::uint64_t seed) {
  const std::vector<CMat> gens = clifford_generators(n);
  CliffordIdentityReport rep;
  rep.n = n;
  rep.ambient = gens[0].rows();
  const CMat eye = CMat::Identity(rep.ambient, rep.ambient);

  for (Index i = 0; i < n; ++i) {
    rep.hermiticity_residual =
        std::max(rep.hermiticity_residual, (gens[i] - gens[i].adjoint()).norm());
    rep.square_residual = std::max(rep.square_residual, (gens[i] * gens[i] - eye).norm());
    for (Index j = i + 1; j < n; ++j)
      rep.anticommutator_residual = std::max(
          rep.anticommutator_residual, (gens[i] * gens[j] + gens[j] * gens[i]).norm());
  }

  Rng rng(seed);
  const double dim = static_cast<double>(rep.ambient);
  for (int s = 0; s < samples; ++s) {
    CVec x = rng.gaussian_vector(n);
    const double x2 = x.squaredNorm();
    CMat ix = CMat::Zero(rep.ambient, rep.ambient);
    for (Index i = 0; i < n; ++i) ix += x(i) * gens[i];
    const CMat lhs = ix.adjoint() * ix + ix * ix.adjoint();
    rep.sum_identity_residual =
        std::max(rep.sum_identity_residual, (lhs - 2.0 * x2 * eye).norm() / std::max(1.0, x2));
    const double nx2 = op_norm(ix);
    const double nrm2 = nx2 * nx2;
    rep.norm_lower_slack = std::max(rep.norm_lower_slack, (x2 - nrm2) / std::max(1.0, x2));
    rep.norm_upper_slack = std::max(rep.norm_upper_slack, (nrm2 - 2.0 * x2) / std::max(1.0, x2));
    const double tau = std::real((ix.adjoint() * ix).trace()) / dim;
    rep.trace_identity_residual =
        std::max(rep.trace_identity_residual, std::abs(tau - x2) / std::max(1.0, x2));
  }
  return rep;
}

RatioProbeReport clifford_ratio_probe(Index n, int samples, bool with_descent,
                                      std::uint64_t seed, const summing::SearchParams& descent) {
  const Presentation E = clifford_space(n);
  RatioProbeReport rep;
  rep.n = n;
  rep.samples = samples;
  double min_ratio = std::numeric_limits<double>::infinity();

  auto ratio_of = [&E](const CMat& A) -> double {
    if (A.rows() == 0) return std::numeric_limits<double>::infinity();
    double mass = 0.0;
    for (Index i = 0; i < A.rows(); ++i) {
      const double s = op_norm(realize_coeffs(E, A.row(i).transpose()));
      mass += s * s;
    }
    if (!(mass > 0.0)) return std::numeric_limits<double>::infinity();
    return min_norm(TupleOfElements(E, A)) / mass;
  };

  // Structured probes first: the generators themselves and single elements.
  min_ratio = std::min(min_ratio, ratio_of(CMat::Identity(n, n)));
  Rng rng(seed);
  for (int s = 0; s < samples; ++s) {
    const Index k = 1 + static_cast<Index>(rng.next_u64() % 3u);
    const CMat A = rng.gaussian_matrix(k, n);
    min_ratio = std::min(min_ratio, ratio_of(A));
  }

  if (with_descent) {
    // Minimizing the ratio is the same search as maximizing the summing
    // ratio Σ‖x_i‖²/min_norm; reuse that ascent and invert.
    const summing::LowerWitness w =
        summing::pi2oh_lower(E, summing::TargetSpec::identity_map(), std::min<Index>(n, 4),
                             descent);
    if (w.value > 0.0) min_ratio = std::min(min_ratio, 1.0 / (w.value * w.value));
  }

  rep.min_ratio = min_ratio;
  return rep;
}

CliffordSandwich clifford_pi2oh_sandwich(Index n, const summing::SearchParams& p,
                                         const summing::CertificateOptions& copts) {
  CliffordSandwich s;
  s.n = n;
  s.identities = clifford_identity_suite(n);
  const Presentation E = clifford_space(n);

  s.witness = summing::pi2oh_lower(E, summing::TargetSpec::identity_map(), n, p);
  s.lower = s.witness.value;

  s.certificate = summing::pi2oh_upper_certificate(E, CMat::Identity(n, n), copts);
  s.coeff_map_C = s.certificate.C;

  // ‖x‖_op ≤ √2 ‖coefficients‖₂ once the generator relations hold; the
  // identity-suite residuals bound the defect.
  const double slack = 2.0 * static_cast<double>(n) * s.identities.anticommutator_residual +
                       2.0 * s.identities.square_residual;
  s.comparison_factor = std::sqrt(2.0 + slack);
  s.upper = s.comparison_factor * s.coeff_map_C;
  return s;
}

}  // namespace opspace::models
