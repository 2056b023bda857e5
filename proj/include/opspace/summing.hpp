// Copyright 2026 the opspace authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include "opspace/core.hpp"
#include "opspace/minnorm.hpp"

#include <optional>
#include <string>
#include <vector>

namespace opspace::summing {

/// A positive functional φ(x ⊗ conj(x')) = tr(x y x'† z) with PSD y, z of
/// Hilbert-Schmidt norm ≤ 1.  Every such φ lies in K(E): it is positive on
/// positive tensors and φ(u) ≤ ‖u‖_min for positive u.
struct PhiFunctional {
  CMat y;  // d2×d2
  CMat z;  // d1×d1

  PhiFunctional(CMat y, CMat z);

  Complex eval(const CMat& x, const CMat& xp) const;  // φ(x ⊗ conj(xp))
  double eval_positive(const CMat& x) const;          // φ(x ⊗ conj(x))
  /// G_ij = φ(b_j ⊗ conj(b_i)); Hermitian PSD.
  CMat gram(const Presentation& space) const;
};

/// Convex mixture Σ λ_m φ_m; K(E) is convex, so the barycenter stays in it.
struct KMixture {
  std::vector<double> weights;
  std::vector<PhiFunctional> atoms;

  void validate() const;
  CMat gram(const Presentation& space) const;
  double eval_positive(const CMat& x) const;
  bool empty() const { return atoms.empty(); }
};

struct SearchParams {
  int restarts = 32;
  int max_iters = 2000;
  std::uint64_t seed = 0x20260808ULL;
  double step0 = 0.1;
  double improve_tol = 1e-9;
  int improve_window = 50;
};

/// Target of the measured map.  Identity measures ‖x_i‖ in E itself (the
/// operator norm of the realized element; the Euclidean coefficient norm on
/// the OH model).  A Hilbert target measures ‖U c‖₂ for the coefficient
/// column c of x.
struct TargetSpec {
  bool identity = true;
  CMat U;

  static TargetSpec identity_map() { return TargetSpec{}; }
  static TargetSpec hilbert(CMat U);
};

struct LowerWitness {
  TupleOfElements tuple;
  double value = 0.0;  // sqrt(Σ ‖u(x_i)‖² / min_norm)
};

/// Re-evaluates the witness ratio from the stored tuple.
double witness_value(const Presentation& space, const TargetSpec& target, const CMat& A);

/// Best feasible lower bound on π^k_(2,oh)(u) found by seeded multi-restart
/// projected subgradient ascent over coefficient tuples.  Tuple sizes
/// 1..k are searched with carry-forward, so the value is nondecreasing in k
/// under shared seeds.  k = 0 returns value 0.
LowerWitness pi2oh_lower(const Presentation& space, const TargetSpec& target, Index k,
                         const SearchParams& p = {});

/// Closed-form k-vector 2-summing value of the identity for the
/// Euclidean-normed model spaces (row / column / oh): √min(k, n).
double pi2_lower_model(SpaceLabel label, Index n, Index k);

struct CertificateOptions {
  int max_atoms = 64;
  int max_rounds = 24;
  double prune_tol = 1e-10;
  double rel_gap = 1e-6;
  std::uint64_t seed = 0x0ce27f1caULL;
  PsdAscentParams oracle{8, 600, 0x0a70317acULL, 1e-10, 40};
  int lambda_iters = 120;
};

enum class CertificateStatus { ok, infeasible_dictionary };

/// Pietsch-type domination certificate for a map into a Hilbertian target:
/// a mixture φ (gram_phi = G) and a constant C with U†U ⪯ C²G.  Soundness
/// is re-checked post hoc by an eigenvalue bound, independent of the search.
struct UpperCertificate {
  CertificateStatus status = CertificateStatus::ok;
  double C = 0.0;
  CMat gram_phi;
  KMixture mixture;           // empty for the closed-form OH certificate
  bool closed_form_oh = false;
  double posthoc_min_eig = 0.0;  // min eig of C² gram_phi − U†U
  std::string diagnostics;

  bool sound(double tol = 1e-8) const {
    return status == CertificateStatus::ok && posthoc_min_eig >= -tol;
  }
};

/// Smallest C found with U†U ⪯ C² G over mixtures of (y, z) atoms; the
/// dictionary grows by column generation, with new atoms proposed by
/// positive-cone ascent on the current worst directions.  On the OH model
/// the optimal certificate is closed form: C = ‖U‖_HS.
UpperCertificate pi2oh_upper_certificate(const Presentation& space, const CMat& U,
                                         const CertificateOptions& opts = {});

/// Column-generation state for one space.  Atoms are elements of K(E) and
/// are valid for every certified map, so a search that certifies many maps
/// on the same space (e.g. the distance search) reuses and enriches one
/// dictionary instead of rebuilding it per candidate.
class CertificateEngine {
 public:
  CertificateEngine(Presentation space, CertificateOptions opts = {});

  /// Certify U†U ⪯ C²G; `rounds` caps the column-generation rounds spent on
  /// this particular map (-1 = the options default).
  UpperCertificate certify(const CMat& U, int rounds = -1);

  Index atom_count() const { return static_cast<Index>(atoms_.size()); }

 private:
  bool add_atom(const CMat& y, const CMat& z);
  void seed_dictionary();
  /// Atoms targeting the currently worst directions (weighted by how close
  /// their generalized eigenvalue sits to the top).
  void generate_cuts(const std::vector<std::pair<double, CVec>>& top_dirs, int round);

  Presentation space_;  // embedded square
  CertificateOptions opts_;
  std::vector<PhiFunctional> atoms_;
  std::vector<CMat> grams_;
  bool seeded_ = false;
};

/// The identity-map witness rescaled to min_norm = 1: Σ‖x_i‖² then equals
/// the squared lower bound, which must be ≥ π̂²/2.
struct MassWitness {
  TupleOfElements tuple;
  double sum_sq_norms = 0.0;
  double threshold = 0.0;  // π̂²/2 from the module's own best lower bound
  double pi_lower = 0.0;
};

MassWitness unit_norm_witness(const Presentation& space, const SearchParams& p = {});

struct InequalityCheck {
  std::string name;
  double lhs = 0.0, rhs = 0.0;
  bool pass = true;
};

struct InequalityInputs {
  Index n = 0;
  std::vector<std::pair<Index, double>> lowers;  // (k, lower bound)
  std::optional<double> certified_upper;
  std::optional<double> cb_exact;  // for maps out of OH, where cb is exact
};

struct InequalityReport {
  std::vector<InequalityCheck> checks;
  bool all_pass = true;
};

/// Consistency checks between estimates: lower ≤ certified upper, the √n
/// ceiling, cb ≤ certified upper, and the √2 relation between k-tuple and
/// n-tuple bounds.
InequalityReport check_inequalities(const InequalityInputs& in);

/// Convenience driver: runs the estimators for the identity on `space` and
/// assembles the checks.  `known_upper` feeds an externally certified upper
/// bound (e.g. the Clifford √2) into the comparison.
InequalityReport run_inequality_suite(const Presentation& space, const SearchParams& p,
                                      const CertificateOptions& copts,
                                      std::optional<double> known_upper = std::nullopt);

}  // namespace opspace::summing
