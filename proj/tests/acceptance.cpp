// Copyright 2026 the opspace authors
// SPDX-License-Identifier: Apache-2.0
//
// Acceptance suite: every advertised numerical guarantee of the library at
// desk scale, one pass/fail line per criterion.  Exit code = number of
// failed criteria.

#include "opspace/factorize.hpp"
#include "opspace/minnorm.hpp"
#include "opspace/models.hpp"
#include "opspace/summing.hpp"

#include <chrono>
#include <cmath>
#include <cstdio>
#include <sstream>
#include <string>
#include <vector>

using namespace opspace;
using summing::TargetSpec;

namespace {

struct Registry {
  // every lower bound produced during the run, with its space dimension
  std::vector<std::tuple<std::string, Index, double>> lowers;
  // sandwich pairs (lower, certified upper) per space
  std::vector<std::tuple<std::string, double, double>> sandwiches;
  // certificates for the independent post-hoc re-verification
  std::vector<std::tuple<std::string, Presentation, CMat, summing::UpperCertificate>> certs;
};

Registry g_reg;

void note_lower(const std::string& name, Index n, double value) {
  g_reg.lowers.emplace_back(name, n, value);
}

void note_sandwich(const std::string& name, double lo, double hi) {
  g_reg.sandwiches.emplace_back(name, lo, hi);
}

void note_cert(const std::string& name, const Presentation& space, const CMat& U,
               const summing::UpperCertificate& c) {
  g_reg.certs.emplace_back(name, space, U, c);
}

struct Check {
  bool pass = true;
  std::ostringstream detail;

  void require(bool ok, const std::string& what) {
    if (!ok) {
      pass = false;
      detail << (detail.str().empty() ? "" : "; ") << what;
    }
  }
};

std::string fmt(double x) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.6g", x);
  return buf;
}

// ---------------------------------------------------------------------------

Check criterion1_row_column_values() {
  Check c;
  summing::SearchParams p;
  p.restarts = 10;
  p.max_iters = 600;
  summing::CertificateOptions co;
  for (const char* name : {"row", "column"}) {
    for (Index n = 2; n <= 5; ++n) {
      const double target = std::pow(double(n), 0.25);
      const Presentation e = models::make_model(name, n).presentation;
      const auto w = summing::pi2oh_lower(e, TargetSpec::identity_map(), n, p);
      note_lower(std::string(name) + std::to_string(n), n, w.value);
      c.require(w.value >= 0.98 * target && w.value <= target + 1e-6,
                std::string(name) + std::to_string(n) + " lower " + fmt(w.value));
      const auto cert = summing::pi2oh_upper_certificate(e, CMat::Identity(n, n), co);
      note_cert(std::string(name) + std::to_string(n), e, CMat::Identity(n, n), cert);
      note_sandwich(std::string(name) + std::to_string(n), w.value, cert.C);
      c.require(cert.sound() && cert.C <= 1.02 * target,
                std::string(name) + std::to_string(n) + " upper " + fmt(cert.C));
    }
  }
  return c;
}

Check criterion2_closed_form_vs_generic() {
  Check c;
  Rng rng(0xacc2ULL);
  for (const char* name : {"row", "column"}) {
    for (int rep = 0; rep < 100; ++rep) {
      const Index n = 2 + rep % 5;
      const Index k = 1 + rep % 5;
      const Presentation e = models::make_model(name, n).presentation;
      const CMat A = rng.gaussian_matrix(k, n);
      const double generic = min_norm(TupleOfElements(e, A));
      const double closed = (A.adjoint() * A).norm();
      if (std::abs(generic - closed) > 1e-8 * closed) {
        c.require(false, std::string(name) + " rep " + std::to_string(rep) + ": " +
                             fmt(generic) + " vs " + fmt(closed));
        break;
      }
    }
  }
  for (Index n = 2; n <= 5; ++n) {
    const double v = min_norm(TupleOfElements(models::row_space(n), CMat::Identity(n, n)));
    c.require(std::abs(v - std::sqrt(double(n))) <= 1e-10,
              "canonical row" + std::to_string(n) + " " + fmt(v));
  }
  return c;
}

Check criterion3_oh_values() {
  Check c;
  summing::SearchParams p;
  p.restarts = 10;
  p.max_iters = 800;
  for (Index n = 2; n <= 4; ++n) {
    const auto w = summing::pi2oh_lower(models::oh_space(n), TargetSpec::identity_map(), n, p);
    note_lower("oh" + std::to_string(n), n, w.value);
    const double sqn = std::sqrt(double(n));
    c.require(std::abs(w.value - sqn) <= 0.01 * sqn,
              "oh" + std::to_string(n) + " estimator " + fmt(w.value));
    const auto cert =
        summing::pi2oh_upper_certificate(models::oh_space(n), CMat::Identity(n, n));
    note_cert("oh" + std::to_string(n), models::oh_space(n), CMat::Identity(n, n), cert);
    note_sandwich("oh" + std::to_string(n), w.value, cert.C);
  }
  for (Index n : {2, 3, 4, 6}) {
    for (Index k : {1, 2, 3, 5, 8}) {
      const double expect = std::sqrt(double(std::min(k, n)));
      for (SpaceLabel lab : {SpaceLabel::oh, SpaceLabel::row, SpaceLabel::column}) {
        const double v = summing::pi2_lower_model(lab, n, k);
        if (std::abs(v - expect) > 1e-10)
          c.require(false, "pi2 model n=" + std::to_string(n) + " k=" + std::to_string(k));
      }
    }
  }
  return c;
}

Check criterion4_psd_reduction() {
  Check c;
  Rng rng(0xacc4ULL);
  PsdAscentParams p;
  p.restarts = 16;
  p.max_iters = 900;
  double worst = 0.0;
  for (int rep = 0; rep < 50; ++rep) {
    const Index d = 2 + rep % 5;  // d <= 6
    const Index k = 1 + rep % 6;  // k <= 6
    const Presentation md = matrix_space(d);
    const CMat A = rng.gaussian_matrix(k, d * d);
    const TupleOfElements t(md, A);
    const double full = min_norm(t);
    const double restricted = min_norm_psd_restricted(t, p);
    worst = std::max(worst, std::abs(full - restricted) / std::max(1.0, full));
  }
  c.require(worst <= 1e-6, "worst relative gap " + fmt(worst));
  c.detail << "worst gap " << fmt(worst);
  return c;
}

Check criterion5_clifford() {
  Check c;
  summing::SearchParams p;
  p.restarts = 6;
  p.max_iters = 400;
  summing::CertificateOptions co;
  for (Index n = 2; n <= 6; ++n) {
    const auto rep = models::clifford_identity_suite(n, 64);
    c.require(rep.hermiticity_residual <= 1e-12 && rep.square_residual <= 1e-12 &&
                  rep.anticommutator_residual <= 1e-12,
              "n=" + std::to_string(n) + " generator residuals");
    c.require(rep.sum_identity_residual <= 1e-12,
              "n=" + std::to_string(n) + " sum identity " + fmt(rep.sum_identity_residual));
    c.require(rep.trace_identity_residual <= 1e-12,
              "n=" + std::to_string(n) + " trace identity " + fmt(rep.trace_identity_residual));

    const auto probe = models::clifford_ratio_probe(n, 10000, true, 0x9b0beULL + n);
    c.require(probe.min_ratio >= 0.5 - 1e-9,
              "n=" + std::to_string(n) + " ratio " + fmt(probe.min_ratio));

    const auto s = models::clifford_pi2oh_sandwich(n, p, co);
    note_lower("clifford" + std::to_string(n), n, s.lower);
    note_sandwich("clifford" + std::to_string(n), s.lower, s.upper);
    note_cert("clifford" + std::to_string(n) + "-coeff", models::clifford_space(n),
              CMat::Identity(n, n), s.certificate);
    c.require(s.lower >= 1.0 - 1e-6 && s.upper <= std::sqrt(2.0) + 1e-6 &&
                  s.lower <= s.upper + 1e-6,
              "n=" + std::to_string(n) + " sandwich [" + fmt(s.lower) + ", " + fmt(s.upper) + "]");
  }
  return c;
}

Check criterion6_ceiling() {
  Check c;
  // a couple of generic spaces widen the sample beyond the named models
  summing::SearchParams p;
  p.restarts = 6;
  p.max_iters = 300;
  Rng rng(0xacc6ULL);
  for (int rep = 0; rep < 4; ++rep) {
    const Index n = 2 + rep % 3;
    std::vector<CMat> basis;
    for (Index i = 0; i < n; ++i) basis.push_back(rng.gaussian_matrix(3, 3));
    const Presentation e(std::move(basis));
    const auto w = summing::pi2oh_lower(e, TargetSpec::identity_map(), n, p);
    note_lower("generic" + std::to_string(rep), n, w.value);
  }
  for (const auto& [name, n, lo] : g_reg.lowers) {
    const double ceiling = std::sqrt(double(n)) * (1.0 + 1e-6);
    if (lo > ceiling) c.require(false, name + " lower " + fmt(lo) + " > " + fmt(ceiling));
  }
  c.detail << g_reg.lowers.size() << " lower bounds checked";
  return c;
}

Check criterion7_distance() {
  Check c;
  factorize::DistanceSearchParams p;
  p.restarts = 4;
  p.refine_iters = 36;
  p.lower.restarts = 4;
  p.lower.max_iters = 200;
  p.lewis_max_rounds = 8;

  for (Index n = 2; n <= 4; ++n) {
    const auto rep = factorize::distance_to_oh(models::row_space(n), p);
    c.require(rep.product <= std::sqrt(double(n)) + 1e-6,
              "row" + std::to_string(n) + " product " + fmt(rep.product));
    c.require(rep.product >= 1.0 - 1e-9, "product below 1");
    note_cert("distance-row" + std::to_string(n), models::row_space(n), rep.u.U,
              rep.certificate);
  }

  double worst = 0.0;
  for (std::uint64_t seed = 1; seed <= 20; ++seed) {
    Rng rng(seed * 7777);
    std::vector<CMat> basis;
    for (Index i = 0; i < 2; ++i) basis.push_back(rng.gaussian_matrix(3, 3));
    const Presentation e(std::move(basis));
    const auto rep = factorize::distance_to_oh(e, p);
    worst = std::max(worst, rep.product);
    note_cert("distance-sub" + std::to_string(seed), e, rep.u.U, rep.certificate);
  }
  c.require(worst <= std::sqrt(2.0) * 1.05, "worst subspace product " + fmt(worst));
  c.detail << "worst random-subspace product " << fmt(worst);
  return c;
}

Check criterion8_projection() {
  Check c;
  const Presentation r2 = embed_square(models::row_space(2));
  const auto cert = summing::pi2oh_upper_certificate(r2, CMat::Identity(2, 2));
  c.require(cert.sound() && !cert.mixture.empty(), "no mixture certificate for R_2");
  const auto P = factorize::project_onto(r2, cert.mixture);

  CMat B(4, 2);
  for (Index i = 0; i < 2; ++i) B.col(i) = vec_rm(r2.basis(i));
  const double resid_incl = (P.U * B - CMat::Identity(2, 2)).norm();
  const CMat PU = B * P.U;
  const double resid_idem = (PU * PU - PU).norm();
  c.require(resid_incl <= 1e-12, "inclusion residual " + fmt(resid_incl));
  c.require(resid_idem <= 1e-12, "idempotency residual " + fmt(resid_idem));

  summing::SearchParams sp;
  sp.restarts = 8;
  sp.max_iters = 400;
  for (int lv = 1; lv <= 4; ++lv) {
    const double lb = factorize::cb_lower_matrix_map(P, lv, sp);
    if (lb > std::sqrt(2.0) + 1e-6)
      c.require(false, "level " + std::to_string(lv) + " cb lower " + fmt(lb));
  }

  // the amplification engine must detect non-complete-boundedness
  const Presentation m2 = matrix_space(2);
  CMat T = CMat::Identity(4, 4);
  T(1, 1) = T(2, 2) = 0.0;
  T(1, 2) = T(2, 1) = 1.0;
  const double tr_lb = factorize::cb_lower_matrix_map({m2, m2, T}, 2, sp);
  c.require(tr_lb >= 2.0 - 1e-3, "transpose amplification " + fmt(tr_lb));
  c.detail << "transpose lower bound " << fmt(tr_lb);
  return c;
}

Check criterion9_pairwise() {
  Check c;
  factorize::DistanceSearchParams p;
  p.restarts = 4;
  p.refine_iters = 36;
  p.lower.restarts = 4;
  p.lower.max_iters = 200;
  p.lewis_max_rounds = 8;
  const auto rep = factorize::pairwise_distance(models::row_space(2), models::column_space(2), p);
  c.require(rep.product_bound <= 2.0 + 1e-6, "bound " + fmt(rep.product_bound));
  c.detail << "R_2 vs C_2 bound " << fmt(rep.product_bound);
  return c;
}

Check criterion10_soundness() {
  Check c;
  for (const auto& [name, lo, hi] : g_reg.sandwiches)
    if (lo > hi + 1e-6) c.require(false, name + ": lower " + fmt(lo) + " > upper " + fmt(hi));

  // independent post-hoc verification: rebuild each certificate's gram from
  // its stored mixture and re-check the eigenvalue bound
  int verified = 0;
  for (const auto& [name, space, U, cert] : g_reg.certs) {
    if (!cert.sound()) {
      c.require(false, name + ": certificate not sound");
      continue;
    }
    CMat G;
    if (cert.closed_form_oh || cert.mixture.empty()) {
      G = cert.gram_phi;
    } else {
      const Presentation sq = space.coefficient_only() ? space : embed_square(space);
      G = cert.mixture.gram(sq);
    }
    const CMat T = hermitian_part(U.adjoint() * U);
    const double eig = min_hermitian_eigenvalue(cert.C * cert.C * G - T);
    if (eig < -1e-8) c.require(false, name + ": posthoc eig " + fmt(eig));
    ++verified;
  }
  c.detail << g_reg.sandwiches.size() << " sandwiches, " << verified
           << " certificates re-verified";
  return c;
}

}  // namespace

int main() {
  struct Item {
    int id;
    const char* label;
    Check (*run)();
  };
  const Item items[] = {
      {1, "row/column summing values n^(1/4) (n = 2..5)", criterion1_row_column_values},
      {2, "closed form vs generic engine on row/column tuples", criterion2_closed_form_vs_generic},
      {3, "oh model values sqrt(n) and pi_2 closed form", criterion3_oh_values},
      {4, "positive-cone reduction equals min_norm (50 random tuples)", criterion4_psd_reduction},
      {5, "clifford identities, ratio probe, sandwich (n = 2..6)", criterion5_clifford},
      {6, "sqrt(n) ceiling over every lower bound", criterion6_ceiling},
      {7, "distance to OH: rows exact route, 20 random subspaces", criterion7_distance},
      {8, "projection onto R_2: idempotent, cb bounds, transpose probe", criterion8_projection},
      {9, "pairwise distance R_2 vs C_2 through OH_2", criterion9_pairwise},
      {10, "sandwich soundness and post-hoc certificate checks", criterion10_soundness},
  };

  int failures = 0;
  for (const Item& item : items) {
    const auto t0 = std::chrono::steady_clock::now();
    const Check c = item.run();
    const double secs =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    std::string detail = c.detail.str();
    std::printf("%s criterion %2d: %s%s%s  [%.1fs]\n", c.pass ? "PASS" : "FAIL", item.id,
                item.label, detail.empty() ? "" : " -- ", detail.c_str(), secs);
    std::fflush(stdout);
    if (!c.pass) ++failures;
  }
  if (failures == 0)
    std::printf("all %d acceptance criteria pass\n", 10);
  else
    std::printf("%d acceptance criteria FAILED\n", failures);
  return failures;
}
