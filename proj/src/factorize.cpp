// Copyright 2026 the opspace authors
// SPDX-License-Identifier: Apache-2.0

#include "opspace/factorize.hpp"

#include "opspace/minnorm.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>
#include <stdexcept>

namespace opspace::factorize {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

CMat random_unitary(Rng& rng, Index n) {
  const CMat g = rng.gaussian_matrix(n, n);
  Eigen::HouseholderQR<CMat> qr(g);
  CMat q = qr.householderQ() * CMat::Identity(n, n);
  // fix the phase of the R diagonal for determinism
  const CMat r = qr.matrixQR().triangularView<Eigen::Upper>();
  for (Index i = 0; i < n; ++i) {
    const Complex d = r(i, i);
    if (std::abs(d) > 0.0) q.col(i) *= d / std::abs(d);
  }
  return q;
}

}  // namespace

void validate_map(const LinearMapCoeff& m) {
  if (!m.source.valid() || !m.target.valid()) throw std::invalid_argument("map: empty space");
  if (m.U.rows() != m.target.dim() || m.U.cols() != m.source.dim())
    throw std::invalid_argument("map: U must be target.dim × source.dim");
  if (!all_finite(m.U)) throw std::invalid_argument("map: non-finite entries");
}

double smallest_singular(const CMat& U) {
  if (U.rows() == 0 || U.cols() == 0) return 0.0;
  Eigen::JacobiSVD<CMat> svd(U);
  return svd.singularValues()(svd.singularValues().size() - 1);
}

double cb_from_oh_exact(const LinearMapCoeff& m) {
  validate_map(m);
  if (!m.source.coefficient_only())
    throw std::invalid_argument("cb_from_oh_exact: source must be the oh model");
  return cb_norm_from_oh(TupleOfElements(m.target, m.U.transpose()));
}

CbUpperResult cb_upper_into_oh(const LinearMapCoeff& m, const summing::CertificateOptions& copts) {
  validate_map(m);
  if (!m.target.coefficient_only())
    throw std::invalid_argument("cb_upper_into_oh: target must be the oh model");
  CbUpperResult res;
  res.certificate = summing::pi2oh_upper_certificate(m.source, m.U, copts);
  if (!res.certificate.sound()) return res;
  res.ok = true;
  res.value = res.certificate.C;
  if (m.source.coefficient_only()) res.value = std::min(res.value, spectral_norm(m.U));
  return res;
}

// ---------------------------------------------------------------------------
// Distance to OH_n
// ---------------------------------------------------------------------------

namespace {

struct ProductEval {
  bool ok = false;
  double forward = kInf;
  double backward = kInf;
  double product = kInf;
  summing::UpperCertificate cert;
};

ProductEval evaluate_position(const Presentation& space, const CMat& U,
                              summing::CertificateEngine& engine, int cert_rounds = -1) {
  ProductEval e;
  const Index n = space.dim();
  Eigen::JacobiSVD<CMat> svd(U, Eigen::ComputeThinU | Eigen::ComputeThinV);
  const double smax = svd.singularValues()(0);
  const double smin = svd.singularValues()(n - 1);
  if (!(smin > 1e-10 * smax)) return e;  // singular candidates skipped

  if (space.coefficient_only()) {
    e.forward = smax;  // cb is exact for maps between OH models
    e.cert.C = smax;
    e.cert.closed_form_oh = true;
    e.cert.gram_phi = CMat::Identity(n, n) / static_cast<double>(n);
    e.cert.diagnostics = "exact cb norm between OH models";
  } else {
    e.cert = engine.certify(U, cert_rounds);
    if (!e.cert.sound()) return e;
    e.forward = e.cert.C;
  }
  const CMat Uinv = svd.matrixV() * svd.singularValues().cwiseInverse().asDiagonal() *
                    svd.matrixU().adjoint();
  e.backward = cb_from_oh_exact(LinearMapCoeff{Presentation::oh_model(n), space, Uinv});
  e.product = e.forward * e.backward;
  e.ok = true;
  return e;
}

LewisResult lewis_impl(const Presentation& space, const DistanceSearchParams& p,
                       summing::CertificateEngine& engine) {
  const Index n = space.dim();
  LewisResult res;
  CMat S = CMat::Identity(n, n);
  res.map = LinearMapCoeff{space, Presentation::oh_model(n), S};
  res.product = kInf;

  double prev = kInf;
  for (int round = 0; round < p.lewis_max_rounds; ++round) {
    ++res.rounds;
    const ProductEval e = evaluate_position(space, S, engine, round == 0 ? -1 : 2);
    if (e.ok) {
      res.history.push_back(e.product);
      if (e.product < res.product) {
        res.product = e.product;
        res.map.U = S;
      }
      if (std::isfinite(prev) && std::abs(e.product - prev) <= p.lewis_rel_tol * e.product) {
        res.converged = true;
        break;
      }
      const std::size_t h = res.history.size();
      if (h >= 3 && std::abs(res.history[h - 1] - res.history[h - 3]) <=
                        1e-3 * res.history[h - 1])
        break;  // plateau: further rounds only re-certify the same position
      prev = e.product;
    }

    const summing::LowerWitness w =
        summing::pi2oh_lower(space, summing::TargetSpec::hilbert(S), n, p.lower);
    if (w.tuple.size() == 0) break;
    CMat gamma = gram_tuple(w.tuple).C;
    gamma += 1e-12 * std::max(std::real(gamma.trace()), 1e-30) / static_cast<double>(n) *
             CMat::Identity(n, n);
    // damped whitening: a half-power step avoids the overshoot oscillation of
    // the plain inverse square root
    Eigen::SelfAdjointEigenSolver<CMat> es(hermitian_part(S * gamma * S.adjoint()));
    RVec lam = es.eigenvalues();
    for (Index i = 0; i < n; ++i) lam(i) = std::pow(std::max(lam(i), 1e-30), -0.25);
    const CMat white = es.eigenvectors() * lam.asDiagonal() * es.eigenvectors().adjoint();
    CMat S2 = white * S;
    const double nrm = S2.norm();
    if (!(nrm > 0.0)) break;
    S = S2 / nrm;
  }
  return res;
}

}  // namespace

LewisResult lewis_search(const Presentation& space, const DistanceSearchParams& p) {
  summing::CertificateEngine engine(space, p.cert);
  return lewis_impl(space, p, engine);
}

DistanceReport distance_to_oh(const Presentation& space, const DistanceSearchParams& p) {
  const Index n = space.dim();
  DistanceReport rep;
  rep.guarantee_sqrt_n = std::sqrt(static_cast<double>(n));

  // one atom dictionary serves every candidate map on this space
  summing::CertificateEngine engine(space, p.cert);

  CMat bestU;
  ProductEval best;

  auto consider = [&](const CMat& U, int rounds) {
    const ProductEval e = evaluate_position(space, U, engine, rounds);
    if (e.ok && e.product < best.product) {
      best = e;
      bestU = U;
    }
  };

  consider(CMat::Identity(n, n), -1);

  const LewisResult lw = lewis_impl(space, p, engine);
  rep.lewis_converged = lw.converged;
  consider(lw.map.U, -1);

  Rng rng(p.seed);
  for (int r = 0; r < p.restarts; ++r) {
    Rng fork = rng.fork(static_cast<std::uint64_t>(r));
    const CMat q = random_unitary(fork, n);
    const CMat w = random_unitary(fork, n);
    RVec s(n);
    for (Index i = 0; i < n; ++i) s(i) = std::exp(0.6 * (2.0 * fork.uniform() - 1.0));
    consider(q * s.cast<Complex>().asDiagonal() * w, 2);
  }

  if (best.ok) {
    Rng refine_rng = rng.fork(0x5ef1eULL);
    double eta = 0.25;
    for (int it = 0; it < p.refine_iters; ++it) {
      CMat d = refine_rng.gaussian_matrix(n, n);
      d /= std::max(d.norm(), 1e-30);
      const CMat cand = (CMat::Identity(n, n) + eta * d) * bestU;
      const double before = best.product;
      consider(cand, 1);
      if (best.product >= before) eta = std::max(eta * 0.93, 1e-3);
    }
    // final full-quality pass on the winner with a fresh dictionary (the
    // shared one may have filled up with atoms tuned to other candidates)
    summing::CertificateEngine fresh(space, p.cert);
    const ProductEval fin = evaluate_position(space, bestU, fresh, -1);
    if (fin.ok && fin.product < best.product) best = fin;
  }

  if (!best.ok) throw std::runtime_error("distance_to_oh: no invertible position found");
  rep.u = LinearMapCoeff{space, Presentation::oh_model(n), bestU};
  rep.forward_upper = best.forward;
  rep.backward_exact = best.backward;
  rep.product = best.product;
  rep.certificate = best.cert;
  return rep;
}

// ---------------------------------------------------------------------------
// Dual summing norm
// ---------------------------------------------------------------------------

DualNormResult dual_norm_upper(const LinearMapCoeff& v, const FactorSearchParams& p) {
  validate_map(v);
  if (!v.source.coefficient_only())
    throw std::invalid_argument("dual_norm_upper: source must be the oh model");
  const Index n = v.source.dim();

  DualNormResult best;
  best.value = kInf;

  auto consider = [&](CMat H) {
    H = hermitian_part(H);
    const double nrm = H.norm();
    if (!(nrm > 0.0)) return;
    H /= nrm;
    Eigen::SelfAdjointEigenSolver<CMat> es(H);
    const double lmin = es.eigenvalues()(0);
    const double lmax = es.eigenvalues()(n - 1);
    if (!(lmin > 1e-10 * lmax)) return;  // singular B skipped
    const CMat Hinv = es.eigenvectors() * es.eigenvalues().cwiseInverse().asDiagonal() *
                      es.eigenvectors().adjoint();
    const double a_cb =
        cb_from_oh_exact(LinearMapCoeff{v.source, v.target, v.U * Hinv});
    const double cost = H.norm() * a_cb;  // ‖B‖_HS · ‖A‖_cb
    if (cost < best.value) {
      best.value = cost;
      best.B = H;
      best.b_hs = H.norm();
      best.a_cb = a_cb;
    }
  };

  consider(CMat::Identity(n, n));
  consider(psd_sqrt(psd_sqrt(hermitian_part(v.U.adjoint() * v.U))));

  Rng rng(p.seed);
  for (int r = 0; r < p.restarts; ++r) {
    Rng fork = rng.fork(static_cast<std::uint64_t>(r));
    const CMat q = random_unitary(fork, n);
    RVec s(n);
    for (Index i = 0; i < n; ++i) s(i) = std::exp(0.8 * (2.0 * fork.uniform() - 1.0));
    consider(q * s.cast<Complex>().asDiagonal() * q.adjoint());
  }

  if (std::isfinite(best.value)) {
    Rng refine = rng.fork(0xd0a1ULL);
    double eta = 0.2;
    for (int it = 0; it < p.refine_iters; ++it) {
      CMat d = hermitian_part(refine.gaussian_matrix(n, n));
      d /= std::max(d.norm(), 1e-30);
      const double prev = best.value;
      consider(best.B + eta * d);
      if (best.value >= prev) eta = std::max(eta * 0.93, 1e-3);
    }
  }
  return best;
}

// ---------------------------------------------------------------------------
// Projection from the mixture functional
// ---------------------------------------------------------------------------

LinearMapCoeff project_onto(const Presentation& space, const summing::KMixture& mixture) {
  if (space.coefficient_only())
    throw std::invalid_argument("project_onto: needs a concrete presentation");
  if (space.d1() != space.d2())
    throw std::invalid_argument("project_onto: ambient must be square M_d");
  const Index d = space.d1();
  const Index n = space.dim();
  mixture.validate();
  if (mixture.empty()) throw std::invalid_argument("project_onto: empty mixture");
  for (const summing::PhiFunctional& a : mixture.atoms)
    if (a.y.rows() != d || a.z.rows() != d)
      throw std::invalid_argument("project_onto: atom dimension != ambient dimension");

  // Form matrix of ⟨a, b⟩_φ = φ(a ⊗ conj(b)) in vec coordinates:
  // tr(a y b† z) = vec(b)† (z ⊗ yᵀ) vec(a).
  CMat S = CMat::Zero(d * d, d * d);
  for (std::size_t m2 = 0; m2 < mixture.atoms.size(); ++m2)
    S += mixture.weights[m2] *
         kron(mixture.atoms[m2].z, mixture.atoms[m2].y.transpose());
  S = hermitian_part(S);

  CMat B(d * d, n);
  for (Index i = 0; i < n; ++i) B.col(i) = vec_rm(space.basis(i));
  const CMat G = hermitian_part(B.adjoint() * S * B);

  Eigen::SelfAdjointEigenSolver<CMat> es(G);
  const double lmax = std::max(es.eigenvalues()(n - 1), 0.0);
  Index nullity = 0;
  for (Index i = 0; i < n; ++i)
    if (es.eigenvalues()(i) <= 1e-12 * lmax) ++nullity;
  if (nullity > 0 || !(lmax > 0.0)) {
    std::ostringstream os;
    os << "project_onto: functional degenerates on the subspace (nullity " << nullity << ")";
    throw std::invalid_argument(os.str());
  }

  const CMat U = G.ldlt().solve(B.adjoint() * S);
  return LinearMapCoeff{matrix_space(d), space, U};
}

// ---------------------------------------------------------------------------
// Amplified lower bounds on the cb norm
// ---------------------------------------------------------------------------

namespace {

struct AmpEval {
  double num = 0.0, den = 0.0;
  double logf = -kInf;
  std::vector<CMat> grad;
  bool ok = false;
};

class AmpObjective {
 public:
  AmpObjective(std::vector<CMat> xs, std::vector<CMat> ys, Index level)
      : xs_(std::move(xs)), ys_(std::move(ys)), level_(level) {}

  AmpEval eval(const std::vector<CMat>& w, bool want_grad) const {
    AmpEval e;
    const Index n = static_cast<Index>(xs_.size());
    CMat sx = CMat::Zero(xs_[0].rows() * level_, xs_[0].cols() * level_);
    CMat sy = CMat::Zero(ys_[0].rows() * level_, ys_[0].cols() * level_);
    for (Index a = 0; a < n; ++a) {
      sx += kron(xs_[static_cast<std::size_t>(a)], w[static_cast<std::size_t>(a)]);
      sy += kron(ys_[static_cast<std::size_t>(a)], w[static_cast<std::size_t>(a)]);
    }
    const SingularTriple tx = top_singular_triple(sx);
    const SingularTriple ty = top_singular_triple(sy);
    e.den = tx.sigma;
    e.num = ty.sigma;
    if (!(e.den > 1e-280) || !(e.num > 1e-280)) return e;
    e.logf = std::log(e.num) - std::log(e.den);
    if (want_grad) {
      const CMat ux = unvec_rm(tx.left, xs_[0].rows(), level_);
      const CMat vx = unvec_rm(tx.right, xs_[0].cols(), level_);
      const CMat uy = unvec_rm(ty.left, ys_[0].rows(), level_);
      const CMat vy = unvec_rm(ty.right, ys_[0].cols(), level_);
      e.grad.resize(static_cast<std::size_t>(n));
      for (Index a = 0; a < n; ++a) {
        const CMat gn = (uy.adjoint() * ys_[static_cast<std::size_t>(a)] * vy).conjugate();
        const CMat gd = (ux.adjoint() * xs_[static_cast<std::size_t>(a)] * vx).conjugate();
        e.grad[static_cast<std::size_t>(a)] = gn / e.num - gd / e.den;
      }
    }
    e.ok = true;
    return e;
  }

 private:
  std::vector<CMat> xs_, ys_;
  Index level_;
};

double amp_norm(const std::vector<CMat>& w) {
  double s = 0.0;
  for (const CMat& m : w) s += m.squaredNorm();
  return std::sqrt(s);
}

double ascend_amp(const AmpObjective& obj, std::vector<CMat> w, const summing::SearchParams& p,
                  Rng rng, std::vector<CMat>* best_w) {
  AmpEval ev = obj.eval(w, true);
  if (!ev.ok) return 0.0;
  double f = ev.logf;
  double bestf = f;
  std::vector<CMat> best = w;
  int stalls = 0;
  double window_ref = bestf;
  int window_count = 0;

  for (int it = 0; it < p.max_iters; ++it) {
    double gn = amp_norm(ev.grad);
    if (!(gn > 1e-14)) break;
    double step = p.step0 * amp_norm(w) / gn;
    bool improved = false;
    std::vector<CMat> w2 = w;
    for (int ls = 0; ls < 30; ++ls) {
      for (std::size_t a = 0; a < w.size(); ++a) w2[a] = w[a] + step * ev.grad[a];
      const AmpEval e2 = obj.eval(w2, false);
      if (e2.ok && e2.logf > f + 1e-4 * step * gn * gn) {
        improved = true;
        break;
      }
      step *= 0.5;
    }
    if (improved) {
      const double nrm = amp_norm(w2);
      for (CMat& m : w2) m /= nrm;
      w = w2;
      stalls = 0;
    } else {
      for (std::size_t a = 0; a < w.size(); ++a)
        w[a] += 1e-7 * rng.gaussian_matrix(w[a].rows(), w[a].cols());
      if (++stalls >= 4) break;
    }
    ev = obj.eval(w, true);
    if (!ev.ok) break;
    f = ev.logf;
    if (f > bestf) {
      bestf = f;
      best = w;
    }
    if (++window_count >= p.improve_window) {
      if (bestf - window_ref <= p.improve_tol * (1.0 + std::abs(bestf))) break;
      window_ref = bestf;
      window_count = 0;
    }
  }

  const AmpEval eb = obj.eval(best, false);
  if (best_w) *best_w = best;
  return eb.ok ? eb.num / eb.den : 0.0;
}

}  // namespace

double cb_lower_matrix_map(const LinearMapCoeff& P, int level, const summing::SearchParams& p) {
  validate_map(P);
  if (P.source.coefficient_only() || P.target.coefficient_only())
    throw std::invalid_argument("cb_lower_matrix_map: needs concrete presentations");
  if (level < 1) throw std::invalid_argument("cb_lower_matrix_map: level must be >= 1");
  const Index n = P.source.dim();

  std::vector<CMat> xs, ys;
  xs.reserve(static_cast<std::size_t>(n));
  ys.reserve(static_cast<std::size_t>(n));
  for (Index a = 0; a < n; ++a) {
    xs.push_back(P.source.basis(a));
    ys.push_back(realize_coeffs(P.target, P.U.col(a)));
  }

  Rng base(p.seed);
  double best = 0.0;
  std::vector<CMat> carry;  // best w from the previous level, zero-padded

  for (Index lv = 1; lv <= level; ++lv) {
    const AmpObjective obj(xs, ys, lv);
    std::vector<CMat> lv_best;
    double lv_val = 0.0;

    auto run = [&](std::vector<CMat> w0, Rng rng) {
      std::vector<CMat> wout;
      const double v = ascend_amp(obj, std::move(w0), p, rng, &wout);
      if (v > lv_val) {
        lv_val = v;
        lv_best = wout;
      }
    };

    // structured starts: transposed/adjoint basis blocks produce swap-type
    // contractions when shapes permit
    if (P.source.d2() == lv && P.source.d1() == lv) {
      std::vector<CMat> w0;
      for (Index a = 0; a < n; ++a) w0.push_back(P.source.basis(a).adjoint());
      run(std::move(w0), base.fork(900 + static_cast<std::uint64_t>(lv)));
      std::vector<CMat> w1;
      for (Index a = 0; a < n; ++a) w1.push_back(P.source.basis(a).transpose());
      run(std::move(w1), base.fork(901 + static_cast<std::uint64_t>(lv)));
    }
    if (!carry.empty()) {
      std::vector<CMat> w0;
      for (const CMat& m : carry) {
        CMat pad = CMat::Zero(lv, lv);
        pad.topLeftCorner(lv - 1, lv - 1) = m;
        w0.push_back(std::move(pad));
      }
      run(std::move(w0), base.fork(77 + static_cast<std::uint64_t>(lv)));
    }
    const int restarts = std::max(4, p.restarts / 2);
    for (int r = 0; r < restarts; ++r) {
      Rng fork = base.fork(static_cast<std::uint64_t>(lv) * 1009u + static_cast<std::uint64_t>(r));
      std::vector<CMat> w0;
      for (Index a = 0; a < n; ++a) w0.push_back(fork.gaussian_matrix(lv, lv));
      run(std::move(w0), fork.fork(5));
    }

    best = std::max(best, lv_val);
    carry = lv_best;
  }
  return best;
}

PairwiseReport pairwise_distance(const Presentation& e, const Presentation& f,
                                 const DistanceSearchParams& p) {
  if (e.dim() != f.dim()) throw std::invalid_argument("pairwise_distance: dimension mismatch");
  PairwiseReport rep;
  rep.left = distance_to_oh(e, p);
  rep.right = distance_to_oh(f, p);
  rep.product_bound = rep.left.product * rep.right.product;
  rep.guarantee_n = static_cast<double>(e.dim());

  Eigen::JacobiSVD<CMat> svd(rep.right.u.U, Eigen::ComputeThinU | Eigen::ComputeThinV);
  const CMat inv = svd.matrixV() * svd.singularValues().cwiseInverse().asDiagonal() *
                   svd.matrixU().adjoint();
  rep.iso = LinearMapCoeff{e, f, inv * rep.left.u.U};
  return rep;
}

}  // namespace opspace::factorize
