// Copyright 2026 the opspace authors
// SPDX-License-Identifier: Apache-2.0

#include "opspace/summing.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>
#include <stdexcept>

namespace opspace::summing {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

double real_quad(const CMat& G, const CVec& c) { return std::real((c.adjoint() * G * c)(0, 0)); }

}  // namespace

PhiFunctional::PhiFunctional(CMat y_, CMat z_) : y(std::move(y_)), z(std::move(z_)) {
  if (y.rows() != y.cols() || z.rows() != z.cols())
    throw std::invalid_argument("phi functional: y, z must be square");
  const double sy = y.norm(), sz = z.norm();
  if (sy > 1.0 + 1e-12 || sz > 1.0 + 1e-12)
    throw std::invalid_argument("phi functional: HS norm exceeds 1");
  if ((y - y.adjoint()).norm() > 1e-9 * (1.0 + sy) || (z - z.adjoint()).norm() > 1e-9 * (1.0 + sz))
    throw std::invalid_argument("phi functional: y, z must be Hermitian");
  const double tol_y = kPsdTol * (1.0 + std::abs(y.trace()));
  const double tol_z = kPsdTol * (1.0 + std::abs(z.trace()));
  if (min_hermitian_eigenvalue(y) < -tol_y || min_hermitian_eigenvalue(z) < -tol_z)
    throw std::invalid_argument("phi functional: y, z must be PSD");
}

Complex PhiFunctional::eval(const CMat& x, const CMat& xp) const {
  return (x * y * xp.adjoint() * z).trace();
}

double PhiFunctional::eval_positive(const CMat& x) const { return std::real(eval(x, x)); }

CMat PhiFunctional::gram(const Presentation& space) const {
  const Index n = space.dim();
  std::vector<CMat> left(static_cast<std::size_t>(n)), right(static_cast<std::size_t>(n));
  for (Index i = 0; i < n; ++i) {
    left[static_cast<std::size_t>(i)] = space.basis(i) * y;
    right[static_cast<std::size_t>(i)] = space.basis(i).adjoint() * z;
  }
  CMat G(n, n);
  for (Index i = 0; i < n; ++i)
    for (Index j = 0; j < n; ++j)
      G(i, j) = (left[static_cast<std::size_t>(j)] * right[static_cast<std::size_t>(i)]).trace();
  return hermitian_part(G);
}

void KMixture::validate() const {
  if (weights.size() != atoms.size()) throw std::invalid_argument("mixture: size mismatch");
  double sum = 0.0;
  for (double w : weights) {
    if (!(w > 0.0)) throw std::invalid_argument("mixture: weights must be positive");
    sum += w;
  }
  if (!atoms.empty() && std::abs(sum - 1.0) > 1e-10)
    throw std::invalid_argument("mixture: weights must sum to 1");
}

CMat KMixture::gram(const Presentation& space) const {
  CMat G = CMat::Zero(space.dim(), space.dim());
  for (std::size_t m = 0; m < atoms.size(); ++m) G += weights[m] * atoms[m].gram(space);
  return G;
}

double KMixture::eval_positive(const CMat& x) const {
  double v = 0.0;
  for (std::size_t m = 0; m < atoms.size(); ++m) v += weights[m] * atoms[m].eval_positive(x);
  return v;
}

TargetSpec TargetSpec::hilbert(CMat U) {
  if (!all_finite(U)) throw std::invalid_argument("target: non-finite map");
  TargetSpec t;
  t.identity = false;
  t.U = std::move(U);
  return t;
}

// ---------------------------------------------------------------------------
// Lower-bound search
// ---------------------------------------------------------------------------

namespace {

struct ObjectiveEval {
  double N = 0.0;  // Σ ‖u(x_i)‖²
  double D = 0.0;  // min_norm of the tuple
  double logf = -kInf;
  CMat grad;
  bool tie = false;
  bool ok = false;
};

// Scale-invariant ratio objective N(A)/D(A) with Wirtinger subgradients.
// A Hilbert target keeps everything in coefficients; the identity target on
// a concrete presentation uses the operator norms of the realized elements,
// with subgradients from top singular pairs.
class LowerObjective {
 public:
  LowerObjective(Presentation space, const TargetSpec& target) : space_(std::move(space)) {
    const Index n = space_.dim();
    if (space_.coefficient_only()) {
      hilbert_ = true;
      V_ = target.identity ? CMat(CMat::Identity(n, n)) : CMat(target.U.transpose());
    } else if (!target.identity) {
      hilbert_ = true;
      V_ = target.U.transpose();
    }
    if (hilbert_) {
      if (V_.rows() != n) throw std::invalid_argument("target map: column count != basis size");
      VVh_ = V_ * V_.adjoint();
    }
  }

  const Presentation& space() const { return space_; }

  ObjectiveEval eval(const CMat& A, bool want_grad, bool exact = false) const {
    ObjectiveEval e;
    const Index k = A.rows();
    const Index n = space_.dim();
    if (k == 0 || A.norm() <= 1e-280) return e;

    CMat gradN, gradD;
    std::vector<CMat> X;

    if (hilbert_) {
      e.N = (A * V_).squaredNorm();
      if (want_grad) gradN = 2.0 * A * VVh_;
    } else {
      e.N = 0.0;
      if (want_grad) gradN = CMat::Zero(k, n);
      X.reserve(static_cast<std::size_t>(k));
      for (Index i = 0; i < k; ++i)
        X.push_back(realize_coeffs(space_, A.row(i).transpose()));
      for (Index i = 0; i < k; ++i) {
        const SingularTriple t = top_singular_triple(X[static_cast<std::size_t>(i)]);
        e.N += t.sigma * t.sigma;
        if (want_grad && t.sigma > 0.0) {
          const CMat uv = t.left * t.right.adjoint();
          for (Index a = 0; a < n; ++a)
            gradN(i, a) += 2.0 * t.sigma * hs_inner(space_.basis(a), uv);
        }
      }
    }

    if (space_.coefficient_only()) {
      Eigen::JacobiSVD<CMat> svd(A, Eigen::ComputeThinU | Eigen::ComputeThinV);
      const double s = svd.singularValues()(0);
      e.D = s * s;
      if (svd.singularValues().size() > 1 && s > 0.0 &&
          (s - svd.singularValues()(1)) < 1e-7 * s)
        e.tie = true;
      if (want_grad && s > 0.0) {
        const CVec u = svd.matrixU().col(0);
        const CVec v = svd.matrixV().col(0);
        gradD = 2.0 * s * (u * v.adjoint());
      }
    } else {
      if (X.empty()) {
        X.reserve(static_cast<std::size_t>(k));
        for (Index i = 0; i < k; ++i)
          X.push_back(realize_coeffs(space_, A.row(i).transpose()));
      }
      const Index d1 = space_.d1(), d2 = space_.d2();
      CMat M = CMat::Zero(d1 * d1, d2 * d2);
      for (const CMat& x : X) M += kron(x, x.conjugate());
      // Warm-started power iteration beats a fresh SVD at every evaluation.
      // A warm vector orthogonal to the new top space could converge to a
      // lower singular value, so every call decorrelates the start with a
      // random jitter; glitches then cannot persist across evaluations.
      const bool use_power = !exact && M.cols() >= 9 && warm_.size() == M.cols();
      SingularTriple t;
      if (use_power) {
        CVec warm = warm_;
        warm += (0.05 * warm.norm()) * jitter_rng_.gaussian_vector(warm.size());
        t = top_singular_triple(M, &warm, true);
      } else {
        t = top_singular_triple(M);
      }
      warm_ = t.right;
      e.D = t.sigma;
      if (want_grad && t.sigma > 0.0) {
        const CMat P = unvec_rm(t.left, d1, d1);
        const CMat Q = unvec_rm(t.right, d2, d2);
        gradD = CMat::Zero(k, n);
        for (Index i = 0; i < k; ++i) {
          const CMat& Xi = X[static_cast<std::size_t>(i)];
          const CMat W = Q * Xi.adjoint() * P.adjoint();  // α_ia = tr(b_a W)
          const CMat Z = P.adjoint() * Xi * Q;            // β_ia = <b_a, Z>
          for (Index a = 0; a < n; ++a) {
            const Complex alpha = (space_.basis(a) * W).trace();
            const Complex beta = hs_inner(space_.basis(a), Z);
            gradD(i, a) = std::conj(alpha) + beta;
          }
        }
      }
    }

    if (!(e.N > 1e-280) || !(e.D > 1e-280)) return e;
    e.logf = std::log(e.N) - std::log(e.D);
    if (want_grad) e.grad = gradN / e.N - gradD / e.D;
    e.ok = true;
    return e;
  }

 private:
  Presentation space_;
  bool hilbert_ = false;
  CMat V_;    // n×m: coefficients of u(x) are (c·Vᵀ... row form) row_A · V
  CMat VVh_;
  mutable CVec warm_;
  mutable Rng jitter_rng_{0x77a3f00dULL};
};

struct AscentOutcome {
  CMat A;
  double value2 = 0.0;
};

AscentOutcome ascend(const LowerObjective& obj, CMat A, const SearchParams& p, Rng rng) {
  AscentOutcome out;
  double an = A.norm();
  if (an <= 0.0) return out;
  A /= an;
  ObjectiveEval ev = obj.eval(A, true);
  if (!ev.ok) return out;
  double f = ev.logf;
  double bestf = f;
  CMat bestA = A;
  double window_ref = bestf;
  int window_count = 0;
  int stalls = 0;

  for (int it = 0; it < p.max_iters; ++it) {
    const double gn = ev.grad.norm();
    if (!(gn > 1e-14)) break;
    double step = p.step0 * A.norm() / gn;
    bool improved = false;
    CMat A2;
    double f2 = f;
    for (int ls = 0; ls < 30; ++ls) {
      A2 = A + step * ev.grad;
      const ObjectiveEval e2 = obj.eval(A2, false);
      if (e2.ok && e2.logf > f + 1e-4 * step * gn * gn) {
        f2 = e2.logf;
        improved = true;
        break;
      }
      step *= 0.5;
    }
    if (improved) {
      A = A2 / A2.norm();
      f = f2;
      stalls = 0;
    } else {
      // nonsmooth tie or stall: small smoothing perturbation, then retry
      A += 1e-7 * A.norm() * rng.gaussian_matrix(A.rows(), A.cols());
      A /= A.norm();
      if (++stalls >= 4) break;
    }
    ev = obj.eval(A, true);
    if (!ev.ok) break;
    f = ev.logf;
    if (f > bestf) {
      bestf = f;
      bestA = A;
    }
    if (++window_count >= p.improve_window) {
      if (bestf - window_ref <= p.improve_tol * (1.0 + std::abs(bestf))) break;
      window_ref = bestf;
      window_count = 0;
    }
  }

  const ObjectiveEval eb = obj.eval(bestA, false, /*exact=*/true);
  if (eb.ok) {
    out.A = bestA;
    out.value2 = eb.N / eb.D;
  }
  return out;
}

}  // namespace

double witness_value(const Presentation& space, const TargetSpec& target, const CMat& A) {
  if (A.rows() == 0) return 0.0;
  const LowerObjective obj(space, target);
  const ObjectiveEval e = obj.eval(A, false);
  if (!e.ok) return 0.0;
  return std::sqrt(e.N / e.D);
}

LowerWitness pi2oh_lower(const Presentation& space, const TargetSpec& target, Index k,
                         const SearchParams& p) {
  const Index n = space.dim();
  if (k <= 0) return LowerWitness{TupleOfElements(space, CMat::Zero(0, n)), 0.0};

  const LowerObjective obj(space, target);
  Rng base(p.seed);
  CMat bestA = CMat::Zero(0, n);
  double best2 = 0.0;

  for (Index j = 1; j <= k; ++j) {
    for (int r = 0; r < p.restarts; ++r) {
      CMat A0;
      if (r == 0 && bestA.rows() > 0 && bestA.rows() < j) {
        A0 = CMat::Zero(j, n);
        A0.topRows(bestA.rows()) = bestA;
        A0.bottomRows(j - bestA.rows()) =
            1e-3 * base.fork(static_cast<std::uint64_t>(j) * 7919u + 1u)
                       .gaussian_matrix(j - bestA.rows(), n);
      } else {
        A0 = base.fork(static_cast<std::uint64_t>(j) * 7919u + 31u * static_cast<std::uint64_t>(r))
                 .gaussian_matrix(j, n);
      }
      const AscentOutcome res =
          ascend(obj, A0, p,
                 base.fork(static_cast<std::uint64_t>(j) * 104729u + static_cast<std::uint64_t>(r)));
      if (res.value2 > best2) {
        best2 = res.value2;
        bestA = res.A;
      }
    }
  }

  if (bestA.rows() == 0) bestA = CMat::Zero(0, n);
  // report from a fresh exact evaluation, independent of any warm-start state
  const LowerObjective fresh(space, target);
  const ObjectiveEval fin = fresh.eval(bestA, false, /*exact=*/true);
  const double value = fin.ok ? std::sqrt(fin.N / fin.D) : 0.0;
  return LowerWitness{TupleOfElements(space, bestA), value};
}

double pi2_lower_model(SpaceLabel label, Index n, Index k) {
  if (label != SpaceLabel::row && label != SpaceLabel::column && label != SpaceLabel::oh)
    throw std::invalid_argument("pi2_lower_model: model spaces only (row, column, oh)");
  if (n < 1) throw std::invalid_argument("pi2_lower_model: dimension must be >= 1");
  if (k <= 0) return 0.0;
  return std::sqrt(static_cast<double>(std::min(k, n)));
}

// ---------------------------------------------------------------------------
// Upper certificates
// ---------------------------------------------------------------------------

namespace {

struct LambdaEval {
  double t = kInf;
  CVec worst;
  CMat G;
  bool feasible = false;
  std::vector<std::pair<double, CVec>> top;  // generalized eigenvalues/directions
};

LambdaEval eval_lambda(const std::vector<CMat>& grams, const CMat& T, const RVec& lambda,
                       bool want_directions = false) {
  LambdaEval e;
  const Index n = T.rows();
  CMat G = CMat::Zero(n, n);
  for (std::size_t m = 0; m < grams.size(); ++m) G += lambda(static_cast<Index>(m)) * grams[m];
  G = hermitian_part(G);
  e.G = G;

  Eigen::SelfAdjointEigenSolver<CMat> es(G);
  const RVec lam = es.eigenvalues();
  const double lmax = lam(n - 1);
  if (!(lmax > 0.0)) return e;
  const double cut = 1e-14 * lmax;

  RVec winv(n);
  Index rank = 0;
  for (Index i = 0; i < n; ++i) {
    if (lam(i) > cut) {
      winv(i) = 1.0 / std::sqrt(lam(i));
      ++rank;
    } else {
      winv(i) = 0.0;
    }
  }
  const CMat W = es.eigenvectors() * winv.asDiagonal() * es.eigenvectors().adjoint();
  if (rank < n) {
    // T must live on range(G)
    CMat proj = CMat::Zero(n, n);
    for (Index i = 0; i < n; ++i)
      if (lam(i) > cut)
        proj += es.eigenvectors().col(i) * es.eigenvectors().col(i).adjoint();
    if ((T - proj * T * proj).norm() > 1e-12 * (1.0 + T.norm())) return e;
  }

  const CMat R = hermitian_part(W * T * W);
  Eigen::SelfAdjointEigenSolver<CMat> er(R);
  e.t = std::max(er.eigenvalues()(n - 1), 0.0);
  CVec c = W * er.eigenvectors().col(n - 1);
  const double cn = c.norm();
  e.worst = (cn > 0.0) ? CVec(c / cn) : CVec(CVec::Unit(n, 0));
  if (want_directions) {
    for (Index i = n - 1; i >= 0; --i) {
      const double mu = er.eigenvalues()(i);
      if (mu < 0.4 * e.t || static_cast<Index>(e.top.size()) >= 6) break;
      CVec d = W * er.eigenvectors().col(i);
      const double dn = d.norm();
      if (dn > 0.0) e.top.emplace_back(mu, CVec(d / dn));
    }
  }
  e.feasible = true;
  return e;
}

struct LambdaSolveResult {
  RVec lambda;
  LambdaEval eval;
};

// Projection onto the probability simplex.
RVec project_simplex(RVec v) {
  const Index n = v.size();
  std::vector<double> u(v.data(), v.data() + n);
  std::sort(u.begin(), u.end(), std::greater<double>());
  double cum = 0.0, theta = 0.0;
  for (Index i = 0; i < n; ++i) {
    cum += u[static_cast<std::size_t>(i)];
    const double cand = (cum - 1.0) / static_cast<double>(i + 1);
    if (u[static_cast<std::size_t>(i)] - cand > 0.0) theta = cand;
  }
  double sum = 0.0;
  for (Index i = 0; i < n; ++i) {
    v(i) = std::max(v(i) - theta, 0.0);
    sum += v(i);
  }
  if (sum <= 0.0)
    v.setConstant(1.0 / static_cast<double>(n));
  else
    v /= sum;
  return v;
}

// min over the simplex of the generalized max eigenvalue t(λ) of (T, G(λ)):
// convex in λ.  A projected subgradient phase finds the neighborhood; exact
// golden-section line searches toward the simplex vertices then polish it.
LambdaSolveResult solve_lambda(const std::vector<CMat>& grams, const CMat& T, int iters) {
  const Index M = static_cast<Index>(grams.size());
  RVec lambda = RVec::Constant(M, 1.0 / static_cast<double>(M));
  LambdaSolveResult best{lambda, eval_lambda(grams, T, lambda)};

  auto value_at = [&](const RVec& l) -> double {
    const LambdaEval e = eval_lambda(grams, T, l);
    return e.feasible ? e.t : kInf;
  };
  auto consider = [&](const RVec& l) {
    const LambdaEval e = eval_lambda(grams, T, l);
    if (e.feasible && e.t < best.eval.t) {
      best.lambda = l;
      best.eval = e;
    }
  };

  RVec cur = lambda;
  for (int k = 0; k < iters; ++k) {
    const LambdaEval e = eval_lambda(grams, T, cur);
    if (e.feasible && e.t < best.eval.t) {
      best.lambda = cur;
      best.eval = e;
    }
    if (!e.feasible) {
      cur = 0.5 * cur + 0.5 * RVec::Constant(M, 1.0 / static_cast<double>(M));
      continue;
    }
    if (e.t <= 0.0) break;  // zero map certified for free
    const double denom = std::max(real_quad(e.G, e.worst), 1e-300);
    RVec d(M);
    for (Index m = 0; m < M; ++m)
      d(m) = -e.t * real_quad(grams[static_cast<std::size_t>(m)], e.worst) / denom;
    const double dn = d.norm();
    if (!(dn > 1e-300)) break;
    const double eta = 0.3 / (1.0 + static_cast<double>(k) / 40.0);
    cur = project_simplex(cur - (eta / dn) * d);
  }

  if (!std::isfinite(best.eval.t) || best.eval.t <= 0.0) return best;

  // Vertex line searches: f(a) = t((1-a)λ + a e_m) is convex on [0, 1].
  const double golden = 0.5 * (3.0 - std::sqrt(5.0));
  for (int round = 0; round < 8; ++round) {
    const double base = best.eval.t;
    RVec base_l = best.lambda;
    for (Index m = 0; m < M; ++m) {
      RVec vertex = RVec::Zero(M);
      vertex(m) = 1.0;
      auto blend = [&](double a) { return RVec(((1.0 - a) * base_l + a * vertex).eval()); };
      consider(vertex);
      double lo = 0.0, hi = 1.0;
      double a1 = lo + golden * (hi - lo), a2 = hi - golden * (hi - lo);
      double f1 = value_at(blend(a1)), f2 = value_at(blend(a2));
      for (int it = 0; it < 14; ++it) {
        if (f1 <= f2) {
          hi = a2;
          a2 = a1;
          f2 = f1;
          a1 = lo + golden * (hi - lo);
          f1 = value_at(blend(a1));
        } else {
          lo = a1;
          a1 = a2;
          f1 = f2;
          a2 = hi - golden * (hi - lo);
          f2 = value_at(blend(a2));
        }
      }
      consider(blend(0.5 * (lo + hi)));
    }
    if (best.eval.t >= base * (1.0 - 1e-13)) break;
  }
  return best;
}

}  // namespace

CertificateEngine::CertificateEngine(Presentation space, CertificateOptions opts)
    : opts_(opts) {
  if (space.coefficient_only()) {
    space_ = std::move(space);  // handled by the closed form in certify()
    return;
  }
  space_ = embed_square(space);
}

bool CertificateEngine::add_atom(const CMat& y, const CMat& z) {
  if (static_cast<int>(atoms_.size()) >= opts_.max_atoms) return false;
  for (const PhiFunctional& a : atoms_)
    if ((a.y - y).norm() + (a.z - z).norm() < 1e-9) return false;
  PhiFunctional f(y, z);
  grams_.push_back(f.gram(space_));
  atoms_.push_back(std::move(f));
  return true;
}

void CertificateEngine::seed_dictionary() {
  if (seeded_) return;
  seeded_ = true;
  const Index d = space_.d1();
  const Index n = space_.dim();
  const CMat eye = CMat::Identity(d, d) / std::sqrt(static_cast<double>(d));
  add_atom(eye, eye);
  // positive-cone optimizers of the canonical tuple and of each basis element
  {
    const PsdAscentResult r =
        min_norm_psd_ascent(TupleOfElements(space_, CMat::Identity(n, n)), opts_.oracle);
    if (r.value > 0.0) add_atom(psd_project(r.y), psd_project(r.z));
  }
  for (Index i = 0; i < n; ++i) {
    CMat row = CMat::Zero(1, n);
    row(0, i) = 1.0;
    const PsdAscentResult r = min_norm_psd_ascent(TupleOfElements(space_, row), opts_.oracle);
    if (r.value > 0.0) add_atom(psd_project(r.y), psd_project(r.z));
  }
}

namespace {

// Dual weights on the near-tied worst directions: minimize over the simplex
// max_m (Σ_j ν_j c_j†G_m c_j)/(Σ_j ν_j c_j†T c_j).  The optimal ν is the
// Pietsch-measure weighting of the active directions; the query tensor
// Σ ν_j x_j ⊗ conj(x_j) is what a new atom must beat.
RVec dual_direction_weights(const std::vector<std::pair<double, CVec>>& dirs,
                            const std::vector<CMat>& grams, const CMat& T) {
  const Index r = static_cast<Index>(dirs.size());
  RVec nu = RVec::Constant(r, 1.0 / static_cast<double>(r));
  if (r <= 1) return nu;
  const Index M = static_cast<Index>(grams.size());
  RVec a(r);
  Eigen::MatrixXd b(M, r);
  for (Index j = 0; j < r; ++j) {
    a(j) = std::max(real_quad(T, dirs[static_cast<std::size_t>(j)].second), 1e-300);
    for (Index m = 0; m < M; ++m)
      b(m, j) = real_quad(grams[static_cast<std::size_t>(m)], dirs[static_cast<std::size_t>(j)].second);
  }
  auto value = [&](const RVec& v) -> double {
    const double den = a.dot(v);
    if (!(den > 1e-300)) return kInf;
    return (b * v).maxCoeff() / den;
  };
  RVec best = nu;
  double best_f = value(nu);
  // subgradient phase
  RVec cur = nu;
  for (int k = 0; k < 120; ++k) {
    const double den = a.dot(cur);
    if (!(den > 1e-300)) break;
    const RVec bv = b * cur;
    Index mstar;
    const double num = bv.maxCoeff(&mstar);
    RVec g = (b.row(mstar).transpose() * den - num * a) / (den * den);
    const double gn = g.norm();
    if (!(gn > 1e-300)) break;
    cur = project_simplex(cur - (0.3 / (1.0 + k / 30.0) / gn) * g);
    const double f = value(cur);
    if (f < best_f) {
      best_f = f;
      best = cur;
    }
  }
  // vertex line searches (the objective is quasiconvex along segments)
  const double golden = 0.5 * (3.0 - std::sqrt(5.0));
  for (int round = 0; round < 8; ++round) {
    const double base = best_f;
    const RVec base_v = best;
    for (Index j = 0; j < r; ++j) {
      RVec vertex = RVec::Zero(r);
      vertex(j) = 1.0;
      auto blend = [&](double al) { return RVec(((1.0 - al) * base_v + al * vertex).eval()); };
      double lo = 0.0, hi = 1.0;
      double a1 = lo + golden * (hi - lo), a2 = hi - golden * (hi - lo);
      double f1 = value(blend(a1)), f2 = value(blend(a2));
      for (int it = 0; it < 18; ++it) {
        if (f1 <= f2) {
          hi = a2; a2 = a1; f2 = f1;
          a1 = lo + golden * (hi - lo);
          f1 = value(blend(a1));
        } else {
          lo = a1; a1 = a2; f1 = f2;
          a2 = hi - golden * (hi - lo);
          f2 = value(blend(a2));
        }
      }
      const RVec cand = blend(0.5 * (lo + hi));
      const double f = value(cand);
      if (f < best_f) {
        best_f = f;
        best = cand;
      }
    }
    if (best_f >= base * (1.0 - 1e-12)) break;
  }
  return best;
}

}  // namespace

void CertificateEngine::generate_cuts(const std::vector<std::pair<double, CVec>>& top_dirs,
                                      int round) {
  if (top_dirs.empty()) return;
  const Index n = space_.dim();

  auto add_from = [&](const CMat& A) {
    const auto results =
        min_norm_psd_ascent_multi(TupleOfElements(space_, A), opts_.oracle, 3, 1e-3);
    for (const PsdAscentResult& r : results)
      if (r.value > 0.0) add_atom(psd_project(r.y), psd_project(r.z));
  };

  // single worst direction; the optimizer set is often degenerate, so keep
  // every distinct near-optimal pair
  {
    CMat row(1, n);
    row.row(0) = top_dirs[0].second.transpose();
    add_from(row);
  }
  if (top_dirs.size() > 1) {
    // equal-weight tuple of the tied directions
    CMat E(static_cast<Index>(top_dirs.size()), n);
    for (std::size_t j = 0; j < top_dirs.size(); ++j)
      E.row(static_cast<Index>(j)) = top_dirs[j].second.transpose();
    add_from(E);
  }
  // one seeded random blend of the top pair, to escape zigzags
  if (top_dirs.size() > 1) {
    Rng rng = Rng(opts_.seed).fork(0xb1e4d00ULL + static_cast<std::uint64_t>(round));
    const double th = 0.25 * M_PI * rng.uniform();
    const Complex ph(std::cos(2.0 * M_PI * rng.uniform()), std::sin(2.0 * M_PI * rng.uniform()));
    CVec c = std::cos(th) * top_dirs[0].second + std::sin(th) * ph * top_dirs[1].second;
    c.normalize();
    CMat row(1, n);
    row.row(0) = c.transpose();
    add_from(row);
  }
}

UpperCertificate CertificateEngine::certify(const CMat& U, int rounds) {
  const Index n = space_.dim();
  if (U.cols() != n) throw std::invalid_argument("certificate: map column count != basis size");
  if (!all_finite(U)) throw std::invalid_argument("certificate: non-finite map");

  UpperCertificate cert;
  const CMat T = hermitian_part(U.adjoint() * U);

  if (space_.coefficient_only()) {
    // Optimal closed form on the OH model: the abstract Pietsch functional
    // is the trace form G = U†U / ‖U‖²_HS, giving C = ‖U‖_HS.
    const double c = U.norm();
    cert.C = c;
    cert.closed_form_oh = true;
    cert.gram_phi = (c > 0.0) ? CMat((T / (c * c))) : CMat(CMat::Identity(n, n) / double(n));
    cert.posthoc_min_eig = min_hermitian_eigenvalue(cert.C * cert.C * cert.gram_phi - T);
    cert.diagnostics = "closed-form oh certificate";
    return cert;
  }

  seed_dictionary();
  const int max_rounds = (rounds >= 0) ? rounds : opts_.max_rounds;

  LambdaSolveResult sol = solve_lambda(grams_, T, opts_.lambda_iters);
  double prev_t = sol.eval.feasible ? sol.eval.t : kInf;
  int no_improve = 0;

  for (int round = 0; round < max_rounds; ++round) {
    if (static_cast<int>(atoms_.size()) >= opts_.max_atoms) break;
    const std::size_t before = atoms_.size();
    if (sol.eval.feasible) {
      if (sol.eval.t <= 0.0) break;
      const LambdaEval dirs = eval_lambda(grams_, T, sol.lambda, true);
      if (!dirs.top.empty()) {
        // Pietsch-measure weighting over the worst directions and their
        // phase blends (the optimal measure need not be supported on the
        // generalized eigenbasis).  The ν-weighted query tensor both
        // proposes the strongest cut and certifies optimality over the whole
        // atom family when no (y, z) pair answers it better.
        const std::vector<std::pair<double, CVec>>& dirset = dirs.top;
        const RVec nu = dual_direction_weights(dirset, grams_, T);
        std::vector<std::pair<double, CVec>> support;
        double trTN = 0.0;
        for (std::size_t j = 0; j < dirset.size(); ++j) {
          if (nu(static_cast<Index>(j)) <= 1e-8) continue;
          support.emplace_back(nu(static_cast<Index>(j)), dirset[j].second);
          trTN += nu(static_cast<Index>(j)) * real_quad(T, dirset[j].second);
        }
        CMat A(static_cast<Index>(support.size()), n);
        for (std::size_t j = 0; j < support.size(); ++j)
          A.row(static_cast<Index>(j)) =
              std::sqrt(support[j].first) * support[j].second.transpose();
        PsdAscentParams op = opts_.oracle;
        op.restarts = 2 * op.restarts;
        const auto oracle = min_norm_psd_ascent_multi(TupleOfElements(space_, A), op, 3, 1e-3);
        double oracle_best = 0.0;
        bool new_atom = false;
        for (const PsdAscentResult& res : oracle) {
          oracle_best = std::max(oracle_best, res.value);
          if (res.value > 0.0) new_atom |= add_atom(psd_project(res.y), psd_project(res.z));
        }
        // the dual bound is trusted only when the strengthened oracle could
        // not produce any new atom for the query tensor
        if (!new_atom && oracle_best > 0.0 &&
            trTN / oracle_best >= sol.eval.t * (1.0 - 10.0 * opts_.rel_gap))
          break;
      }
      generate_cuts(dirs.top, round);
    } else {
      CVec dir =
          Rng(opts_.seed).fork(static_cast<std::uint64_t>(round)).gaussian_vector(n).normalized();
      generate_cuts({{1.0, dir}}, round);
    }
    if (atoms_.size() == before) break;  // no new column exists near the optimum

    sol = solve_lambda(grams_, T, opts_.lambda_iters);
    if (sol.eval.feasible) {
      if (sol.eval.t > (1.0 - opts_.rel_gap) * prev_t) {
        if (++no_improve >= 3) break;
      } else {
        no_improve = 0;
      }
      prev_t = std::min(prev_t, sol.eval.t);
    }
  }

  sol = solve_lambda(grams_, T, 2 * opts_.lambda_iters);
  if (!sol.eval.feasible) {
    cert.status = CertificateStatus::infeasible_dictionary;
    Eigen::SelfAdjointEigenSolver<CMat> es(sol.eval.G, Eigen::EigenvaluesOnly);
    Index nullity = 0;
    const double lmax = std::max(es.eigenvalues()(n - 1), 0.0);
    for (Index i = 0; i < n; ++i)
      if (es.eigenvalues()(i) <= 1e-14 * lmax) ++nullity;
    std::ostringstream os;
    os << "dictionary gram singular on the span where the map acts (nullity " << nullity << ")";
    cert.diagnostics = os.str();
    return cert;
  }

  // Prune negligible weights, then re-evaluate exactly.
  std::vector<double> w;
  std::vector<PhiFunctional> kept;
  std::vector<CMat> kept_grams;
  double wsum = 0.0;
  for (Index m = 0; m < sol.lambda.size(); ++m) {
    if (sol.lambda(m) > opts_.prune_tol) {
      w.push_back(sol.lambda(m));
      kept.push_back(atoms_[static_cast<std::size_t>(m)]);
      kept_grams.push_back(grams_[static_cast<std::size_t>(m)]);
      wsum += sol.lambda(m);
    }
  }
  if (w.empty()) {
    w.push_back(1.0);
    kept.push_back(atoms_[0]);
    kept_grams.push_back(grams_[0]);
    wsum = 1.0;
  }
  RVec lam(static_cast<Index>(w.size()));
  for (std::size_t m = 0; m < w.size(); ++m) lam(static_cast<Index>(m)) = w[m] / wsum;
  const LambdaEval fin = eval_lambda(kept_grams, T, lam);
  if (!fin.feasible) {
    cert.status = CertificateStatus::infeasible_dictionary;
    cert.diagnostics = "pruned dictionary became singular";
    return cert;
  }

  cert.mixture.weights.assign(lam.data(), lam.data() + lam.size());
  cert.mixture.atoms = std::move(kept);
  cert.mixture.validate();
  cert.gram_phi = fin.G;
  cert.C = std::sqrt(fin.t) * (1.0 + 1e-12);
  cert.posthoc_min_eig = min_hermitian_eigenvalue(cert.C * cert.C * cert.gram_phi - T);
  std::ostringstream os;
  os << "mixture of " << cert.mixture.atoms.size() << " atoms (dictionary " << atoms_.size()
     << ")";
  cert.diagnostics = os.str();
  return cert;
}

UpperCertificate pi2oh_upper_certificate(const Presentation& space, const CMat& U,
                                         const CertificateOptions& opts) {
  CertificateEngine engine(space, opts);
  return engine.certify(U);
}

// ---------------------------------------------------------------------------
// Mass witness and inequality checks
// ---------------------------------------------------------------------------

MassWitness unit_norm_witness(const Presentation& space, const SearchParams& p) {
  const LowerWitness w = pi2oh_lower(space, TargetSpec::identity_map(), space.dim(), p);
  MassWitness mw{w.tuple, 0.0, 0.0, w.value};
  if (w.tuple.size() == 0) return mw;
  const double D = min_norm(w.tuple);
  if (!(D > 0.0)) return mw;
  TupleOfElements scaled(space, w.tuple.A / std::sqrt(D));
  double sum_sq = 0.0;
  if (space.coefficient_only()) {
    sum_sq = scaled.A.squaredNorm();
  } else {
    for (Index i = 0; i < scaled.size(); ++i) {
      const double s = op_norm(realize_coeffs(space, scaled.A.row(i).transpose()));
      sum_sq += s * s;
    }
  }
  mw.tuple = scaled;
  mw.sum_sq_norms = sum_sq;
  mw.threshold = 0.5 * w.value * w.value;
  return mw;
}

InequalityReport check_inequalities(const InequalityInputs& in) {
  InequalityReport rep;
  auto push = [&rep](std::string name, double lhs, double rhs) {
    const bool pass = lhs <= rhs;
    rep.checks.push_back({std::move(name), lhs, rhs, pass});
    rep.all_pass = rep.all_pass && pass;
  };

  const double ceiling = std::sqrt(static_cast<double>(in.n)) * (1.0 + 1e-6);
  double best_le_n = 0.0;
  for (const auto& [k, lo] : in.lowers)
    if (k <= in.n) best_le_n = std::max(best_le_n, lo);

  for (const auto& [k, lo] : in.lowers) {
    push("lower_le_ceiling[k=" + std::to_string(k) + "]", lo, ceiling);
    if (in.certified_upper)
      push("lower_le_certified[k=" + std::to_string(k) + "]", lo, *in.certified_upper + 1e-6);
    if (k > in.n)
      push("k_tuple_vs_n_tuple[k=" + std::to_string(k) + "]", lo,
           std::sqrt(2.0) * best_le_n * 1.02);
  }
  if (in.cb_exact && in.certified_upper)
    push("cb_le_certified", *in.cb_exact, *in.certified_upper + 1e-6);
  return rep;
}

InequalityReport run_inequality_suite(const Presentation& space, const SearchParams& p,
                                      const CertificateOptions& copts,
                                      std::optional<double> known_upper) {
  const Index n = space.dim();
  InequalityInputs in;
  in.n = n;
  for (Index k : {Index(1), n, 2 * n}) {
    const LowerWitness w = pi2oh_lower(space, TargetSpec::identity_map(), k, p);
    in.lowers.emplace_back(k, w.value);
  }

  const SpaceLabel lab = space.label();
  if (lab == SpaceLabel::oh || lab == SpaceLabel::row || lab == SpaceLabel::column) {
    const UpperCertificate cert =
        pi2oh_upper_certificate(space, CMat::Identity(n, n), copts);
    if (cert.sound()) in.certified_upper = cert.C;
  } else if (known_upper) {
    in.certified_upper = known_upper;
  }
  if (lab == SpaceLabel::oh) in.cb_exact = 1.0;
  return check_inequalities(in);
}

}  // namespace opspace::summing
