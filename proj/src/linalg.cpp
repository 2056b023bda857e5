// Copyright 2026 the opspace authors
// SPDX-License-Identifier: Apache-2.0

#include "opspace/linalg.hpp"

#include <cmath>
#include <stdexcept>

namespace opspace {

namespace {

constexpr Index kSvdCutoff = 64;      // full SVD below this dimension
constexpr double kPowerTol = 1e-12;   // relative tolerance on sigma
constexpr int kPowerMaxIters = 10000;

}  // namespace

std::uint64_t Rng::next_u64() {
  state_ += 0x9e3779b97f4a7c15ULL;
  std::uint64_t z = state_;
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

double Rng::uniform() {
  return static_cast<double>(next_u64() >> 11) * 0x1.0p-53;
}

double Rng::gaussian() {
  if (have_cached_) {
    have_cached_ = false;
    return cached_;
  }
  double u1 = uniform();
  while (u1 <= 1e-300) u1 = uniform();
  const double u2 = uniform();
  const double r = std::sqrt(-2.0 * std::log(u1));
  const double a = 2.0 * M_PI * u2;
  cached_ = r * std::sin(a);
  have_cached_ = true;
  return r * std::cos(a);
}

Complex Rng::cgaussian() {
  const double re = gaussian();
  const double im = gaussian();
  return Complex(re, im) / std::sqrt(2.0);
}

CMat Rng::gaussian_matrix(Index rows, Index cols) {
  CMat m(rows, cols);
  for (Index i = 0; i < rows; ++i)
    for (Index j = 0; j < cols; ++j) m(i, j) = cgaussian();
  return m;
}

CVec Rng::gaussian_vector(Index n) {
  CVec v(n);
  for (Index i = 0; i < n; ++i) v(i) = cgaussian();
  return v;
}

CMat Rng::random_psd_unit(Index d) {
  const CMat g = gaussian_matrix(d, d);
  CMat y = g * g.adjoint();
  const double nrm = hs_norm(y);
  if (nrm > 0.0) y /= nrm;
  return y;
}

Rng Rng::fork(std::uint64_t tag) const {
  std::uint64_t z = state_ ^ (0x632be59bd9b4e019ULL * (tag + 1));
  return Rng(z);
}

bool all_finite(const CMat& m) {
  for (Index j = 0; j < m.cols(); ++j)
    for (Index i = 0; i < m.rows(); ++i) {
      const Complex& c = m(i, j);
      if (!std::isfinite(c.real()) || !std::isfinite(c.imag())) return false;
    }
  return true;
}

CVec vec_rm(const CMat& m) {
  CVec v(m.rows() * m.cols());
  for (Index i = 0; i < m.rows(); ++i)
    for (Index j = 0; j < m.cols(); ++j) v(i * m.cols() + j) = m(i, j);
  return v;
}

CMat unvec_rm(const CVec& v, Index rows, Index cols) {
  if (v.size() != rows * cols) throw std::invalid_argument("unvec_rm: size mismatch");
  CMat m(rows, cols);
  for (Index i = 0; i < rows; ++i)
    for (Index j = 0; j < cols; ++j) m(i, j) = v(i * cols + j);
  return m;
}

CMat kron(const CMat& a, const CMat& b) {
  CMat k(a.rows() * b.rows(), a.cols() * b.cols());
  for (Index i = 0; i < a.rows(); ++i)
    for (Index j = 0; j < a.cols(); ++j)
      k.block(i * b.rows(), j * b.cols(), b.rows(), b.cols()) = a(i, j) * b;
  return k;
}

double hs_norm(const CMat& m) { return m.norm(); }

Complex hs_inner(const CMat& a, const CMat& b) { return (a.adjoint() * b).trace(); }

void normalize_phase(CVec& v) {
  const double scale = v.norm();
  if (scale <= 0.0) return;
  for (Index i = 0; i < v.size(); ++i) {
    if (std::abs(v(i)) > 1e-12 * scale) {
      v *= std::conj(v(i)) / std::abs(v(i));
      return;
    }
  }
}

namespace {

SingularTriple power_triple(const CMat& m, const CVec* warm) {
  SingularTriple t;
  const Index n = m.cols();
  CVec v;
  if (warm && warm->size() == n && warm->norm() > 0.0) {
    v = *warm;
  } else {
    Rng rng(0x517ec7a1u);
    v = rng.gaussian_vector(n);
  }
  v.normalize();

  double sigma = 0.0;
  double prev = -1.0;
  int stable = 0;
  CVec w;
  for (int it = 0; it < kPowerMaxIters; ++it) {
    w = m * v;
    const double wn = w.norm();
    sigma = wn;
    if (wn <= 1e-300) {  // zero map
      t.sigma = 0.0;
      t.right = CVec::Unit(n, 0);
      t.left = CVec::Unit(m.rows(), 0);
      return t;
    }
    CVec v2 = m.adjoint() * w;
    const double v2n = v2.norm();
    if (v2n <= 1e-300) break;
    v = v2 / v2n;
    if (std::abs(sigma - prev) <= kPowerTol * std::max(sigma, 1e-300)) {
      if (++stable >= 3) break;
    } else {
      stable = 0;
    }
    prev = sigma;
  }
  normalize_phase(v);
  w = m * v;
  t.sigma = w.norm();
  t.right = v;
  t.left = (t.sigma > 0.0) ? CVec(w / t.sigma) : CVec(CVec::Unit(m.rows(), 0));
  return t;
}

}  // namespace

double spectral_norm(const CMat& m) {
  if (m.rows() == 0 || m.cols() == 0) return 0.0;
  if (std::max(m.rows(), m.cols()) < kSvdCutoff) {
    Eigen::JacobiSVD<CMat> svd(m);
    return svd.singularValues()(0);
  }
  return power_triple(m, nullptr).sigma;
}

SingularTriple top_singular_triple(const CMat& m, const CVec* warm, bool prefer_power) {
  SingularTriple t;
  if (m.rows() == 0 || m.cols() == 0) return t;
  if (!prefer_power && std::max(m.rows(), m.cols()) < kSvdCutoff) {
    Eigen::JacobiSVD<CMat> svd(m, Eigen::ComputeThinU | Eigen::ComputeThinV);
    t.sigma = svd.singularValues()(0);
    CVec v = svd.matrixV().col(0);
    normalize_phase(v);
    t.right = v;
    if (t.sigma > 1e-300) {
      t.left = m * v / t.sigma;
    } else {
      t.left = CVec::Unit(m.rows(), 0);
    }
    return t;
  }
  return power_triple(m, warm);
}

CMat hermitian_part(const CMat& m) { return 0.5 * (m + m.adjoint()); }

CMat psd_project(const CMat& m) {
  const CMat h = hermitian_part(m);
  Eigen::SelfAdjointEigenSolver<CMat> es(h);
  RVec lam = es.eigenvalues();
  for (Index i = 0; i < lam.size(); ++i) lam(i) = std::max(lam(i), 0.0);
  return es.eigenvectors() * lam.asDiagonal() * es.eigenvectors().adjoint();
}

double min_hermitian_eigenvalue(const CMat& m) {
  Eigen::SelfAdjointEigenSolver<CMat> es(hermitian_part(m), Eigen::EigenvaluesOnly);
  return es.eigenvalues()(0);
}

CMat psd_sqrt(const CMat& m) {
  Eigen::SelfAdjointEigenSolver<CMat> es(hermitian_part(m));
  RVec lam = es.eigenvalues();
  for (Index i = 0; i < lam.size(); ++i) lam(i) = std::sqrt(std::max(lam(i), 0.0));
  return es.eigenvectors() * lam.asDiagonal() * es.eigenvectors().adjoint();
}

CMat psd_inv_sqrt(const CMat& m, double rel_cutoff) {
  Eigen::SelfAdjointEigenSolver<CMat> es(hermitian_part(m));
  RVec lam = es.eigenvalues();
  const double lmax = lam(lam.size() - 1);
  const double cut = rel_cutoff * std::max(lmax, 0.0);
  RVec inv(lam.size());
  for (Index i = 0; i < lam.size(); ++i)
    inv(i) = (lam(i) > cut && lam(i) > 0.0) ? 1.0 / std::sqrt(lam(i)) : 0.0;
  return es.eigenvectors() * inv.asDiagonal() * es.eigenvectors().adjoint();
}

}  // namespace opspace
