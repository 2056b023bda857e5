// Copyright 2026 the opspace authors
// SPDX-License-Identifier: Apache-2.0

#include "opspace/minnorm.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace opspace {

CMat Superoperator::apply(const CMat& y) const {
  if (y.rows() != d2 || y.cols() != d2) throw std::invalid_argument("superoperator: y must be d2×d2");
  CMat out = CMat::Zero(d1, d1);
  for (const CMat& x : mats) out += x * y * x.adjoint();
  return out;
}

CMat Superoperator::apply_adjoint(const CMat& z) const {
  if (z.rows() != d1 || z.cols() != d1) throw std::invalid_argument("superoperator: z must be d1×d1");
  CMat out = CMat::Zero(d2, d2);
  for (const CMat& x : mats) out += x.adjoint() * z * x;
  return out;
}

Superoperator build_superoperator(const TupleOfElements& t) {
  if (t.space.coefficient_only())
    throw std::logic_error("oh model is coefficient-only: no superoperator realization");
  Superoperator s;
  s.d1 = t.space.d1();
  s.d2 = t.space.d2();
  s.source_dim = s.d2 * s.d2;
  s.target_dim = s.d1 * s.d1;
  s.M = CMat::Zero(s.target_dim, s.source_dim);
  s.mats.reserve(static_cast<std::size_t>(t.size()));
  for (Index i = 0; i < t.size(); ++i) {
    CMat x = realize_coeffs(t.space, t.A.row(i).transpose());
    s.M += kron(x, x.conjugate());
    s.mats.push_back(std::move(x));
  }
  return s;
}

namespace {

// Matrix-free power iteration for ‖Φ‖_HS→HS of the completely positive map.
// The top right-singular vector can be taken PSD with positive trace, so the
// identity start always overlaps it and the iteration cannot stall on a
// lower singular value.
double cp_power_norm(const Superoperator& s) {
  CMat y = CMat::Identity(s.d2, s.d2) / std::sqrt(static_cast<double>(s.d2));
  double sigma = 0.0;
  double prev = -1.0;
  int stable = 0;
  for (int it = 0; it < 10000; ++it) {
    const CMat w = s.apply(y);
    const double wn = hs_norm(w);
    if (wn <= 1e-300) return 0.0;
    sigma = wn;
    const CMat v = s.apply_adjoint(w);
    const double vn = hs_norm(v);
    if (vn <= 1e-300) break;
    y = v / vn;
    if (std::abs(sigma - prev) <= 1e-12 * std::max(sigma, 1e-300)) {
      if (++stable >= 3) break;
    } else {
      stable = 0;
    }
    prev = sigma;
  }
  return sigma;
}

}  // namespace

double min_norm(const TupleOfElements& t) {
  if (t.size() == 0) return 0.0;
  if (t.space.coefficient_only()) {
    const double s = spectral_norm(t.A);
    return s * s;
  }
  const Index d1 = t.space.d1();
  const Index d2 = t.space.d2();
  if (d1 * d1 >= 64 || d2 * d2 >= 64) {
    // matrix-free path: skip assembling the d1²×d2² matrix entirely
    Superoperator s;
    s.d1 = d1;
    s.d2 = d2;
    s.source_dim = d2 * d2;
    s.target_dim = d1 * d1;
    s.mats.reserve(static_cast<std::size_t>(t.size()));
    for (Index i = 0; i < t.size(); ++i)
      s.mats.push_back(realize_coeffs(t.space, t.A.row(i).transpose()));
    return cp_power_norm(s);
  }
  return spectral_norm(build_superoperator(t).M);
}

std::vector<PsdAscentResult> min_norm_psd_ascent_multi(const TupleOfElements& t,
                                                       const PsdAscentParams& p, int max_results,
                                                       double rel_window) {
  if (t.space.coefficient_only())
    throw std::logic_error("oh model is coefficient-only: no positive-cone ascent");
  const Index d1 = t.space.d1();
  const Index d2 = t.space.d2();

  std::vector<PsdAscentResult> found;
  if (t.size() == 0) {
    PsdAscentResult r;
    r.y = CMat::Identity(d2, d2) / std::sqrt(static_cast<double>(d2));
    r.z = CMat::Identity(d1, d1) / std::sqrt(static_cast<double>(d1));
    found.push_back(std::move(r));
    return found;
  }

  const Superoperator s = build_superoperator(t);
  Rng base(p.seed);

  for (int r = 0; r < p.restarts; ++r) {
    Rng rng = base.fork(static_cast<std::uint64_t>(r));
    CMat y;
    if (r == 0) {
      y = CMat::Identity(d2, d2) / std::sqrt(static_cast<double>(d2));
    } else if (r % 2 == 1) {
      // rank-one starts explore the extreme rays, where optimizer pairs of
      // degenerate top singular spaces tend to live
      const CVec v = rng.gaussian_vector(d2).normalized();
      y = v * v.adjoint();
    } else {
      y = rng.random_psd_unit(d2);
    }
    CMat z = CMat::Identity(d1, d1) / std::sqrt(static_cast<double>(d1));
    double val = 0.0;
    double window_ref = -1.0;
    int window_count = 0;
    for (int it = 0; it < p.max_iters; ++it) {
      CMat w = psd_project(s.apply(y));
      double nw = hs_norm(w);
      if (nw <= 1e-300) { val = 0.0; break; }
      z = w / nw;
      CMat v = psd_project(s.apply_adjoint(z));
      double nv = hs_norm(v);
      if (nv <= 1e-300) { val = 0.0; break; }
      y = v / nv;
      val = std::real((s.apply(y) * z).trace());
      if (window_ref < 0.0) { window_ref = val; window_count = 0; }
      if (++window_count >= p.improve_window) {
        if (val - window_ref <= p.improve_tol * std::max(1.0, val)) break;
        window_ref = val;
        window_count = 0;
      }
    }
    if (val > 0.0) {
      PsdAscentResult res;
      res.value = val;
      res.y = y;
      res.z = z;
      found.push_back(std::move(res));
    }
  }
  std::stable_sort(found.begin(), found.end(),
                   [](const PsdAscentResult& a, const PsdAscentResult& b) {
                     return a.value > b.value;
                   });
  std::vector<PsdAscentResult> out;
  for (PsdAscentResult& r : found) {
    if (!out.empty() && r.value < (1.0 - rel_window) * out.front().value) break;
    bool dup = false;
    for (const PsdAscentResult& o : out)
      if ((o.y - r.y).norm() + (o.z - r.z).norm() < 1e-6) {
        dup = true;
        break;
      }
    if (!dup) out.push_back(std::move(r));
    if (static_cast<int>(out.size()) >= max_results) break;
  }
  if (out.empty()) {
    PsdAscentResult r;
    r.y = CMat::Identity(d2, d2) / std::sqrt(static_cast<double>(d2));
    r.z = CMat::Identity(d1, d1) / std::sqrt(static_cast<double>(d1));
    out.push_back(std::move(r));
  }
  return out;
}

PsdAscentResult min_norm_psd_ascent(const TupleOfElements& t, const PsdAscentParams& p) {
  return min_norm_psd_ascent_multi(t, p, 1).front();
}

double min_norm_psd_restricted(const TupleOfElements& t, const PsdAscentParams& p) {
  if (t.space.coefficient_only())
    throw std::logic_error("oh model is coefficient-only: no positive-cone ascent");
  if (t.space.d1() != t.space.d2())
    throw std::invalid_argument("min_norm_psd_restricted: non-square shape");
  return min_norm_psd_ascent(t, p).value;
}

double oh_norm(const TupleOfElements& t) { return std::sqrt(min_norm(t)); }

double cb_norm_from_oh(const TupleOfElements& images) { return oh_norm(images); }

}  // namespace opspace
