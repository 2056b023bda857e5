// Copyright 2026 the opspace authors
// SPDX-License-Identifier: Apache-2.0

#include "opspace/io.hpp"

#include <fstream>

namespace opspace::io {

namespace {

json real_part_matrix(const CMat& m, bool imag) {
  json rows = json::array();
  for (Index i = 0; i < m.rows(); ++i) {
    json row = json::array();
    for (Index j = 0; j < m.cols(); ++j) row.push_back(imag ? m(i, j).imag() : m(i, j).real());
    rows.push_back(std::move(row));
  }
  return rows;
}

}  // namespace

json to_json(const CMat& m) {
  return json{{"re", real_part_matrix(m, false)}, {"im", real_part_matrix(m, true)}};
}

CMat cmat_from_json(const json& j) {
  if (!j.is_object() || !j.contains("re") || !j.contains("im"))
    throw InputError("matrix: expected an object with re/im arrays");
  const json& re = j["re"];
  const json& im = j["im"];
  if (!re.is_array() || !im.is_array() || re.size() != im.size())
    throw InputError("matrix: re/im must be arrays of equal shape");
  const Index rows = static_cast<Index>(re.size());
  if (rows == 0) throw InputError("matrix: empty");
  const Index cols = static_cast<Index>(re[0].size());
  CMat m(rows, cols);
  for (Index i = 0; i < rows; ++i) {
    const json& rr = re[static_cast<std::size_t>(i)];
    const json& ri = im[static_cast<std::size_t>(i)];
    if (!rr.is_array() || !ri.is_array() || static_cast<Index>(rr.size()) != cols ||
        static_cast<Index>(ri.size()) != cols)
      throw InputError("matrix: ragged rows");
    for (Index k = 0; k < cols; ++k) {
      if (!rr[static_cast<std::size_t>(k)].is_number() || !ri[static_cast<std::size_t>(k)].is_number())
        throw InputError("matrix: entries must be numbers");
      m(i, k) = Complex(rr[static_cast<std::size_t>(k)].get<double>(),
                        ri[static_cast<std::size_t>(k)].get<double>());
    }
  }
  if (!all_finite(m)) throw InputError("matrix: non-finite entry");
  return m;
}

json to_json(const Presentation& p) {
  json j;
  j["label"] = to_string(p.label());
  if (p.coefficient_only()) {
    j["n"] = p.dim();
    j["coefficient_only"] = true;
    return j;
  }
  j["shape"] = json::array({p.d1(), p.d2()});
  json basis = json::array();
  for (Index i = 0; i < p.dim(); ++i) basis.push_back(to_json(p.basis(i)));
  j["basis"] = std::move(basis);
  return j;
}

Presentation presentation_from_json(const json& j) {
  if (!j.is_object()) throw InputError("space: expected an object");
  std::string label = j.value("label", std::string("generic"));
  SpaceLabel lab;
  try {
    lab = space_label_from_string(label);
  } catch (const std::invalid_argument& e) {
    throw InputError(e.what());
  }
  if (j.value("coefficient_only", false) || (lab == SpaceLabel::oh && !j.contains("basis"))) {
    if (!j.contains("n")) throw InputError("space: oh model needs n");
    return Presentation::oh_model(j["n"].get<Index>());
  }
  if (!j.contains("basis") || !j["basis"].is_array() || j["basis"].empty())
    throw InputError("space: needs a nonempty basis array");
  std::vector<CMat> basis;
  for (const json& b : j["basis"]) basis.push_back(cmat_from_json(b));
  if (j.contains("shape")) {
    const json& s = j["shape"];
    if (!s.is_array() || s.size() != 2 || basis[0].rows() != s[0].get<Index>() ||
        basis[0].cols() != s[1].get<Index>())
      throw InputError("space: shape does not match the basis matrices");
  }
  try {
    return Presentation(std::move(basis), lab);
  } catch (const std::invalid_argument& e) {
    throw InputError(e.what());
  }
}

json to_json(const TupleOfElements& t) {
  return json{{"space", to_json(t.space)}, {"A", to_json(t.A)}};
}

CMat tuple_matrix_from_json(const json& j) {
  if (j.is_object() && j.contains("A")) return cmat_from_json(j["A"]);
  return cmat_from_json(j);
}

TupleOfElements tuple_from_json(const json& j) {
  if (!j.is_object() || !j.contains("space")) throw InputError("tuple: needs a space");
  Presentation space = presentation_from_json(j["space"]);
  CMat A = tuple_matrix_from_json(j);
  try {
    return TupleOfElements(std::move(space), std::move(A));
  } catch (const std::invalid_argument& e) {
    throw InputError(e.what());
  }
}

json to_json(const summing::PhiFunctional& f) {
  return json{{"y", to_json(f.y)}, {"z", to_json(f.z)}};
}

json to_json(const summing::KMixture& m) {
  json atoms = json::array();
  for (std::size_t i = 0; i < m.atoms.size(); ++i) {
    json a = to_json(m.atoms[i]);
    a["weight"] = m.weights[i];
    atoms.push_back(std::move(a));
  }
  return json{{"atoms", std::move(atoms)}};
}

summing::KMixture mixture_from_json(const json& j) {
  if (!j.is_object() || !j.contains("atoms") || !j["atoms"].is_array())
    throw InputError("mixture: needs an atoms array");
  summing::KMixture m;
  for (const json& a : j["atoms"]) {
    if (!a.contains("weight") || !a.contains("y") || !a.contains("z"))
      throw InputError("mixture: atom needs weight, y, z");
    m.weights.push_back(a["weight"].get<double>());
    try {
      m.atoms.emplace_back(cmat_from_json(a["y"]), cmat_from_json(a["z"]));
    } catch (const std::invalid_argument& e) {
      throw InputError(e.what());
    }
  }
  try {
    m.validate();
  } catch (const std::invalid_argument& e) {
    throw InputError(e.what());
  }
  return m;
}

json to_json(const summing::LowerWitness& w) {
  return json{{"schema", "opspace.witness/1"},
              {"value", w.value},
              {"tuple", to_json(w.tuple)}};
}

json to_json(const summing::UpperCertificate& c) {
  json j;
  j["schema"] = "opspace.certificate/1";
  j["status"] = (c.status == summing::CertificateStatus::ok) ? "ok" : "infeasible_dictionary";
  j["C"] = c.C;
  j["closed_form_oh"] = c.closed_form_oh;
  j["posthoc_min_eig"] = c.posthoc_min_eig;
  j["diagnostics"] = c.diagnostics;
  if (c.gram_phi.size() > 0) j["gram_phi"] = to_json(c.gram_phi);
  j["mixture"] = to_json(c.mixture);
  return j;
}

json to_json(const factorize::DistanceReport& r) {
  json j;
  j["schema"] = "opspace.distance/1";
  j["forward_upper"] = r.forward_upper;
  j["backward_exact"] = r.backward_exact;
  j["product"] = r.product;
  j["guarantee_sqrt_n"] = r.guarantee_sqrt_n;
  j["lewis_converged"] = r.lewis_converged;
  j["U"] = to_json(r.u.U);
  j["certificate"] = to_json(r.certificate);
  return j;
}

json to_json(const factorize::PairwiseReport& r) {
  json j;
  j["schema"] = "opspace.pairwise/1";
  j["product_bound"] = r.product_bound;
  j["guarantee_n"] = r.guarantee_n;
  j["left"] = to_json(r.left);
  j["right"] = to_json(r.right);
  j["iso_U"] = to_json(r.iso.U);
  return j;
}

json to_json(const summing::InequalityReport& r) {
  json checks = json::array();
  for (const auto& c : r.checks)
    checks.push_back(json{{"name", c.name}, {"lhs", c.lhs}, {"rhs", c.rhs}, {"pass", c.pass}});
  return json{{"schema", "opspace.inequalities/1"}, {"all_pass", r.all_pass},
              {"checks", std::move(checks)}};
}

json load_json_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw InputError("cannot open file: " + path);
  json j;
  try {
    in >> j;
  } catch (const json::parse_error& e) {
    throw InputError(std::string("JSON parse error in ") + path + ": " + e.what());
  }
  return j;
}

}  // namespace opspace::io
