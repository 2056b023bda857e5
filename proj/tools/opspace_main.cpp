// Copyright 2026 the opspace authors
// SPDX-License-Identifier: Apache-2.0
//
// Command-line front end: every computation of the library as a batch
// command with machine-readable output.
//
// Exit codes: 0 = all assertions pass, 2 = numerical assertion failure,
// 3 = input error.

#include "opspace/factorize.hpp"
#include "opspace/io.hpp"
#include "opspace/minnorm.hpp"
#include "opspace/models.hpp"
#include "opspace/summing.hpp"

#include <CLI11.hpp>

#include <cmath>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>

using namespace opspace;
using io::json;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitAssert = 2;
constexpr int kExitInput = 3;

struct RunConfig {
  std::string space = "row";
  std::string space2;
  std::string tuple_file;
  Index n = 3;
  Index k = 0;  // 0: use the space dimension
  int nmax = 5;
  int restarts = 12;
  int iters = 800;
  int samples = 10000;
  std::uint64_t seed = 0x20260808ULL;
  double tol = 1e-6;
  int level = 0;  // 0: min(d, 4)
  std::string out;
  std::string format = "pretty";
};

summing::SearchParams search_params(const RunConfig& cfg) {
  summing::SearchParams p;
  p.restarts = cfg.restarts;
  p.max_iters = cfg.iters;
  p.seed = cfg.seed;
  return p;
}

bool is_model_name(const std::string& s) {
  return s == "row" || s == "column" || s == "oh" || s == "clifford";
}

Presentation resolve_space(const std::string& spec, Index n) {
  if (is_model_name(spec)) return models::make_model(spec, n).presentation;
  return io::presentation_from_json(io::load_json_file(spec));
}

void emit(const RunConfig& cfg, const json& j) {
  std::string text;
  if (cfg.format == "json") {
    text = j.dump(2) + "\n";
  } else if (cfg.format == "csv") {
    std::ostringstream os;
    if (j.contains("csv")) {
      os << j["csv"].get<std::string>();
    } else {
      os << "# opspace-kv/1\nkey,value\n";
      for (auto it = j.begin(); it != j.end(); ++it)
        if (!it.value().is_structured())
          os << it.key() << "," << it.value().dump() << "\n";
    }
    text = os.str();
  } else {
    std::ostringstream os;
    if (j.contains("pretty")) {
      os << j["pretty"].get<std::string>();
    } else {
      os << j.dump(2) << "\n";
    }
    text = os.str();
  }
  if (cfg.out.empty()) {
    std::cout << text;
  } else {
    std::ofstream f(cfg.out);
    if (!f) throw io::InputError("cannot open output file: " + cfg.out);
    f << text;
  }
}

// ---------------------------------------------------------------------------

int cmd_table(const RunConfig& cfg) {
  if (cfg.nmax < 2 || cfg.nmax > 6) throw io::InputError("table: nmax must be in [2, 6]");
  const double tol = cfg.tol;
  json rows = json::array();
  std::ostringstream csv, pretty;
  csv << "# opspace-table/1\nspace,n,known_lo,known_hi,lower,upper,pass\n";
  pretty << "space       n   known            lower      upper      pass\n";
  bool all_pass = true;

  summing::SearchParams p = search_params(cfg);
  summing::CertificateOptions co;
  co.seed = cfg.seed;

  auto add_row = [&](const std::string& name, Index n, double known_lo, double known_hi,
                     double lower, double upper, bool pass) {
    rows.push_back(json{{"space", name}, {"n", n}, {"known_lo", known_lo},
                        {"known_hi", known_hi}, {"lower", lower}, {"upper", upper},
                        {"pass", pass}});
    csv << name << "," << n << "," << known_lo << "," << known_hi << "," << lower << ","
        << upper << "," << (pass ? 1 : 0) << "\n";
    char buf[160];
    std::snprintf(buf, sizeof(buf), "%-10s %2lld   [%.6f, %.6f]   %.6f   %.6f   %s\n",
                  name.c_str(), static_cast<long long>(n), known_lo, known_hi, lower, upper,
                  pass ? "yes" : "NO");
    pretty << buf;
    all_pass = all_pass && pass;
  };

  for (Index n = 2; n <= cfg.nmax; ++n) {
    const double sqn = std::sqrt(static_cast<double>(n));
    const double n14 = std::pow(static_cast<double>(n), 0.25);

    {
      const Presentation oh = models::oh_space(n);
      const auto w = summing::pi2oh_lower(oh, summing::TargetSpec::identity_map(), n, p);
      const auto cert = summing::pi2oh_upper_certificate(oh, CMat::Identity(n, n), co);
      const bool pass = w.value >= 0.99 * sqn && w.value <= sqn + tol && cert.sound() &&
                        cert.C <= sqn + tol;
      add_row("oh", n, sqn, sqn, w.value, cert.C, pass);
    }
    for (const char* name : {"row", "column"}) {
      const Presentation e = models::make_model(name, n).presentation;
      const auto w = summing::pi2oh_lower(e, summing::TargetSpec::identity_map(), n, p);
      const auto cert = summing::pi2oh_upper_certificate(e, CMat::Identity(n, n), co);
      const bool pass = w.value >= 0.98 * n14 && w.value <= n14 + tol && cert.sound() &&
                        cert.C <= 1.02 * n14;
      add_row(name, n, n14, n14, w.value, cert.C, pass);
    }
    {
      summing::SearchParams pc = p;
      pc.restarts = std::min(p.restarts, 6);
      pc.max_iters = std::min(p.max_iters, 400);
      const auto s = models::clifford_pi2oh_sandwich(n, pc, co);
      const bool pass = s.identities.pass(1e-12) && s.lower >= 1.0 - tol &&
                        s.lower <= s.upper + tol && s.upper <= std::sqrt(2.0) + tol;
      add_row("clifford", n, 1.0, std::sqrt(2.0), s.lower, s.upper, pass);
    }
  }

  json out;
  out["schema"] = "opspace.table/1";
  out["nmax"] = cfg.nmax;
  out["seed"] = cfg.seed;
  out["rows"] = std::move(rows);
  out["all_pass"] = all_pass;
  out["csv"] = csv.str();
  pretty << (all_pass ? "all rows pass\n" : "FAILURES present\n");
  out["pretty"] = pretty.str();
  emit(cfg, out);
  return all_pass ? kExitOk : kExitAssert;
}

int cmd_minnorm(const RunConfig& cfg) {
  const Presentation e = resolve_space(cfg.space, cfg.n);
  CMat A;
  if (!cfg.tuple_file.empty()) {
    A = io::tuple_matrix_from_json(io::load_json_file(cfg.tuple_file));
  } else {
    A = CMat::Identity(e.dim(), e.dim());
  }
  TupleOfElements t(e, A);
  const double mn = min_norm(t);

  json out;
  out["schema"] = "opspace.minnorm/1";
  out["space"] = io::to_json(e);
  out["k"] = t.size();
  out["min_norm"] = mn;
  out["oh_norm"] = oh_norm(t);

  bool pass = true;
  if (!e.coefficient_only() && e.d1() == e.d2()) {
    PsdAscentParams pp;
    pp.restarts = std::max(4, cfg.restarts);
    pp.seed = cfg.seed;
    const double restricted = min_norm_psd_restricted(t, pp);
    out["min_norm_psd_restricted"] = restricted;
    pass = std::abs(restricted - mn) <= 1e-6 * (1.0 + mn);
    out["psd_reduction_pass"] = pass;
  }
  std::ostringstream pretty;
  pretty << "min_norm  = " << mn << "\noh_norm   = " << std::sqrt(mn) << "\n";
  if (out.contains("min_norm_psd_restricted"))
    pretty << "psd form  = " << out["min_norm_psd_restricted"].get<double>()
           << (pass ? "  (matches)" : "  (MISMATCH)") << "\n";
  out["pretty"] = pretty.str();
  emit(cfg, out);
  return pass ? kExitOk : kExitAssert;
}

int cmd_pi2oh(const RunConfig& cfg) {
  const Presentation e = resolve_space(cfg.space, cfg.n);
  const Index n = e.dim();
  const Index k = cfg.k > 0 ? cfg.k : n;
  summing::SearchParams p = search_params(cfg);
  summing::CertificateOptions co;
  co.seed = cfg.seed;

  const auto w = summing::pi2oh_lower(e, summing::TargetSpec::identity_map(), k, p);

  json out;
  out["schema"] = "opspace.pi2oh/1";
  out["space"] = io::to_json(e);
  out["k"] = k;
  out["seed"] = cfg.seed;
  out["witness"] = io::to_json(w);

  std::optional<double> upper;
  const SpaceLabel lab = e.label();
  if (lab == SpaceLabel::row || lab == SpaceLabel::column || lab == SpaceLabel::oh) {
    const auto cert = summing::pi2oh_upper_certificate(e, CMat::Identity(n, n), co);
    out["certificate"] = io::to_json(cert);
    if (cert.sound()) upper = cert.C;
  } else if (lab == SpaceLabel::clifford) {
    summing::SearchParams pc = p;
    pc.restarts = std::min(p.restarts, 6);
    const auto s = models::clifford_pi2oh_sandwich(n, pc, co);
    out["certificate"] = io::to_json(s.certificate);
    out["comparison_factor"] = s.comparison_factor;
    if (s.certificate.sound() && s.identities.pass(1e-12)) upper = s.upper;
  }
  if (upper) out["upper"] = *upper;
  out["ceiling_sqrt_n"] = std::sqrt(static_cast<double>(n));

  summing::InequalityInputs in;
  in.n = n;
  in.lowers. emplace_back(k, w.value);
  in.certified_upper = upper;
  if (lab == SpaceLabel::oh) in.cb_exact = 1.0;
  const auto rep = summing::check_inequalities(in);
  out["checks"] = io::to_json(rep);

  std::ostringstream pretty;
  pretty << "pi_2,oh lower bound (k=" << k << "): " << w.value << "\n";
  if (upper) pretty << "certified upper bound:        " << *upper << "\n";
  pretty << "ceiling sqrt(n):              " << std::sqrt(static_cast<double>(n)) << "\n"
         << (rep.all_pass ? "all checks pass\n" : "CHECK FAILURES\n");
  out["pretty"] = pretty.str();
  emit(cfg, out);
  return rep.all_pass ? kExitOk : kExitAssert;
}

int cmd_clifford(const RunConfig& cfg) {
  const Index n = cfg.n;
  const auto suite = models::clifford_identity_suite(n, 64, cfg.seed);
  summing::SearchParams p = search_params(cfg);
  p.restarts = std::min(cfg.restarts, 6);
  p.max_iters = std::min(cfg.iters, 400);
  summing::CertificateOptions co;
  co.seed = cfg.seed;
  const auto s = models::clifford_pi2oh_sandwich(n, p, co);
  const auto probe = models::clifford_ratio_probe(n, cfg.samples, true, cfg.seed);

  const bool suite_ok = suite.pass(1e-12);
  const bool probe_ok = probe.min_ratio >= 0.5 - 1e-9;
  const bool sandwich_ok =
      s.lower >= 1.0 - cfg.tol && s.lower <= s.upper + cfg.tol &&
      s.upper <= std::sqrt(2.0) + cfg.tol;

  json out;
  out["schema"] = "opspace.clifford/1";
  out["n"] = n;
  out["ambient"] = suite.ambient;
  out["identities"] = json{{"hermiticity", suite.hermiticity_residual},
                           {"squares", suite.square_residual},
                           {"anticommutators", suite.anticommutator_residual},
                           {"sum_identity", suite.sum_identity_residual},
                           {"norm_lower_slack", suite.norm_lower_slack},
                           {"norm_upper_slack", suite.norm_upper_slack},
                           {"trace_identity", suite.trace_identity_residual},
                           {"pass", suite_ok}};
  out["ratio_probe"] = json{{"samples", probe.samples}, {"min_ratio", probe.min_ratio},
                            {"pass", probe_ok}};
  out["sandwich"] = json{{"lower", s.lower}, {"upper", s.upper},
                         {"coeff_map_C", s.coeff_map_C},
                         {"comparison_factor", s.comparison_factor},
                         {"pass", sandwich_ok}};
  const bool pass = suite_ok && probe_ok && sandwich_ok;
  out["all_pass"] = pass;

  std::ostringstream pretty;
  pretty << "clifford n=" << n << " in M_" << suite.ambient << "\n"
         << "  identity residuals <= "
         << std::max({suite.anticommutator_residual, suite.square_residual,
                      suite.sum_identity_residual, suite.trace_identity_residual})
         << (suite_ok ? "  (pass)\n" : "  (FAIL)\n")
         << "  ratio probe min = " << probe.min_ratio << " over " << probe.samples
         << " samples" << (probe_ok ? "  (>= 1/2)\n" : "  (FAIL)\n")
         << "  sandwich [" << s.lower << ", " << s.upper << "]"
         << (sandwich_ok ? "  (inside [1, sqrt(2)])\n" : "  (FAIL)\n");
  out["pretty"] = pretty.str();
  emit(cfg, out);
  return pass ? kExitOk : kExitAssert;
}

int cmd_distance(const RunConfig& cfg) {
  const Presentation e = resolve_space(cfg.space, cfg.n);
  factorize::DistanceSearchParams p;
  p.seed = cfg.seed;
  p.restarts = std::min(cfg.restarts, 8);
  p.lower.seed = cfg.seed;
  p.cert.seed = cfg.seed;

  json out;
  bool pass = true;
  std::ostringstream pretty;

  if (!cfg.space2.empty()) {
    const Presentation f = resolve_space(cfg.space2, cfg.n);
    const auto rep = factorize::pairwise_distance(e, f, p);
    out = io::to_json(rep);
    pass = rep.product_bound >= 1.0 - 1e-9 &&
           rep.product_bound <=
               rep.left.product * rep.right.product + 1e-9;
    pretty << "cb distance bound through OH_" << e.dim() << ": " << rep.product_bound
           << "  (general guarantee " << rep.guarantee_n << ")\n";
  } else {
    const auto rep = factorize::distance_to_oh(e, p);
    out = io::to_json(rep);
    pass = rep.product >= 1.0 - 1e-9;
    const SpaceLabel lab = e.label();
    if (lab == SpaceLabel::row || lab == SpaceLabel::column || lab == SpaceLabel::oh)
      pass = pass && rep.product <= rep.guarantee_sqrt_n + cfg.tol;
    pretty << "distance to OH_" << e.dim() << " <= " << rep.product << "  (forward "
           << rep.forward_upper << " x backward " << rep.backward_exact << ")\n"
           << "general guarantee sqrt(n) = " << rep.guarantee_sqrt_n << "\n";
  }
  out["all_pass"] = pass;
  out["pretty"] = pretty.str();
  emit(cfg, out);
  return pass ? kExitOk : kExitAssert;
}

int cmd_project(const RunConfig& cfg) {
  Presentation e = resolve_space(cfg.space, cfg.n);
  if (!e.coefficient_only() && e.d1() != e.d2()) e = embed_square(e);
  if (e.coefficient_only())
    throw io::InputError("project: needs a concrete presentation (the oh model has none)");
  const Index n = e.dim();
  const Index d = e.d1();

  summing::CertificateOptions co;
  co.seed = cfg.seed;
  const auto cert = summing::pi2oh_upper_certificate(e, CMat::Identity(n, n), co);
  if (!cert.sound() || cert.mixture.empty())
    throw io::InputError("project: no usable mixture certificate for this space");

  const auto P = factorize::project_onto(e, cert.mixture);

  // idempotency residuals
  CMat B(d * d, n);
  for (Index i = 0; i < n; ++i) B.col(i) = vec_rm(e.basis(i));
  const double resid_incl = (P.U * B - CMat::Identity(n, n)).norm();
  const CMat PU = B * P.U;
  const double resid_idem = (PU * PU - PU).norm();

  const int level = cfg.level > 0 ? cfg.level : static_cast<int>(std::min<Index>(d, 4));
  summing::SearchParams sp = search_params(cfg);
  sp.restarts = std::min(cfg.restarts, 8);
  sp.max_iters = std::min(cfg.iters, 500);
  json levels = json::array();
  double cb_best = 0.0;
  for (int lv = 1; lv <= level; ++lv) {
    const double lb = factorize::cb_lower_matrix_map(P, lv, sp);
    levels.push_back(json{{"level", lv}, {"cb_lower", lb}});
    cb_best = std::max(cb_best, lb);
  }

  const double sqn = std::sqrt(static_cast<double>(n));
  const bool pass = resid_incl <= 1e-12 && resid_idem <= 1e-12 && cb_best <= sqn + cfg.tol;

  json out;
  out["schema"] = "opspace.project/1";
  out["space"] = io::to_json(e);
  out["U"] = io::to_json(P.U);
  out["mixture"] = io::to_json(cert.mixture);
  out["inclusion_residual"] = resid_incl;
  out["idempotency_residual"] = resid_idem;
  out["cb_lower_by_level"] = std::move(levels);
  out["cb_lower_best"] = cb_best;
  out["bound_sqrt_n"] = sqn;
  out["all_pass"] = pass;

  std::ostringstream pretty;
  pretty << "projection onto " << to_string(e.label()) << " span in M_" << d << "\n"
         << "  inclusion residual  = " << resid_incl << "\n"
         << "  idempotency residual = " << resid_idem << "\n"
         << "  cb lower bound (L<=" << level << ") = " << cb_best << "  (bound sqrt(n) = "
         << sqn << ")\n" << (pass ? "pass\n" : "FAIL\n");
  out["pretty"] = pretty.str();
  emit(cfg, out);
  return pass ? kExitOk : kExitAssert;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"operator-space invariants at desk scale"};
  app.require_subcommand(1);
  RunConfig cfg;

  auto add_common = [&](CLI::App* c) {
    c->add_option("--space", cfg.space, "model name (row|column|oh|clifford) or JSON file")
        ->envname("OPSPACE_SPACE");
    c->add_option("--n", cfg.n, "model dimension")->envname("OPSPACE_N");
    c->add_option("--k", cfg.k, "tuple length (0 = dimension)")->envname("OPSPACE_K");
    c->add_option("--restarts", cfg.restarts, "search restarts")->envname("OPSPACE_RESTARTS");
    c->add_option("--iters", cfg.iters, "ascent iteration cap")->envname("OPSPACE_ITERS");
    c->add_option("--seed", cfg.seed, "random seed")->envname("OPSPACE_SEED");
    c->add_option("--tol", cfg.tol, "assertion slack")->envname("OPSPACE_TOL");
    c->add_option("--level", cfg.level, "amplification level")->envname("OPSPACE_LEVEL");
    c->add_option("--out", cfg.out, "output file (default stdout)")->envname("OPSPACE_OUT");
    c->add_option("--format", cfg.format, "json | csv | pretty")
        ->check(CLI::IsMember({"json", "csv", "pretty"}))
        ->envname("OPSPACE_FORMAT");
  };

  CLI::App* table = app.add_subcommand("table", "model-space summing norms against known values");
  table->add_option("--nmax", cfg.nmax, "largest dimension (2..6)")->envname("OPSPACE_NMAX");
  add_common(table);

  CLI::App* mn = app.add_subcommand("minnorm", "min tensor norm of a tuple");
  mn->add_option("--tuple", cfg.tuple_file, "tuple coefficient JSON file");
  add_common(mn);

  CLI::App* pi = app.add_subcommand("pi2oh", "summing-norm sandwich for the identity");
  add_common(pi);

  CLI::App* cl = app.add_subcommand("clifford", "generator identities, ratio probe, sandwich");
  cl->add_option("--samples", cfg.samples, "ratio probe sample count")
      ->envname("OPSPACE_SAMPLES");
  add_common(cl);

  CLI::App* di = app.add_subcommand("distance", "cb distance to OH_n (or pairwise)");
  di->add_option("--space2", cfg.space2, "second space for the pairwise bound");
  add_common(di);

  CLI::App* pr = app.add_subcommand("project", "mixture projection onto the span");
  add_common(pr);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    if (e.get_exit_code() == 0) return app.exit(e);  // --help
    app.exit(e);
    return kExitInput;
  }

  try {
    if (table->parsed()) return cmd_table(cfg);
    if (mn->parsed()) return cmd_minnorm(cfg);
    if (pi->parsed()) return cmd_pi2oh(cfg);
    if (cl->parsed()) return cmd_clifford(cfg);
    if (di->parsed()) return cmd_distance(cfg);
    if (pr->parsed()) return cmd_project(cfg);
  } catch (const io::InputError& e) {
    std::cerr << "input error: " << e.what() << "\n";
    return kExitInput;
  } catch (const std::invalid_argument& e) {
    std::cerr << "input error: " << e.what() << "\n";
    return kExitInput;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitAssert;
  }
  return kExitInput;
}
