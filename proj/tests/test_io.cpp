// Copyright 2026 the opspace authors
// SPDX-License-Identifier: Apache-2.0

#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "opspace/io.hpp"
#include "opspace/models.hpp"

using namespace opspace;
using io::json;

TEST_CASE("matrix round trip") {
  Rng rng(1);
  const CMat m = rng.gaussian_matrix(3, 2);
  const CMat back = io::cmat_from_json(io::to_json(m));
  CHECK((m - back).norm() == 0.0);  // exact: shortest-round-trip doubles
}

TEST_CASE("matrix parse errors") {
  CHECK_THROWS_AS(io::cmat_from_json(json::array()), io::InputError);
  CHECK_THROWS_AS(io::cmat_from_json(json{{"re", {{1.0}}}, {"im", {{1.0, 2.0}}}}),
                  io::InputError);
  CHECK_THROWS_AS(io::cmat_from_json(json{{"re", {{"x"}}}, {"im", {{0.0}}}}), io::InputError);
}

TEST_CASE("presentation round trip: concrete") {
  const Presentation r3 = models::row_space(3);
  const json j = io::to_json(r3);
  CHECK(j["label"] == "row");
  CHECK(j["shape"][0] == 1);
  CHECK(j["shape"][1] == 3);
  const Presentation back = io::presentation_from_json(j);
  CHECK(back.dim() == 3);
  CHECK(back.label() == SpaceLabel::row);
  for (Index i = 0; i < 3; ++i) CHECK((back.basis(i) - r3.basis(i)).norm() == 0.0);
}

TEST_CASE("presentation round trip: oh model") {
  const json j = io::to_json(Presentation::oh_model(4));
  const Presentation back = io::presentation_from_json(j);
  CHECK(back.coefficient_only());
  CHECK(back.dim() == 4);
}

TEST_CASE("presentation parse errors") {
  CHECK_THROWS_AS(io::presentation_from_json(json{{"label", "nosuch"}}), io::InputError);
  CHECK_THROWS_AS(io::presentation_from_json(json{{"label", "generic"}}), io::InputError);
  // dependent basis surfaces as InputError
  json dep;
  dep["label"] = "generic";
  dep["basis"] = json::array();
  const json one = io::to_json(CMat::Identity(2, 2));
  dep["basis"].push_back(one);
  dep["basis"].push_back(one);
  CHECK_THROWS_AS(io::presentation_from_json(dep), io::InputError);
}

TEST_CASE("tuple round trip") {
  Rng rng(7);
  const TupleOfElements t(models::row_space(2), rng.gaussian_matrix(3, 2));
  const TupleOfElements back = io::tuple_from_json(io::to_json(t));
  CHECK((back.A - t.A).norm() == 0.0);
  CHECK(back.space.label() == SpaceLabel::row);
}

TEST_CASE("mixture round trip") {
  summing::KMixture m;
  m.weights = {0.25, 0.75};
  const CMat e = CMat::Identity(2, 2) / std::sqrt(2.0);
  m.atoms.emplace_back(e, e);
  m.atoms.emplace_back(e, 0.5 * e);
  const summing::KMixture back = io::mixture_from_json(io::to_json(m));
  CHECK(back.weights.size() == 2);
  CHECK(back.weights[1] == 0.75);
  CHECK((back.atoms[1].z - 0.5 * e).norm() == 0.0);
}

TEST_CASE("witness and certificate serialization carry schema keys") {
  summing::SearchParams p;
  p.restarts = 4;
  p.max_iters = 200;
  const auto w = summing::pi2oh_lower(models::row_space(2), summing::TargetSpec::identity_map(),
                                      2, p);
  const json jw = io::to_json(w);
  CHECK(jw["schema"] == "opspace.witness/1");
  CHECK(jw.contains("tuple"));

  const auto cert = summing::pi2oh_upper_certificate(models::row_space(2), CMat::Identity(2, 2));
  const json jc = io::to_json(cert);
  CHECK(jc["schema"] == "opspace.certificate/1");
  CHECK(jc["status"] == "ok");
  CHECK(jc["C"].get<double>() == cert.C);
  // replay: mixture parses back and reproduces the gram within tolerance
  const summing::KMixture mix = io::mixture_from_json(jc["mixture"]);
  const CMat G = mix.gram(embed_square(models::row_space(2)));
  CHECK((G - cert.gram_phi).norm() < 1e-12 * (1.0 + cert.gram_phi.norm()));
}

TEST_CASE("file loading errors") {
  CHECK_THROWS_AS(io::load_json_file("/nonexistent/path.json"), io::InputError);
}
