// Copyright 2026 the opspace authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include "opspace/core.hpp"
#include "opspace/factorize.hpp"
#include "opspace/summing.hpp"

#include <json.hpp>

#include <stdexcept>
#include <string>

namespace opspace::io {

using nlohmann::json;

/// Malformed user input (bad JSON, wrong shapes).  Mapped to exit code 3 by
/// the CLI.
struct InputError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

json to_json(const CMat& m);           // {"re": [[..]], "im": [[..]]}
CMat cmat_from_json(const json& j);

json to_json(const Presentation& p);   // {"shape":[d1,d2],"basis":[...],"label":...}
Presentation presentation_from_json(const json& j);

json to_json(const TupleOfElements& t);
TupleOfElements tuple_from_json(const json& j);
/// Reads only the coefficient matrix; the space comes from elsewhere.
CMat tuple_matrix_from_json(const json& j);

json to_json(const summing::PhiFunctional& f);
json to_json(const summing::KMixture& m);
summing::KMixture mixture_from_json(const json& j);

json to_json(const summing::LowerWitness& w);
json to_json(const summing::UpperCertificate& c);
json to_json(const factorize::DistanceReport& r);
json to_json(const factorize::PairwiseReport& r);
json to_json(const summing::InequalityReport& r);

json load_json_file(const std::string& path);

}  // namespace opspace::io
