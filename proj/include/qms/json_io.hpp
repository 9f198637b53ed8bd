#pragma once

// JSON encoding shared by every module and the CLI.
//
//   rational        "p/q" (canonical, q > 0)
//   Gaussian        {"re": "p/q", "im": "p/q"}
//   exact matrix    row-major nested arrays of Gaussians
//   float matrix    row-major nested arrays of [re, im]
//   square          {"n", "s", "repr": "exact" | "float", "blocks": [[matrix]]}
//   permutation     one-line array of 1-based images

#include <filesystem>
#include <string>

#include "json.hpp"
#include "qms/birkhoff.hpp"
#include "qms/obstruction.hpp"
#include "qms/semiclassical.hpp"
#include "qms/structures.hpp"

namespace qms::json {

using Json = nlohmann::json;

Json encode(const Rational& q);
Json encode(const GaussianRational& z);
Json encode(const ExactMatrix& m);
Json encode(const CMatrix& m);
Json encode(const Permutation& p);
Json encode(const BlockArray& a);
Json encode(const std::vector<birkhoff::Term>& terms);
Json encode(const semiclassical::Decomposition& dec);
Json encode(const obstruction::ObstructionCertificate& cert);

/// Also accepts plain integers and {"re", "im"} with a zero imaginary part.
Rational decode_rational(const Json& j);
/// Also accepts a bare rational for a real scalar.
GaussianRational decode_gaussian(const Json& j);
ExactMatrix decode_exact_matrix(const Json& j);
CMatrix decode_float_matrix(const Json& j);
Permutation decode_permutation(const Json& j);
/// Unvalidated; the shape is checked against "n" and "s".
BlockArray decode_square(const Json& j);
/// Rows of rationals, for the classical Birkhoff input.
birkhoff::DoublyStochasticMatrix decode_doubly_stochastic(const Json& j);
semiclassical::Decomposition decode_decomposition(std::size_t n, const Json& j);
obstruction::ObstructionCertificate decode_certificate(const Json& j);

/// ParseError on unreadable files or malformed JSON.
Json read_file(const std::filesystem::path& path);
void write_file(const std::filesystem::path& path, const Json& j);

}  // namespace qms::json
