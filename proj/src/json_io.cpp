#include "qms/json_io.hpp"

#include <fstream>

namespace qms::json {

namespace {

[[noreturn]] void bad(const std::string& what) { throw Error(ErrorCode::ParseError, what); }

const Json& field(const Json& j, const char* key) {
  if (!j.is_object() || !j.contains(key)) bad(std::string("missing field \"") + key + "\"");
  return j.at(key);
}

std::size_t size_field(const Json& j, const char* key) {
  const Json& v = field(j, key);
  if (!v.is_number_unsigned()) bad(std::string("\"") + key + "\" must be a nonnegative integer");
  return v.get<std::size_t>();
}

template <typename F>
auto decode_rows(const Json& j, F&& entry) {
  if (!j.is_array() || j.empty() || !j.front().is_array()) bad("matrix must be a nonempty array of rows");
  const std::size_t rows = j.size(), cols = j.front().size();
  std::vector<decltype(entry(j.front().front()))> out;
  for (const auto& row : j) {
    if (!row.is_array() || row.size() != cols) bad("matrix rows must have equal length");
    for (const auto& x : row) out.push_back(entry(x));
  }
  return std::make_tuple(rows, cols, std::move(out));
}

}  // namespace

Json encode(const Rational& q) {
  Rational c = q;
  c.canonicalize();
  return format_rational(c);
}

Json encode(const GaussianRational& z) { return {{"re", encode(z.re())}, {"im", encode(z.im())}}; }

Json encode(const ExactMatrix& m) {
  Json out = Json::array();
  for (std::size_t i = 0; i < m.rows(); ++i) {
    Json row = Json::array();
    for (std::size_t j = 0; j < m.cols(); ++j) row.push_back(encode(m(i, j)));
    out.push_back(std::move(row));
  }
  return out;
}

Json encode(const CMatrix& m) {
  Json out = Json::array();
  for (Eigen::Index i = 0; i < m.rows(); ++i) {
    Json row = Json::array();
    for (Eigen::Index j = 0; j < m.cols(); ++j) row.push_back({m(i, j).real(), m(i, j).imag()});
    out.push_back(std::move(row));
  }
  return out;
}

Json encode(const Permutation& p) {
  Json out = Json::array();
  for (std::size_t i = 0; i < p.size(); ++i) out.push_back(p(i) + 1);
  return out;
}

Json encode(const BlockArray& a) {
  Json blocks = Json::array();
  for (std::size_t i = 0; i < a.n(); ++i) {
    Json row = Json::array();
    for (std::size_t j = 0; j < a.n(); ++j) row.push_back(a.is_exact() ? encode(a.exact(i, j)) : encode(a.floating(i, j)));
    blocks.push_back(std::move(row));
  }
  return {{"n", a.n()}, {"s", a.s()}, {"repr", std::string(to_string(a.repr()))}, {"blocks", std::move(blocks)}};
}

Json encode(const std::vector<birkhoff::Term>& terms) {
  Json out = Json::array();
  for (const auto& t : terms) out.push_back({{"perm", encode(t.perm)}, {"weight", encode(t.weight)}});
  return out;
}

Json encode(const semiclassical::Decomposition& dec) {
  Json out = Json::array();
  const auto& perms = all_permutations(dec.n());
  for (std::size_t r = 0; r < dec.size(); ++r) {
    if (dec.is_exact() ? dec.exact(r).is_zero() : dec.floating(r).norm() == 0.0) continue;
    out.push_back({{"perm", encode(perms[r])}, {"q", dec.is_exact() ? encode(dec.exact(r)) : encode(dec.floating(r))}});
  }
  return out;
}

Json encode(const obstruction::ObstructionCertificate& cert) {
  Json pairings = Json::object();
  pairings["B0"] = encode(cert.pairing_b0.re());
  for (std::size_t k = 0; k < cert.pairings.size(); ++k) pairings["B" + std::to_string(k + 1)] = encode(cert.pairings[k].re());
  return {{"n", cert.n}, {"s", cert.s}, {"mode", std::string(obstruction::to_string(cert.mode))}, {"Y", encode(cert.y)},
          {"pairings", std::move(pairings)}};
}

Rational decode_rational(const Json& j) {
  if (j.is_number_integer()) return Rational(j.get<long>());
  if (j.is_string()) return parse_rational(j.get<std::string>());
  if (j.is_object()) {
    const auto z = decode_gaussian(j);
    if (!z.is_real()) bad("expected a real rational, got a complex value");
    return z.re();
  }
  bad("rational must be a \"p/q\" string");
}

GaussianRational decode_gaussian(const Json& j) {
  if (j.is_object()) return {decode_rational(field(j, "re")), decode_rational(field(j, "im"))};
  return GaussianRational(decode_rational(j));
}

ExactMatrix decode_exact_matrix(const Json& j) {
  auto [rows, cols, entries] = decode_rows(j, decode_gaussian);
  ExactMatrix m(rows, cols);
  for (std::size_t k = 0; k < entries.size(); ++k) m(k / cols, k % cols) = entries[k];
  return m;
}

CMatrix decode_float_matrix(const Json& j) {
  auto [rows, cols, entries] = decode_rows(j, [](const Json& x) {
    if (x.is_number()) return Complex(x.get<double>(), 0.0);
    if (!x.is_array() || x.size() != 2 || !x[0].is_number() || !x[1].is_number()) bad("float entry must be [re, im]");
    return Complex(x[0].get<double>(), x[1].get<double>());
  });
  CMatrix m(static_cast<Eigen::Index>(rows), static_cast<Eigen::Index>(cols));
  for (std::size_t k = 0; k < entries.size(); ++k)
    m(static_cast<Eigen::Index>(k / cols), static_cast<Eigen::Index>(k % cols)) = entries[k];
  return m;
}

Permutation decode_permutation(const Json& j) {
  if (!j.is_array()) bad("permutation must be an array");
  std::vector<std::size_t> image;
  for (const auto& x : j) {
    if (!x.is_number_unsigned() || x.get<std::size_t>() == 0) bad("permutation entries are 1-based positive integers");
    image.push_back(x.get<std::size_t>() - 1);
  }
  try {
    return Permutation(std::move(image));
  } catch (const Error& e) {
    bad(e.what());
  }
}

BlockArray decode_square(const Json& j) {
  const std::size_t n = size_field(j, "n"), s = size_field(j, "s");
  const Json& repr = field(j, "repr");
  if (repr != "exact" && repr != "float") bad("\"repr\" must be \"exact\" or \"float\"");
  const Json& blocks = field(j, "blocks");
  if (!blocks.is_array() || blocks.size() != n) bad("\"blocks\" must have n rows");
  std::vector<ExactMatrix> exact;
  std::vector<CMatrix> floating;
  for (const auto& row : blocks) {
    if (!row.is_array() || row.size() != n) bad("every row of \"blocks\" must have n entries");
    for (const auto& b : row) {
      if (repr == "exact") {
        exact.push_back(decode_exact_matrix(b));
        if (exact.back().rows() != s || exact.back().cols() != s) bad("blocks must be s x s");
      } else {
        floating.push_back(decode_float_matrix(b));
        if (floating.back().rows() != static_cast<Eigen::Index>(s) || floating.back().cols() != static_cast<Eigen::Index>(s))
          bad("blocks must be s x s");
      }
    }
  }
  return repr == "exact" ? BlockArray::exact(n, std::move(exact)) : BlockArray::floating(n, std::move(floating));
}

birkhoff::DoublyStochasticMatrix decode_doubly_stochastic(const Json& j) {
  const Json& rows = j.is_object() ? field(j, "matrix") : j;
  if (!rows.is_array()) bad("expected rows of rationals");
  std::vector<std::vector<Rational>> out;
  for (const auto& row : rows) {
    if (!row.is_array()) bad("expected rows of rationals");
    out.emplace_back();
    for (const auto& x : row) out.back().push_back(decode_rational(x));
  }
  return birkhoff::DoublyStochasticMatrix::from_rows(out);
}

semiclassical::Decomposition decode_decomposition(std::size_t n, const Json& j) {
  if (!j.is_array() || j.empty()) bad("decomposition must be a nonempty array");
  const std::size_t count = all_permutations(n).size();
  const bool exact = !field(j.front(), "q").front().front().is_array();
  std::vector<ExactMatrix> eq;
  std::vector<CMatrix> fq;
  for (const auto& term : j) {
    const Permutation p = decode_permutation(field(term, "perm"));
    if (p.size() != n) bad("permutation has the wrong length");
    const std::size_t r = lex_rank(p);
    if (exact) {
      const ExactMatrix q = decode_exact_matrix(field(term, "q"));
      if (eq.empty()) eq.assign(count, ExactMatrix(q.rows(), q.cols()));
      eq[r] = eq[r] + q;
    } else {
      const CMatrix q = decode_float_matrix(field(term, "q"));
      if (fq.empty()) fq.assign(count, CMatrix::Zero(q.rows(), q.cols()));
      fq[r] += q;
    }
  }
  return exact ? semiclassical::Decomposition::exact(n, std::move(eq)) : semiclassical::Decomposition::floating(n, std::move(fq));
}

obstruction::ObstructionCertificate decode_certificate(const Json& j) {
  obstruction::ObstructionCertificate cert;
  cert.n = size_field(j, "n");
  cert.s = size_field(j, "s");
  try {
    cert.mode = obstruction::parse_mode(field(j, "mode").get<std::string>());
  } catch (const Json::exception&) {
    bad("\"mode\" must be a string");
  }
  cert.y = decode_exact_matrix(field(j, "Y"));
  const Json& pairings = field(j, "pairings");
  cert.pairing_b0 = GaussianRational(decode_rational(field(pairings, "B0")));
  for (std::size_t k = 1; pairings.contains("B" + std::to_string(k)); ++k)
    cert.pairings.push_back(GaussianRational(decode_rational(pairings.at("B" + std::to_string(k)))));
  if (cert.pairings.size() + 1 != pairings.size()) bad("pairings must be B0, B1, ... without gaps");
  return cert;
}

Json read_file(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) bad("cannot open " + path.string());
  try {
    return Json::parse(in);
  } catch (const Json::parse_error& e) {
    bad(path.string() + ": " + e.what());
  }
}

void write_file(const std::filesystem::path& path, const Json& j) {
  std::ofstream out(path);
  if (!out) throw Error(ErrorCode::ParseError, "cannot write " + path.string());
  out << j.dump(2) << '\n';
}

}  // namespace qms::json
