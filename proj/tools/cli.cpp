#include "cli.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iterator>
#include <optional>
#include <sstream>
#include <thread>

#include "CLI11.hpp"
#include "qms/birkhoff.hpp"
#include "qms/json_io.hpp"
#include "qms/obstruction.hpp"
#include "qms/semiclassical.hpp"

namespace qms::cli {

namespace fs = std::filesystem;
using Json = json::Json;

namespace {

struct Settings {
  std::string command;
  std::string input;
  double eps = 1e-7;
  int max_iter = 150;
  double tol = kDefaultTol;
  unsigned long max_denominator = 0;  // 0: the default ladder
  std::string mode = "strong";
  bool force_exact = false;
  bool force_float = false;
  std::string out;
  std::string square;
  bool timings = false;
  unsigned jobs = 0;
};

struct Outcome {
  int code = kAffirmative;
  Json report = Json::object();
  std::string summary;
};

int verdict_code(Verdict v) {
  switch (v) {
    case Verdict::Yes:
      return kAffirmative;
    case Verdict::No:
      return kNegative;
    case Verdict::Inconclusive:
      break;
  }
  return kInconclusive;
}

int error_code(ErrorCode code) {
  switch (code) {
    case ErrorCode::NotFound:
      return kNegative;
    case ErrorCode::Inconclusive:
    case ErrorCode::CertificationFailed:
    case ErrorCode::InvariantViolated:
      return kInconclusive;
    default:
      return kUsage;
  }
}

// Worst outcome first: usage, inconclusive, negative, affirmative.
int combine(int a, int b) {
  const auto rank = [](int c) { return c == kUsage ? 3 : c == kInconclusive ? 2 : c; };
  return rank(a) >= rank(b) ? a : b;
}

std::string digest(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  std::uint64_t h = 1469598103934665603ull;
  for (std::istreambuf_iterator<char> it(in), end; it != end; ++it) {
    h ^= static_cast<unsigned char>(*it);
    h *= 1099511628211ull;
  }
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

std::vector<unsigned long> ladder(const Settings& s) {
  if (s.max_denominator > 0) return {s.max_denominator};
  return {1000ul, 1000000ul, 1000000000ul};
}

BlockArray read_square(const fs::path& path, const Settings& s) {
  BlockArray raw = json::decode_square(json::read_file(path));
  if (s.force_exact && !raw.is_exact())
    throw Error(ErrorCode::RepresentationMismatch, "--exact given but " + path.string() + " holds a float square");
  if (s.force_float) raw = raw.to_float();
  return raw;
}

QuantumMagicSquare load_square(const fs::path& path, const Settings& s) {
  return QuantumMagicSquare(read_square(path, s), s.tol);
}

Json sdp_summary(const sdp::SdpResult& r) {
  return {{"status", std::string(sdp::to_string(r.status))},
          {"t_star", r.t_star},
          {"iterations", r.diagnostics.iterations},
          {"gap", r.diagnostics.gap}};
}

fs::path output_path(const Settings& s, const fs::path& input, const std::string& suffix) {
  if (s.out.empty()) return fs::path(input.stem().string() + suffix);
  const fs::path out(s.out);
  if (fs::is_directory(out)) return out / (input.stem().string() + suffix);
  return out;
}

Json certificate_json(const obstruction::ObstructionCertificate& cert, const QuantumMagicSquare& a) {
  Json j = json::encode(cert);
  j["square"] = json::encode(static_cast<const BlockArray&>(a));
  return j;
}

// Commands ------------------------------------------------------------------

Outcome cmd_validate(const Settings& s, const fs::path& input) {
  const BlockArray raw = read_square(input, s);
  const auto rep = validate_magic(raw, s.tol);
  Outcome o;
  o.report["valid"] = rep.ok;
  o.report["repr"] = std::string(to_string(raw.repr()));
  Json violations = Json::array();
  for (const auto& v : rep.violations) {
    Json entry = {{"kind", std::string(to_string(v.kind))}, {"i", v.i + 1}, {"margin", v.margin}};
    if (v.kind != Violation::Kind::RowSum && v.kind != Violation::Kind::ColumnSum) entry["j"] = v.j + 1;
    if (v.kind == Violation::Kind::RowOrthogonality || v.kind == Violation::Kind::ColumnOrthogonality) entry["k"] = v.k + 1;
    violations.push_back(std::move(entry));
  }
  o.report["violations"] = std::move(violations);
  if (rep.ok) o.report["quantum_permutation"] = validate_quantum_permutation(QuantumMagicSquare(raw, s.tol), s.tol).ok;
  o.code = rep.ok ? kAffirmative : kNegative;
  o.summary = rep.ok ? "valid quantum magic square" : std::to_string(rep.violations.size()) + " violation(s)";
  return o;
}

Outcome cmd_birkhoff(const Settings&, const fs::path& input) {
  const Json j = json::read_file(input);
  std::optional<birkhoff::DoublyStochasticMatrix> m;
  if (j.is_object() && j.contains("blocks")) {
    const BlockArray a = json::decode_square(j);
    if (a.s() != 1 || !a.is_exact()) throw Error(ErrorCode::ShapeMismatch, "birkhoff needs an exact square with s = 1");
    std::vector<Rational> entries;
    for (const auto& b : a.exact_blocks()) {
      if (!b(0, 0).is_real()) throw Error(ErrorCode::NotDoublyStochastic, "entries must be real");
      entries.push_back(b(0, 0).re());
    }
    m.emplace(a.n(), std::move(entries));
  } else {
    m.emplace(json::decode_doubly_stochastic(j));
  }
  const auto terms = birkhoff::decompose(*m);
  const std::size_t n = m->n();
  Outcome o;
  o.report["n"] = n;
  o.report["terms"] = json::encode(terms);
  o.report["count"] = terms.size();
  o.report["bound"] = (n - 1) * (n - 1) + 1;
  o.report["exact_reconstruction"] = birkhoff::reconstruct(terms, n) == m->entries();
  o.summary = std::to_string(terms.size()) + " permutation(s)";
  return o;
}

Outcome cmd_check_semiclassical(const Settings& s, const fs::path& input) {
  const auto a = load_square(input, s);
  semiclassical::CheckOptions opt;
  opt.eps = s.eps;
  opt.max_iter = s.max_iter;
  if (s.max_denominator > 0) opt.denominators = {s.max_denominator};
  const auto r = semiclassical::check_semiclassical(a, opt);
  Outcome o;
  o.code = verdict_code(r.verdict);
  o.report["verdict"] = std::string(to_string(r.verdict));
  o.report["sdp"] = sdp_summary(r.sdp);
  if (!r.note.empty()) o.report["note"] = r.note;
  if (r.decomposition) {
    o.report["exact"] = r.decomposition->is_exact();
    o.report["decomposition"] = json::encode(*r.decomposition);
  }
  if (r.dual) {
    o.report["dual_pairing"] = r.sdp.diagnostics.dual_pairing;
    if (!s.out.empty()) {
      const fs::path path = output_path(s, input, ".lmi-dual.json");
      json::write_file(path, {{"Y", json::encode(*r.dual)}, {"pairing", r.sdp.diagnostics.dual_pairing}});
      o.report["certificate"] = path.string();
    }
  }
  o.summary = "semiclassical: " + std::string(to_string(r.verdict));
  return o;
}

Outcome cmd_decompose(const Settings& s, const fs::path& input) {
  const auto a = load_square(input, s);
  Outcome o;
  try {
    const auto dec = semiclassical::interior_map_decomposition(a);
    const auto check = semiclassical::verify_positive_unital_map(dec, a, s.tol);
    o.report["verdict"] = check.ok ? "yes" : "no";
    o.report["exact"] = dec.is_exact();
    o.report["decomposition"] = json::encode(dec);
    o.code = check.ok ? kAffirmative : kInconclusive;
    o.summary = check.ok ? "closed-form decomposition found" : "closed-form weights failed verification";
  } catch (const Error& e) {
    if (e.code() != ErrorCode::BoundViolated) throw;
    o.code = kNegative;
    o.report["verdict"] = "no";
    o.report["reason"] = e.what();
    o.summary = "outside the closed-form region";
  }
  return o;
}

Outcome cmd_dilate(const Settings& s, const fs::path& input) {
  const auto a = load_square(input, s);
  semiclassical::CheckOptions opt;
  opt.eps = s.eps;
  opt.max_iter = s.max_iter;
  const auto r = semiclassical::check_semiclassical(a, opt);
  Outcome o;
  o.code = verdict_code(r.verdict);
  o.report["verdict"] = std::string(to_string(r.verdict));
  if (!r.decomposition) {
    o.summary = "no commuting dilation: " + std::string(to_string(r.verdict));
    return o;
  }
  const auto dil = semiclassical::synthesize_commuting_dilation(*r.decomposition);
  const BlockArray back = compress(dil.u.to_float(), dil.v, 1e-6);
  double residual = 0.0;
  for (std::size_t k = 0; k < a.n() * a.n(); ++k)
    residual = std::max(residual, (back.numeric(k / a.n(), k % a.n()) - a.numeric(k / a.n(), k % a.n())).norm());
  o.report["u"] = json::encode(static_cast<const BlockArray&>(dil.u));
  o.report["v"] = json::encode(dil.v);
  o.report["isometry_residual"] = isometry_residual(dil.v);
  o.report["compression_residual"] = residual;
  o.summary = "commuting dilation of size " + std::to_string(dil.u.s());
  return o;
}

struct CertifyAttempt {
  std::optional<obstruction::ObstructionCertificate> cert;
  std::string failure;
  double numeric_pairing = 0.0;
};

CertifyAttempt certify(const Settings& s, const obstruction::ObstructionProblem& p) {
  CertifyAttempt at;
  const auto y = obstruction::find_dual_certificate(p, s.eps, s.max_iter);
  at.numeric_pairing = y.pairing;
  if (!p.square().is_exact()) {
    at.failure = "float square: numeric certificate only";
    return at;
  }
  try {
    at.cert = obstruction::exact_certify(y.y, p, ladder(s));
  } catch (const Error& e) {
    if (e.code() != ErrorCode::CertificationFailed) throw;
    at.failure = e.what();
  }
  return at;
}

Outcome cmd_obstruction_check(const Settings& s, const fs::path& input) {
  const auto a = load_square(input, s);
  const auto mode = obstruction::parse_mode(s.mode);
  const auto r = obstruction::check_mconv_obstruction(a, mode, s.eps, s.max_iter);
  Outcome o;
  o.code = verdict_code(r.verdict);
  o.report["verdict"] = std::string(to_string(r.verdict));
  o.report["mode"] = s.mode;
  o.report["sdp"] = sdp_summary(r.sdp);
  o.summary = "obstruction (" + s.mode + "): " + std::string(to_string(r.verdict));
  if (r.verdict != Verdict::No) return o;

  const auto at = certify(s, obstruction::build_obstruction(a, mode));
  o.report["numeric_pairing"] = at.numeric_pairing;
  o.report["certified"] = at.cert.has_value();
  if (at.cert) {
    const fs::path path = output_path(s, input, "." + s.mode + ".certificate.json");
    json::write_file(path, certificate_json(*at.cert, a));
    o.report["certificate"] = path.string();
    o.report["pairing_B0"] = json::encode(at.cert->pairing_b0.re());
    o.summary += "; certificate written to " + path.string();
  } else {
    o.report["reason"] = at.failure;
  }
  return o;
}

Outcome cmd_find_certificate(const Settings& s, const fs::path& input) {
  const auto a = load_square(input, s);
  if (!a.is_exact()) throw Error(ErrorCode::RepresentationMismatch, "find-certificate needs an exact square");
  const auto p = obstruction::build_obstruction(a, obstruction::parse_mode(s.mode));
  Outcome o;
  try {
    const auto at = certify(s, p);
    o.report["numeric_pairing"] = at.numeric_pairing;
    if (!at.cert) {
      o.code = kInconclusive;
      o.report["found"] = false;
      o.report["reason"] = at.failure;
      o.summary = "numeric certificate did not survive exact certification";
      return o;
    }
    const Json cert = certificate_json(*at.cert, a);
    o.report["found"] = true;
    o.report["pairing_B0"] = json::encode(at.cert->pairing_b0.re());
    if (s.out.empty()) {
      o.report["certificate"] = cert;
    } else {
      const fs::path path = output_path(s, input, "." + s.mode + ".certificate.json");
      json::write_file(path, cert);
      o.report["certificate"] = path.string();
    }
    o.summary = "exact certificate with tr(Y B0) = " + format_rational(at.cert->pairing_b0.re());
  } catch (const Error& e) {
    if (e.code() != ErrorCode::NotFound) throw;
    o.code = kNegative;
    o.report["found"] = false;
    o.report["reason"] = e.what();
    o.summary = "no certificate: the formula is feasible";
  }
  return o;
}

Outcome cmd_verify_certificate(const Settings& s, const fs::path& input) {
  const Json j = json::read_file(input);
  const auto cert = json::decode_certificate(j);
  Json square;
  if (!s.square.empty()) {
    square = json::read_file(s.square);
  } else if (j.contains("square")) {
    square = j.at("square");
  } else {
    throw Error(ErrorCode::ParseError, "certificate has no \"square\"; pass --square");
  }
  const BlockArray raw = json::decode_square(square);
  if (!raw.is_exact()) throw Error(ErrorCode::RepresentationMismatch, "verification needs an exact square");
  const QuantumMagicSquare a(raw);
  const auto check = obstruction::verify_certificate(cert, a);
  Outcome o;
  o.code = check.ok ? kAffirmative : kNegative;
  o.report["valid"] = check.ok;
  o.report["mode"] = std::string(obstruction::to_string(cert.mode));
  o.report["pairing_B0"] = json::encode(cert.pairing_b0.re());
  if (!check.ok) o.report["reason"] = check.reason;
  o.summary = check.ok ? "certificate verified exactly" : "certificate rejected: " + check.reason;
  return o;
}

// Reproduction scenarios -----------------------------------------------------

Outcome reproduce_thm_mconv(const Settings& s) {
  Outcome o;
  std::ostringstream log;
  const auto a = obstruction::counterexample_m2_3();
  const auto rep = validate_magic(a);
  o.report["square"] = json::encode(static_cast<const BlockArray&>(a));
  o.report["exact_valid"] = rep.ok;
  log << "counterexample in M_2^(3): " << (rep.ok ? "valid (exact)" : "INVALID") << '\n';

  const auto p = obstruction::build_obstruction(a, obstruction::Mode::Strong);
  const auto y = obstruction::find_dual_certificate(p, s.eps, s.max_iter);
  log << "numeric dual: tr(Y B0) = " << y.pairing << ", min eig " << y.min_eig << '\n';
  const auto cert = obstruction::exact_certify(y.y, p, ladder(s));
  const auto check = obstruction::verify_certificate(cert, a);
  Json pairings = json::encode(cert)["pairings"];
  o.report["pairings"] = pairings;
  o.report["verified"] = check.ok;
  log << "exact pairings:";
  for (const auto& [k, v] : pairings.items()) log << ' ' << k << '=' << v.get<std::string>();
  log << "\nexact verification: " << (check.ok ? "ok" : check.reason) << '\n';
  if (!s.out.empty()) {
    json::write_file(s.out, certificate_json(cert, a));
    o.report["certificate"] = s.out;
  }

  const auto padded = obstruction::check_mconv_obstruction(embed_pad(a), obstruction::Mode::Strong, s.eps, s.max_iter);
  o.report["padded_n4_verdict"] = std::string(to_string(padded.verdict));
  log << "padded to n = 4: " << to_string(padded.verdict) << '\n';

  const bool ok = rep.ok && check.ok && padded.verdict == Verdict::No;
  o.code = ok ? kAffirmative : kNegative;
  o.summary = log.str() + (ok ? "separation reproduced" : "separation NOT reproduced");
  return o;
}

Outcome reproduce_cor_nodil(const Settings& s) {
  Outcome o;
  const auto a = obstruction::counterexample_m2_3();
  semiclassical::CheckOptions opt;
  opt.eps = s.eps;
  opt.max_iter = s.max_iter;
  const auto r = semiclassical::check_semiclassical(a, opt);
  const bool dual_ok = r.dual && sdp::verify_dual(semiclassical::build_semiclassical_lmi(a), *r.dual, s.eps);
  bool bound_violated = false;
  try {
    semiclassical::interior_map_decomposition(a);
  } catch (const Error& e) {
    bound_violated = e.code() == ErrorCode::BoundViolated;
  }
  o.report["verdict"] = std::string(to_string(r.verdict));
  o.report["lmi_dual_verified"] = dual_ok;
  o.report["dual_pairing"] = r.sdp.diagnostics.dual_pairing;
  o.report["outside_closed_form_region"] = bound_violated;
  const bool ok = r.verdict == Verdict::No && dual_ok;
  o.code = ok ? kAffirmative : kNegative;
  std::ostringstream log;
  log << "counterexample semiclassical: " << to_string(r.verdict) << " (LMI dual pairing " << r.sdp.diagnostics.dual_pairing
      << (dual_ok ? ", verified" : ", NOT verified") << ")";
  o.summary = log.str();
  return o;
}

Outcome reproduce_birkhoff_demo(const Settings&) {
  Outcome o;
  const auto q = [](long p, long d) { return Rational(p, d); };
  const auto m = birkhoff::DoublyStochasticMatrix::from_rows({{q(1, 2), q(1, 4), q(1, 4), q(0, 1)},
                                                              {q(1, 4), q(1, 2), q(0, 1), q(1, 4)},
                                                              {q(1, 4), q(0, 1), q(1, 3), q(5, 12)},
                                                              {q(0, 1), q(1, 4), q(5, 12), q(1, 3)}});
  const auto terms = birkhoff::decompose(m);
  const bool exact = birkhoff::reconstruct(terms, 4) == m.entries();
  Json dims = Json::object();
  bool dims_ok = true;
  for (std::size_t n = 1; n <= 5; ++n) {
    const std::size_t d = birkhoff::magic_space_dimension(n);
    dims[std::to_string(n)] = d;
    dims_ok = dims_ok && d == (n - 1) * (n - 1) + 1;
  }
  o.report["terms"] = json::encode(terms);
  o.report["exact_reconstruction"] = exact;
  o.report["magic_space_dimension"] = dims;
  const bool ok = exact && terms.size() <= 10 && dims_ok;
  o.code = ok ? kAffirmative : kNegative;
  o.summary = std::to_string(terms.size()) + " terms, reconstruction " + (exact ? "exact" : "WRONG") +
              ", dimensions " + (dims_ok ? "(n-1)^2+1" : "WRONG");
  return o;
}

// Driver ---------------------------------------------------------------------

using Handler = Outcome (*)(const Settings&, const fs::path&);

Outcome guarded(const std::function<Outcome()>& body) {
  try {
    return body();
  } catch (const Error& e) {
    Outcome o;
    o.code = error_code(e.code());
    o.report["error"] = e.what();
    o.summary = e.what();
    return o;
  } catch (const std::exception& e) {
    Outcome o;
    o.code = kUsage;
    o.report["error"] = e.what();
    o.summary = e.what();
    return o;
  }
}

Outcome run_one(const Settings& s, Handler h, const fs::path& input) {
  const auto start = std::chrono::steady_clock::now();
  Outcome o = guarded([&] { return h(s, input); });
  o.report["command"] = s.command;
  o.report["input"] = input.string();
  if (fs::is_regular_file(input)) o.report["digest"] = digest(input);
  o.report["exit_code"] = o.code;
  if (s.timings)
    o.report["timings"] = {
        {"total_ms", std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - start).count()}};
  return o;
}

int run_batch(const Settings& s, Handler h, std::ostream& out, std::ostream& err) {
  std::vector<fs::path> files;
  for (const auto& e : fs::directory_iterator(s.input))
    if (e.is_regular_file() && e.path().extension() == ".json") files.push_back(e.path());
  std::sort(files.begin(), files.end());
  std::vector<Outcome> results(files.size());
  const unsigned jobs = std::max(1u, std::min<unsigned>(s.jobs ? s.jobs : std::thread::hardware_concurrency(),
                                                        static_cast<unsigned>(files.size())));
  std::atomic<std::size_t> next{0};
  std::vector<std::thread> pool;
  for (unsigned t = 0; t < jobs; ++t)
    pool.emplace_back([&] {
      for (std::size_t k; (k = next++) < files.size();) results[k] = run_one(s, h, files[k]);
    });
  for (auto& t : pool) t.join();

  Json all = Json::array();
  int code = kAffirmative;
  for (std::size_t k = 0; k < files.size(); ++k) {
    all.push_back(results[k].report);
    code = combine(code, results[k].code);
    err << files[k].filename().string() << ": " << results[k].summary << '\n';
  }
  out << all.dump(2) << '\n';
  return code;
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Quantum magic squares: semiclassicality, matrix convex hull obstructions and exact certificates"};
  app.require_subcommand(1);
  Settings s;

  const auto common = [&](CLI::App* sub, const std::string& what) {
    sub->add_option("input", s.input, what + " (a JSON file, or a directory for batch mode)")->required();
    sub->add_option("--tol", s.tol, "Floating tolerance for validation")->capture_default_str();
    auto* ex = sub->add_flag("--exact", s.force_exact, "Require exact input");
    sub->add_flag("--float", s.force_float, "Convert exact input to floating point")->excludes(ex);
    sub->add_flag("--timings", s.timings, "Add wall-clock timings to the report");
    sub->add_option("--jobs", s.jobs, "Parallel jobs in batch mode (default: hardware threads)");
  };
  const auto solver = [&](CLI::App* sub) {
    sub->add_option("--eps", s.eps, "Solver tolerance")->capture_default_str();
    sub->add_option("--max-iter", s.max_iter, "Solver iteration limit")->capture_default_str();
    sub->add_option("--max-denominator", s.max_denominator, "Single rationalization bound instead of 1e3, 1e6, 1e9");
  };
  const auto mode = [&](CLI::App* sub) {
    sub->add_option("--mode", s.mode, "Obstruction formula")->check(CLI::IsMember({"weak", "strong"}))->capture_default_str();
  };
  const auto out_opt = [&](CLI::App* sub, const std::string& what) { sub->add_option("--out", s.out, what); };

  std::vector<std::pair<CLI::App*, Handler>> handlers;
  const auto add = [&](const std::string& name, const std::string& help, Handler h) {
    auto* sub = app.add_subcommand(name, help);
    handlers.emplace_back(sub, h);
    return sub;
  };

  auto* validate = add("validate", "Check the quantum magic square conditions", cmd_validate);
  common(validate, "Square");
  auto* birk = add("birkhoff", "Exact Birkhoff-von Neumann decomposition of a rational doubly stochastic matrix", cmd_birkhoff);
  common(birk, "Matrix (rows of \"p/q\") or an exact square with s = 1");
  auto* semi = add("check-semiclassical", "Decide semiclassicality by the LMI", cmd_check_semiclassical);
  common(semi, "Square");
  solver(semi);
  out_opt(semi, "Where to write the LMI dual when the answer is no");
  auto* dec = add("decompose", "Closed-form semiclassical weights for squares deep inside", cmd_decompose);
  common(dec, "Square");
  auto* dil = add("dilate", "Commuting quantum permutation dilation of a semiclassical square", cmd_dilate);
  common(dil, "Square");
  solver(dil);
  auto* obs = add("obstruction-check", "Test the matrix convex hull constraint", cmd_obstruction_check);
  common(obs, "Square");
  solver(obs);
  mode(obs);
  out_opt(obs, "Certificate path (or directory) when the constraint fails");
  auto* find = add("find-certificate", "Search for and exactly certify a dual certificate", cmd_find_certificate);
  common(find, "Exact square");
  solver(find);
  mode(find);
  out_opt(find, "Certificate path (or directory); printed in the report otherwise");
  auto* verify = add("verify-certificate", "Re-verify a certificate in exact arithmetic", cmd_verify_certificate);
  common(verify, "Certificate");
  verify->add_option("--square", s.square, "Square the certificate refers to, if not embedded");

  std::string scenario;
  auto* repro = app.add_subcommand("reproduce", "Scripted reproduction of the headline results");
  repro->add_option("scenario", scenario, "thm-mconv, cor-nodil or birkhoff-demo")
      ->required()
      ->check(CLI::IsMember({"thm-mconv", "cor-nodil", "birkhoff-demo"}));
  solver(repro);
  out_opt(repro, "thm-mconv: where to write the certificate");
  repro->add_flag("--timings", s.timings, "Add wall-clock timings to the report");

  try {
    std::vector<std::string> reversed(args.rbegin(), args.rend());
    app.parse(reversed);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e, out, err);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e, out, err);
  } catch (const CLI::ParseError& e) {
    app.exit(e, out, err);
    return kUsage;
  }

  if (repro->parsed()) {
    s.command = "reproduce " + scenario;
    const auto start = std::chrono::steady_clock::now();
    Outcome o = guarded([&] {
      if (scenario == "thm-mconv") return reproduce_thm_mconv(s);
      if (scenario == "cor-nodil") return reproduce_cor_nodil(s);
      return reproduce_birkhoff_demo(s);
    });
    o.report["command"] = s.command;
    o.report["exit_code"] = o.code;
    if (s.timings)
      o.report["timings"] = {
          {"total_ms", std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - start).count()}};
    out << o.report.dump(2) << '\n';
    err << o.summary << '\n';
    return o.code;
  }

  for (const auto& [sub, h] : handlers) {
    if (!sub->parsed()) continue;
    s.command = sub->get_name();
    if (!fs::exists(s.input)) {
      err << s.input << ": no such file or directory\n";
      return kUsage;
    }
    if (fs::is_directory(s.input)) return run_batch(s, h, out, err);
    const Outcome o = run_one(s, h, s.input);
    out << o.report.dump(2) << '\n';
    err << fs::path(s.input).filename().string() << ": " << o.summary << '\n';
    return o.code;
  }
  return kUsage;
}

}  // namespace qms::cli
