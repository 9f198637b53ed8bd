// Acceptance suite: one PASS/FAIL line per criterion.

#include <chrono>
#include <filesystem>
#include <functional>
#include <iomanip>
#include <iostream>
#include <numeric>
#include <random>
#include <sstream>

#include "cli.hpp"
#include "fixtures.hpp"
#include "qms/birkhoff.hpp"
#include "qms/extremality.hpp"
#include "qms/json_io.hpp"
#include "qms/obstruction.hpp"
#include "qms/semiclassical.hpp"

using namespace qms;
namespace fs = std::filesystem;

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t) { return std::chrono::duration<double>(Clock::now() - t).count(); }

struct Criterion {
  int id;
  std::string title;
  std::function<bool(std::ostream&)> run;
};

// Fails the criterion with a message.
struct Failure {
  std::string what;
};

void require(bool ok, const std::string& what) {
  if (!ok) throw Failure{what};
}

double max_block_distance(const BlockArray& a, const BlockArray& b) {
  double worst = 0.0;
  for (std::size_t k = 0; k < a.n() * a.n(); ++k)
    worst = std::max(worst, (a.numeric(k / a.n(), k % a.n()) - b.numeric(k / a.n(), k % a.n())).norm());
  return worst;
}

QuantumMagicSquare mix(const QuantumMagicSquare& a, const QuantumMagicSquare& b, double t) {
  std::vector<CMatrix> out;
  for (std::size_t k = 0; k < a.n() * a.n(); ++k)
    out.push_back((1 - t) * a.numeric(k / a.n(), k % a.n()) + t * b.numeric(k / a.n(), k % a.n()));
  return QuantumMagicSquare(BlockArray::floating(a.n(), out));
}

ExactMatrix random_rational_hermitian(std::mt19937& rng, std::size_t s, long range) {
  std::uniform_int_distribution<long> num(-range, range);
  ExactMatrix h(s, s);
  for (std::size_t i = 0; i < s; ++i) {
    h(i, i) = GaussianRational(Rational(num(rng), range));
    for (std::size_t j = i + 1; j < s; ++j) {
      h(i, j) = GaussianRational(Rational(num(rng), range), Rational(num(rng), range));
      h(j, i) = h(i, j).conj();
    }
  }
  return h;
}

// Rank-one rational projector v v* / (v* v).
ExactMatrix rational_projector(std::mt19937& rng, std::size_t s) {
  std::uniform_int_distribution<long> num(-4, 4);
  ExactMatrix v(s, 1);
  while (v.is_zero())
    for (std::size_t i = 0; i < s; ++i) v(i, 0) = GaussianRational(Rational(num(rng)), Rational(num(rng)));
  const GaussianRational norm = (v.adjoint() * v)(0, 0);
  return v * v.adjoint() * (GaussianRational(1) / norm);
}

// Exact weights q_pi >= 0 summing to I on `terms` random permutations.
semiclassical::Decomposition random_exact_decomposition(std::mt19937& rng, std::size_t n, std::size_t s) {
  const auto& perms = all_permutations(n);
  std::uniform_int_distribution<std::size_t> pick(0, perms.size() - 1);
  std::uniform_int_distribution<long> w(1, 9);
  std::vector<ExactMatrix> q(perms.size(), ExactMatrix(s, s));
  ExactMatrix rest = ExactMatrix::identity(s);
  for (int k = 0; k < 3; ++k) {
    // Each term has trace weight at most 1/6, so the remainder stays >= I/2.
    const ExactMatrix term = rational_projector(rng, s) * GaussianRational(Rational(w(rng), 54));
    q[pick(rng)] += term;
    rest -= term;
  }
  q[pick(rng)] += rest;
  return semiclassical::Decomposition::exact(n, std::move(q));
}

// Perturbation of the constant n = 3, s = 2 square along zero-sum patterns.
std::optional<QuantumMagicSquare> perturbed_constant(std::mt19937& rng) {
  const std::size_t n = 3, s = 2;
  std::vector<ExactMatrix> blocks(n * n, ExactMatrix::identity(s) * GaussianRational(Rational(1, 3)));
  std::uniform_int_distribution<std::size_t> idx(0, n - 1);
  for (int m = 0; m < 3; ++m) {
    std::size_t i = idx(rng), k = idx(rng), j = idx(rng), l = idx(rng);
    if (i == k || j == l) continue;
    const ExactMatrix h = random_rational_hermitian(rng, s, 20) * GaussianRational(Rational(1, 12));
    blocks[i * n + j] += h;
    blocks[i * n + l] -= h;
    blocks[k * n + j] -= h;
    blocks[k * n + l] += h;
  }
  const BlockArray raw = BlockArray::exact(n, blocks);
  if (!validate_magic(raw).ok) return std::nullopt;
  const QuantumMagicSquare a(raw);
  for (const auto& pi : all_permutations(n)) {
    ExactMatrix sum(s, s);
    for (std::size_t r = 0; r < n; ++r) sum += a.exact(r, pi(r));
    if (!psd_check_exact(sum - ExactMatrix::identity(s) * GaussianRational(Rational(1, 2))).is_psd) return std::nullopt;
  }
  return a;
}

int cli_run(const std::vector<std::string>& args, std::string* out = nullptr) {
  std::ostringstream o, e;
  const int code = cli::run(args, o, e);
  if (out) *out = o.str();
  return code;
}

// Criteria -------------------------------------------------------------------

bool counterexample_validity(std::ostream& d) {
  const auto t0 = Clock::now();
  const auto a = obstruction::counterexample_m2_3();
  require(a.is_exact() && a.n() == 3 && a.s() == 2, "not an exact n = 3, s = 2 square");
  require(validate_magic(a).ok, "validate_magic failed");
  for (std::size_t k = 0; k < 9; ++k)
    require(psd_check_exact(a.exact(k / 3, k % 3)).is_psd, "block " + std::to_string(k) + " not PSD");
  for (std::size_t i = 0; i < 3; ++i) {
    ExactMatrix row(2, 2), col(2, 2);
    for (std::size_t j = 0; j < 3; ++j) {
      row += a.exact(i, j);
      col += a.exact(j, i);
    }
    require(row == ExactMatrix::identity(2) && col == ExactMatrix::identity(2), "sum identity fails");
  }
  const double t = seconds_since(t0);
  d << "9 blocks PSD, 6 sums exact, " << std::fixed << std::setprecision(3) << t << " s";
  return t < 1.0;
}

bool separation(std::ostream& d) {
  const auto a = obstruction::counterexample_m2_3();
  const auto t0 = Clock::now();
  const auto r = obstruction::check_mconv_obstruction(a, obstruction::Mode::Strong);
  require(r.verdict == Verdict::No, "strong verdict is " + std::string(to_string(r.verdict)));
  const auto p = obstruction::build_obstruction(a, obstruction::Mode::Strong);
  const auto y = obstruction::find_dual_certificate(p);
  const auto cert = obstruction::exact_certify(y.y, p);
  const double search = seconds_since(t0);
  require(sgn(cert.pairing_b0.re()) < 0 && cert.pairing_b0.is_real(), "tr(Y B0) not negative");
  for (const auto& x : cert.pairings) require(x.is_zero(), "tr(Y B_j) nonzero");

  const fs::path path = fs::temp_directory_path() / "qms_acceptance_certificate.json";
  json::Json j = json::encode(cert);
  j["square"] = json::encode(static_cast<const BlockArray&>(a));
  json::write_file(path, j);
  const auto t1 = Clock::now();
  const int code = cli_run({"verify-certificate", path.string()});
  const double verify = seconds_since(t1);
  require(code == cli::kAffirmative, "verify-certificate exit code " + std::to_string(code));
  const int shipped = cli_run({"verify-certificate", std::string(QMS_TEST_DATA) + "/counterexample.strong.certificate.json"});
  require(shipped == cli::kAffirmative, "shipped certificate rejected");
  d << "tr(Y B0) ~ " << std::scientific << std::setprecision(3) << cert.pairing_b0.re().get_d() << " exact, search "
    << std::fixed << std::setprecision(2) << search << " s, verify " << verify << " s";
  return search < 60.0 && verify < 5.0;
}

bool induction_step(std::ostream& d) {
  const auto a = obstruction::counterexample_m2_3();
  const auto padded = embed_pad(a);
  const auto r = obstruction::check_mconv_obstruction(padded, obstruction::Mode::Strong);
  require(r.verdict == Verdict::No, "padded verdict is " + std::string(to_string(r.verdict)));
  std::mt19937 rng(101);
  std::normal_distribution<double> g;
  const CMatrix w = obstruction::pad_compression(4, 2);
  const auto gens = obstruction::z_hermitian_basis(4);
  const auto herm = hermitian_basis(2);
  const CMatrix phi = obstruction::phi_numeric(a), phi_pad = obstruction::phi_numeric(padded);
  double worst = 0.0;
  for (int trial = 0; trial < 20; ++trial) {
    CMatrix xp = CMatrix::Zero(32, 32);
    for (const auto& z1 : gens)
      for (const auto& z2 : gens)
        for (const auto& h : herm) xp += g(rng) * kron(kron(to_complex(z1), to_complex(z2)), to_complex(h));
    const CMatrix x = w.adjoint() * xp * w;
    worst = std::max(worst, (w.adjoint() * (phi_pad + xp) * w - (phi + x)).norm());
  }
  d << "padded n = 4: no; compression residual " << std::scientific << std::setprecision(2) << worst;
  return worst <= 1e-9;
}

bool mode_equivalence(std::ostream& d) {
  std::mt19937 rng(61);
  const auto ce = obstruction::counterexample_m2_3();
  int yes = 0, no = 0;
  for (int trial = 0; trial < 20; ++trial) {
    const std::size_t s = 1 + trial % 2;
    QuantumMagicSquare a = constant_square(3, s);
    if (s == 2 && trial % 4 == 1) {
      a = mix(ce, constant_square(3, 2), 0.002 * static_cast<double>(trial / 4));
    } else {
      a = fixtures::random_classical_mixture(rng, 3, s);
      if (s == 2 && trial % 4 == 3) a = mix(ce, a, 0.001);
    }
    const auto weak = obstruction::check_mconv_obstruction(a, obstruction::Mode::Weak).verdict;
    const auto strong = obstruction::check_mconv_obstruction(a, obstruction::Mode::Strong).verdict;
    require(weak != Verdict::Inconclusive && weak == strong, "instance " + std::to_string(trial) + ": weak " +
                                                                std::string(to_string(weak)) + ", strong " +
                                                                std::string(to_string(strong)));
    yes += strong == Verdict::Yes;
    no += strong == Verdict::No;
  }
  d << "20/20 agree (" << yes << " yes, " << no << " no)";
  return true;
}

bool semiclassical_ball(std::ostream& d) {
  const auto t0 = Clock::now();
  std::mt19937 rng(7);
  int done = 0, rejected = 0;
  while (done < 100) {
    const auto a = perturbed_constant(rng);
    if (!a) {
      ++rejected;
      continue;
    }
    const auto dec = semiclassical::interior_map_decomposition(*a);
    require(dec.is_exact() && dec.reconstruct().exact_blocks() == a->exact_blocks(), "reconstruction not exact");
    require(semiclassical::verify_positive_unital_map(dec, *a).ok, "closed-form weights not a positive unital map");
    const auto r = semiclassical::check_semiclassical(*a);
    require(r.verdict == Verdict::Yes, "check_semiclassical says " + std::string(to_string(r.verdict)));
    ++done;
  }
  const double t = seconds_since(t0);
  d << "100 squares (" << rejected << " resampled), " << std::fixed << std::setprecision(1) << t << " s";
  return t < 120.0;
}

bool cross_pipeline(std::ostream& d) {
  const auto a = obstruction::counterexample_m2_3();
  const auto r = semiclassical::check_semiclassical(a);
  require(r.verdict == Verdict::No && r.dual, "check_semiclassical verdict " + std::string(to_string(r.verdict)));
  require(sdp::verify_dual(semiclassical::build_semiclassical_lmi(a), *r.dual, 1e-7), "LMI dual does not verify");
  const auto p = obstruction::build_obstruction(a, obstruction::Mode::Strong);
  const auto cert = obstruction::exact_certify(obstruction::find_dual_certificate(p).y, p);
  require(obstruction::verify_certificate(cert, a).ok, "obstruction certificate does not verify");
  d << "LMI dual pairing " << std::scientific << std::setprecision(3) << r.sdp.diagnostics.dual_pairing
    << ", exact obstruction certificate verified";
  return true;
}

bool dilation_soundness(std::ostream& d) {
  std::mt19937 rng(43);
  double worst = 0.0;
  for (int trial = 0; trial < 50; ++trial) {
    const std::size_t n = 2 + trial % 2, s = 1 + (trial / 2) % 2;
    const auto dec = random_exact_decomposition(rng, n, s);
    const QuantumMagicSquare a(dec.reconstruct());
    require(semiclassical::verify_positive_unital_map(dec, a).ok, "sum_pi p_ij^pi q_pi != a_ij exactly");
    const auto dil = semiclassical::synthesize_commuting_dilation(dec);
    require(validate_quantum_permutation(dil.u).ok && max_commutator(dil.u) == 0.0, "dilation not a commuting QPM");
    worst = std::max(worst, max_block_distance(compress(dil.u.to_float(), dil.v), a));
  }
  d << "50 decompositions, compression residual " << std::scientific << std::setprecision(2) << worst;
  return worst <= 1e-10;
}

bool birkhoff_suite(std::ostream& d) {
  std::mt19937 rng(1000);
  std::uniform_int_distribution<std::size_t> size(1, 6), count(1, 8);
  std::uniform_int_distribution<long> weight(1, 30);
  std::size_t most = 0;
  for (int trial = 0; trial < 1000; ++trial) {
    const std::size_t n = size(rng);
    std::vector<Rational> entries(n * n);
    std::vector<long> w(count(rng));
    for (auto& x : w) x = weight(rng);
    const long total = std::accumulate(w.begin(), w.end(), 0l);
    for (long x : w) {
      std::vector<std::size_t> img(n);
      std::iota(img.begin(), img.end(), 0);
      std::shuffle(img.begin(), img.end(), rng);
      for (std::size_t i = 0; i < n; ++i) entries[i * n + img[i]] += Rational(x, total);
    }
    for (auto& e : entries) e.canonicalize();
    const birkhoff::DoublyStochasticMatrix m(n, entries);
    const auto terms = birkhoff::decompose(m);
    require(birkhoff::reconstruct(terms, n) == entries, "inexact reconstruction");
    require(terms.size() <= (n - 1) * (n - 1) + 1, "too many terms");
    most = std::max(most, terms.size());
  }
  for (std::size_t n = 1; n <= 5; ++n)
    require(birkhoff::magic_space_dimension(n) == (n - 1) * (n - 1) + 1, "dimension wrong at n = " + std::to_string(n));
  d << "1000 exact decompositions (max " << most << " terms), dimensions (n-1)^2+1 for n = 1..5";
  return true;
}

CMatrix random_projector(std::mt19937& rng, std::size_t s, std::size_t rank) {
  const CMatrix q = fixtures::random_unitary(rng, s);
  const auto r = static_cast<Eigen::Index>(rank);
  return q.leftCols(r) * q.leftCols(r).adjoint();
}

CMatrix random_contraction(std::mt19937& rng, std::size_t t, double lo, double hi) {
  std::uniform_real_distribution<double> u(lo, hi);
  const CMatrix q = fixtures::random_unitary(rng, t);
  RVector lam(static_cast<Eigen::Index>(t));
  for (auto& x : lam) x = u(rng);
  return q * lam.asDiagonal() * q.adjoint();
}

extremality::DilationTriple rotated(std::mt19937& rng, const CMatrix& u, const CMatrix& p, const CMatrix& r) {
  const auto s = u.rows(), t = s + p.rows();
  CMatrix w(t, t);
  w << u, r, r.adjoint(), p;
  const CMatrix q = fixtures::random_unitary(rng, static_cast<std::size_t>(t));
  return {u, q * w * q.adjoint(), q.leftCols(s)};
}

bool split_suite(std::ostream& d) {
  std::mt19937 rng(17);
  std::uniform_int_distribution<std::size_t> size(1, 4);
  std::normal_distribution<double> g;
  std::uniform_real_distribution<double> mag(-6.0, -1.0);
  double worst = 0.0;
  for (int trial = 0; trial < 200; ++trial) {
    const std::size_t s = size(rng), e = size(rng);
    const CMatrix u = random_projector(rng, s, trial % (s + 1));
    const CMatrix p = trial % 2 ? random_contraction(rng, e, 0.0, 1.0) : random_projector(rng, e, trial % (e + 1));
    const auto r = extremality::split_decompose(rotated(rng, u, p, CMatrix::Zero(static_cast<Eigen::Index>(s), static_cast<Eigen::Index>(e))));
    require(r.split, "genuine dilation did not split");
    worst = std::max(worst, r.residual);
  }
  int flagged = 0;
  for (int trial = 0; trial < 200; ++trial) {
    const std::size_t s = 1 + trial % 3, e = 1 + trial % 2;
    CMatrix r(static_cast<Eigen::Index>(s), static_cast<Eigen::Index>(e));
    for (auto& x : r.reshaped()) x = {g(rng), g(rng)};
    r *= std::pow(10.0, mag(rng)) / r.norm();
    const CMatrix u = random_projector(rng, s, 1 + trial % s);
    const CMatrix p = random_contraction(rng, e, 0.1, 0.9);
    try {
      flagged += !extremality::split_decompose(rotated(rng, u, p, r)).split;
    } catch (const Error& err) {
      flagged += err.code() == ErrorCode::InvariantViolated;
    }
  }
  d << "genuine residual " << std::scientific << std::setprecision(2) << worst << ", adversarial flagged " << flagged << "/200";
  return worst <= 1e-10 && flagged == 200;
}

bool extension_pipeline(std::ostream& d) {
  std::mt19937 rng(29);
  double worst_row = 0.0, worst_c = 0.0;
  for (int done = 0; done < 20;) {
    const auto dec = fixtures::random_classical_decomposition(rng, 3, 2);
    const QuantumMagicSquare a(dec.reconstruct());
    const CMatrix a11 = a.numeric(0, 0);
    if (sdp::herm_eig(a11 - a11 * a11).values(0) < 1e-3) continue;
    const auto dil = semiclassical::synthesize_commuting_dilation(dec);
    const CMatrix x = obstruction::mconv_witness(dil.u, dil.v);
    const auto step = extremality::extend_dilation_step(a, x);
    require(step.extended.s() == 3 && validate_magic(step.extended, 1e-8).ok, "A' fails validation");
    for (double v : step.row_sums) worst_row = std::max(worst_row, v);
    for (double v : step.column_sums) worst_row = std::max(worst_row, v);
    for (double v : step.c) worst_c = std::min(worst_c, v);
    ++done;
  }
  d << "20 extensions to s = 3, max s_i*/s_*j " << std::fixed << std::setprecision(6) << worst_row << ", min c_ij "
    << std::scientific << std::setprecision(2) << worst_c;
  return worst_row <= 1 + 1e-10 && worst_c >= -1e-12;
}

}  // namespace

int main() {
  const std::vector<Criterion> criteria{
      {1, "counterexample validity (exact)", counterexample_validity},
      {2, "separation at n = 3, s = 2", separation},
      {3, "induction step", induction_step},
      {4, "weak/strong mode equivalence", mode_equivalence},
      {5, "semiclassical ball", semiclassical_ball},
      {6, "cross-pipeline consistency", cross_pipeline},
      {7, "dilation soundness", dilation_soundness},
      {8, "Birkhoff decompositions", birkhoff_suite},
      {9, "dilation splitting property suite", split_suite},
      {10, "dilation extension pipeline", extension_pipeline},
  };
  int failed = 0;
  for (const auto& c : criteria) {
    std::ostringstream detail;
    bool ok = false;
    const auto t0 = Clock::now();
    try {
      ok = c.run(detail);
    } catch (const Failure& f) {
      detail << f.what;
    } catch (const std::exception& e) {
      detail << "exception: " << e.what();
    }
    failed += !ok;
    std::cout << (ok ? "PASS" : "FAIL") << "  [" << std::setw(2) << c.id << "] " << c.title << " (" << std::fixed
              << std::setprecision(2) << seconds_since(t0) << " s): " << detail.str() << std::endl;
  }
  std::cout << (criteria.size() - static_cast<std::size_t>(failed)) << "/" << criteria.size() << " criteria passed" << std::endl;
  return failed == 0 ? 0 : 1;
}
