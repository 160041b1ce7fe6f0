// Acceptance suite: one PASS/FAIL line per criterion.
//
//   moire_ssh_acceptance        run all criteria
//   moire_ssh_acceptance N      run criterion N only
//
// Exit status is 0 only when every selected criterion passes.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <complex>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <functional>
#include <map>
#include <numbers>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include <Eigen/Dense>
#include <unistd.h>

#include "moire_ssh/entanglement.hpp"
#include "moire_ssh/errors.hpp"
#include "moire_ssh/model.hpp"
#include "moire_ssh/scaling.hpp"
#include "moire_ssh/spectral.hpp"
#include "moire_ssh/sweep.hpp"
#include "moire_ssh/topology.hpp"

using namespace moire_ssh;
using cd = std::complex<double>;

namespace {

constexpr double kPi = std::numbers::pi;

struct Outcome {
  bool pass = true;
  std::string detail;
};

std::string fmt(const char* f, auto... args) {
  char buf[512];
  std::snprintf(buf, sizeof buf, f, args...);
  return buf;
}

void fail(Outcome& o, const std::string& why) {
  o.pass = false;
  if (!o.detail.empty()) o.detail += "; ";
  o.detail += why;
}

void note(Outcome& o, const std::string& what) {
  if (!o.detail.empty()) o.detail += "; ";
  o.detail += what;
}

ModelParams params(double eps, double j2, double m_o, int a = 32) { return {eps, j2, m_o, 3, 7, a}; }

std::filesystem::path work_dir() {
  static const auto dir = [] {
    auto d = std::filesystem::temp_directory_path() / ("moire_ssh_acceptance_" + std::to_string(::getpid()));
    std::filesystem::create_directories(d);
    return d;
  }();
  return dir;
}

std::string slurp(const std::filesystem::path& p) {
  std::ifstream f(p, std::ios::binary);
  std::ostringstream s;
  s << f.rdbuf();
  return s.str();
}

// Columns of a CSV written by the sweep runners (first line is the config).
std::map<std::string, std::vector<std::string>> read_csv(const std::filesystem::path& p) {
  std::ifstream f(p);
  std::string line;
  std::getline(f, line);
  std::getline(f, line);
  std::vector<std::string> names;
  for (std::stringstream ss(line); std::getline(ss, line, ',');) names.push_back(line);
  std::map<std::string, std::vector<std::string>> cols;
  while (std::getline(f, line)) {
    std::stringstream ss(line);
    std::string cell;
    for (const auto& n : names) {
      std::getline(ss, cell, ',');
      cols[n].push_back(cell);
    }
  }
  return cols;
}

// Roots of J2 z^2 + w z + v inside the unit circle: the winding of the
// scalar m_o = 0 block q(k) = v + w e^{-ik} + J2 e^{-2ik}.
int roots_inside(double eps, double j2) {
  const double v = 1 + eps, w = 1 - eps;
  if (j2 == 0.0) return (w != 0.0 && std::abs(v) < std::abs(w)) ? 1 : 0;
  const cd disc = std::sqrt(cd(w * w - 4 * j2 * v));
  int n = 0;
  for (const cd z : {(-w + disc) / (2 * j2), (-w - disc) / (2 * j2)}) n += std::abs(z) < 1 ? 1 : 0;
  return n;
}

// ---------------------------------------------------------------------------

Outcome criterion1() {
  Outcome o;
  const int n = 101;
  const double de = 2.0 / (n - 1), dj = 3.0 / (n - 1);
  // a eps + b J2 + c = 0, distance measured in grid cells.
  const double lines[3][3] = {{0, 1, -2}, {2, 1, 0}, {1, -1, 1}};
  int compared = 0, mismatched = 0;
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < n; ++j) {
      const double eps = -1 + de * i, j2 = dj * j;
      bool near = false;
      for (const auto& l : lines) {
        const double d = std::abs(l[0] * eps + l[1] * j2 + l[2]) / std::hypot(l[0] * de, l[1] * dj);
        near = near || d <= 1.0;
      }
      if (near) continue;
      ++compared;
      const int expect = roots_inside(eps, j2);
      const long got = std::lround(scalar_winding(eps, j2));
      int cls = -1;
      try {
        cls = m0_zero_boundaries(eps, j2).nu;
      } catch (const Error&) {
      }
      if (got != expect || cls != expect) {
        if (mismatched++ < 3) fail(o, fmt("(%.2f, %.2f): winding %ld, class %d, oracle %d", eps, j2, got, cls, expect));
      }
    }
  }
  note(o, fmt("%d of %d off-line cells compared, %d mismatched", compared, n * n, mismatched));
  if (mismatched > 0) o.pass = false;
  return o;
}

Outcome criterion2() {
  Outcome o;
  const auto roots = analytic_boundary_w0(1.6, 3, 7, {0.0, 3.0});
  const auto numeric = numeric_boundary(1.0, 1.6, 3, 7, {0.0, 3.0}, {.tol = 1e-5});
  std::string all;
  for (const double r : roots) all += fmt(" %.6f", r);
  note(o, "analytic roots" + all);
  for (const double target : {1.1283, 2.5685}) {
    double best = INFINITY, root = NAN;
    for (const double r : roots) {
      if (std::abs(r - target) < best) best = std::abs(r - target), root = r;
    }
    if (!(best <= 5e-4)) {
      fail(o, fmt("no analytic root within 5e-4 of %.4f", target));
      continue;
    }
    double nb = INFINITY, nroot = NAN;
    for (const auto& bp : numeric) {
      if (std::abs(bp.m_o_critical - root) < nb) nb = std::abs(bp.m_o_critical - root), nroot = bp.m_o_critical;
    }
    note(o, fmt("%.4f: analytic %.6f, numeric %.6f", target, root, nroot));
    if (!(nb <= 1e-3)) fail(o, fmt("numeric boundary %.6f vs analytic %.6f", nroot, root));
  }
  return o;
}

Outcome criterion3() {
  Outcome o;
  const auto prefix = (work_dir() / "reentrant").string();
  const auto cfg = parse_config(R"({"task":"cut","model":{"epsilon":0.3,"j2":1.27,"A":32,
      "m_o":{"min":0,"max":3,"steps":301}},"numeric":{"observables":["nu_real","nu_k","gaps"]},
      "output":{"prefix":")" + prefix + R"("}})");
  const auto summary = run_cut(cfg, {});
  auto cols = read_csv(summary.files.at(0));
  const auto& m = cols["m_o"];
  const auto& nu = cols["nu_real"];
  std::vector<long> seq;
  std::vector<double> jumps;
  long prev = 0;
  for (std::size_t i = 0; i < nu.size(); ++i) {
    const long r = std::lround(std::stod(nu[i]));
    if (i == 0 || r != prev) {
      seq.push_back(r);
      if (i > 0) jumps.push_back(0.5 * (std::stod(m[i]) + std::stod(m[i - 1])));
    }
    prev = r;
  }
  std::string s, js, sk;
  for (const long x : seq) s += (s.empty() ? "" : "-") + std::to_string(x);
  for (const double j : jumps) js += fmt(" %.3f", j);
  // The momentum-space column, for reference only.
  long prev_k = -1;
  for (const auto& x : cols["nu_k"]) {
    const long r = std::lround(std::stod(x));
    if (r != prev_k) sk += (sk.empty() ? "" : "-") + std::to_string(r);
    prev_k = r;
  }
  note(o, "nu_real sequence " + s + ", jumps at" + js + " (nu_k sequence " + sk + ")");
  if (seq != std::vector<long>{0, 2, 1, 2, 1, 0}) fail(o, "expected 0-2-1-2-1-0");
  for (const double target : {0.2790, 1.6774, 2.3580}) {
    double best = INFINITY;
    for (const double j : jumps) best = std::min(best, std::abs(j - target));
    if (!(best <= 0.02)) fail(o, fmt("no jump within 0.02 of %.4f", target));
  }
  return o;
}

Outcome criterion4() {
  Outcome o;
  struct Case {
    double eps, j2, m_o;
    int expect;
  };
  for (const auto c : {Case{1, 1.6, 1.5, 4}, Case{0.3, 1.27, 0.7, 4}, Case{0.3, 1.27, 1.2, 2}}) {
    const auto p = params(c.eps, c.j2, c.m_o);
    const int zero = zero_mode_count(eigenvalues(build_hamiltonian(p, Boundary::Open)), 1e-6);
    const auto corr = ground_state_correlation(p, Boundary::Periodic);
    const int mid = midgap_degeneracy(entanglement_spectrum(corr, p.cells() / 2).zetas, 1e-3);
    const int nu = momentum_winding(p).value;
    note(o, fmt("(%.1f, %.2f, %.1f): zero modes %d, midgap %d, 2 nu %d", c.eps, c.j2, c.m_o, zero, mid, 2 * nu));
    if (zero != 2 * nu || mid != 2 * nu || 2 * nu != c.expect) o.pass = false;
  }
  return o;
}

struct Transition {
  double eps, j2, approx;
};

const std::vector<Transition>& transitions() {
  static const std::vector<Transition> t = {
      {1.0, 1.6, 1.1283}, {1.0, 1.6, 2.5685}, {0.3, 1.27, 0.2790}, {0.3, 1.27, 1.6774}, {0.3, 1.27, 2.3580}};
  return t;
}

double locate(const Transition& t) {
  const auto found = critical_points(t.eps, t.j2, 3, 7, {t.approx - 0.05, t.approx + 0.05});
  if (found.size() != 1) throw std::runtime_error(fmt("expected one transition near %.4f", t.approx));
  return found.front().m_o_critical;
}

Outcome criterion5() {
  Outcome o;
  const std::vector<int> sizes{8, 16, 32, 64};
  for (const auto& t : transitions()) {
    try {
      const double m_oc = locate(t);
      const auto tmpl = params(t.eps, t.j2, 0.0);
      const auto mu = power_law_exponent(pseudo_critical_offsets(tmpl, m_oc, sizes));
      const auto z = gap_exponent(critical_gaps(tmpl, m_oc, sizes));
      note(o, fmt("%.4f: mu %.4f (r2 %.5f), z %.4f (r2 %.5f)", m_oc, exponent(mu), mu.r_squared, exponent(z),
                  z.r_squared));
      for (const auto* f : {&mu, &z}) {
        const double e = exponent(*f);
        if (!(e >= 0.9 && e <= 1.1 && f->r_squared >= 0.99)) o.pass = false;
      }
    } catch (const std::exception& e) {
      fail(o, fmt("%.4f: %s", t.approx, e.what()));
    }
  }
  return o;
}

Outcome criterion6() {
  Outcome o;
  const std::vector<int> sizes{16, 32, 64, 128};
  const double target[] = {2, 2, 2, 1, 1};
  for (std::size_t i = 0; i < transitions().size(); ++i) {
    const auto& t = transitions()[i];
    try {
      const double m_oc = locate(t);
      const auto p = params(t.eps, t.j2, m_oc, 128);
      const auto by_l = central_charge_vs_l(entropy_vs_bipartition(p, default_bipartitions(p)), p.cells());
      const auto by_L = central_charge_vs_L(half_chain_entropies(params(t.eps, t.j2, 0.0), m_oc, sizes));
      const double cl = central_charge(by_l), cL = central_charge(by_L);
      const double se = 2.0 * (central_charge_stderr(by_l) + central_charge_stderr(by_L));
      note(o, fmt("%.4f: c(l) %.4f +- %.4f, c(L) %.4f +- %.4f", m_oc, cl, central_charge_stderr(by_l), cL,
                  central_charge_stderr(by_L)));
      if (!(std::abs(cl - target[i]) <= 0.1)) fail(o, fmt("c(l) %.4f not within 0.1 of %g", cl, target[i]));
      if (!(std::abs(cl - cL) <= se)) fail(o, fmt("|c(l) - c(L)| = %.4f exceeds %.4f", std::abs(cl - cL), se));
    } catch (const std::exception& e) {
      fail(o, fmt("%.4f: %s", t.approx, e.what()));
    }
  }
  return o;
}

// q(k) from the definition and its k derivative, for the trace integral.
void q_pair(double eps, double j2, double m_o, double k, Eigen::MatrixXcd& q, Eigen::MatrixXcd& dq) {
  const int n = 21;
  const double v = 1 + eps, w = 1 - eps;
  q.setZero(n, n);
  dq.setZero(n, n);
  for (int i = 0; i < n; ++i) {
    const double th = k + 2 * kPi * i / n;
    const cd e1 = std::exp(cd(0, -th)), e2 = std::exp(cd(0, -2 * th));
    q(i, i) += v + w * e1 + j2 * e2;
    dq(i, i) = cd(0, -1) * (w * e1 + 2 * j2 * e2);
    for (const int s : {3, 7}) {
      q(i, (i + s) % n) += m_o / 2;
      q(i, (i + n - s) % n) += m_o / 2;
    }
  }
}

double trace_winding(double eps, double j2, double m_o, int n_k) {
  const double width = 2 * kPi / 21;
  Eigen::MatrixXcd q, dq;
  cd sum = 0;
  for (int i = 0; i < n_k; ++i) {
    q_pair(eps, j2, m_o, width * i / n_k, q, dq);
    sum += q.partialPivLu().solve(dq).trace();
  }
  return -(sum * (width / n_k)).imag() / (2 * kPi);
}

Outcome criterion7() {
  Outcome o;
  std::mt19937_64 rng(20240611);
  std::uniform_real_distribution<double> u(0, 1);
  auto draw = [&] { return params(2 * u(rng) - 1, 3 * u(rng), 3 * u(rng)); };

  // (a) Off-boundary: the momentum winding is the same at m_o and m_o +- 0.02.
  int a_done = 0, a_bad = 0;
  double a_worst = 0;
  while (a_done < 50) {
    const auto p = draw();
    try {
      const int nu = momentum_winding(p).value;
      if (momentum_winding(p.with_m_o(p.m_o() - 0.02)).value != nu ||
          momentum_winding(p.with_m_o(p.m_o() + 0.02)).value != nu) {
        continue;
      }
      const double d = std::abs(real_space_winding(p).value - nu);
      a_worst = std::max(a_worst, d);
      if (!(d <= 0.1)) {
        if (a_bad++ < 3) fail(o, fmt("(a) (%.3f, %.3f, %.3f) differs by %.3f", p.epsilon(), p.j2(), p.m_o(), d));
      }
      ++a_done;
    } catch (const Error&) {
    }
  }
  note(o, fmt("(a) 50 points, worst |real - k| %.2e", a_worst));
  if (a_bad) o.pass = false;

  // (b) PBC spectrum against the union of Bloch bands on the commensurate k grid.
  double b_worst = 0;
  std::vector<ModelParams> pts{params(0.4, 1.3, 0.0, 8)};
  for (int i = 0; i < 5; ++i) pts.push_back(params(2 * u(rng) - 1, 3 * u(rng), 0.05 + 3 * u(rng), 8));
  for (const auto& p : pts) {
    const Eigen::VectorXd e = eigenvalues(build_hamiltonian(p, Boundary::Periodic));
    std::vector<double> bands;
    for (int n = 0; n < p.supercells(); ++n) {
      const auto h = build_bloch(p, 2 * kPi * n / p.cells());
      const Eigen::VectorXd b = Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd>(h.matrix).eigenvalues();
      bands.insert(bands.end(), b.begin(), b.end());
    }
    std::sort(bands.begin(), bands.end());
    for (Eigen::Index i = 0; i < e.size(); ++i) b_worst = std::max(b_worst, std::abs(e(i) - bands[i]));
  }
  note(o, fmt("(b) max band mismatch %.2e", b_worst));
  if (!(b_worst <= 1e-10)) fail(o, "(b) band union mismatch");

  // (c) Det phase winding against the trapezoidal trace integral.
  int c_done = 0, c_bad = 0;
  while (c_done < 20) {
    const auto p = draw();
    try {
      const auto nu = momentum_winding(p);
      const long tr = std::lround(trace_winding(p.epsilon(), p.j2(), p.m_o(), 4 * nu.n_k));
      if (tr != nu.value) {
        if (c_bad++ < 3) fail(o, fmt("(c) (%.3f, %.3f, %.3f): %d vs %ld", p.epsilon(), p.j2(), p.m_o(), nu.value, tr));
      }
      ++c_done;
    } catch (const Error&) {
    }
  }
  note(o, fmt("(c) 20 points, %d disagree", c_bad));
  if (c_bad) o.pass = false;

  // (d) Zeros of the inverse localization length, found by minimizing it on
  // a grid and refining, against the closed-form roots.
  for (const double j2 : {1.0, 1.6, 2.2}) {
    auto inv = [&](double m) { return inverse_localization_length(params(1.0, j2, m)).inverse; };
    std::vector<double> zeros;
    const double h = 1e-3;
    for (double m = h; m < 3.0 - h / 2; m += h) {
      if (!(inv(m) <= inv(m - h) && inv(m) < inv(m + h))) continue;
      double lo = m - h, hi = m + h;  // golden section on the bracket
      const double g = (std::sqrt(5.0) - 1) / 2;
      while (hi - lo > 1e-12) {
        const double x1 = hi - g * (hi - lo), x2 = lo + g * (hi - lo);
        if (inv(x1) < inv(x2)) {
          hi = x2;
        } else {
          lo = x1;
        }
      }
      const double z = 0.5 * (lo + hi);
      if (inv(z) < 1e-6) zeros.push_back(z);
    }
    std::vector<double> roots;
    try {
      roots = analytic_boundary_w0(j2, 3, 7, {0.0, 3.0});
    } catch (const EmptyRange&) {
    }
    bool same = zeros.size() == roots.size();
    for (std::size_t i = 0; same && i < roots.size(); ++i) same = std::abs(zeros[i] - roots[i]) <= 1e-6;
    note(o, fmt("(d) J2 = %.1f: %zu zeros, %zu roots", j2, zeros.size(), roots.size()));
    if (!same) fail(o, fmt("(d) J2 = %.1f zero set differs", j2));
  }
  return o;
}

Outcome criterion8() {
  Outcome o;
  double worst_sym = 0, worst_comp = 0, min_s = INFINITY;
  auto block_entropy = [](const CorrelationMatrix& c, int first, int cells) {
    const Eigen::MatrixXd sub = c.matrix.block(2 * first, 2 * first, 2 * cells, 2 * cells);
    const Eigen::VectorXd z = Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd>(sub, Eigen::EigenvaluesOnly).eigenvalues();
    return entanglement_entropy(std::vector<double>(z.begin(), z.end()));
  };
  // m_o = 0 is translation invariant, so S(l) = S(L - l) for every l.
  const auto flat = ground_state_correlation(params(0.3, 1.27, 0.0, 4), Boundary::Periodic);
  for (int l = 1; l < 84; ++l) {
    const double s = entanglement_spectrum(flat, l).entropy;
    worst_sym = std::max(worst_sym, std::abs(s - entanglement_spectrum(flat, 84 - l).entropy));
    min_s = std::min(min_s, s);
  }
  // With the moire pattern the identity holds for whole supercells and, for
  // any l, between a block and its complement.
  for (const auto& p : {params(0.3, 1.27, 1.2, 4), params(1.0, 1.6, 1.5, 4), params(-0.4, 0.7, 2.1, 4)}) {
    const auto c = ground_state_correlation(p, Boundary::Periodic);
    const int L = p.cells();
    for (int l = 1; l < L; ++l) {
      const double s = entanglement_spectrum(c, l).entropy;
      min_s = std::min(min_s, s);
      worst_comp = std::max(worst_comp, std::abs(s - block_entropy(c, l, L - l)));
      if (l % 21 == 0) worst_sym = std::max(worst_sym, std::abs(s - entanglement_spectrum(c, L - l).entropy));
    }
  }
  note(o, fmt("S(l) - S(L-l) %.1e, block vs complement %.1e, min S %.2e", worst_sym, worst_comp, min_s));
  if (!(worst_sym <= 1e-8 && worst_comp <= 1e-8)) fail(o, "complementarity violated");
  if (!(min_s >= 0)) fail(o, "negative entropy");

  const double ln2 = std::numbers::ln2;
  double worst_closed = 0;
  for (int n = 0; n <= 8; ++n) {
    std::vector<double> z(n, 0.5);
    z.insert(z.end(), {0.0, 1.0, 0.0, 1.0});
    worst_closed = std::max(worst_closed, std::abs(entanglement_entropy(z) - n * ln2));
  }
  const double p = 0.2;
  worst_closed = std::max(worst_closed, std::abs(entanglement_entropy(std::vector<double>{p, 0.5}) -
                                                 (ln2 - p * std::log(p) - (1 - p) * std::log(1 - p))));
  note(o, fmt("closed forms %.1e", worst_closed));
  if (!(worst_closed <= 1e-12)) fail(o, "closed-form entropy mismatch");
  return o;
}

// Runs a config through the CLI when it was built, else through the library.
std::vector<std::filesystem::path> run_once(const std::string& config, const std::string& format,
                                            const std::string& tag, int workers) {
  const auto dir = work_dir() / tag;
  std::filesystem::create_directories(dir);
  const auto prefix = (dir / "out").string();
  std::string text = config;
  text.insert(text.rfind('}'), R"(,"output":{"prefix":")" + prefix + R"(","format":")" + format + R"("})");
#ifdef MOIRE_SSH_CLI
  const auto cfg_path = dir / "config.json";
  std::ofstream(cfg_path) << text;
  const std::string cmd = std::string("\"") + MOIRE_SSH_CLI + "\" " + to_string(parse_config(text).task) +
                          " --config \"" + cfg_path.string() + "\" --workers " + std::to_string(workers) +
                          " > /dev/null";
  if (std::system(cmd.c_str()) != 0) throw std::runtime_error("CLI run failed: " + cmd);
  std::vector<std::filesystem::path> files;
  for (const auto& e : std::filesystem::directory_iterator(dir)) {
    if (e.path().filename() != "config.json") files.push_back(e.path());
  }
  std::sort(files.begin(), files.end());
  return files;
#else
  return run_sweep(parse_config(text), {.workers = workers}).files;
#endif
}

Outcome criterion9() {
  Outcome o;
  const std::vector<std::pair<std::string, std::string>> configs = {
      {R"({"task":"cut","model":{"epsilon":0.3,"j2":1.27,"A":4,"m_o":{"min":0,"max":3,"steps":13}}})", "csv"},
      {R"({"task":"phase-diagram","model":{"epsilon":{"min":-0.5,"max":1,"steps":4},"j2":1.6,"A":2,
          "m_o":{"min":0,"max":3,"steps":5}},"numeric":{"overlay":true,"observables":["nu_real","nu_k","gaps","entropy"]}})",
       "json"},
      {R"({"task":"boundary","model":{"epsilon":0.3,"j2":1.27,"A":2,"m_o":{"min":0,"max":3,"steps":2}}})", "csv"},
      {R"({"task":"entanglement","model":{"epsilon":1,"j2":1.6,"m_o":1.5,"A":4}})", "csv"},
      {R"({"task":"spectrum","model":{"epsilon":1,"j2":1.6,"m_o":1.5,"A":2}})", "json"},
  };
  int compared = 0;
  for (std::size_t i = 0; i < configs.size(); ++i) {
    const auto tag = "det" + std::to_string(i);
    const auto& [cfg, format] = configs[i];
    const auto a = run_once(cfg, format, tag + "_a", 1);
    const auto b = run_once(cfg, format, tag + "_b", 1);
    const auto c = run_once(cfg, format, tag + "_c", 8);
    if (a.size() != b.size() || a.size() != c.size() || a.empty()) {
      fail(o, tag + ": different file sets");
      continue;
    }
    for (std::size_t f = 0; f < a.size(); ++f) {
      const auto ta = slurp(a[f]);
      if (ta != slurp(b[f])) fail(o, a[f].filename().string() + " differs between repeated runs");
      if (ta != slurp(c[f])) fail(o, a[f].filename().string() + " differs between 1 and 8 workers");
      ++compared;
    }
  }
  note(o, fmt("%d output files compared across 3 runs each", compared));
  return o;
}

}  // namespace

int main(int argc, char** argv) {
  const std::vector<std::pair<const char*, std::function<Outcome()>>> criteria = {
      {"m_o = 0 phase diagram matches the analytic lines", criterion1},
      {"w = 0 analytic and numeric boundaries", criterion2},
      {"reentrant sequence along the epsilon = 0.3 cut", criterion3},
      {"bulk-boundary correspondence", criterion4},
      {"critical exponents mu and z", criterion5},
      {"central charge", criterion6},
      {"oracle equivalence", criterion7},
      {"entropy sanity", criterion8},
      {"sweep determinism", criterion9},
  };
  int only = 0;
  if (argc > 1) {
    only = std::atoi(argv[1]);
    if (only < 1 || only > static_cast<int>(criteria.size())) {
      std::fprintf(stderr, "usage: %s [1-%zu]\n", argv[0], criteria.size());
      return 2;
    }
  }
  bool all = true;
  for (std::size_t i = 0; i < criteria.size(); ++i) {
    if (only && static_cast<int>(i) + 1 != only) continue;
    const auto t0 = std::chrono::steady_clock::now();
    Outcome o;
    try {
      o = criteria[i].second();
    } catch (const std::exception& e) {
      fail(o, std::string("exception: ") + e.what());
    }
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    std::printf("%s criterion %zu (%s) [%.1f s]: %s\n", o.pass ? "PASS" : "FAIL", i + 1, criteria[i].first, secs,
                o.detail.c_str());
    std::fflush(stdout);
    all = all && o.pass;
  }
  std::error_code ec;
  std::filesystem::remove_all(work_dir(), ec);
  return all ? 0 : 1;
}
