#include "moire_ssh/topology.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <numbers>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "moire_ssh/eigen_lapack.hpp"
#include "moire_ssh/errors.hpp"

namespace moire_ssh {

namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;
// Ambiguous Fermi-level states may touch the trace window at most this much.
// Any choice among them moves the winding by O(leak). Edge pairs split by
// less than 1e-12 still leak ~1e-6 near a transition, hence not tighter.
constexpr double kWindowLeakTol = 1e-4;
constexpr double kRootTol = 1e-10;

struct Window {
  int first_cell;  // 0-based
  int cells;
};

Window central_window(int cells) {
  const int width = cells / 2;
  if (width < 1) throw std::invalid_argument("real_space_winding: chain too short");
  return {cells / 4, width};
}

// lower: N x m block whose first L columns are the occupied (lowest) states.
// fermi_gap: E_{L+1} - E_L.
WindingReal winding_from_lower_states(const Eigen::VectorXd& lower_energies,
                                      const Eigen::MatrixXd& lower, double fermi_gap) {
  const auto n = lower.rows();
  const int cells = static_cast<int>(n / 2);
  const Window win = central_window(cells);
  const int first_site = 2 * win.first_cell;
  const int window_sites = 2 * win.cells;
  const auto occupied = lower.leftCols(cells);

  if (fermi_gap <= kFermiDegeneracyGap) {
    const double e_fermi = lower_energies(cells - 1);
    for (int i = 0; i < cells; ++i) {
      if (std::abs(lower_energies(i) - e_fermi) > kFermiDegeneracyGap) continue;
      const double leak = occupied.col(i).segment(first_site, window_sites).squaredNorm();
      if (leak > kWindowLeakTol) {
        throw FermiDegeneracy("real_space_winding: degenerate Fermi level with bulk weight " +
                              std::to_string(leak));
      }
    }
  }

  // P = S - C S C with S = U U^T over occupied states, so P_ij = 2 S_ij
  // between opposite sublattices and 0 otherwise. Then
  // (C P [P, X])_ii = c_i sum_j P_ij P_ji (x_i - x_j).
  const Eigen::MatrixXd s_rows = occupied.middleRows(first_site, window_sites) * occupied.transpose();
  double trace = 0.0;
  for (int r = 0; r < window_sites; ++r) {
    const int i = first_site + r;
    const double c_i = (i % 2 == 0) ? 1.0 : -1.0;
    const double x_i = static_cast<double>(i / 2 + 1);
    double acc = 0.0;
    for (Eigen::Index j = 1 - (i % 2); j < n; j += 2) {
      const double s = s_rows(r, j);
      acc += 4.0 * s * s * (x_i - static_cast<double>(j / 2 + 1));
    }
    trace += c_i * acc;
  }
  // Normalized per traced diagonal element (2 L' sites).
  return {trace / window_sites, win.cells};
}

// det q(k) as (log |det|, unit phase factor), robust against overflow for
// large supercells.
struct PolarDet {
  double log_abs;
  std::complex<double> phase;
};

PolarDet polar_det(const ModelParams& params, double k) {
  const Eigen::PartialPivLU<Eigen::MatrixXcd> lu(q_block(params, k));
  const auto& packed = lu.matrixLU();
  double log_abs = 0.0;
  std::complex<double> phase = static_cast<double>(lu.permutationP().determinant());
  for (Eigen::Index i = 0; i < packed.rows(); ++i) {
    const std::complex<double> u = packed(i, i);
    const double a = std::abs(u);
    if (a == 0.0) return {-std::numeric_limits<double>::infinity(), 1.0};
    log_abs += std::log(a);
    phase *= u / a;
  }
  return {log_abs, phase};
}

}  // namespace

WindingReal real_space_winding(const SpectrumResult& obc) {
  if (obc.boundary != Boundary::Open) {
    throw std::invalid_argument("real_space_winding: needs an open-boundary spectrum");
  }
  if (obc.states.cols() != obc.energies.size()) {
    throw std::invalid_argument("real_space_winding: spectrum has no eigenvectors");
  }
  const int cells = obc.cells();
  return winding_from_lower_states(obc.energies, obc.states,
                                   obc.energies(cells) - obc.energies(cells - 1));
}

WindingReal real_space_winding(const ModelParams& params) {
  const auto h = build_hamiltonian(params, Boundary::Open);
  const auto lower = lapack::chiral_lowest(lapack::chiral_block(h.matrix));
  return real_space_winding_lowest(lower.values, lower.vectors);
}

WindingReal real_space_winding_lowest(const Eigen::VectorXd& energies, const Eigen::MatrixXd& states) {
  if (states.rows() % 2 != 0 || states.cols() != states.rows() / 2 || energies.size() != states.cols()) {
    throw std::invalid_argument("real_space_winding_lowest: need the lowest L of 2L eigenpairs");
  }
  // Chiral symmetry: E_{L+1} = -E_L.
  return winding_from_lower_states(energies, states, -2.0 * energies(energies.size() - 1));
}

double winding_derivative(const ModelParams& params, double step) {
  if (!(step > 0.0)) throw std::invalid_argument("winding_derivative: step must be positive");
  const double up = real_space_winding(params.with_m_o(params.m_o() + step)).value;
  const double down = real_space_winding(params.with_m_o(params.m_o() - step)).value;
  return (up - down) / (2.0 * step);
}

int default_k_points(const ModelParams& params) noexcept { return 64 * params.a12(); }

// Close to a crossing det q turns by about pi over a k interval that shrinks
// with the distance to the crossing. Intervals whose phase step exceeds pi/2
// are bisected until resolved, so the winding stays defined until det q
// itself falls below the closure threshold.
std::optional<int> momentum_winding_or_closure(const ModelParams& params, int n_k) {
  try {
    return momentum_winding(params, n_k).value;
  } catch (const GapClosure&) {
    return std::nullopt;
  } catch (const ResolutionError&) {
  }
  constexpr int kMaxDepth = 48;
  const double width = reduced_zone_width(params);
  std::vector<PolarDet> path;
  path.reserve(static_cast<std::size_t>(n_k) + 1);
  double max_log = -INFINITY;
  for (int i = 0; i <= n_k; ++i) {
    path.push_back(polar_det(params, width * i / n_k));
    max_log = std::max(max_log, path.back().log_abs);
  }
  const double closure_log = max_log + std::log(kGapClosureDet);
  bool closed = false;
  std::function<double(double, const PolarDet&, double, const PolarDet&, int)> turn =
      [&](double k0, const PolarDet& d0, double k1, const PolarDet& d1, int depth) -> double {
    const double step = std::arg(d1.phase * std::conj(d0.phase));
    if (std::abs(step) <= 0.5 * std::numbers::pi || closed) return step;
    if (depth == kMaxDepth) {
      closed = true;
      return step;
    }
    const double km = 0.5 * (k0 + k1);
    const PolarDet dm = polar_det(params, km);
    if (dm.log_abs < closure_log) {
      closed = true;
      return step;
    }
    return turn(k0, d0, km, dm, depth + 1) + turn(km, dm, k1, d1, depth + 1);
  };
  double phase = 0.0;
  for (std::size_t i = 1; i < path.size() && !closed; ++i) {
    phase += turn(width * (i - 1) / n_k, path[i - 1], width * i / n_k, path[i], 0);
  }
  if (closed) return std::nullopt;
  const double accumulated = -phase / kTwoPi;
  const double rounded = std::round(accumulated);
  if (std::abs(accumulated - rounded) >= 0.01) return std::nullopt;
  return static_cast<int>(rounded);
}

WindingMomentum momentum_winding(const ModelParams& params) {
  return momentum_winding(params, default_k_points(params));
}

WindingMomentum momentum_winding(const ModelParams& params, int n_k) {
  if (n_k < default_k_points(params)) {
    throw std::invalid_argument("momentum_winding: n_k = " + std::to_string(n_k) +
                                " below the 64 * a12 floor");
  }
  const double width = reduced_zone_width(params);
  // Sample the whole path first so that a closure wins over a phase jump.
  std::vector<PolarDet> path;
  path.reserve(static_cast<std::size_t>(n_k) + 1);
  double min_log = INFINITY, max_log = -INFINITY;
  for (int i = 0; i <= n_k; ++i) {
    path.push_back(polar_det(params, width * i / n_k));
    min_log = std::min(min_log, path.back().log_abs);
    max_log = std::max(max_log, path.back().log_abs);
  }
  if (min_log - max_log < std::log(kGapClosureDet)) {
    throw GapClosure("momentum_winding: min |det q| = " + std::to_string(std::exp(min_log)) +
                     " below threshold");
  }
  double phase = 0.0;
  for (std::size_t i = 1; i < path.size(); ++i) {
    const double step = std::arg(path[i].phase * std::conj(path[i - 1].phase));
    if (std::abs(step) > 0.5 * std::numbers::pi) {
      throw ResolutionError("momentum_winding: phase step " + std::to_string(step) +
                            " exceeds pi/2; increase n_k");
    }
    phase += step;
  }
  const double accumulated = -phase / kTwoPi;
  const double rounded = std::round(accumulated);
  if (std::abs(accumulated - rounded) >= 0.01) {
    throw ResolutionError("momentum_winding: accumulated phase not quantized");
  }
  return {static_cast<int>(rounded), n_k, accumulated, std::exp(min_log)};
}

std::complex<double> det_q(const ModelParams& params, double k) {
  const PolarDet d = polar_det(params, k);
  return std::exp(d.log_abs) * d.phase;
}

std::vector<DetSample> det_q_path(const ModelParams& params, int n_k) {
  if (n_k < 2) throw std::invalid_argument("det_q_path: n_k must be >= 2");
  const double width = reduced_zone_width(params);
  std::vector<DetSample> path;
  path.reserve(static_cast<std::size_t>(n_k));
  for (int i = 0; i < n_k; ++i) {
    const double k = width * i / (n_k - 1);
    path.push_back({k, det_q(params, k)});
  }
  return path;
}

double renormalized_v(const ModelParams& params) {
  double log_sum = 0.0;
  for (const double vj : intracell_hoppings(params)) {
    if (vj == 0.0) return 0.0;
    log_sum += std::log(std::abs(vj));
  }
  return std::exp(log_sum / params.a12());
}

std::vector<double> analytic_boundary_w0(double j2, int a1, int a2, Interval range, double epsilon) {
  if (epsilon != 1.0) throw std::invalid_argument("analytic_boundary_w0: requires epsilon = 1 (w = 0)");
  if (!(j2 > 0.0)) throw std::invalid_argument("analytic_boundary_w0: requires J2 > 0");
  if (!(range.hi > range.lo)) throw std::invalid_argument("analytic_boundary_w0: empty interval");

  const ModelParams base(epsilon, j2, 0.0, a1, a2, 1);
  const double log_j2 = std::log(j2);
  auto g = [&](double m_o) {
    const double vt = renormalized_v(base.with_m_o(m_o));
    return vt == 0.0 ? -std::numeric_limits<double>::infinity() : std::log(vt) - log_j2;
  };

  const int intervals = static_cast<int>(std::ceil((range.hi - range.lo) / 1e-3));
  const double h = (range.hi - range.lo) / intervals;
  std::vector<double> roots;
  double a = range.lo;
  double ga = g(a);
  for (int i = 1; i <= intervals; ++i) {
    const double b = (i == intervals) ? range.hi : range.lo + h * i;
    const double gb = g(b);
    if (ga == 0.0) {
      roots.push_back(a);
    } else if ((ga < 0.0) != (gb < 0.0) && gb != 0.0) {
      double lo = a, hi = b, glo = ga;
      while (hi - lo > kRootTol) {
        const double mid = 0.5 * (lo + hi);
        const double gm = g(mid);
        if ((gm < 0.0) == (glo < 0.0)) {
          lo = mid;
          glo = gm;
        } else {
          hi = mid;
        }
      }
      roots.push_back(0.5 * (lo + hi));
    }
    a = b;
    ga = gb;
  }
  if (ga == 0.0) roots.push_back(a);
  if (roots.empty()) throw EmptyRange("analytic_boundary_w0: no root of ln v~ = ln J2 in range");
  return roots;
}

LocalizationLength inverse_localization_length(const ModelParams& params) {
  if (params.epsilon() != 1.0) {
    throw std::invalid_argument("inverse_localization_length: requires epsilon = 1 (w = 0)");
  }
  if (params.j2() == 0.0) throw std::invalid_argument("inverse_localization_length: J2 = 0");
  const double vt = renormalized_v(params);
  if (vt == 0.0) return {std::numeric_limits<double>::infinity(), true};
  return {std::abs(std::log(vt) - std::log(std::abs(params.j2()))), false};
}

std::vector<BoundaryPoint> numeric_boundary(double epsilon, double j2, int a1, int a2, Interval range,
                                            const NumericBoundaryOptions& options) {
  if (!(options.tol > 0.0)) throw std::invalid_argument("numeric_boundary: tol must be positive");
  if (!(options.scan_step > 0.0)) throw std::invalid_argument("numeric_boundary: scan_step must be positive");
  if (!(range.hi > range.lo)) throw std::invalid_argument("numeric_boundary: empty interval");

  const ModelParams base(epsilon, j2, 0.0, a1, a2, 1);
  const int n_k = options.n_k > 0 ? options.n_k : default_k_points(base);
  auto eval = [&](double m_o) { return momentum_winding_or_closure(base.with_m_o(m_o), n_k); };

  std::vector<BoundaryPoint> points;
  // Bisect [a, b] with nu(a) = nu_a != nu_b = nu(b). A third value at the
  // midpoint means two transitions inside the bracket; split and recurse.
  std::function<void(double, int, double, int)> bisect = [&](double a, int nu_a, double b, int nu_b) {
    while (b - a > options.tol) {
      const double mid = 0.5 * (a + b);
      const auto nu_mid = eval(mid);
      if (!nu_mid) {
        points.push_back({mid, j2, epsilon, nu_a, nu_b});
        return;
      }
      if (*nu_mid == nu_a) {
        a = mid;
      } else if (*nu_mid == nu_b) {
        b = mid;
      } else {
        bisect(a, nu_a, mid, *nu_mid);
        bisect(mid, *nu_mid, b, nu_b);
        return;
      }
    }
    points.push_back({0.5 * (a + b), j2, epsilon, nu_a, nu_b});
  };

  const int steps = std::max(1, static_cast<int>(std::ceil((range.hi - range.lo) / options.scan_step)));
  std::optional<double> last_m;
  int last_nu = 0;
  for (int i = 0; i <= steps; ++i) {
    const double m_o = (i == steps) ? range.hi : range.lo + (range.hi - range.lo) * i / steps;
    const auto nu = eval(m_o);
    if (!nu) continue;
    if (last_m && *nu != last_nu) bisect(*last_m, last_nu, m_o, *nu);
    last_m = m_o;
    last_nu = *nu;
  }
  std::sort(points.begin(), points.end(),
            [](const BoundaryPoint& x, const BoundaryPoint& y) { return x.m_o_critical < y.m_o_critical; });
  return points;
}

double scalar_winding(double epsilon, double j2, int n_k) {
  const double v = 1.0 + epsilon;
  const double w = 1.0 - epsilon;
  auto q = [&](double k) {
    return v + w * std::exp(std::complex<double>(0.0, -k)) + j2 * std::exp(std::complex<double>(0.0, -2.0 * k));
  };
  double phase = 0.0;
  std::complex<double> prev = q(0.0);
  for (int i = 1; i <= n_k; ++i) {
    const std::complex<double> cur = q(kTwoPi * i / n_k);
    phase += std::arg(cur / prev);
    prev = cur;
  }
  return -phase / kTwoPi;
}

M0Classification m0_zero_boundaries(double epsilon, double j2) {
  constexpr double kLineTol = 1e-9;
  const double d_k0 = std::abs(j2 + 2.0);
  const double d_kpi = std::abs(2.0 * epsilon + j2) / std::sqrt(5.0);
  double d_kstar = std::numeric_limits<double>::infinity();
  // The third line is a gap closing only where cos k* = (epsilon - 1) / 2 J2
  // has a real solution.
  if (j2 != 0.0 && std::abs((epsilon - 1.0) / (2.0 * j2)) <= 1.0) {
    d_kstar = std::abs(epsilon + 1.0 - j2) / std::sqrt(2.0);
  }
  if (std::min({d_k0, d_kpi, d_kstar}) < kLineTol) {
    throw OnBoundary("m0_zero_boundaries: (epsilon, J2) lies on an m_o = 0 gap-closing line");
  }
  const double raw = scalar_winding(epsilon, j2, 4096);
  return {static_cast<int>(std::lround(raw)), raw};
}

}  // namespace moire_ssh
