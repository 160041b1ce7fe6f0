#include "moire_ssh/scaling.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <optional>
#include <stdexcept>
#include <string>

#include "moire_ssh/entanglement.hpp"
#include "moire_ssh/errors.hpp"
#include "moire_ssh/parallel.hpp"
#include "moire_ssh/spectral.hpp"

namespace moire_ssh {

namespace {

constexpr double kCriticalNudge = 1e-9;

void require_increasing_positive(std::span<const ScalePoint> pts, const char* what) {
  if (pts.size() < 3) throw std::invalid_argument(std::string(what) + ": need at least 3 points");
  for (std::size_t i = 0; i < pts.size(); ++i) {
    if (!(pts[i].x > 0.0)) throw std::invalid_argument(std::string(what) + ": sizes must be positive");
    if (i > 0 && !(pts[i].x > pts[i - 1].x)) {
      throw std::invalid_argument(std::string(what) + ": sizes must be strictly increasing");
    }
  }
}

ScalingFit log_log_fit(std::span<const ScalePoint> pts, const char* what) {
  require_increasing_positive(pts, what);
  std::vector<ScalePoint> logged;
  logged.reserve(pts.size());
  for (const auto& p : pts) {
    if (!(p.y > 0.0)) {
      throw NonPositiveDelta(std::string(what) + ": value " + std::to_string(p.y) + " at size " +
                             std::to_string(p.x) + " is not positive");
    }
    logged.push_back({std::log(p.x), std::log(p.y)});
  }
  return fit_line(logged);
}

template <typename Fn>
PeakSearch peak_over_grid(Fn&& nu_at, Interval window, double step, int workers) {
  if (!(step > 0.0)) throw std::invalid_argument("pseudo_critical_point: step must be positive");
  if (!(window.hi > window.lo)) throw std::invalid_argument("pseudo_critical_point: empty window");
  const auto intervals = static_cast<std::size_t>(std::floor((window.hi - window.lo) / step + 1e-9));
  if (intervals < 4) throw std::invalid_argument("pseudo_critical_point: window holds fewer than 5 grid points");

  const auto nu = parallel_map(intervals + 1, workers,
                               [&](std::size_t i) { return nu_at(window.lo + step * static_cast<double>(i)); });

  PeakSearch out{0.0, {}};
  out.derivative.reserve(intervals - 1);
  std::size_t best = 1;
  double best_abs = -1.0;
  for (std::size_t i = 1; i < intervals; ++i) {
    const double d = (nu[i + 1] - nu[i - 1]) / (2.0 * step);
    out.derivative.push_back({window.lo + step * static_cast<double>(i), d});
    if (std::abs(d) > best_abs) {
      best_abs = std::abs(d);
      best = i;
    }
  }
  if (best == 1 || best == intervals - 1) {
    throw NoPeak("pseudo_critical_point: |d nu / d m_o| is largest at the window edge");
  }
  const double y0 = std::abs(out.derivative[best - 2].y);
  const double y1 = std::abs(out.derivative[best - 1].y);
  const double y2 = std::abs(out.derivative[best].y);
  const double curvature = y0 - 2.0 * y1 + y2;
  const double shift = curvature != 0.0 ? 0.5 * (y0 - y2) / curvature : 0.0;
  out.location = window.lo + step * (static_cast<double>(best) + shift);
  return out;
}

// At a transition the PBC chain can hold an exactly degenerate zero-energy
// pair, and which combination half filling occupies flips with the sign of
// m_o - m_oc. Entropies are therefore the mean of the two one-sided limits;
// away from a degeneracy both sides agree to O(nudge).
std::vector<double> two_sided_entropies(const ModelParams& params, std::span<const int> ls) {
  std::vector<double> mean(ls.size(), 0.0);
  for (const double side : {-kCriticalNudge, kCriticalNudge}) {
    const auto c = ground_state_correlation(params.with_m_o(params.m_o() + side), Boundary::Periodic);
    const auto s = entropy_profile(c, ls);
    for (std::size_t i = 0; i < ls.size(); ++i) mean[i] += 0.5 * s[i];
  }
  return mean;
}

}  // namespace

ScalingFit fit_line(std::span<const ScalePoint> points) {
  const auto n = points.size();
  if (n < 2) throw FitError("fit_line: need at least 2 points");
  double mx = 0.0, my = 0.0;
  for (const auto& p : points) {
    mx += p.x;
    my += p.y;
  }
  mx /= static_cast<double>(n);
  my /= static_cast<double>(n);
  double sxx = 0.0, sxy = 0.0, syy = 0.0;
  for (const auto& p : points) {
    sxx += (p.x - mx) * (p.x - mx);
    sxy += (p.x - mx) * (p.y - my);
    syy += (p.y - my) * (p.y - my);
  }
  if (sxx == 0.0) throw FitError("fit_line: all x coordinates coincide");
  const double slope = sxy / sxx;
  const double intercept = my - slope * mx;
  double sse = 0.0;
  for (const auto& p : points) {
    const double r = p.y - (slope * p.x + intercept);
    sse += r * r;
  }
  const double stderr_slope =
      n > 2 ? std::sqrt(sse / static_cast<double>(n - 2) / sxx) : std::numeric_limits<double>::infinity();
  const double r2 = syy > 0.0 ? 1.0 - sse / syy : 1.0;
  return {slope, intercept, stderr_slope, r2, {points.begin(), points.end()}};
}

ScalingFit power_law_exponent(std::span<const ScalePoint> size_delta) {
  return log_log_fit(size_delta, "power_law_exponent");
}

ScalingFit gap_exponent(std::span<const ScalePoint> size_gap) { return log_log_fit(size_gap, "gap_exponent"); }

ScalingFit central_charge_vs_L(std::span<const ScalePoint> size_entropy) {
  require_increasing_positive(size_entropy, "central_charge_vs_L");
  std::vector<ScalePoint> pts;
  for (const auto& p : size_entropy) pts.push_back({std::log(p.x / std::numbers::pi), p.y});
  return fit_line(pts);
}

ScalingFit central_charge_vs_l(std::span<const ScalePoint> l_entropy, int cells) {
  if (l_entropy.size() < 3) throw std::invalid_argument("central_charge_vs_l: need at least 3 points");
  std::vector<ScalePoint> pts;
  for (const auto& p : l_entropy) {
    if (!(p.x > 0.0 && p.x < cells)) throw std::invalid_argument("central_charge_vs_l: l outside (0, L)");
    const double chord = (cells / std::numbers::pi) * std::sin(std::numbers::pi * p.x / cells);
    pts.push_back({std::log(chord), p.y});
  }
  return fit_line(pts);
}

PeakSearch pseudo_critical_point(const std::function<double(double)>& nu, Interval window, double step) {
  return peak_over_grid(nu, window, step, 1);
}

PeakSearch pseudo_critical_point(const ModelParams& tmpl, Interval window, double step) {
  return peak_over_grid([&](double m_o) { return real_space_winding(tmpl.with_m_o(m_o)).value; }, window,
                        step, 1);
}

std::vector<ScalePoint> pseudo_critical_offsets(const ModelParams& tmpl, double m_oc,
                                                std::span<const int> supercells,
                                                const PseudoCriticalOptions& options) {
  // A taller derivative peak from a neighbouring transition would capture
  // the search, so windows stay within half the distance to it.
  double cap = std::numeric_limits<double>::infinity();
  const double reach = 8.0 * options.first_half_width;
  for (const auto& bp : numeric_boundary(tmpl.epsilon(), tmpl.j2(), tmpl.a1(), tmpl.a2(),
                                         {m_oc - reach, m_oc + reach})) {
    const double d = std::abs(bp.m_o_critical - m_oc);
    if (d > 1e-3) cap = std::min(cap, 0.5 * d);
  }

  std::vector<ScalePoint> out;
  double prev_offset = 0.0;
  double prev_cells = 0.0;
  for (const int a : supercells) {
    const ModelParams sized = tmpl.with_supercells(a);
    const double cells = sized.cells();
    const double step = std::min(options.max_step, 0.5 / cells);
    double center = m_oc;
    double half = options.first_half_width;
    if (!out.empty()) {
      const double predicted = prev_offset * prev_cells / cells;
      center = m_oc + predicted;
      half = 0.5 * std::abs(predicted) + 4.0 / cells;
    }
    half = std::min(half, cap);
    auto nu_at = [&](double m_o) { return real_space_winding(sized.with_m_o(m_o)).value; };
    std::optional<PeakSearch> peak;
    for (int attempt = 0; attempt < 4 && !peak; ++attempt) {
      try {
        peak = peak_over_grid(nu_at, {center - half, center + half}, step, options.workers);
      } catch (const NoPeak&) {
        if (attempt == 3 || half >= cap) throw;
        half = std::min(2.0 * half, cap);
      }
    }
    prev_offset = peak->location - m_oc;
    prev_cells = cells;
    out.push_back({cells, std::abs(prev_offset)});
  }
  return out;
}

std::vector<ScalePoint> critical_gaps(const ModelParams& tmpl, double m_oc, std::span<const int> supercells,
                                      int workers) {
  return parallel_map(supercells.size(), workers, [&](std::size_t i) {
    const ModelParams p = tmpl.with_supercells(supercells[i]).with_m_o(m_oc);
    const auto gaps = energy_gaps(eigenvalues(build_hamiltonian(p, Boundary::Open)));
    return ScalePoint{static_cast<double>(p.cells()), gaps.delta_e2};
  });
}

std::vector<ScalePoint> half_chain_entropies(const ModelParams& tmpl, double m_oc,
                                             std::span<const int> supercells, int workers) {
  return parallel_map(supercells.size(), workers, [&](std::size_t i) {
    const ModelParams p = tmpl.with_supercells(supercells[i]).with_m_o(m_oc);
    const int half[] = {p.cells() / 2};
    return ScalePoint{static_cast<double>(p.cells()), two_sided_entropies(p, half).front()};
  });
}

std::vector<ScalePoint> entropy_vs_bipartition(const ModelParams& params, std::span<const int> ls) {
  const auto s = two_sided_entropies(params, ls);
  std::vector<ScalePoint> out;
  out.reserve(ls.size());
  for (std::size_t i = 0; i < ls.size(); ++i) out.push_back({static_cast<double>(ls[i]), s[i]});
  return out;
}

std::vector<BoundaryPoint> critical_points(double epsilon, double j2, int a1, int a2, Interval range, int n_k,
                                           double scan_step) {
  auto found = numeric_boundary(epsilon, j2, a1, a2, range, {.tol = 1e-10, .scan_step = scan_step, .n_k = n_k});
  if (epsilon != 1.0 || !(j2 > 0.0) || found.empty()) return found;
  std::vector<double> roots;
  try {
    roots = analytic_boundary_w0(j2, a1, a2, range);
  } catch (const EmptyRange&) {
    return found;
  }
  for (auto& bp : found) {
    const auto it = std::min_element(roots.begin(), roots.end(), [&](double a, double b) {
      return std::abs(a - bp.m_o_critical) < std::abs(b - bp.m_o_critical);
    });
    if (std::abs(*it - bp.m_o_critical) < 1e-6) bp.m_o_critical = *it;
  }
  return found;
}

std::vector<int> default_bipartitions(const ModelParams& params) {
  const int cells = params.cells();
  const int a12 = params.a12();
  std::vector<int> ls;
  for (int l = a12; l <= cells / 2; l += a12) {
    if (8 * l >= cells) ls.push_back(l);
  }
  return ls;
}

}  // namespace moire_ssh
