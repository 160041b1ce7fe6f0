#pragma once

// Finite-size scaling: pseudo-critical points from the peak of d nu / d m_o,
// power-law exponents (mu, z) and the CFT central charge from entropy fits.

#include <functional>
#include <span>
#include <vector>

#include "moire_ssh/model.hpp"
#include "moire_ssh/topology.hpp"

namespace moire_ssh {

struct ScalePoint {
  double x;
  double y;
};

/// Ordinary least squares y = slope x + intercept. `points` holds the
/// coordinates that were actually fitted (e.g. ln L, ln delta).
struct ScalingFit {
  double slope;
  double intercept;
  double stderr_slope;
  double r_squared;
  std::vector<ScalePoint> points;
};

/// Unweighted OLS line; needs >= 3 points for a finite stderr.
ScalingFit fit_line(std::span<const ScalePoint> points);

/// ln delta against ln L for (L, delta) input; mu = -slope.
ScalingFit power_law_exponent(std::span<const ScalePoint> size_delta);
/// ln Delta E2 against ln L; z = -slope.
ScalingFit gap_exponent(std::span<const ScalePoint> size_gap);
/// S(L/2) against ln(L / pi); c = 3 slope.
ScalingFit central_charge_vs_L(std::span<const ScalePoint> size_entropy);
/// S(l) against ln[(L / pi) sin(pi l / L)] at fixed L; c = 3 slope, c'_1 = intercept.
ScalingFit central_charge_vs_l(std::span<const ScalePoint> l_entropy, int cells);

inline double exponent(const ScalingFit& fit) { return -fit.slope; }
inline double central_charge(const ScalingFit& fit) { return 3.0 * fit.slope; }
inline double central_charge_stderr(const ScalingFit& fit) { return 3.0 * fit.stderr_slope; }

struct PeakSearch {
  double location;
  std::vector<ScalePoint> derivative;  // (m_o, d nu / d m_o) on the grid interior
};

/// Peak of |d nu / d m_o| over a uniform grid on `window`, central
/// differences, refined by a three-point parabola. Throws NoPeak when the
/// maximum sits on the window edge.
PeakSearch pseudo_critical_point(const std::function<double(double)>& nu, Interval window, double step);

/// Same with nu = real-space winding of `tmpl` (its supercell count sets L).
PeakSearch pseudo_critical_point(const ModelParams& tmpl, Interval window, double step);

struct PseudoCriticalOptions {
  double max_step = 2e-3;
  double first_half_width = 0.2;  // scan half-width for the smallest size
  int workers = 1;
};

/// Thermodynamic critical points m_oc on `range`, bisected to 1e-10. At
/// epsilon = 1 each is replaced by the nearest closed-form root when that
/// root lies within 1e-6.
std::vector<BoundaryPoint> critical_points(double epsilon, double j2, int a1, int a2, Interval range,
                                           int n_k = 0, double scan_step = 0.01);

/// (L, |m_oc^(L) - m_oc|) for each supercell count, smallest first. Each
/// window after the first is centred on the 1/L extrapolation of the
/// previous offset. No window reaches past the midpoint to a neighbouring
/// transition.
std::vector<ScalePoint> pseudo_critical_offsets(const ModelParams& tmpl, double m_oc,
                                                std::span<const int> supercells,
                                                const PseudoCriticalOptions& options = {});

/// (L, Delta E2) of the OBC chain at m_oc.
std::vector<ScalePoint> critical_gaps(const ModelParams& tmpl, double m_oc, std::span<const int> supercells,
                                      int workers = 1);

/// (L, S(L/2)) of the half-filled PBC ground state at m_oc, averaged over
/// m_oc -+ 1e-9 so that a zero-mode degeneracy at m_oc is resolved
/// symmetrically.
std::vector<ScalePoint> half_chain_entropies(const ModelParams& tmpl, double m_oc,
                                             std::span<const int> supercells, int workers = 1);

/// (l, S(l)) of the PBC ground state of `params` for each l, averaged over
/// m_o -+ 1e-9 like half_chain_entropies.
std::vector<ScalePoint> entropy_vs_bipartition(const ModelParams& params, std::span<const int> ls);

/// Whole-supercell bipartitions l = a12, 2 a12, ... spanning [L/8, L/2];
/// S(l) = S(L - l) makes the other half redundant.
std::vector<int> default_bipartitions(const ModelParams& params);

}  // namespace moire_ssh
