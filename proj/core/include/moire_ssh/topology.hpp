#pragma once

// Winding numbers, the w = 0 analytic phase boundary, localization length
// and numerically located phase boundaries.
//
// Sign convention: q(k) ~ e^{-ik}, so the raw contour integral of
// Tr[q^-1 dq/dk] is negative in the topological phases. Every winding
// reported here is the negated integral, giving nu = +1 / +2.

#include <complex>
#include <optional>
#include <vector>

#include "moire_ssh/model.hpp"
#include "moire_ssh/spectral.hpp"

namespace moire_ssh {

struct Interval {
  double lo;
  double hi;
};

struct WindingReal {
  double value;
  int L_prime;  // number of unit cells in the central trace window
};

struct WindingMomentum {
  int value;
  int n_k;
  double accumulated;  // negated phase / 2 pi before rounding
  double min_abs_det;
};

struct BoundaryPoint {
  double m_o_critical;
  double j2;
  double epsilon;
  int nu_before;
  int nu_after;
};

struct DetSample {
  double k;
  std::complex<double> det;
};

struct LocalizationLength {
  double inverse;  // Lambda^-1; +infinity when singular
  bool singular;   // some v_j is exactly zero
};

struct M0Classification {
  int nu;
  double winding;  // unrounded scalar winding
};

struct NumericBoundaryOptions {
  double tol = 1e-4;        // final bracket width
  double scan_step = 0.01;  // initial m_o grid
  int n_k = 0;              // 0 selects 64 * a12
};

// Closure threshold on min |det q| relative to max |det q| along the path;
// det q scales like a power a12 of the hoppings, so an absolute floor would not.
inline constexpr double kGapClosureDet = 1e-10;

/// Real-space winding number from the half-filled OBC ground state,
/// traced over the middle L/2 unit cells.
///
/// A degenerate Fermi level is tolerated only when the ambiguous states
/// (edge modes) carry negligible weight inside the trace window, because
/// the result is then independent of the choice; otherwise FermiDegeneracy.
WindingReal real_space_winding(const ModelParams& params);
WindingReal real_space_winding(const SpectrumResult& obc);
/// Same from the lowest L eigenpairs of the OBC Hamiltonian (ascending).
WindingReal real_space_winding_lowest(const Eigen::VectorXd& energies, const Eigen::MatrixXd& states);

/// Central difference of the real-space winding in m_o.
double winding_derivative(const ModelParams& params, double step = 1e-3);

/// 64 * a12, the minimum k resolution accepted by momentum_winding.
int default_k_points(const ModelParams& params) noexcept;

/// Momentum-space winding from the unwrapped phase of det q(k) over the
/// reduced zone. Throws GapClosure when min |det q| / max |det q| < 1e-10 and
/// ResolutionError for a phase step above pi/2.
WindingMomentum momentum_winding(const ModelParams& params, int n_k);
WindingMomentum momentum_winding(const ModelParams& params);

/// Momentum winding that adaptively refines the k grid wherever the phase
/// step exceeds pi/2; nullopt when det q closes (relative to its maximum,
/// below 1e-10) on the path, i.e. the point is on a phase boundary.
std::optional<int> momentum_winding_or_closure(const ModelParams& params, int n_k);

std::complex<double> det_q(const ModelParams& params, double k);

/// n_k samples of det q(k) on [0, 2 pi / a12], both endpoints included.
std::vector<DetSample> det_q_path(const ModelParams& params, int n_k);

/// Geometric mean of |v + m_j| over one supercell; 0 if any factor vanishes.
double renormalized_v(const ModelParams& params);

/// Roots of ln v~(m_o) = ln J2 inside `range` (w = 0 only). Throws EmptyRange
/// when no sign change is found.
std::vector<double> analytic_boundary_w0(double j2, int a1, int a2, Interval range,
                                         double epsilon = 1.0);

/// |ln v~ - ln J2| for the decoupled w = 0 zero-mode recursion.
LocalizationLength inverse_localization_length(const ModelParams& params);

/// Winding jumps along m_o, each bisected to width <= options.tol. A grid
/// point that raises GapClosure is treated as lying inside a bracket.
std::vector<BoundaryPoint> numeric_boundary(double epsilon, double j2, int a1, int a2,
                                            Interval range, const NumericBoundaryOptions& options = {});

/// Two-band (m_o = 0) classification. Throws OnBoundary within 1e-9 of one
/// of the gap-closing lines J2 = -2 (k = 0), J2 = -2 epsilon (k = pi) or
/// J2 = 1 + epsilon (k = arccos[(epsilon - 1) / 2 J2]).
M0Classification m0_zero_boundaries(double epsilon, double j2);

/// Negated phase winding of the scalar q(k) = v + w e^{-ik} + J2 e^{-2ik}.
double scalar_winding(double epsilon, double j2, int n_k = 4096);

}  // namespace moire_ssh
